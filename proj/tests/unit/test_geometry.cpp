#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "skcone/geometry.hpp"

using namespace skcone;

namespace {

const CVec kStuBase = oracle::cvec({1.0, cplx(0, 1), cplx(0, 1), cplx(0, 1)});

std::vector<CVec> stu_points(std::uint64_t seed, int count, double radius = 0.2) {
  std::mt19937_64 rng(seed);
  std::vector<CVec> pts;
  for (int s = 0; s < count; ++s) pts.push_back(kStuBase + oracle::random_point(rng, 4, radius / 2));
  return pts;
}

double rel_diff(const RMat& a, const RMat& b) { return (a - b).norm() / (1.0 + b.norm()); }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("potential of the fubini-study prepotential is |z|^2") {
  std::mt19937_64 rng(1);
  for (int n : {1, 2, 3, 4}) {
    const auto ast = parse_prepotential(
        n == 1 ? "i*z0^2" : n == 2 ? "i*(z0^2+z1^2)" : n == 3 ? "i*(z0^2+z1^2+z2^2)" : "i*(z0^2+z1^2+z2^2+z3^2)", n);
    for (int s = 0; s < 5; ++s) {
      const CVec z = oracle::random_point(rng, n);
      CHECK(std::abs(kahler_potential(ast, z) - oracle::fs_k(z)) <= 1e-12 * (1 + oracle::fs_k(z)));
      CHECK(kahler_potential(ast, CVec(2.0 * z)) == doctest::Approx(4.0 * kahler_potential(ast, z)).epsilon(1e-13));
    }
  }
}

TEST_CASE("stu potential matches the direct formula") {
  const auto ast = parse_prepotential("z1*z2*z3/z0", 4);
  const double k = kahler_potential(ast, kStuBase);
  CHECK(k == doctest::Approx(oracle::k_from_gradient(kStuBase, oracle::stu_grad(kStuBase))).epsilon(1e-14));
  CHECK(k == doctest::Approx(2.0).epsilon(1e-14));
  for (const auto& z : stu_points(2, 10, 0.5)) {
    const double ref = oracle::k_from_gradient(z, oracle::stu_grad(z));
    CHECK(std::abs(kahler_potential(ast, z) - ref) <= 1e-12 * (1 + std::abs(ref)));
  }
}

TEST_CASE("fubini-study domain sample in closed form") {
  const auto ast = parse_prepotential("i*(z0^2+z1^2+z2^2)", 3);
  std::mt19937_64 rng(4);
  const CVec z = oracle::random_point(rng, 3);
  const auto s = domain_sample(ast, z);
  CHECK((s.h - 2.0 * CMat::Identity(3, 3)).norm() < 1e-14);
  CHECK((s.g - 2.0 * RMat::Identity(6, 6)).norm() < 1e-14);
  CHECK((s.flat - oracle::fs_flat(z)).norm() < 1e-14);
  CHECK((s.J * s.J + RMat::Identity(6, 6)).norm() < 1e-14);
  CHECK((s.omega - s.J.transpose() * s.g).norm() < 1e-14);
  CHECK(s.k == doctest::Approx(z.squaredNorm()));
  const CVec zr = oracle::cvec({0.3, -1.2, 2.0});
  const auto sr = domain_sample(ast, zr);
  CHECK(sr.flat.tail(3).norm() == 0.0);
  CHECK((sr.flat.head(3) - zr.real()).norm() == 0.0);
}

TEST_CASE("hermitian form is g - i omega") {
  const auto ast = parse_prepotential("z1*z2*z3/z0", 4);
  const auto s = domain_sample(ast, stu_points(3, 1)[0]);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    const RVec X = oracle::real_frame(oracle::random_point(rng, 4));
    const RVec Y = oracle::real_frame(oracle::random_point(rng, 4));
    const cplx h = s.hermitian(X, Y);
    CHECK(std::abs(h.real() - s.metric(X, Y)) < 1e-12 * (1 + std::abs(h)));
    CHECK(std::abs(h.imag() + X.dot(s.omega * Y)) < 1e-12 * (1 + std::abs(h)));
  }
}

TEST_CASE("stu flat jacobian agrees with a difference quotient of the hand gradient") {
  const auto ast = parse_prepotential("z1*z2*z3/z0", 4);
  for (const auto& z : stu_points(5, 4)) {
    const auto s = domain_sample(ast, z);
    auto flat_of = [](const RVec& w) {
      const CVec zz = from_real_frame(w);
      RVec p(8);
      p << zz.real(), oracle::stu_grad(zz).real();
      return p;
    };
    const RVec w = oracle::real_frame(z);
    RMat fd(8, 8);
    const double h = 1e-6;
    for (int a = 0; a < 8; ++a) {
      RVec wp = w, wm = w;
      wp[a] += h;
      wm[a] -= h;
      fd.col(a) = (flat_of(wp) - flat_of(wm)) / (2 * h);
    }
    CHECK(rel_diff(s.flat_jac, fd) < 1e-8);
    Eigen::JacobiSVD<RMat> svd(s.flat_jac);
    const double cond = svd.singularValues()(0) / svd.singularValues()(7);
    CHECK(std::isfinite(cond));
    CHECK(cond < 1e6);
  }
}

TEST_CASE("degenerate metrics and vanishing potentials are inadmissible") {
  const auto flat = parse_prepotential("z0*z1", 2);
  CHECK_THROWS_AS(domain_sample(flat, oracle::cvec({1.0, 2.0})), DegenerateMetric);
  CHECK_FALSE(is_admissible(flat, oracle::cvec({1.0, 2.0})));
  const auto lor = parse_prepotential("i*(z0^2 - z1^2)", 2);
  CHECK_FALSE(is_admissible(lor, oracle::cvec({1.0, cplx(0, 1)})));
  CHECK(is_admissible(lor, oracle::cvec({1.0, 0.5})));
  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  CHECK_FALSE(is_admissible(stu, oracle::cvec({0.0, 1.0, 1.0, 1.0})));
}

TEST_CASE("flat chart inversion") {
  const auto fs = parse_prepotential("i*(z0^2+z1^2)", 2);
  const CVec z0 = oracle::cvec({cplx(0.4, -0.3), cplx(1.1, 0.7)});
  const auto fixed = invert_flat_coords(fs, domain_sample(fs, z0).flat, z0);
  CHECK(fixed.iterations == 0);
  CHECK((fixed.z - z0).norm() == 0.0);

  RVec target(4);
  target << 0.5, -1.0, 3.0, 0.25;
  const auto inv = invert_flat_coords(fs, target, oracle::cvec({1.0, 1.0}));
  const CVec expect = oracle::cvec({cplx(0.5, -1.5), cplx(-1.0, -0.125)});
  CHECK((inv.z - expect).norm() < 1e-13);

  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  for (const auto& z : stu_points(6, 5)) {
    const auto got = invert_flat_coords(stu, domain_sample(stu, z).flat, kStuBase);
    CHECK((got.z - z).norm() < 1e-11);
  }

  const auto inv1 = parse_prepotential("z0^-1", 1);
  RVec far(2);
  far << 1.0, 100.0;
  CHECK_THROWS_AS(invert_flat_coords(inv1, far, oracle::cvec({cplx(1.0, 0.5)})), NoConvergence);
}

TEST_CASE("flat hessian of k") {
  SUBCASE("fubini-study gives block-diag(2, 1/2)") {
    const auto fs = parse_prepotential("i*(z0^2+z1^2+z2^2)", 3);
    const CVec z = oracle::cvec({cplx(0.2, 0.7), cplx(-1.0, 0.1), cplx(0.5, 0.5)});
    RVec d(6);
    d << 2, 2, 2, 0.5, 0.5, 0.5;
    const RMat expect = d.asDiagonal();
    CHECK((flat_hessian_of_k(fs, z) - expect).norm() < 1e-10);
    CHECK((flat_hessian_of_k_fd(fs, z) - expect).norm() < 1e-6);
  }
  SUBCASE("stu hessian equals the pushed-forward metric and the difference oracle") {
    const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
    for (const auto& z : stu_points(7, 10)) {
      const auto s = domain_sample(stu, z);
      const RMat H = flat_hessian_of_k(s);
      CHECK(rel_diff(H, pushforward_metric(s)) < 1e-8);
      CHECK(rel_diff(flat_hessian_of_k_fd(stu, z), H) < 1e-5);
      CHECK((H - H.transpose()).norm() < 1e-12 * (1 + H.norm()));
    }
  }
}

TEST_CASE("monge-ampere spread") {
  const auto fs = parse_prepotential("i*(z0^2+z1^2)", 2);
  std::mt19937_64 rng(12);
  std::vector<CVec> pts;
  for (int s = 0; s < 10; ++s) pts.push_back(oracle::random_point(rng, 2));
  auto ma = monge_ampere_spread(fs, pts);
  for (double v : ma.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ma.rel_spread < 1e-10);

  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  const auto stu_pts = stu_points(13, 100);
  ma = monge_ampere_spread(stu, stu_pts);
  CHECK(ma.values.size() + ma.skipped.size() == 100);
  CHECK(ma.rel_spread < 1e-6);

  const std::vector<CVec> single{kStuBase};
  CHECK(monge_ampere_spread(stu, single).rel_spread == 0.0);

  const std::vector<CVec> bad{oracle::cvec({0.0, 1.0, 1.0, 1.0})};
  CHECK_THROWS_AS(monge_ampere_spread(stu, bad), InadmissiblePoint);
}

TEST_CASE("potential identities along the position field") {
  const auto fs = parse_prepotential("i*(z0^2+z1^2)", 2);
  const auto r = lemma1_residuals(fs, oracle::cvec({1.0, 0.0}));
  CHECK(r.r1 < 1e-12);
  CHECK(r.r2 < 1e-12);
  CHECK(r.r3 < 1e-12);

  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  for (const auto& z : stu_points(14, 10, 0.6)) {
    const double k = std::abs(kahler_potential(stu, z));
    for (const CVec& w : {z, CVec(2.0 * z)}) {
      const auto q = lemma1_residuals(stu, w);
      const double tol = 1e-9 * (1 + 4 * k);
      CHECK(q.r1 < tol);
      CHECK(q.r2 < tol);
      CHECK(q.r3 < tol);
    }
    const auto s = domain_sample(stu, z);
    CHECK(xi_position_residual(s) < 1e-12 * (1 + s.flat.norm()));
  }
}

TEST_CASE("d^nabla J vanishes and a perturbed J does not") {
  const auto fs = parse_prepotential("i*(z0^2+z1^2)", 2);
  CHECK(dnabla_J_residual(fs, oracle::cvec({cplx(0.3, 1), cplx(0.2, -0.5)})) < 1e-10);

  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  for (const auto& z : stu_points(15, 5)) CHECK(dnabla_J_residual(stu, z) < 1e-5);

  const CVec z = stu_points(16, 1)[0];
  const auto J = complex_structure_field(stu, z);
  const RVec p = domain_sample(stu, z).flat;
  const double step = chart_step(p);
  CHECK(exterior_derivative_residual(J, p, step) < 1e-5);
  const MatrixField perturbed = [&](const RVec& q) {
    RMat T = J(q);
    T(0, 0) += 1e-3 * q[1];
    return T;
  };
  CHECK(exterior_derivative_residual(perturbed, p, step) >= 1e-4);
}

TEST_CASE("parabolic immersion") {
  const auto fs = parse_prepotential("i*(z0^2+z1^2)", 2);
  RVec expect(5);
  expect << 1, 0, 0, 0, 1;
  CHECK((parabolic_immersion(fs, oracle::cvec({1.0, 0.0})) - expect).norm() < 1e-15);
  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  const CVec z = stu_points(17, 1)[0];
  const RVec a = parabolic_immersion(stu, z), b = parabolic_immersion(stu, CVec(2.0 * z));
  CHECK(b[8] == doctest::Approx(4 * a[8]).epsilon(1e-13));
  CHECK((a.head(8) - domain_sample(stu, z).flat).norm() == 0.0);
}

TEST_CASE("cone, parallel and contact identities on stu") {
  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  std::mt19937_64 rng(18);
  for (const auto& z : stu_points(19, 4)) {
    const RVec X = oracle::real_frame(oracle::random_point(rng, 4));
    CHECK(cone_scaling_residual(stu, z, X, 2.5) < 1e-9 * (1 + X.squaredNorm()));
    CHECK(omega_flat_variation(stu, z) < 1e-6);
    CHECK(contact_form_residual(stu, z) < 1e-6);
  }
  const auto fs = parse_prepotential("i*(z0^2+z1^2)", 2);
  CHECK(contact_form_residual(fs, oracle::cvec({0.6, cplx(0.2, 0.3)})) < 1e-6);
}

TEST_CASE("christoffel symbols: zero for constant metrics, symmetric otherwise") {
  const auto fs = parse_prepotential("i*(z0^2+z1^2)", 2);
  const auto at = chart_point(fs, oracle::cvec({0.6, cplx(0.2, 0.3)}));
  for (const auto& G : christoffel_flat(fs, at, chart_step(at.p))) CHECK(G.norm() < 1e-9);

  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  const auto cp = chart_point(stu, stu_points(20, 1)[0]);
  const auto gamma = christoffel_flat(stu, cp, chart_step(cp.p));
  double nonzero = 0.0;
  for (const auto& G : gamma) {
    CHECK((G - G.transpose()).norm() < 1e-12 * (1 + G.norm()));
    nonzero = std::max(nonzero, G.norm());
  }
  CHECK(nonzero > 1e-3);
  // metric compatibility: d_a g_bc = g_dc Gamma^d_ab + g_bd Gamma^d_ac
  const RVec dir = RVec::Unit(8, 2);
  const double h = chart_step(cp.p);
  const auto gp = chart_point_at(stu, cp.p + h * dir, cp.s.z).g_flat;
  const auto gm = chart_point_at(stu, cp.p - h * dir, cp.s.z).g_flat;
  const RMat dg = (gp - gm) / (2 * h);
  RMat rhs = RMat::Zero(8, 8);
  for (int b = 0; b < 8; ++b)
    for (int c = 0; c < 8; ++c)
      for (int d = 0; d < 8; ++d)
        rhs(b, c) += cp.g_flat(d, c) * gamma[d](2, b) + cp.g_flat(b, d) * gamma[d](2, c);
  CHECK(rel_diff(rhs, dg) < 1e-6);
}

}
