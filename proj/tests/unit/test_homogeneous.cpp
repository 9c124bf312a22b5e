#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "skcone/homogeneous.hpp"

using namespace skcone;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

CMat random_cmat(std::mt19937_64& rng, int n, double scale = 0.3) {
  std::normal_distribution<double> nd(0.0, scale);
  CMat M(n, n);
  for (auto& c : M.reshaped()) c = cplx(nd(rng), nd(rng));
  return M;
}

RMat random_rmat(std::mt19937_64& rng, int r, int c, double scale = 0.3) {
  std::normal_distribution<double> nd(0.0, scale);
  RMat M(r, c);
  for (auto& x : M.reshaped()) x = nd(rng);
  return M;
}

RMat random_sl2(std::mt19937_64& rng) {
  RMat h = RMat::Identity(2, 2) + random_rmat(rng, 2, 2);
  const double d = h.determinant();
  h.row(0) /= d;
  return h;
}

}  // namespace

TEST_SUITE("homogeneous") {

TEST_CASE("spot values") {
  CHECK(quartic_eval(QuarticCase::make_A(1), oracle::cvec({1.0, 0.0})) == cplx(4.0));
  CHECK(quartic_eval(QuarticCase::make_G(), oracle::cvec({1.0, 0.0, 0.0, 1.0})) == cplx(1296.0));
  CVec alpha = CVec::Zero(20);
  alpha[triple_index(0, 1, 2)] = 1.0;
  alpha[triple_index(3, 4, 5)] = 1.0;
  const cplx q = quartic_eval(QuarticCase::make_E6(), alpha);
  CHECK(std::abs(q - 6.0) < 1e-13);
  CHECK(std::abs(q) > 1e-6 * std::pow(alpha.norm(), 4));
}

TEST_CASE("case A is the squared hermitian form") {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 4; ++n) {
    const auto qc = QuarticCase::make_A(n);
    for (int t = 0; t < 5; ++t) {
      const CVec v = oracle::random_point(rng, n + 1);
      double g = 0.0;
      for (int j = 0; j <= n; ++j) g += (j < n ? 2.0 : -2.0) * std::norm(v[j]);
      CHECK(rel(quartic_eval(qc, v), g * g) < 1e-13);
      // U(n,1) through the Cayley transform of eps * (anti-Hermitian)
      const CMat S = random_cmat(rng, n + 1);
      const CMat K = qc.epsilon.cast<cplx>().asDiagonal() * CMat(S - S.adjoint());
      CHECK(rel(quartic_eval(qc, CVec(oracle::cayley(K) * v)), g * g) < 1e-12);
    }
  }
  CHECK_THROWS_AS(QuarticCase::make_A(2, RVec::Ones(2)), PreconditionError);
  RVec bad = RVec::Ones(3);
  bad[1] = 0.5;
  CHECK_THROWS_AS(QuarticCase::make_A(2, bad), PreconditionError);
}

TEST_CASE("case BD is a Gram determinant invariant under SO(G) x SL(2)") {
  std::mt19937_64 rng(2);
  for (int n = 2; n <= 5; ++n) {
    const auto qc = QuarticCase::make_BD(n);
    const RMat A = random_rmat(rng, n + 1, 2, 1.0);
    const RMat gram = A.transpose() * qc.G * A;
    const double ref = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
    const CVec v = Eigen::Map<const RVec>(A.data(), A.size()).cast<cplx>();
    CHECK(rel(quartic_eval(qc, v), ref) < 1e-12);

    const RMat R = random_rmat(rng, n + 1, n + 1);
    const RMat g = oracle::cayley((qc.G * (R - R.transpose())).cast<cplx>()).real();
    const RMat A2 = g * A * random_sl2(rng).transpose();
    const CVec v2 = Eigen::Map<const RVec>(A2.data(), A2.size()).cast<cplx>();
    CHECK(rel(quartic_eval(qc, v2), ref) < 1e-11);
  }
}

TEST_CASE("E6 operator against a brute-force Levi-Civita contraction") {
  std::mt19937_64 rng(3);
  CVec decomposable = CVec::Zero(20);
  decomposable[triple_index(0, 1, 2)] = 1.0;
  CHECK(e6_operator(decomposable).norm() == 0.0);
  CHECK(e6_operator(CVec::Zero(20)).norm() == 0.0);
  for (int t = 0; t < 3; ++t) {
    const CVec alpha = oracle::random_point(rng, 20);
    const CMat A = oracle::e6_operator_brute(alpha);
    CHECK((e6_operator(alpha) - A).norm() < 1e-12 * (1 + A.norm()));
    CHECK(rel(quartic_eval(QuarticCase::make_E6(), alpha), (A * A).trace()) < 1e-12);
  }
  CVec two = decomposable;
  two[triple_index(3, 4, 5)] = 1.0;
  const CMat A = e6_operator(two);
  CHECK(std::abs((A * A).trace()) > 1.0);
  CHECK((A - oracle::e6_operator_brute(two)).norm() < 1e-13);
}

TEST_CASE("E6 and F quartics are invariant under the groups") {
  std::mt19937_64 rng(4);
  const auto e6 = QuarticCase::make_E6();
  for (int t = 0; t < 3; ++t) {
    const CVec alpha = oracle::random_point(rng, 20);
    CMat H = CMat::Identity(6, 6) + random_cmat(rng, 6);
    H /= std::pow(H.determinant(), 1.0 / 6.0);
    const cplx q = quartic_eval(e6, alpha);
    CHECK(rel(quartic_eval(e6, oracle::transform_form(alpha, H)), q) < 1e-10);
  }
  const auto f = QuarticCase::make_F();
  for (int t = 0; t < 3; ++t) {
    const RVec beta = f_case_project(random_rmat(rng, 20, 1, 1.0).col(0));
    const RMat Sy = random_rmat(rng, 6, 6);
    const RMat g = oracle::cayley((f.Omega.inverse() * (Sy + Sy.transpose())).cast<cplx>()).real();
    const CVec moved = oracle::transform_form(beta.cast<cplx>(), g.cast<cplx>());
    CHECK(f_case_wedge(moved.real()).norm() < 1e-12);
    CHECK(rel(quartic_eval(f, moved), quartic_eval(f, beta.cast<cplx>())) < 1e-10);
  }
}

TEST_CASE("F-case projection") {
  std::mt19937_64 rng(5);
  const RVec beta = random_rmat(rng, 20, 1, 1.0).col(0);
  const RVec p = f_case_project(beta);
  CHECK(f_case_wedge(p).norm() < 1e-12);
  CHECK((f_case_project(p) - p).norm() < 1e-13);
  // omega ^ dx^0 lies in the orthogonal complement of the kernel
  RVec w = RVec::Zero(20);
  w[triple_index(0, 2, 3)] = 1.0;
  w[triple_index(0, 4, 5)] = 1.0;
  CHECK(f_case_project(w).norm() < 1e-13);
  CHECK_THROWS_AS(quartic_eval(QuarticCase::make_F(), w.cast<cplx>()), PreconditionError);
}

TEST_CASE("case G is -48 times the classical discriminant") {
  std::mt19937_64 rng(6);
  const auto qc = QuarticCase::make_G();
  for (int t = 0; t < 10; ++t) {
    const RMat c = random_rmat(rng, 4, 1, 1.0);
    const std::array<double, 4> p{c(0), c(1), c(2), c(3)};
    const double ref = -48.0 * oracle::cubic_discriminant(p[0], p[1], p[2], p[3]);
    CHECK(rel(quartic_eval(qc, c.col(0).cast<cplx>()), ref) < 1e-12);
    const auto moved = oracle::substitute_cubic(p, random_sl2(rng));
    const CVec mv = oracle::cvec({moved[0], moved[1], moved[2], moved[3]});
    CHECK(rel(quartic_eval(qc, mv), ref) < 1e-10);
  }
  const CVec p = oracle::cvec({1.0, 0.0, 0.0, 1.0});
  for (const auto& M : {RMat{{0.0, 1.0}, {0.0, 0.0}}, RMat{{0.0, 0.0}, {1.0, 0.0}}}) {
    RepElement gen{QuarticTag::G, M.cast<cplx>(), {}};
    CHECK(lie_invariance_residual(qc, p, gen) < 1e-8);
  }
}

TEST_CASE("E6 infinitesimal action is the derivative of the group action") {
  std::mt19937_64 rng(7);
  const auto qc = QuarticCase::make_E6();
  const CVec alpha = oracle::random_point(rng, 20);
  const auto gen = random_generator(qc, rng);
  const double h = 1e-6;
  const CMat I = CMat::Identity(6, 6);
  const CVec fd = (oracle::transform_form(alpha, I - h * gen.X) - oracle::transform_form(alpha, I + h * gen.X)) / (2 * h);
  CHECK((rep_action(qc, gen, alpha) - fd).norm() < 1e-7 * (1 + fd.norm()));
}

TEST_CASE("lie algebra invariance over random pairs") {
  std::mt19937_64 rng(8);
  std::vector<QuarticCase> cases;
  for (int n = 1; n <= 4; ++n) cases.push_back(QuarticCase::make_A(n));
  for (int n = 2; n <= 5; ++n) cases.push_back(QuarticCase::make_BD(n));
  cases.push_back(QuarticCase::make_E6());
  cases.push_back(QuarticCase::make_F());
  cases.push_back(QuarticCase::make_G());
  for (const auto& qc : cases) {
    CAPTURE(std::string(to_string(qc.tag)));
    CAPTURE(qc.n);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const CVec v = random_vector(qc, rng);
      const auto gen = random_generator(qc, rng);
      CHECK(membership_residual(qc, gen) < 1e-12);
      worst = std::max(worst, lie_invariance_residual(qc, v, gen));
      const double s = 1.7;
      const cplx q = quartic_eval(qc, v);
      CHECK(rel(quartic_eval(qc, CVec(s * v)), std::pow(s, 4) * q) < 1e-12);
    }
    CHECK(worst < 1e-7);
    CHECK(lie_invariance_residual(qc, random_vector(qc, rng), zero_generator(qc)) == 0.0);
  }
}

TEST_CASE("generators outside the algebra are rejected") {
  const auto qc = QuarticCase::make_A(2);
  RepElement id{QuarticTag::A, CMat::Identity(3, 3), {}};
  CHECK(membership_residual(qc, id) > 1.0);
  CHECK_THROWS_AS(lie_invariance_residual(qc, oracle::cvec({1, 0, 0}), id), PreconditionError);
  RepElement other{QuarticTag::G, CMat::Zero(2, 2), {}};
  CHECK_THROWS_AS(rep_action(qc, other, oracle::cvec({1, 0, 0})), PreconditionError);
  CHECK_THROWS_AS(quartic_eval(qc, oracle::cvec({1, 0})), PreconditionError);
  CHECK_THROWS_AS(parse_quartic_tag("E7"), PreconditionError);
  CHECK(parse_quartic_tag("BD") == QuarticTag::BD);
  CHECK_THROWS_AS(triple_index(2, 1, 3), PreconditionError);
}

TEST_CASE("Q is proportional to k^2 for case-A prepotentials") {
  std::mt19937_64 rng(9);
  const auto fs = parse_prepotential("i*(z0^2+z1^2+z2^2)", 3);
  std::vector<CVec> pts;
  for (int t = 0; t < 50; ++t) pts.push_back(oracle::random_point(rng, 3));
  const auto fs_case = QuarticCase::make_A(2, RVec::Ones(3));
  auto r = q_proportional_ksq(fs_case, fs, pts);
  CHECK(r.rel_spread < 1e-10);
  CHECK(r.ratio == doctest::Approx(4.0).epsilon(1e-12));
  const std::vector<CVec> one{pts[0]};
  CHECK(q_proportional_ksq(fs_case, fs, one).rel_spread == 0.0);

  const auto lor = parse_prepotential("i*(z0^2+z1^2-z2^2)", 3);
  std::vector<CVec> neg;
  for (int t = 0; t < 50; ++t) {
    CVec z = oracle::random_point(rng, 3, 0.3);
    z[2] += 1.5;
    neg.push_back(z);
  }
  r = q_proportional_ksq(QuarticCase::make_A(2), lor, neg);
  CHECK(r.skipped.empty());
  CHECK(r.rel_spread < 1e-10);
  CHECK(r.ratio == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("case-A signature detection") {
  const CVec z = oracle::cvec({cplx(0.3, 0.1), 0.8, cplx(-0.2, 1.0)});
  const auto fs = case_a_signature(parse_prepotential("i*(z0^2+z1^2+z2^2)", 3), z);
  REQUIRE(fs.has_value());
  CHECK((*fs - RVec::Ones(3)).norm() == 0.0);
  const auto lor = case_a_signature(parse_prepotential("i*(z0^2-z1^2+z2^2)", 3), z);
  REQUIRE(lor.has_value());
  CHECK((*lor)[1] == -1.0);
  CHECK_FALSE(case_a_signature(parse_prepotential("z1*z2*z3/z0", 4), oracle::cvec({1, 1, 1, 1})).has_value());
  CHECK_FALSE(case_a_signature(parse_prepotential("2*i*(z0^2+z1^2)", 2), oracle::cvec({1, 1})).has_value());
}

}
