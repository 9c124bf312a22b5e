#include <doctest.h>

#include <map>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "skcone/jet.hpp"

using namespace skcone;

namespace {

/// Partial derivative by the Cauchy integral over a torus of radius r, one
/// circle per distinct variable, trapezoidal rule with m nodes per circle.
cplx cauchy_partial(const PrepotentialAst& ast, const CVec& z, const std::vector<int>& idx, double r,
                    int m = 16) {
  std::map<int, int> mult;
  for (int i : idx) ++mult[i];
  std::vector<std::pair<int, int>> vars(mult.begin(), mult.end());
  const auto d = vars.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= static_cast<std::size_t>(m);
  cplx acc{};
  for (std::size_t cell = 0; cell < total; ++cell) {
    CVec w = z;
    cplx phase = 1.0;
    std::size_t rest = cell;
    for (const auto& [var, p] : vars) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(rest % m) / m;
      rest /= m;
      const cplx e = std::polar(1.0, th);
      w[var] += r * e;
      phase *= std::pow(std::conj(e), p);
    }
    acc += evaluate(ast, w) * phase;
  }
  acc /= static_cast<double>(total);
  double fact = 1.0;
  for (const auto& [var, p] : vars)
    for (int q = 2; q <= p; ++q) fact *= q;
  return acc * fact / std::pow(r, static_cast<double>(idx.size()));
}

}  // namespace

TEST_SUITE("jet") {

TEST_CASE("fubini-study jet at (1, 0)") {
  const auto ast = parse_prepotential("i*(z0^2 + z1^2)", 2);
  const auto jet = eval_jet(ast, oracle::cvec({1.0, 0.0}), 2);
  const cplx I(0, 1);
  CHECK(std::abs(jet.value() - I) < 1e-15);
  CHECK(std::abs(jet.d1(0) - 2.0 * I) < 1e-15);
  CHECK(std::abs(jet.d1(1)) < 1e-15);
  CHECK(std::abs(jet.d2(0, 0) - 2.0 * I) < 1e-15);
  CHECK(std::abs(jet.d2(1, 1) - 2.0 * I) < 1e-15);
  CHECK(std::abs(jet.d2(0, 1)) < 1e-15);
}

TEST_CASE("stu gradient at (1, 1, 1, 1)") {
  const auto ast = parse_prepotential("z1*z2*z3/z0", 4);
  const auto jet = eval_jet(ast, oracle::cvec({1.0, 1.0, 1.0, 1.0}), 1);
  const double expect[] = {-1, 1, 1, 1};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(jet.d1(i) - expect[i]) < 1e-14);
}

TEST_CASE("order 0 is plain evaluation") {
  std::mt19937_64 rng(3);
  const auto ast = parse_prepotential("z1*z2*z3/z0 + (z0 - 2*z1)^3/z2", 4);
  for (int s = 0; s < 10; ++s) {
    const CVec z = oracle::random_point(rng, 4);
    const auto jet = eval_jet(ast, z, 0);
    CHECK(jet.order() == 0);
    CHECK(std::abs(jet.value() - evaluate(ast, z)) <= 1e-13 * (1 + std::abs(jet.value())));
  }
}

TEST_CASE("derivatives through order four match Cauchy integrals") {
  const auto ast = parse_prepotential("z1*z2*z3/z0 - i*z0^2 + z1^-1*z2^3", 4);
  const CVec z = oracle::cvec({cplx(1.0, 0.2), cplx(0.3, 1.0), cplx(-0.2, 0.9), cplx(0.1, 1.1)});
  const auto jet = eval_jet(ast, z, 4);
  const std::vector<std::vector<int>> tuples = {
      {0},          {2},          {0, 0},       {1, 3},       {0, 2},       {1, 1, 1},    {0, 1, 2},
      {0, 0, 3},    {3, 3, 2},    {0, 0, 0, 0}, {1, 1, 2, 2}, {0, 1, 2, 3}, {0, 0, 1, 1}, {2, 2, 2, 1}};
  for (const auto& t : tuples) {
    CAPTURE(t);
    const cplx ref = cauchy_partial(ast, z, t, 0.15);
    const cplx got = jet.partial(t);
    CHECK(std::abs(got - ref) <= 1e-8 * (1 + std::abs(ref)));
  }
}

TEST_CASE("derivative tensors are symmetric and consistent with accessors") {
  const auto ast = parse_prepotential("z1*z2*z3/z0", 4);
  const auto jet = eval_jet(ast, oracle::cvec({1.0, cplx(0, 1), cplx(0, 1), cplx(0, 1)}), 4);
  CHECK(jet.d3(0, 1, 2) == jet.d3(2, 0, 1));
  CHECK(jet.d4(0, 0, 1, 3) == jet.d4(3, 0, 1, 0));
  const std::vector<int> t{1, 0, 3};
  CHECK(jet.partial(t) == jet.d3(1, 0, 3));
  CHECK(jet.hessian()(1, 2) == jet.d2(1, 2));
  CHECK(jet.gradient()[3] == jet.d1(3));
  CHECK(jet.tensor(2).size() == 16u);
}

TEST_CASE("jet rejects orders beyond four and singular points") {
  const auto ast = parse_prepotential("z1*z2*z3/z0", 4);
  CHECK_THROWS_AS(eval_jet(ast, oracle::cvec({1, 1, 1, 1}), 5), PreconditionError);
  CHECK_THROWS_AS(eval_jet(ast, oracle::cvec({0, 1, 1, 1}), 2), EvalSingularity);
}

TEST_CASE("finite-difference discrepancy is small for smooth prepotentials") {
  std::mt19937_64 rng(5);
  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  for (int s = 0; s < 10; ++s) {
    CVec z = oracle::random_point(rng, 4, 0.2);
    z += oracle::cvec({1.0, cplx(0, 1), cplx(0, 1), cplx(0, 1)});
    CHECK(jet_fd_discrepancy(stu, z) < 1e-6);
  }
}

TEST_CASE("homogeneity of degree-2 prepotentials") {
  const auto fs = parse_prepotential("i*(z0^2 + z1^2 + z2^2)", 3);
  std::mt19937_64 rng(9);
  std::vector<CVec> pts;
  for (int s = 0; s < 8; ++s) pts.push_back(oracle::random_point(rng, 3));
  const std::vector<cplx> two{2.0};
  auto rep = check_homogeneity(fs, pts, two);
  CHECK(rep.scale_residual < 1e-15);
  CHECK(rep.euler_residual < 1e-15);
  CHECK(rep.skipped.empty());

  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  const std::vector<CVec> one{oracle::cvec({1, 1, 1, 1})};
  const std::vector<cplx> scale{cplx(1, 1)};
  rep = check_homogeneity(stu, one, scale);
  CHECK(rep.scale_residual < 1e-12);
  CHECK(rep.euler_residual < 1e-12);
}

TEST_CASE("a cubic fails the Euler identity by one third at z0 = 1") {
  const auto cubic = parse_prepotential("z0^3", 1);
  const std::vector<CVec> pt{oracle::cvec({1.0})};
  const std::vector<cplx> scale{2.0};
  const auto rep = check_homogeneity(cubic, pt, scale);
  CHECK(rep.euler_residual == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // |8 - 4| / (1 + 4)
  CHECK(rep.scale_residual == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("singular samples are skipped, not fatal") {
  const auto stu = parse_prepotential("z1*z2*z3/z0", 4);
  const std::vector<CVec> pts{oracle::cvec({0, 1, 1, 1}), oracle::cvec({1, 1, 1, 1})};
  const std::vector<cplx> scale{2.0};
  const auto rep = check_homogeneity(stu, pts, scale);
  REQUIRE(rep.skipped.size() == 1);
  CHECK(rep.skipped[0] == 0);
  CHECK(rep.euler_residual < 1e-14);
}

}
