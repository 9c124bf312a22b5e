#include "skcone/projective.hpp"

#include <array>
#include <cmath>
#include <string>

namespace skcone {

namespace {

cplx vertical_ratio(const DomainSample& s, const RVec& X) {
  const RVec xi = s.xi();
  const double hxx = s.hermitian(xi, xi).real();
  if (!(std::abs(hxx) >= 2.0 * kDefaultKMin)) throw InadmissiblePoint("h(xi, xi) = 2k is too small");
  return s.hermitian(X, xi) / hxx;
}

double gbar(const DomainSample& s, const RVec& X) {
  const RVec xi = s.xi();
  return s.metric(X, X) / s.metric(xi, xi) - std::norm(vertical_ratio(s, X));
}

RVec complex_scale(const RVec& X, cplx lambda) {
  return to_real_frame(CVec(lambda * from_real_frame(X)));
}

void require_on_sphere(const DomainSample& s) {
  if (!(std::abs(2.0 * std::abs(s.k) - 1.0) <= 1e-8))
    throw PreconditionError("point is not on the level set |k| = 1/2");
}

void require_horizontal(const DomainSample& s, const RVec& X) {
  if (std::abs(s.hermitian(s.xi(), X)) > 1e-10 * (1.0 + X.norm()))
    throw PreconditionError("vector is not horizontal");
}

}  // namespace

RVec horizontal_project(const PrepotentialAst& ast, const CVec& u, const RVec& X) {
  const auto s = domain_sample(ast, u);
  return X - complex_scale(s.xi(), vertical_ratio(s, X));
}

double projective_metric(const PrepotentialAst& ast, const CVec& u, const RVec& X) {
  return gbar(domain_sample(ast, u), X);
}

double projective_metric(const PrepotentialAst& ast, const CVec& u, const RVec& X, const RVec& Y) {
  const auto s = domain_sample(ast, u);
  return 0.25 * (gbar(s, X + Y) - gbar(s, X - Y));
}

ProjectiveSample projective_sample(const PrepotentialAst& ast, const CVec& u, const RVec& X) {
  ProjectiveSample out;
  out.u = u;
  out.X_h = horizontal_project(ast, u, X);
  out.gbar_val = projective_metric(ast, u, out.X_h);
  return out;
}

double submersion_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X) {
  const auto s = domain_sample(ast, u);
  require_on_sphere(s);
  require_horizontal(s, X);
  const double kappa = s.k > 0.0 ? 1.0 : -1.0;
  return std::abs(gbar(s, X) - kappa * s.metric(X, X));
}

double pullback_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X, const RVec& Y) {
  const auto s = domain_sample(ast, u);
  require_on_sphere(s);
  require_horizontal(s, X);
  require_horizontal(s, Y);
  const RVec xi = s.xi();
  const double pulled = 0.25 * (gbar(s, X + Y) - gbar(s, X - Y));
  return std::abs(s.metric(xi, xi) * pulled - s.metric(X, Y));
}

double projective_invariance_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X, cplx lambda) {
  if (lambda == cplx{}) throw PreconditionError("scale factor must be nonzero");
  const double before = projective_metric(ast, u, X);
  const double after = projective_metric(ast, CVec(lambda * u), complex_scale(X, lambda));
  return std::abs(after - before);
}

ProjectiveKernel projective_kernel(const PrepotentialAst& ast, const CVec& u) {
  const auto s = domain_sample(ast, u);
  const RVec xi = s.xi();
  const RVec Jxi = s.J * xi;
  ProjectiveKernel out;
  out.vertical = std::max(std::abs(gbar(s, xi)), std::abs(gbar(s, Jxi)));

  // Euclidean orthonormal complement of span(xi, J xi).
  const auto m = xi.size();
  RMat V(m, 2);
  V.col(0) = xi;
  V.col(1) = Jxi;
  Eigen::HouseholderQR<RMat> qr(V);
  const RMat Q = qr.householderQ() * RMat::Identity(m, m);
  const RMat H = Q.rightCols(m - 2);
  RMat G(m - 2, m - 2);
  for (Eigen::Index a = 0; a < m - 2; ++a)
    for (Eigen::Index b = a; b < m - 2; ++b) {
      const RVec X = H.col(a), Y = H.col(b);
      G(a, b) = G(b, a) = 0.25 * (gbar(s, X + Y) - gbar(s, X - Y));
    }
  if (G.size() > 0) out.min_singular = Eigen::JacobiSVD<RMat>(G).singularValues().minCoeff();
  return out;
}

PrepotentialAst fubini_study_prepotential(int n_vars) {
  if (n_vars < 1) throw PreconditionError("n_vars must be positive");
  std::string text = "i*(";
  for (int j = 0; j < n_vars; ++j) {
    if (j) text += " + ";
    text += "z" + std::to_string(j) + "^2";
  }
  text += ")";
  return parse_prepotential(text, n_vars);
}

double fubini_study_closed_form(const CVec& u, const RVec& X) {
  const CVec x = from_real_frame(X);
  const double uu = u.squaredNorm();
  if (uu == 0.0) throw PreconditionError("u must be nonzero");
  const cplx xu = u.dot(x);  // sum conj(u_i) x_i
  return x.squaredNorm() / uu - std::norm(xu) / (uu * uu);
}

double fubini_study_constant() {
  static const double c = [] {
    const auto ast = fubini_study_prepotential(2);
    const std::array<CVec, 3> us = {CVec{{cplx(1.0, 0.0), cplx(0.5, -0.25)}},
                                     CVec{{cplx(0.3, 0.7), cplx(-0.2, 0.4)}},
                                     CVec{{cplx(-1.1, 0.2), cplx(0.6, 0.9)}}};
    const std::array<RVec, 3> xs = {RVec{{0.0, 1.0, 0.5, 0.0}}, RVec{{0.2, -0.4, 1.0, 0.3}},
                                    RVec{{1.0, 0.0, -0.7, 0.5}}};
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
      const double a = projective_metric(ast, us[i], xs[i]);
      const double b = fubini_study_closed_form(us[i], xs[i]);
      num += a * b;
      den += b * b;
    }
    return num / den;
  }();
  return c;
}

double fubini_study_compare(const CVec& u, const RVec& X) {
  const auto ast = fubini_study_prepotential(static_cast<int>(u.size()));
  return std::abs(projective_metric(ast, u, X) - fubini_study_constant() * fubini_study_closed_form(u, X));
}

}  // namespace skcone
