#pragma once

// Pointwise special Kaehler geometry of a conic domain U in C^{n+1}.
//
// Conventions (all matrices act on column vectors):
//   real frame   w = (Re z_0..Re z_n, Im z_0..Im z_n)
//   flat chart   p = (x_0..x_n, y_0..y_n),  x_i = Re z_i,  y_i = Re dF/dz_i
//   h(X, Y)      = sum_ij Im(F_ij) X^i conj(Y^j)       (X^i = dz_i(X))
//   g            = Re h
//   J            = multiplication by i
//   omega(X, Y)  = g(J X, Y) = -Im h(X, Y)            (= i d dbar k)
// so that h = g - i*omega.

#include <functional>
#include <span>
#include <vector>

#include "skcone/expr.hpp"
#include "skcone/jet.hpp"
#include "skcone/types.hpp"

namespace skcone {

inline constexpr double kDefaultKMin = 1e-8;
inline constexpr double kDegenerateDetRel = 1e-12;

struct DomainSample {
  CVec z;
  double k = 0.0;
  RVec dk;    ///< real gradient of k in the real frame
  RMat d2k;   ///< real Hessian of k in the real frame
  CMat h;     ///< Hermitian matrix of h (real symmetric here: Im F_ij)
  RMat g;
  RMat omega;
  RMat J;
  RVec flat;
  RMat flat_jac;
  std::vector<RMat> flat_hess;  ///< Hessian of each flat coordinate in the real frame

  int n_vars() const { return static_cast<int>(z.size()); }
  int real_dim() const { return 2 * n_vars(); }
  /// Position field xi in the real frame.
  RVec xi() const { return to_real_frame(z); }
  cplx hermitian(const RVec& X, const RVec& Y) const;
  double metric(const RVec& X, const RVec& Y) const { return X.dot(g * Y); }
};

double kahler_potential(const PrepotentialAst& ast, const CVec& z);

/// Throws DegenerateMetric when |det Im F_ij| < 1e-12 * max(1, max|Im F_ij|)^(n+1).
DomainSample domain_sample(const PrepotentialAst& ast, const CVec& z);

/// Domain admissibility gate: nonsingular, nondegenerate, |k| >= k_min.
bool is_admissible(const PrepotentialAst& ast, const CVec& z, double k_min = kDefaultKMin);

struct FlatInversion {
  CVec z;
  int iterations = 0;
};

/// Newton iteration on the real system flat(z) = target, at most 50 steps.
FlatInversion invert_flat_coords(const PrepotentialAst& ast, const RVec& target, const CVec& z_init);

/// Hessian of k in the flat chart, by the second-order chain rule.
RMat flat_hessian_of_k(const DomainSample& s);
RMat flat_hessian_of_k(const PrepotentialAst& ast, const CVec& z);

/// Hessian of k in the flat chart by central second differences through
/// the chart inverse; independent of flat_hessian_of_k.
RMat flat_hessian_of_k_fd(const PrepotentialAst& ast, const CVec& z, double rel_step = 1e-4);

/// The metric g written in the flat chart: flat_jac^{-T} g flat_jac^{-1}.
RMat pushforward_metric(const DomainSample& s);

struct MongeAmpereSpread {
  std::vector<double> values;
  double rel_spread = 0.0;
  std::vector<std::size_t> skipped;
};

MongeAmpereSpread monge_ampere_spread(const PrepotentialAst& ast, std::span<const CVec> samples);

struct Lemma1Residuals {
  double r1 = 0.0;  ///< |h(xi, .) - 2 dbar k|
  double r2 = 0.0;  ///< |g(xi, .) - dk|
  double r3 = 0.0;  ///< |g(xi, xi) - 2k|
};

Lemma1Residuals lemma1_residuals(const PrepotentialAst& ast, const CVec& z);

/// Everything needed to do calculus in the flat chart at one point.
struct ChartPoint {
  RVec p;
  DomainSample s;
  RMat jac_inv;
  RMat g_flat;      ///< g pushed into the flat chart
  RMat omega_flat;
  RMat J_flat;
  RVec dk_flat;     ///< gradient of k in the flat chart
  double k() const { return s.k; }
  /// Push a real-frame vector into the flat chart and back.
  RVec to_flat(const RVec& X) const { return s.flat_jac * X; }
  RVec to_real(const RVec& V) const { return jac_inv * V; }
};

ChartPoint chart_point(const PrepotentialAst& ast, const CVec& z);
/// Inverts the chart at `p` starting from `seed`.
ChartPoint chart_point_at(const PrepotentialAst& ast, const RVec& p, const CVec& seed);

/// Central-difference step used for chart derivatives: base * (1 + |p|).
inline double chart_step(const RVec& p, double base = 1e-4) { return base * (1.0 + p.norm()); }

using MatrixField = std::function<RMat(const RVec&)>;

/// max |d_a T^c_b - d_b T^c_a| for a (1,1)-tensor field given in the flat chart.
double exterior_derivative_residual(const MatrixField& field, const RVec& p, double step);

/// J in the flat chart as a function of the flat point.
MatrixField complex_structure_field(const PrepotentialAst& ast, const CVec& seed);

/// d^nabla J residual at z (flat-chart central differences).
double dnabla_J_residual(const PrepotentialAst& ast, const CVec& z);

/// (x, y, k): the parabolic affine sphere immersion of U.
RVec parabolic_immersion(const PrepotentialAst& ast, const CVec& z);

/// |flat_jac * xi - flat|: the position field in both frames.
double xi_position_residual(const DomainSample& s);

/// |g_{rz}(rX, rX) - r^2 g_z(X, X)|.
double cone_scaling_residual(const PrepotentialAst& ast, const CVec& z, const RVec& X, double r);

/// max over chart directions of |d omega_flat|.
double omega_flat_variation(const PrepotentialAst& ast, const CVec& z);

/// max |d eta - 2 omega| over the flat chart, eta = omega(xi, .).
double contact_form_residual(const PrepotentialAst& ast, const CVec& z);

/// Christoffel symbols of g in the flat chart: gamma[c](a, b) = Gamma^c_ab.
/// Derivatives of the metric by central differences.
std::vector<RMat> christoffel_flat(const PrepotentialAst& ast, const ChartPoint& at, double step);

/// Gamma(X, Y)^c = sum_ab X^a Y^b Gamma^c_ab.
RVec contract_christoffel(const std::vector<RMat>& gamma, const RVec& X, const RVec& Y);

}  // namespace skcone
