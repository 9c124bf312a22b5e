#pragma once

// The level hypersurface S = {k = kappa/2} of a conic special Kaehler domain
// as a proper affine hypersphere, and its Sasaki structure. Vectors are given
// in the real frame unless a name says otherwise; derivatives are taken in
// the flat chart.

#include <functional>
#include <utility>
#include <vector>

#include "skcone/geometry.hpp"

namespace skcone {

/// X_{k^2} = kHamiltonianSign * kappa * sigma on S.
inline constexpr int kHamiltonianSign = -1;

struct SphereSample {
  CVec u;
  int kappa = 1;
  std::vector<RVec> frame;  ///< Euclidean orthonormal basis of ker dk
  RVec E;                   ///< Blaschke normal -kappa * xi
  RVec sigma;               ///< J xi
  RVec eta;                 ///< omega(xi, .)
  RMat g_ind;               ///< g on the frame

  RVec xi() const { return to_real_frame(u); }
  RMat frame_matrix() const;
};

struct GaussSplit {
  RVec tangential;
  double normal_coeff = 0.0;
};

SphereSample project_to_sphere(const PrepotentialAst& ast, const CVec& z);

/// D_X Y for the level-set extension of Y, split along span(E) + ker dk.
GaussSplit gauss_split(const PrepotentialAst& ast, const CVec& u, const RVec& X, const RVec& Y);

/// |-D_X E - kappa X| along S.
double shape_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X);

/// |trace(A) / dim S - kappa| for the shape operator A on the sphere frame.
double mean_curvature_residual(const PrepotentialAst& ast, const CVec& u);

double blaschke_volume_residual(const PrepotentialAst& ast, const CVec& u);
/// Same comparison on a caller-supplied basis of T_u S.
double blaschke_volume_residual(const PrepotentialAst& ast, const CVec& u, const std::vector<RVec>& frame);

struct SasakiResiduals {
  double killing = 0.0;
  double structure = 0.0;
  double affine = 0.0;
  double contact = 0.0;
};

using TangentPairs = std::vector<std::pair<RVec, RVec>>;

SasakiResiduals sasaki_residuals(const PrepotentialAst& ast, const CVec& u, const TangentPairs& pairs);

/// A few frame pairs plus sigma, the default probe set for sasaki_residuals.
TangentPairs default_tangent_pairs(const SphereSample& sphere, std::size_t max_frame = 3);

/// |X_{k^2} - s kappa sigma| with X_H defined by omega(X_H, .) = dH.
double hamiltonian_field_residual(const PrepotentialAst& ast, const CVec& u);

using ScalarField = std::function<double(const CVec&)>;

/// Same with H in place of k^2 (gradient by a five-point stencil).
double hamiltonian_field_residual(const PrepotentialAst& ast, const CVec& u, const ScalarField& H);

struct WarpedResiduals {
  double w1 = 0.0;
  double w2 = 0.0;
};

WarpedResiduals warped_product_residuals(const PrepotentialAst& ast, const CVec& u, double r,
                                         const RVec& X, const RVec& Y);

/// |g_{ru}(rX, rY) - r^2 g_u(X, Y)|.
double cone_isometry_residual(const PrepotentialAst& ast, const CVec& u, double r, const RVec& X,
                              const RVec& Y);

}  // namespace skcone
