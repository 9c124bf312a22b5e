#pragma once

// The projective special Kaehler metric gbar on the space of C*-orbits,
//   gbar(dpi X, dpi X) = g(X, X) / g(u, u) - |h(X, xi) / h(xi, xi)|^2,
// and the submersion S -> U / C*.

#include "skcone/geometry.hpp"

namespace skcone {

struct ProjectiveSample {
  CVec u;
  RVec X_h;
  double gbar_val = 0.0;
};

/// X minus its h-projection onto the complex line through xi.
RVec horizontal_project(const PrepotentialAst& ast, const CVec& u, const RVec& X);

double projective_metric(const PrepotentialAst& ast, const CVec& u, const RVec& X);

/// Polarization of projective_metric.
double projective_metric(const PrepotentialAst& ast, const CVec& u, const RVec& X, const RVec& Y);

ProjectiveSample projective_sample(const PrepotentialAst& ast, const CVec& u, const RVec& X);

/// |gbar(X, X) - kappa g(X, X)| for u on S and horizontal X.
double submersion_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X);

/// |g(u, u) gbar(X, Y) - g(X, Y)| for horizontal X, Y at u on S.
double pullback_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X, const RVec& Y);

/// |gbar(lambda u, lambda X) - gbar(u, X)|, X transported by complex multiplication.
double projective_invariance_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X, cplx lambda);

struct ProjectiveKernel {
  double vertical = 0.0;       ///< max |gbar| on xi and J xi
  double min_singular = 0.0;   ///< smallest singular value of gbar on the horizontal space
};

ProjectiveKernel projective_kernel(const PrepotentialAst& ast, const CVec& u);

/// i * (z0^2 + ... + z_{n-1}^2).
PrepotentialAst fubini_study_prepotential(int n_vars);

/// |X|^2 / |u|^2 - |<X, u>|^2 / |u|^4 with X given in the real frame.
double fubini_study_closed_form(const CVec& u, const RVec& X);

/// Ratio of projective_metric for the Fubini-Study prepotential to the
/// closed form, fitted by least squares on a fixed reference set.
double fubini_study_constant();

/// |gbar - c * closed form| with the fitted constant c.
double fubini_study_compare(const CVec& u, const RVec& X);

}  // namespace skcone
