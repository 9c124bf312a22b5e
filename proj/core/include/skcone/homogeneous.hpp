#pragma once

// Quartic invariants Q on the representations V of the homogeneous
// projective special Kaehler cases A, BD, E6, F and G, together with the
// Lie algebra actions used to test their invariance.
//
// Vector layouts (all stored as complex vectors; real cases have zero
// imaginary part):
//   A   v in C^{n+1}
//   BD  (n+1) x 2 real matrix, column-major
//   E6  20 components alpha_{ijk}, i < j < k in 0..5, lexicographic
//   F   real 3-form in the E6 layout, in the kernel of omega ^ .
//   G   (a, b, c, d) for p = a x^3 + b x^2 y + c x y^2 + d y^3

#include <optional>
#include <random>
#include <span>
#include <string_view>

#include "skcone/expr.hpp"
#include "skcone/types.hpp"

namespace skcone {

enum class QuarticTag { A, BD, E6, F, G };

std::string_view to_string(QuarticTag tag);
/// Throws PreconditionError on an unknown name.
QuarticTag parse_quartic_tag(std::string_view name);

struct QuarticCase {
  QuarticTag tag = QuarticTag::G;
  int n = 0;
  RVec epsilon;  ///< A: signature, default diag(1 x n, -1)
  RMat G;        ///< BD: diag(1 x (n-1), -1, -1)
  RMat Omega;    ///< BD: 2x2 symplectic; F: 6x6 matrix of sum dx^{2i} ^ dx^{2i+1}

  static QuarticCase make_A(int n, std::optional<RVec> epsilon = std::nullopt);
  static QuarticCase make_BD(int n);
  static QuarticCase make_E6();
  static QuarticCase make_F();
  static QuarticCase make_G();

  int dimension() const;
  bool is_real() const { return tag != QuarticTag::A && tag != QuarticTag::E6; }
};

/// Lie algebra element acting on V. A: K in su(n,1); BD: (B, M) in
/// so(n-1,2) + sl(2,R); E6: X in sl(6,C); F: X in sp(6,R); G: M in sl(2,R).
struct RepElement {
  QuarticTag tag = QuarticTag::G;
  CMat X;
  CMat M;  ///< BD only
};

cplx quartic_eval(const QuarticCase& qc, const CVec& v);

/// rho(gen) v.
CVec rep_action(const QuarticCase& qc, const RepElement& gen, const CVec& v);

/// Deviation of gen from its Lie algebra.
double membership_residual(const QuarticCase& qc, const RepElement& gen);

/// |dQ_v(rho(gen) v)| / (1 + |Q(v)|); dQ by central differences.
double lie_invariance_residual(const QuarticCase& qc, const CVec& v, const RepElement& gen);

RepElement zero_generator(const QuarticCase& qc);
RepElement random_generator(const QuarticCase& qc, std::mt19937_64& rng);
CVec random_vector(const QuarticCase& qc, std::mt19937_64& rng);

/// A_alpha : v -> alpha ^ i_v alpha, read as a covector through dz^1 ^ ... ^ dz^6.
CMat e6_operator(const CVec& alpha);

/// Index of the triple i < j < k in the E6 layout.
int triple_index(int i, int j, int k);

/// omega ^ beta as 6 components (the 5-form on [6] minus {m}, m = 0..5).
RVec f_case_wedge(const RVec& beta);

/// Euclidean projection of beta onto ker(omega ^ .).
RVec f_case_project(const RVec& beta);

struct QRatio {
  double ratio = 0.0;
  double rel_spread = 0.0;
  std::vector<std::size_t> skipped;
};

/// Q(z) / k(z)^2 over samples for a case-A prepotential i * sum eps_j z_j^2.
QRatio q_proportional_ksq(const QuarticCase& qc, const PrepotentialAst& ast, std::span<const CVec> samples);

/// eps if d^2F at z equals 2i diag(eps) with eps_j = +-1.
std::optional<RVec> case_a_signature(const PrepotentialAst& ast, const CVec& z);

}  // namespace skcone
