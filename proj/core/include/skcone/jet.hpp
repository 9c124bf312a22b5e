#pragma once

#include <array>
#include <span>
#include <vector>

#include "skcone/expr.hpp"
#include "skcone/types.hpp"

namespace skcone {

/// Value of F and its holomorphic partial derivatives up to `order` (<= 4)
/// at one point. deriv[m] is stored densely over n_vars^m index tuples and
/// is filled from a single Taylor coefficient per multiset, so it is exactly
/// symmetric.
class ComplexJet {
 public:
  static constexpr int kMaxOrder = 4;

  ComplexJet(int n_vars, int order);

  int n_vars() const { return n_vars_; }
  int order() const { return order_; }

  cplx value() const { return value_; }
  cplx d1(int i) const { return deriv_[1][i]; }
  cplx d2(int i, int j) const { return deriv_[2][i * n_vars_ + j]; }
  cplx d3(int i, int j, int k) const { return deriv_[3][(i * n_vars_ + j) * n_vars_ + k]; }
  cplx d4(int i, int j, int k, int l) const {
    return deriv_[4][((i * n_vars_ + j) * n_vars_ + k) * n_vars_ + l];
  }

  /// Partial derivative for an arbitrary index tuple of length <= order.
  cplx partial(std::span<const int> indices) const;

  CVec gradient() const;
  CMat hessian() const;

  /// Flat row-major storage of deriv[m] (n_vars^m entries).
  const std::vector<cplx>& tensor(int m) const { return deriv_[m]; }

 private:
  friend ComplexJet eval_jet(const PrepotentialAst&, std::span<const cplx>, int);

  int n_vars_;
  int order_;
  cplx value_{};
  std::array<std::vector<cplx>, kMaxOrder + 1> deriv_;
};

/// Truncated multivariate Taylor evaluation of the AST around z.
ComplexJet eval_jet(const PrepotentialAst& ast, std::span<const cplx> z, int order);
ComplexJet eval_jet(const PrepotentialAst& ast, const CVec& z, int order);

struct HomogeneityReport {
  double scale_residual = 0.0;  ///< max |F(lz) - l^2 F(z)| / (1 + |l^2 F(z)|)
  double euler_residual = 0.0;  ///< max |sum z_i F_i - 2F| / (1 + |2F|)
  std::vector<std::size_t> skipped;  ///< indices of singular samples
};

/// max over m = 1..4 and index tuples of |d^m F - D(d^{m-1} F)| / (1 + |d^m F|),
/// D a central difference along each variable with step rel_step * max(1, |z|).
double jet_fd_discrepancy(const PrepotentialAst& ast, const CVec& z, double rel_step = 1e-5);

HomogeneityReport check_homogeneity(const PrepotentialAst& ast, std::span<const CVec> samples,
                                    std::span<const cplx> scales);

}  // namespace skcone
