#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace skcone {

using cplx = std::complex<double>;

using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Prepotential text rejected by the parser. `offset` is a byte offset into
/// the source text.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownVariable, VariableOutOfRange, ZeroDenominator };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// A quotient (or negative power) whose denominator vanished at the
/// evaluation point. `node_offset` locates the node in the source text.
class EvalSingularity : public Error {
 public:
  EvalSingularity(std::size_t node_offset, const std::string& what)
      : Error(what + " (node at offset " + std::to_string(node_offset) + ")"),
        node_offset_(node_offset) {}

  std::size_t node_offset() const noexcept { return node_offset_; }

 private:
  std::size_t node_offset_;
};

/// Im(d^2 F) is numerically singular, so no special Kaehler metric exists here.
class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

/// Newton inversion of the flat chart failed.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Point outside the conic domain (k too small, wrong sign, ...).
class InadmissiblePoint : public Error {
 public:
  using Error::Error;
};

class AdmissibleRegionTooSmall : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition (wrong dimension, vector not
/// horizontal, generator outside its Lie algebra, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Real frame ordering: (Re z_0..Re z_n, Im z_0..Im z_n).
inline RVec to_real_frame(const CVec& z) {
  const auto n = z.size();
  RVec w(2 * n);
  w.head(n) = z.real();
  w.tail(n) = z.imag();
  return w;
}

inline CVec from_real_frame(const RVec& w) {
  const auto n = w.size() / 2;
  CVec z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = cplx(w[i], w[n + i]);
  return z;
}

}  // namespace skcone
