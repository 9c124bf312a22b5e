#include "skcone/homogeneous.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "skcone/geometry.hpp"

namespace skcone {

namespace {

template <std::size_t N>
int permutation_sign(const std::array<int, N>& p) {
  int s = 1;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b)
      if (p[a] > p[b]) s = -s;
  return s;
}

struct TripleTable {
  std::array<std::array<int, 3>, 20> list{};
  std::array<int, 216> index{};
  TripleTable() {
    index.fill(-1);
    int t = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        for (int k = j + 1; k < 6; ++k) {
          list[t] = {i, j, k};
          index[(i * 6 + j) * 6 + k] = t++;
        }
  }
};

const TripleTable& triples() {
  static const TripleTable table;
  return table;
}

// alpha_{ijk} for arbitrary index order.
cplx form_at(const CVec& alpha, int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  std::array<int, 3> t{i, j, k};
  const int s = permutation_sign(t);
  std::sort(t.begin(), t.end());
  return static_cast<double>(s) * alpha[triples().index[(t[0] * 6 + t[1]) * 6 + t[2]]];
}

void require_dimension(const QuarticCase& qc, const CVec& v) {
  if (v.size() != qc.dimension())
    throw PreconditionError("vector has dimension " + std::to_string(v.size()) + ", case " +
                            std::string(to_string(qc.tag)) + " needs " + std::to_string(qc.dimension()));
  if (qc.is_real() && v.imag().cwiseAbs().maxCoeff() > 0.0)
    throw PreconditionError("case " + std::string(to_string(qc.tag)) + " takes a real vector");
}

RMat omega6() {
  RMat W = RMat::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    W(2 * i, 2 * i + 1) = 1.0;
    W(2 * i + 1, 2 * i) = -1.0;
  }
  return W;
}

// The 6 x 20 matrix of beta -> omega ^ beta.
const RMat& wedge_matrix() {
  static const RMat L = [] {
    const RMat W = omega6();
    RMat out = RMat::Zero(6, 20);
    for (int m = 0; m < 6; ++m) {
      std::array<int, 5> I{};
      for (int x = 0, c = 0; x < 6; ++x)
        if (x != m) I[c++] = x;
      // split I into a pair P and a triple S
      for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) {
          const double w = W(I[a], I[b]);
          if (w == 0.0) continue;
          std::array<int, 5> order{I[a], I[b], 0, 0, 0};
          std::array<int, 3> S{};
          for (int x = 0, c = 0; x < 5; ++x)
            if (x != a && x != b) S[c++] = I[x];
          order[2] = S[0];
          order[3] = S[1];
          order[4] = S[2];
          out(m, triple_index(S[0], S[1], S[2])) += permutation_sign(order) * w;
        }
    }
    return out;
  }();
  return L;
}

cplx e6_quartic(const CVec& alpha) {
  const CMat A = e6_operator(alpha);
  return (A * A).trace();
}

double uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

RMat random_real(std::mt19937_64& rng, int r, int c) {
  RMat M(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) M(i, j) = uniform(rng);
  return M;
}

CMat random_complex(std::mt19937_64& rng, int r, int c) {
  CMat M(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) {
      const double re = uniform(rng);
      M(i, j) = cplx(re, uniform(rng));
    }
  return M;
}

}  // namespace

std::string_view to_string(QuarticTag tag) {
  switch (tag) {
    case QuarticTag::A: return "A";
    case QuarticTag::BD: return "BD";
    case QuarticTag::E6: return "E6";
    case QuarticTag::F: return "F";
    case QuarticTag::G: return "G";
  }
  return "?";
}

QuarticTag parse_quartic_tag(std::string_view name) {
  for (auto t : {QuarticTag::A, QuarticTag::BD, QuarticTag::E6, QuarticTag::F, QuarticTag::G})
    if (name == to_string(t)) return t;
  throw PreconditionError("unknown quartic case '" + std::string(name) + "'");
}

QuarticCase QuarticCase::make_A(int n, std::optional<RVec> epsilon) {
  if (n < 1) throw PreconditionError("case A needs n >= 1");
  QuarticCase qc;
  qc.tag = QuarticTag::A;
  qc.n = n;
  if (epsilon) {
    if (epsilon->size() != n + 1) throw PreconditionError("signature has the wrong length");
    for (double e : *epsilon)
      if (e != 1.0 && e != -1.0) throw PreconditionError("signature entries must be +1 or -1");
    qc.epsilon = *epsilon;
  } else {
    qc.epsilon = RVec::Ones(n + 1);
    qc.epsilon[n] = -1.0;
  }
  return qc;
}

QuarticCase QuarticCase::make_BD(int n) {
  if (n < 1) throw PreconditionError("case BD needs n >= 1");
  QuarticCase qc;
  qc.tag = QuarticTag::BD;
  qc.n = n;
  qc.G = RMat::Identity(n + 1, n + 1);
  qc.G(n - 1, n - 1) = -1.0;
  qc.G(n, n) = -1.0;
  qc.Omega = RMat{{0.0, 1.0}, {-1.0, 0.0}};
  return qc;
}

QuarticCase QuarticCase::make_E6() {
  QuarticCase qc;
  qc.tag = QuarticTag::E6;
  return qc;
}

QuarticCase QuarticCase::make_F() {
  QuarticCase qc;
  qc.tag = QuarticTag::F;
  qc.Omega = omega6();
  return qc;
}

QuarticCase QuarticCase::make_G() { return QuarticCase{}; }

int QuarticCase::dimension() const {
  switch (tag) {
    case QuarticTag::A: return n + 1;
    case QuarticTag::BD: return 2 * (n + 1);
    case QuarticTag::E6:
    case QuarticTag::F: return 20;
    case QuarticTag::G: return 4;
  }
  return 0;
}

int triple_index(int i, int j, int k) {
  if (!(0 <= i && i < j && j < k && k < 6)) throw PreconditionError("triple must satisfy 0 <= i < j < k < 6");
  return triples().index[(i * 6 + j) * 6 + k];
}

CMat e6_operator(const CVec& alpha) {
  if (alpha.size() != 20) throw PreconditionError("a 3-form on C^6 has 20 components");
  CMat A = CMat::Zero(6, 6);
  for (int m = 0; m < 6; ++m) {
    std::array<int, 5> I{};
    for (int x = 0, c = 0; x < 6; ++x)
      if (x != m) I[c++] = x;
    const double sm = (m % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < 6; ++i) {
      cplx beta{};
      for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
          for (int c = b + 1; c < 5; ++c) {
            std::array<int, 5> order{I[a], I[b], I[c], 0, 0};
            for (int x = 0, r = 3; x < 5; ++x)
              if (x != a && x != b && x != c) order[r++] = I[x];
            const cplx s = form_at(alpha, order[0], order[1], order[2]);
            if (s == cplx{}) continue;
            beta += static_cast<double>(permutation_sign(order)) * s * form_at(alpha, i, order[3], order[4]);
          }
      A(m, i) = sm * beta;
    }
  }
  return A;
}

RVec f_case_wedge(const RVec& beta) {
  if (beta.size() != 20) throw PreconditionError("a 3-form on R^6 has 20 components");
  return wedge_matrix() * beta;
}

RVec f_case_project(const RVec& beta) {
  if (beta.size() != 20) throw PreconditionError("a 3-form on R^6 has 20 components");
  const RMat& L = wedge_matrix();
  const RMat LLt = L * L.transpose();
  return beta - L.transpose() * LLt.ldlt().solve(L * beta);
}

cplx quartic_eval(const QuarticCase& qc, const CVec& v) {
  require_dimension(qc, v);
  switch (qc.tag) {
    case QuarticTag::A: {
      double g = 0.0;
      for (Eigen::Index j = 0; j < v.size(); ++j) g += 2.0 * qc.epsilon[j] * std::norm(v[j]);
      return g * g;
    }
    case QuarticTag::BD: {
      const RMat A = Eigen::Map<const CMat>(v.data(), qc.n + 1, 2).real();
      return (A.transpose() * qc.G * A * qc.Omega).determinant();
    }
    case QuarticTag::E6:
      return e6_quartic(v);
    case QuarticTag::F: {
      const RVec beta = v.real();
      if (f_case_wedge(beta).norm() > 1e-10 * (1.0 + beta.norm()))
        throw PreconditionError("F-case input is not in the kernel of omega ^ .");
      return e6_quartic(v).real();
    }
    case QuarticTag::G: {
      const double a = v[0].real(), b = v[1].real(), c = v[2].real(), d = v[3].real();
      // q = det Hess p = A x^2 + B xy + C y^2
      const double ha = 12.0 * a * c - 4.0 * b * b;
      const double hb = 36.0 * a * d - 4.0 * b * c;
      const double hc = 12.0 * b * d - 4.0 * c * c;
      return hb * hb - 4.0 * ha * hc;
    }
  }
  return 0.0;
}

CVec rep_action(const QuarticCase& qc, const RepElement& gen, const CVec& v) {
  require_dimension(qc, v);
  if (gen.tag != qc.tag) throw PreconditionError("generator belongs to another case");
  switch (qc.tag) {
    case QuarticTag::A:
      return gen.X * v;
    case QuarticTag::BD: {
      const CMat A = Eigen::Map<const CMat>(v.data(), qc.n + 1, 2);
      const CMat out = gen.X * A + A * gen.M.transpose();
      return Eigen::Map<const CVec>(out.data(), out.size());
    }
    case QuarticTag::E6:
    case QuarticTag::F: {
      CVec out = CVec::Zero(20);
      const auto& t = triples();
      for (int idx = 0; idx < 20; ++idx) {
        const auto [i, j, k] = t.list[idx];
        cplx acc{};
        for (int l = 0; l < 6; ++l)
          acc -= gen.X(l, i) * form_at(v, l, j, k) + gen.X(l, j) * form_at(v, i, l, k) +
                 gen.X(l, k) * form_at(v, i, j, l);
        out[idx] = acc;
      }
      return out;
    }
    case QuarticTag::G: {
      const cplx a = v[0], b = v[1], c = v[2], d = v[3];
      const cplx m11 = gen.X(0, 0), m12 = gen.X(0, 1), m21 = gen.X(1, 0), m22 = gen.X(1, 1);
      CVec out(4);
      out[0] = 3.0 * a * m11 + b * m21;
      out[1] = 3.0 * a * m12 + 2.0 * b * m11 + b * m22 + 2.0 * c * m21;
      out[2] = 2.0 * b * m12 + c * m11 + 2.0 * c * m22 + 3.0 * d * m21;
      out[3] = c * m12 + 3.0 * d * m22;
      return out;
    }
  }
  return v;
}

double membership_residual(const QuarticCase& qc, const RepElement& gen) {
  if (gen.tag != qc.tag) throw PreconditionError("generator belongs to another case");
  auto real_part_only = [](const CMat& M) { return M.size() ? M.imag().cwiseAbs().maxCoeff() : 0.0; };
  switch (qc.tag) {
    case QuarticTag::A: {
      const CMat eta = qc.epsilon.cast<cplx>().asDiagonal();
      return (gen.X.adjoint() * eta + eta * gen.X).norm() + std::abs(gen.X.trace());
    }
    case QuarticTag::BD: {
      const CMat G = qc.G.cast<cplx>();
      return (gen.X.transpose() * G + G * gen.X).norm() + std::abs(gen.M.trace()) + real_part_only(gen.X) +
             real_part_only(gen.M);
    }
    case QuarticTag::E6:
      return std::abs(gen.X.trace());
    case QuarticTag::F: {
      const CMat W = qc.Omega.cast<cplx>();
      return (gen.X.transpose() * W + W * gen.X).norm() + real_part_only(gen.X);
    }
    case QuarticTag::G:
      return std::abs(gen.X.trace()) + real_part_only(gen.X);
  }
  return 0.0;
}

double lie_invariance_residual(const QuarticCase& qc, const CVec& v, const RepElement& gen) {
  const double scale = 1.0 + gen.X.norm() + gen.M.norm();
  if (membership_residual(qc, gen) > 1e-12 * scale)
    throw PreconditionError("generator is outside the case's Lie algebra");
  const cplx q = quartic_eval(qc, v);
  const CVec dv = rep_action(qc, gen, v);
  const double len = dv.norm();
  if (len == 0.0) return 0.0;
  const CVec d = dv / len;
  const double h = 1e-6 * (1.0 + v.norm());
  auto Q = [&](const CVec& w) {
    if (qc.tag == QuarticTag::F) return e6_quartic(w);
    return quartic_eval(qc, w);
  };
  const cplx dq = len * (Q(CVec(v + h * d)) - Q(CVec(v - h * d))) / (2.0 * h);
  return std::abs(dq) / (1.0 + std::abs(q));
}

RepElement zero_generator(const QuarticCase& qc) {
  RepElement gen;
  gen.tag = qc.tag;
  switch (qc.tag) {
    case QuarticTag::A: gen.X = CMat::Zero(qc.n + 1, qc.n + 1); break;
    case QuarticTag::BD:
      gen.X = CMat::Zero(qc.n + 1, qc.n + 1);
      gen.M = CMat::Zero(2, 2);
      break;
    case QuarticTag::E6:
    case QuarticTag::F: gen.X = CMat::Zero(6, 6); break;
    case QuarticTag::G: gen.X = CMat::Zero(2, 2); break;
  }
  return gen;
}

RepElement random_generator(const QuarticCase& qc, std::mt19937_64& rng) {
  RepElement gen;
  gen.tag = qc.tag;
  switch (qc.tag) {
    case QuarticTag::A: {
      const int m = qc.n + 1;
      const CMat R = random_complex(rng, m, m);
      const CMat S = R - R.adjoint();  // anti-Hermitian
      CMat K = qc.epsilon.cast<cplx>().asDiagonal() * S;
      K -= (K.trace() / static_cast<double>(m)) * CMat::Identity(m, m);
      gen.X = K;
      break;
    }
    case QuarticTag::BD: {
      const RMat R = random_real(rng, qc.n + 1, qc.n + 1);
      gen.X = (qc.G * (R - R.transpose())).cast<cplx>();
      RMat M = random_real(rng, 2, 2);
      M(1, 1) = -M(0, 0);
      gen.M = M.cast<cplx>();
      break;
    }
    case QuarticTag::E6: {
      CMat X = random_complex(rng, 6, 6);
      X -= (X.trace() / 6.0) * CMat::Identity(6, 6);
      gen.X = X;
      break;
    }
    case QuarticTag::F: {
      const RMat R = random_real(rng, 6, 6);
      const RMat S = R + R.transpose();
      gen.X = (qc.Omega.inverse() * S).cast<cplx>();
      break;
    }
    case QuarticTag::G: {
      RMat M = random_real(rng, 2, 2);
      M(1, 1) = -M(0, 0);
      gen.X = M.cast<cplx>();
      break;
    }
  }
  return gen;
}

CVec random_vector(const QuarticCase& qc, std::mt19937_64& rng) {
  switch (qc.tag) {
    case QuarticTag::A:
    case QuarticTag::E6:
      return random_complex(rng, qc.dimension(), 1).col(0);
    case QuarticTag::F:
      return f_case_project(random_real(rng, 20, 1).col(0)).cast<cplx>();
    case QuarticTag::BD:
    case QuarticTag::G:
      return random_real(rng, qc.dimension(), 1).col(0).cast<cplx>();
  }
  return {};
}

std::optional<RVec> case_a_signature(const PrepotentialAst& ast, const CVec& z) {
  const CMat F2 = eval_jet(ast, z, 2).hessian();
  const int m = ast.n_vars();
  RVec eps(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const cplx want = (i == j) ? F2(i, i) : cplx{};
      if (std::abs(F2(i, j) - want) > 1e-12) return std::nullopt;
    }
  for (int i = 0; i < m; ++i) {
    const cplx d = F2(i, i);
    if (std::abs(d.real()) > 1e-12 || std::abs(std::abs(d.imag()) - 2.0) > 1e-12) return std::nullopt;
    eps[i] = d.imag() > 0 ? 1.0 : -1.0;
  }
  return eps;
}

QRatio q_proportional_ksq(const QuarticCase& qc, const PrepotentialAst& ast, std::span<const CVec> samples) {
  if (qc.tag != QuarticTag::A) throw PreconditionError("Q ~ k^2 is stated for case A");
  if (ast.n_vars() != qc.n + 1) throw PreconditionError("prepotential and case dimensions differ");
  QRatio out;
  std::vector<double> ratios;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto eps = case_a_signature(ast, samples[s]);
    if (!eps || *eps != qc.epsilon) throw PreconditionError("prepotential signature does not match the case");
    const double k = kahler_potential(ast, samples[s]);
    if (!(std::abs(k) >= kDefaultKMin)) {
      out.skipped.push_back(s);
      continue;
    }
    ratios.push_back(quartic_eval(qc, samples[s]).real() / (k * k));
  }
  if (ratios.empty()) throw InadmissiblePoint("no sample with nonzero k");
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  out.ratio = mean;
  if (ratios.size() > 1) {
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    out.rel_spread = (*hi - *lo) / std::abs(mean);
  }
  return out;
}

}  // namespace skcone
