#include "skcone/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace skcone {

namespace {

constexpr double kSingularThreshold = 1e-300;

// Graded monomial basis for truncated Taylor series in n variables up to a
// total degree, with the product table and the map from derivative index
// tuples to monomials.
struct MonomialTable {
  int n = 0;
  int order = 0;
  std::vector<std::vector<int>> exponents;
  std::vector<double> factorial;  // alpha! per monomial
  struct Product {
    int a, b, out;
  };
  std::vector<Product> products;
  // tuple_monomial[m][flat tuple index] -> monomial index
  std::array<std::vector<int>, ComplexJet::kMaxOrder + 1> tuple_monomial;
  std::vector<int> unit;  // monomial index of the degree-1 term in variable i
};

void enumerate(int n, int var, int remaining, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (var == n) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[var] = e;
    enumerate(n, var + 1, remaining - e, cur, out);
  }
  cur[var] = 0;
}

std::shared_ptr<const MonomialTable> build_table(int n, int order) {
  auto t = std::make_shared<MonomialTable>();
  t->n = n;
  t->order = order;
  std::vector<int> cur(n, 0);
  for (int deg = 0; deg <= order; ++deg) {
    std::vector<std::vector<int>> level;
    std::vector<int> scratch(n, 0);
    enumerate(n, 0, deg, scratch, level);
    for (auto& e : level) {
      int s = 0;
      for (int x : e) s += x;
      if (s == deg) t->exponents.push_back(std::move(e));
    }
  }
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < static_cast<int>(t->exponents.size()); ++i) {
    index.emplace(t->exponents[i], i);
    double f = 1.0;
    for (int e : t->exponents[i]) {
      for (int k = 2; k <= e; ++k) f *= k;
    }
    t->factorial.push_back(f);
  }
  const int m = static_cast<int>(t->exponents.size());
  std::vector<int> deg(m);
  for (int i = 0; i < m; ++i) {
    int s = 0;
    for (int e : t->exponents[i]) s += e;
    deg[i] = s;
  }
  std::vector<int> sum(n);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      if (deg[a] + deg[b] > order) continue;
      for (int v = 0; v < n; ++v) sum[v] = t->exponents[a][v] + t->exponents[b][v];
      t->products.push_back({a, b, index.at(sum)});
    }
  }
  t->unit.resize(n);
  for (int v = 0; v < n && order >= 1; ++v) {
    std::vector<int> e(n, 0);
    e[v] = 1;
    t->unit[v] = index.at(e);
  }
  for (int rank = 0; rank <= order; ++rank) {
    std::size_t count = 1;
    for (int r = 0; r < rank; ++r) count *= static_cast<std::size_t>(n);
    auto& map = t->tuple_monomial[rank];
    map.resize(count);
    std::vector<int> e(n);
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::fill(e.begin(), e.end(), 0);
      std::size_t rest = flat;
      for (int r = 0; r < rank; ++r) {
        ++e[rest % n];
        rest /= n;
      }
      map[flat] = index.at(e);
    }
  }
  return t;
}

std::shared_ptr<const MonomialTable> table_for(int n, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, order}];
  if (!slot) slot = build_table(n, order);
  return slot;
}

using Series = std::vector<cplx>;

class JetEvaluator {
 public:
  JetEvaluator(const MonomialTable& t, std::span<const cplx> z) : t_(t), z_(z) {}

  Series eval(const Node& node) const {
    switch (node.kind) {
      case NodeKind::Literal:
        return constant(node.value);
      case NodeKind::Variable: {
        auto s = constant(z_[node.index]);
        if (t_.order >= 1) s[t_.unit[node.index]] = 1.0;
        return s;
      }
      case NodeKind::Neg: {
        auto s = eval(*node.lhs);
        for (auto& c : s) c = -c;
        return s;
      }
      case NodeKind::Add:
      case NodeKind::Sub: {
        auto a = eval(*node.lhs);
        const auto b = eval(*node.rhs);
        const double sign = node.kind == NodeKind::Add ? 1.0 : -1.0;
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += sign * b[i];
        return a;
      }
      case NodeKind::Mul:
        return mul(eval(*node.lhs), eval(*node.rhs));
      case NodeKind::Div:
        return mul(eval(*node.lhs), inverse(eval(*node.rhs), node.offset));
      case NodeKind::Pow:
        return power(eval(*node.lhs), node.exponent, node.offset);
    }
    return {};
  }

 private:
  Series constant(cplx v) const {
    Series s(t_.exponents.size(), cplx{});
    s[0] = v;
    return s;
  }

  Series mul(const Series& a, const Series& b) const {
    Series out(a.size(), cplx{});
    for (const auto& p : t_.products) out[p.out] += a[p.a] * b[p.b];
    return out;
  }

  // 1/b = (1/b0) * sum_k (-t/b0)^k with t = b - b0 nilpotent of index order+1.
  Series inverse(const Series& b, std::size_t offset) const {
    const cplx b0 = b[0];
    if (std::abs(b0) < kSingularThreshold) throw EvalSingularity(offset, "vanishing denominator");
    Series step = b;
    step[0] = 0.0;
    for (auto& c : step) c = -c / b0;
    Series sum = constant(1.0);
    Series term = constant(1.0);
    for (int k = 1; k <= t_.order; ++k) {
      term = mul(term, step);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
    }
    for (auto& c : sum) c /= b0;
    return sum;
  }

  Series power(Series base, int e, std::size_t offset) const {
    if (e < 0) {
      base = inverse(base, offset);
      e = -e;
    }
    Series result = constant(1.0);
    while (e > 0) {
      if (e & 1) result = mul(result, base);
      e >>= 1;
      if (e > 0) base = mul(base, base);
    }
    return result;
  }

  const MonomialTable& t_;
  std::span<const cplx> z_;
};

}  // namespace

ComplexJet::ComplexJet(int n_vars, int order) : n_vars_(n_vars), order_(order) {
  if (order < 0 || order > kMaxOrder) throw PreconditionError("jet order must lie in [0, 4]");
  std::size_t count = 1;
  for (int m = 1; m <= order; ++m) {
    count *= static_cast<std::size_t>(n_vars);
    deriv_[m].assign(count, cplx{});
  }
}

cplx ComplexJet::partial(std::span<const int> indices) const {
  const int m = static_cast<int>(indices.size());
  if (m > order_) throw PreconditionError("derivative order exceeds jet order");
  if (m == 0) return value_;
  std::size_t flat = 0;
  for (int idx : indices) flat = flat * n_vars_ + static_cast<std::size_t>(idx);
  return deriv_[m][flat];
}

CVec ComplexJet::gradient() const {
  CVec g(n_vars_);
  for (int i = 0; i < n_vars_; ++i) g[i] = d1(i);
  return g;
}

CMat ComplexJet::hessian() const {
  CMat h(n_vars_, n_vars_);
  for (int i = 0; i < n_vars_; ++i)
    for (int j = 0; j < n_vars_; ++j) h(i, j) = d2(i, j);
  return h;
}

ComplexJet eval_jet(const PrepotentialAst& ast, std::span<const cplx> z, int order) {
  const int n = ast.n_vars();
  if (static_cast<int>(z.size()) != n) throw PreconditionError("point dimension does not match n_vars");
  ComplexJet jet(n, order);
  const auto table = table_for(n, order);
  const auto series = JetEvaluator(*table, z).eval(ast.root());
  jet.value_ = series[0];
  for (int m = 1; m <= order; ++m) {
    const auto& map = table->tuple_monomial[m];
    auto& out = jet.deriv_[m];
    for (std::size_t flat = 0; flat < map.size(); ++flat) {
      const int mono = map[flat];
      out[flat] = table->factorial[mono] * series[mono];
    }
  }
  return jet;
}

ComplexJet eval_jet(const PrepotentialAst& ast, const CVec& z, int order) {
  return eval_jet(ast, std::span<const cplx>(z.data(), static_cast<std::size_t>(z.size())), order);
}

double jet_fd_discrepancy(const PrepotentialAst& ast, const CVec& z, double rel_step) {
  const int n = ast.n_vars();
  const auto exact = eval_jet(ast, z, ComplexJet::kMaxOrder);
  const double h = rel_step * std::max(1.0, z.norm());
  double worst = 0.0;
  for (int v = 0; v < n; ++v) {
    CVec zp = z, zm = z;
    zp[v] += h;
    zm[v] -= h;
    const auto jp = eval_jet(ast, zp, ComplexJet::kMaxOrder - 1);
    const auto jm = eval_jet(ast, zm, ComplexJet::kMaxOrder - 1);
    std::size_t block = 1;
    for (int m = 1; m <= ComplexJet::kMaxOrder; ++m) {
      // tuples (v, t) with t running over n^(m-1) entries
      for (std::size_t t = 0; t < block; ++t) {
        const cplx lo = m == 1 ? jm.value() : jm.tensor(m - 1)[t];
        const cplx hi = m == 1 ? jp.value() : jp.tensor(m - 1)[t];
        const cplx d = exact.tensor(m)[static_cast<std::size_t>(v) * block + t];
        worst = std::max(worst, std::abs(d - (hi - lo) / (2.0 * h)) / (1.0 + std::abs(d)));
      }
      block *= static_cast<std::size_t>(n);
    }
  }
  return worst;
}

HomogeneityReport check_homogeneity(const PrepotentialAst& ast, std::span<const CVec> samples,
                                    std::span<const cplx> scales) {
  HomogeneityReport report;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const CVec& z = samples[s];
    try {
      const auto jet = eval_jet(ast, z, 1);
      const cplx f = jet.value();
      cplx euler = -2.0 * f;
      for (int i = 0; i < ast.n_vars(); ++i) euler += z[i] * jet.d1(i);
      report.euler_residual =
          std::max(report.euler_residual, std::abs(euler) / (1.0 + std::abs(2.0 * f)));
      for (const cplx lambda : scales) {
        const CVec scaled = lambda * z;
        const cplx expected = lambda * lambda * f;
        const double r = std::abs(evaluate(ast, scaled) - expected) / (1.0 + std::abs(expected));
        report.scale_residual = std::max(report.scale_residual, r);
      }
    } catch (const EvalSingularity&) {
      report.skipped.push_back(s);
    }
  }
  return report;
}

}  // namespace skcone
