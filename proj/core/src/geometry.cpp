#include "skcone/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skcone {

namespace {

constexpr int kMaxNewtonSteps = 50;

const cplx kI(0.0, 1.0);

RMat complex_structure(int n) {
  RMat J = RMat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = -RMat::Identity(n, n);
  J.bottomLeftCorner(n, n) = RMat::Identity(n, n);
  return J;
}

void check_nondegenerate(const RMat& N) {
  const double scale = std::max(1.0, N.cwiseAbs().maxCoeff());
  const double det = N.determinant();
  if (!std::isfinite(det) || std::abs(det) < kDegenerateDetRel * std::pow(scale, N.rows()))
    throw DegenerateMetric("Im d2F is degenerate (det = " + std::to_string(det) + ")");
}

// flat(z) and its Jacobian from a jet of order >= 2.
void flat_map(const ComplexJet& jet, const CVec& z, RVec& flat, RMat& jac) {
  const int n = jet.n_vars();
  flat.resize(2 * n);
  jac = RMat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    flat[i] = z[i].real();
    flat[n + i] = jet.d1(i).real();
    jac(i, i) = 1.0;
    for (int j = 0; j < n; ++j) {
      jac(n + i, j) = jet.d2(i, j).real();
      jac(n + i, n + j) = -jet.d2(i, j).imag();
    }
  }
}

}  // namespace

cplx DomainSample::hermitian(const RVec& X, const RVec& Y) const {
  const CVec x = from_real_frame(X);
  const CVec y = from_real_frame(Y);
  return x.transpose() * h * y.conjugate();
}

double kahler_potential(const PrepotentialAst& ast, const CVec& z) {
  const auto jet = eval_jet(ast, z, 1);
  cplx s{};
  for (int i = 0; i < ast.n_vars(); ++i) s += jet.d1(i) * std::conj(z[i]);
  return 0.5 * s.imag();
}

DomainSample domain_sample(const PrepotentialAst& ast, const CVec& z) {
  const int n = ast.n_vars();
  if (z.size() != n) throw PreconditionError("point dimension does not match n_vars");
  const auto jet = eval_jet(ast, z, 3);
  const CMat F2 = jet.hessian();
  const RMat N = F2.imag();
  check_nondegenerate(N);

  DomainSample s;
  s.z = z;
  cplx pairing{};
  for (int i = 0; i < n; ++i) pairing += jet.d1(i) * std::conj(z[i]);
  s.k = 0.5 * pairing.imag();

  // dk/dz_j = (sum_i F_ij conj(z_i) - conj(F_j)) / 4i
  CVec kz(n);
  for (int j = 0; j < n; ++j) {
    cplx acc{};
    for (int i = 0; i < n; ++i) acc += F2(i, j) * std::conj(z[i]);
    kz[j] = (acc - std::conj(jet.d1(j))) / (4.0 * kI);
  }
  s.dk.resize(2 * n);
  s.dk.head(n) = 2.0 * kz.real();
  s.dk.tail(n) = -2.0 * kz.imag();

  CMat K2(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      cplx acc{};
      for (int i = 0; i < n; ++i) acc += jet.d3(i, j, l) * std::conj(z[i]);
      K2(j, l) = acc / (4.0 * kI);
    }
  s.d2k.resize(2 * n, 2 * n);
  s.d2k.topLeftCorner(n, n) = N + 2.0 * K2.real();
  s.d2k.topRightCorner(n, n) = -2.0 * K2.imag();
  s.d2k.bottomLeftCorner(n, n) = -2.0 * K2.imag();
  s.d2k.bottomRightCorner(n, n) = N - 2.0 * K2.real();

  s.h = N.cast<cplx>();
  s.g = RMat::Zero(2 * n, 2 * n);
  s.g.topLeftCorner(n, n) = N;
  s.g.bottomRightCorner(n, n) = N;
  s.J = complex_structure(n);
  s.omega = s.J.transpose() * s.g;

  flat_map(jet, z, s.flat, s.flat_jac);
  s.flat_hess.assign(2 * n, RMat::Zero(2 * n, 2 * n));
  for (int i = 0; i < n; ++i) {
    RMat& H = s.flat_hess[n + i];
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const cplx t = jet.d3(i, j, l);
        H(j, l) = t.real();
        H(j, n + l) = -t.imag();
        H(n + j, l) = -t.imag();
        H(n + j, n + l) = -t.real();
      }
  }
  return s;
}

bool is_admissible(const PrepotentialAst& ast, const CVec& z, double k_min) {
  try {
    const auto s = domain_sample(ast, z);
    return std::isfinite(s.k) && std::abs(s.k) >= k_min;
  } catch (const EvalSingularity&) {
    return false;
  } catch (const DegenerateMetric&) {
    return false;
  }
}

FlatInversion invert_flat_coords(const PrepotentialAst& ast, const RVec& target, const CVec& z_init) {
  const int n = ast.n_vars();
  if (target.size() != 2 * n || z_init.size() != n)
    throw PreconditionError("flat target or seed has the wrong dimension");
  const double tol = 1e-12 * (1.0 + target.norm());
  const double floor = 1e-15 * (1.0 + target.norm());

  RVec w = to_real_frame(z_init);
  RVec flat;
  RMat jac;
  bool polished = false;
  for (int it = 0; it <= kMaxNewtonSteps; ++it) {
    const CVec z = from_real_frame(w);
    try {
      flat_map(eval_jet(ast, z, 2), z, flat, jac);
      if (it > 0) check_nondegenerate(jac.bottomRightCorner(n, n));
    } catch (const Error& e) {
      // failures at the seed itself propagate unchanged
      if (it == 0) throw;
      throw NoConvergence(std::string("flat chart inversion left the domain: ") + e.what());
    }
    const RVec r = flat - target;
    const double res = r.norm();
    if (!std::isfinite(res)) break;
    if (res <= tol) {
      // inside the tolerance: take at most one more (polishing) step
      if (res <= floor || polished) return {z, it};
      polished = true;
    }
    if (it == kMaxNewtonSteps) break;
    check_nondegenerate(jac.bottomRightCorner(n, n));
    const RVec step = jac.partialPivLu().solve(r);
    const RVec next = w - step;
    if (polished) {
      const CVec zn = from_real_frame(next);
      RVec fn;
      RMat jn;
      flat_map(eval_jet(ast, zn, 2), zn, fn, jn);
      if ((fn - target).norm() >= res) return {z, it};
      return {zn, it + 1};
    }
    w = next;
  }
  throw NoConvergence("flat chart inversion did not converge in 50 Newton steps");
}

RMat flat_hessian_of_k(const DomainSample& s) {
  const auto lu = s.flat_jac.partialPivLu();
  const RMat jinv = lu.inverse();
  const RVec grad_p = jinv.transpose() * s.dk;
  RMat M = s.d2k;
  for (std::size_t c = 0; c < s.flat_hess.size(); ++c) M -= grad_p[static_cast<Eigen::Index>(c)] * s.flat_hess[c];
  return jinv.transpose() * M * jinv;
}

RMat flat_hessian_of_k(const PrepotentialAst& ast, const CVec& z) {
  return flat_hessian_of_k(domain_sample(ast, z));
}

RMat flat_hessian_of_k_fd(const PrepotentialAst& ast, const CVec& z, double rel_step) {
  const auto s = domain_sample(ast, z);
  const RVec p0 = s.flat;
  const auto m = p0.size();
  const double h = chart_step(p0, rel_step);
  auto K = [&](const RVec& p) { return kahler_potential(ast, invert_flat_coords(ast, p, z).z); };

  RMat H(m, m);
  const double k0 = s.k;
  for (Eigen::Index a = 0; a < m; ++a) {
    RVec pp = p0, pm = p0;
    pp[a] += h;
    pm[a] -= h;
    H(a, a) = (K(pp) - 2.0 * k0 + K(pm)) / (h * h);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      RVec q = p0;
      double acc = 0.0;
      for (int sa : {1, -1})
        for (int sb : {1, -1}) {
          q = p0;
          q[a] += sa * h;
          q[b] += sb * h;
          acc += sa * sb * K(q);
        }
      H(a, b) = H(b, a) = acc / (4.0 * h * h);
    }
  }
  return H;
}

RMat pushforward_metric(const DomainSample& s) {
  const RMat jinv = s.flat_jac.partialPivLu().inverse();
  return jinv.transpose() * s.g * jinv;
}

MongeAmpereSpread monge_ampere_spread(const PrepotentialAst& ast, std::span<const CVec> samples) {
  MongeAmpereSpread out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      const auto s = domain_sample(ast, samples[i]);
      if (!(std::abs(s.k) >= kDefaultKMin)) {
        out.skipped.push_back(i);
        continue;
      }
      out.values.push_back(std::abs(flat_hessian_of_k(s).determinant()));
    } catch (const EvalSingularity&) {
      out.skipped.push_back(i);
    } catch (const DegenerateMetric&) {
      out.skipped.push_back(i);
    }
  }
  if (out.values.empty()) throw InadmissiblePoint("no admissible sample for the Monge-Ampere spread");
  if (out.values.size() > 1) {
    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    double mean = 0.0;
    for (double v : out.values) mean += v;
    mean /= static_cast<double>(out.values.size());
    out.rel_spread = (*hi - *lo) / mean;
  }
  return out;
}

Lemma1Residuals lemma1_residuals(const PrepotentialAst& ast, const CVec& z) {
  const auto s = domain_sample(ast, z);
  const int n = s.n_vars();
  const RVec xi = s.xi();
  const CVec c = s.h.transpose() * z;
  CVec dbar(n);
  for (int j = 0; j < n; ++j) dbar[j] = 0.5 * cplx(s.dk[j], s.dk[n + j]);

  Lemma1Residuals r;
  r.r1 = (c - 2.0 * dbar).norm();
  r.r2 = (s.g * xi - s.dk).norm();
  r.r3 = std::abs(xi.dot(s.g * xi) - 2.0 * s.k);
  return r;
}

ChartPoint chart_point(const PrepotentialAst& ast, const CVec& z) {
  ChartPoint c;
  c.s = domain_sample(ast, z);
  c.p = c.s.flat;
  c.jac_inv = c.s.flat_jac.partialPivLu().inverse();
  c.g_flat = c.jac_inv.transpose() * c.s.g * c.jac_inv;
  c.omega_flat = c.jac_inv.transpose() * c.s.omega * c.jac_inv;
  c.J_flat = c.s.flat_jac * c.s.J * c.jac_inv;
  c.dk_flat = c.jac_inv.transpose() * c.s.dk;
  return c;
}

ChartPoint chart_point_at(const PrepotentialAst& ast, const RVec& p, const CVec& seed) {
  return chart_point(ast, invert_flat_coords(ast, p, seed).z);
}

double exterior_derivative_residual(const MatrixField& field, const RVec& p, double step) {
  const auto m = p.size();
  std::vector<RMat> d(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    RVec pp = p, pm = p;
    pp[a] += step;
    pm[a] -= step;
    d[a] = (field(pp) - field(pm)) / (2.0 * step);
  }
  double worst = 0.0;
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a + 1; b < m; ++b)
      for (Eigen::Index c = 0; c < m; ++c)
        worst = std::max(worst, std::abs(d[a](c, b) - d[b](c, a)));
  return worst;
}

MatrixField complex_structure_field(const PrepotentialAst& ast, const CVec& seed) {
  return [ast, seed](const RVec& p) {
    const auto s = domain_sample(ast, invert_flat_coords(ast, p, seed).z);
    return RMat(s.flat_jac * s.J * s.flat_jac.partialPivLu().inverse());
  };
}

double dnabla_J_residual(const PrepotentialAst& ast, const CVec& z) {
  const auto s = domain_sample(ast, z);
  return exterior_derivative_residual(complex_structure_field(ast, z), s.flat, chart_step(s.flat));
}

RVec parabolic_immersion(const PrepotentialAst& ast, const CVec& z) {
  const auto s = domain_sample(ast, z);
  RVec out(s.flat.size() + 1);
  out.head(s.flat.size()) = s.flat;
  out[s.flat.size()] = s.k;
  return out;
}

double xi_position_residual(const DomainSample& s) {
  return (s.flat_jac * s.xi() - s.flat).norm();
}

double cone_scaling_residual(const PrepotentialAst& ast, const CVec& z, const RVec& X, double r) {
  const auto s1 = domain_sample(ast, z);
  const auto s2 = domain_sample(ast, CVec(r * z));
  const RVec rX = r * X;
  return std::abs(s2.metric(rX, rX) - r * r * s1.metric(X, X));
}

double omega_flat_variation(const PrepotentialAst& ast, const CVec& z) {
  const auto base = chart_point(ast, z);
  const double h = chart_step(base.p);
  double worst = 0.0;
  for (Eigen::Index a = 0; a < base.p.size(); ++a) {
    RVec pp = base.p, pm = base.p;
    pp[a] += h;
    pm[a] -= h;
    const RMat d = (chart_point_at(ast, pp, z).omega_flat - chart_point_at(ast, pm, z).omega_flat) / (2.0 * h);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  return worst;
}

double contact_form_residual(const PrepotentialAst& ast, const CVec& z) {
  const auto base = chart_point(ast, z);
  const auto m = base.p.size();
  const double h = chart_step(base.p);
  auto eta = [&](const RVec& p) -> RVec {
    return chart_point_at(ast, p, z).omega_flat.transpose() * p;
  };
  RMat d(m, m);  // d(b, a) = d_a eta_b
  for (Eigen::Index a = 0; a < m; ++a) {
    RVec pp = base.p, pm = base.p;
    pp[a] += h;
    pm[a] -= h;
    d.col(a) = (eta(pp) - eta(pm)) / (2.0 * h);
  }
  const RMat deta = d.transpose() - d;  // deta(a, b) = d_a eta_b - d_b eta_a
  return (deta - 2.0 * base.omega_flat).cwiseAbs().maxCoeff();
}

std::vector<RMat> christoffel_flat(const PrepotentialAst& ast, const ChartPoint& at, double step) {
  const auto m = at.p.size();
  std::vector<RMat> dg(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    RVec pp = at.p, pm = at.p;
    pp[a] += step;
    pm[a] -= step;
    const auto sp = domain_sample(ast, invert_flat_coords(ast, pp, at.s.z).z);
    const auto sm = domain_sample(ast, invert_flat_coords(ast, pm, at.s.z).z);
    dg[a] = (pushforward_metric(sp) - pushforward_metric(sm)) / (2.0 * step);
  }
  const RMat ginv = at.g_flat.inverse();
  std::vector<RMat> gamma(static_cast<std::size_t>(m), RMat::Zero(m, m));
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) {
      RVec lowered(m);
      for (Eigen::Index d = 0; d < m; ++d) lowered[d] = 0.5 * (dg[a](b, d) + dg[b](a, d) - dg[d](a, b));
      const RVec raised = ginv * lowered;
      for (Eigen::Index c = 0; c < m; ++c) gamma[c](a, b) = raised[c];
    }
  return gamma;
}

RVec contract_christoffel(const std::vector<RMat>& gamma, const RVec& X, const RVec& Y) {
  RVec out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t c = 0; c < gamma.size(); ++c) out[static_cast<Eigen::Index>(c)] = X.dot(gamma[c] * Y);
  return out;
}

}  // namespace skcone
