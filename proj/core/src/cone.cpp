#include "skcone/cone.hpp"

#include <cmath>
#include <string>

namespace skcone {

namespace {

constexpr double kGaussStep = 1e-5;
constexpr double kSphereTol = 1e-8;

int sign_of(double k) { return k > 0.0 ? 1 : -1; }

void require_on_sphere(const DomainSample& s) {
  if (!(std::abs(2.0 * std::abs(s.k) - 1.0) <= kSphereTol))
    throw PreconditionError("point is not on the level set |k| = 1/2 (k = " + std::to_string(s.k) + ")");
}

void require_tangent(const DomainSample& s, const RVec& X, const char* name) {
  if (X.size() != s.real_dim()) throw PreconditionError(std::string(name) + " has the wrong dimension");
  if (std::abs(s.dk.dot(X)) > 1e-8 * s.dk.norm() * (1.0 + X.norm()))
    throw PreconditionError(std::string(name) + " is not tangent to the level set");
}

// Derivative of a flat-chart field along V at p by central differences.
template <class Field>
RVec flat_derivative(const Field& f, const RVec& p, const RVec& V, double base) {
  const double len = V.norm();
  if (len == 0.0) return RVec::Zero(f(p).size());
  const RVec d = V / len;
  const double h = base * (1.0 + p.norm());
  return len * (f(RVec(p + h * d)) - f(RVec(p - h * d))) / (2.0 * h);
}

// Y0 pushed along the level sets of k: Y0 - (dk(Y0) / dk(xi)) xi.
RVec level_extension(const ChartPoint& c, const RVec& Y0) {
  const double denom = c.dk_flat.dot(c.p);
  if (std::abs(denom) < 1e-10) throw InadmissiblePoint("dk(xi) vanishes");
  return Y0 - (c.dk_flat.dot(Y0) / denom) * c.p;
}

RVec sigma_flat(const ChartPoint& c) { return c.s.flat_jac * (c.s.J * c.s.xi()); }

// Flat-chart derivative of sigma: column a is d sigma / d p_a.
RMat sigma_jacobian(const ChartPoint& c) {
  const RVec Jw = c.s.J * c.s.xi();
  const auto m = Jw.size();
  RMat M = c.s.flat_jac * c.s.J;
  for (Eigen::Index i = 0; i < m; ++i) M.row(i) += (c.s.flat_hess[i] * Jw).transpose();
  return M * c.jac_inv;
}

RMat level_projector(const ChartPoint& c) {
  const RVec gp = c.g_flat * c.p;
  return RMat::Identity(c.p.size(), c.p.size()) - c.p * gp.transpose() / c.p.dot(gp);
}

// sigma, its ambient covariant derivative and Phi = P o D sigma at one chart point.
struct SasakiLocal {
  ChartPoint c;
  std::vector<RMat> gamma;
  RVec sigma;
  RMat dsigma;
  RMat Dsigma;
  RMat P;
  RMat Phi;
};

SasakiLocal sasaki_local(const PrepotentialAst& ast, ChartPoint c, double step) {
  SasakiLocal L;
  L.gamma = christoffel_flat(ast, c, step);
  L.sigma = sigma_flat(c);
  L.dsigma = sigma_jacobian(c);
  const auto m = c.p.size();
  L.Dsigma = L.dsigma;
  for (Eigen::Index cc = 0; cc < m; ++cc) L.Dsigma.row(cc) += (L.gamma[cc] * L.sigma).transpose();
  L.P = level_projector(c);
  L.Phi = L.P * L.Dsigma;
  L.c = std::move(c);
  return L;
}

RVec shape_apply(const PrepotentialAst& ast, const ChartPoint& c0, int kappa, const RVec& X) {
  auto curve = [&](const RVec& q) -> RVec {
    const double k = kahler_potential(ast, invert_flat_coords(ast, q, c0.s.z).z);
    return q / std::sqrt(2.0 * std::abs(k));
  };
  return c0.to_real(kappa * flat_derivative(curve, c0.p, c0.to_flat(X), kGaussStep));
}

}  // namespace

RMat SphereSample::frame_matrix() const {
  RMat T(E.size(), static_cast<Eigen::Index>(frame.size()));
  for (std::size_t a = 0; a < frame.size(); ++a) T.col(static_cast<Eigen::Index>(a)) = frame[a];
  return T;
}

SphereSample project_to_sphere(const PrepotentialAst& ast, const CVec& z) {
  const auto s = domain_sample(ast, z);
  if (!(std::abs(s.k) >= kDefaultKMin)) throw InadmissiblePoint("|k| below the admissibility threshold");
  SphereSample out;
  out.u = z / std::sqrt(2.0 * std::abs(s.k));
  out.kappa = sign_of(s.k);
  const auto su = domain_sample(ast, out.u);
  const auto m = su.dk.size();

  Eigen::HouseholderQR<RMat> qr(RMat(su.dk));
  const RMat Q = qr.householderQ() * RMat::Identity(m, m);
  for (Eigen::Index a = 1; a < m; ++a) out.frame.emplace_back(Q.col(a));

  const RVec xi = su.xi();
  out.E = -out.kappa * xi;
  out.sigma = su.J * xi;
  out.eta = su.omega.transpose() * xi;
  const RMat T = out.frame_matrix();
  out.g_ind = T.transpose() * su.g * T;
  return out;
}

GaussSplit gauss_split(const PrepotentialAst& ast, const CVec& u, const RVec& X, const RVec& Y) {
  const auto c0 = chart_point(ast, u);
  require_on_sphere(c0.s);
  require_tangent(c0.s, X, "X");
  require_tangent(c0.s, Y, "Y");
  const int kappa = sign_of(c0.k());
  const RVec Yf = c0.to_flat(Y);
  auto field = [&](const RVec& p) { return level_extension(chart_point_at(ast, p, u), Yf); };
  const RVec D = flat_derivative(field, c0.p, c0.to_flat(X), kGaussStep);

  const RVec Ef = -kappa * c0.p;
  const double dkE = c0.dk_flat.dot(Ef);
  if (std::abs(dkE) < 1e-10) throw InadmissiblePoint("dk(E) vanishes");
  GaussSplit out;
  out.normal_coeff = c0.dk_flat.dot(D) / dkE;
  out.tangential = c0.to_real(D - out.normal_coeff * Ef);
  return out;
}

double shape_residual(const PrepotentialAst& ast, const CVec& u, const RVec& X) {
  const auto c0 = chart_point(ast, u);
  require_on_sphere(c0.s);
  require_tangent(c0.s, X, "X");
  const int kappa = sign_of(c0.k());
  return (shape_apply(ast, c0, kappa, X) - kappa * X).norm();
}

double mean_curvature_residual(const PrepotentialAst& ast, const CVec& u) {
  const auto sphere = project_to_sphere(ast, u);
  const auto c0 = chart_point(ast, sphere.u);
  const RMat T = sphere.frame_matrix();
  double trace = 0.0;
  for (Eigen::Index a = 0; a < T.cols(); ++a)
    trace += T.col(a).dot(shape_apply(ast, c0, sphere.kappa, T.col(a)));
  return std::abs(trace / static_cast<double>(T.cols()) - sphere.kappa);
}

double blaschke_volume_residual(const PrepotentialAst& ast, const CVec& u) {
  return blaschke_volume_residual(ast, u, project_to_sphere(ast, u).frame);
}

double blaschke_volume_residual(const PrepotentialAst& ast, const CVec& u, const std::vector<RVec>& frame) {
  const auto c0 = chart_point(ast, u);
  require_on_sphere(c0.s);
  const auto m = c0.p.size();
  if (static_cast<Eigen::Index>(frame.size()) != m - 1) throw PreconditionError("frame must have 2n+1 vectors");
  const int kappa = sign_of(c0.k());
  RMat M(m, m);
  M.col(0) = -kappa * c0.p;
  RMat T(m, m - 1);
  for (Eigen::Index a = 0; a < m - 1; ++a) {
    require_tangent(c0.s, frame[a], "frame vector");
    T.col(a) = frame[a];
    M.col(a + 1) = c0.to_flat(frame[a]);
  }
  const double c_vol = std::sqrt(std::abs(flat_hessian_of_k(c0.s).determinant()));
  const double theta = std::sqrt(std::abs((T.transpose() * c0.s.g * T).determinant()));
  return std::abs(std::abs(M.determinant()) * c_vol - theta);
}

TangentPairs default_tangent_pairs(const SphereSample& sphere, std::size_t max_frame) {
  std::vector<RVec> probes;
  for (std::size_t a = 0; a < sphere.frame.size() && a < max_frame; ++a) probes.push_back(sphere.frame[a]);
  probes.push_back(sphere.sigma);
  TangentPairs pairs;
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = i; j < probes.size(); ++j) pairs.emplace_back(probes[i], probes[j]);
  return pairs;
}

SasakiResiduals sasaki_residuals(const PrepotentialAst& ast, const CVec& u, const TangentPairs& pairs) {
  const auto c0 = chart_point(ast, u);
  require_on_sphere(c0.s);
  for (const auto& [X, Y] : pairs) {
    require_tangent(c0.s, X, "X");
    require_tangent(c0.s, Y, "Y");
  }
  const int kappa = sign_of(c0.k());
  const double h = chart_step(c0.p);
  const auto m = c0.p.size();
  const auto L = sasaki_local(ast, c0, h);
  const RMat& g = c0.g_flat;

  std::vector<RMat> dPhi(static_cast<std::size_t>(m));
  RMat deta(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    RVec pp = c0.p, pm = c0.p;
    pp[a] += h;
    pm[a] -= h;
    const auto Lp = sasaki_local(ast, chart_point_at(ast, pp, u), h);
    const auto Lm = sasaki_local(ast, chart_point_at(ast, pm, u), h);
    dPhi[a] = (Lp.Phi - Lm.Phi) / (2.0 * h);
    deta.row(a) = ((Lp.c.omega_flat.transpose() * pp - Lm.c.omega_flat.transpose() * pm) / (2.0 * h)).transpose();
  }
  deta = RMat(deta - deta.transpose());  // deta(a, b) = d_a eta_b - d_b eta_a

  const RVec eta = c0.omega_flat.transpose() * c0.p;
  const double eta_sigma = eta.dot(L.sigma);
  const RVec Ef = -kappa * c0.p;
  const double dkE = c0.dk_flat.dot(Ef);

  SasakiResiduals out;
  for (const auto& [Xr, Yr] : pairs) {
    const RVec X = c0.to_flat(Xr);
    const RVec Y = c0.to_flat(Yr);
    const RVec DXs = L.Dsigma * X;
    const RVec DYs = L.Dsigma * Y;
    out.killing = std::max(out.killing, std::abs(DXs.dot(g * Y) + X.dot(g * DYs)));

    RMat dPhiX = RMat::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a) dPhiX += X[a] * dPhi[a];
    const RVec PhiY = L.Phi * Y;
    const RVec DXPhiY = dPhiX * Y + contract_christoffel(L.gamma, X, PhiY) -
                        L.Phi * contract_christoffel(L.gamma, X, Y);
    const RVec DXxi = X + contract_christoffel(L.gamma, X, c0.p);
    const RVec normal = (-Y.dot(g * DXxi) / c0.p.dot(g * c0.p)) * c0.p;
    const RVec lhs = L.P * DXPhiY + L.Phi * normal;
    const RVec rhs = kappa * L.sigma.dot(g * Y) * X - kappa * X.dot(g * Y) * L.sigma;
    out.structure = std::max(out.structure, c0.to_real(lhs - rhs).norm());

    const RVec ds = L.dsigma * X;
    const RVec tangential = ds - (c0.dk_flat.dot(ds) / dkE) * Ef;
    out.affine = std::max(out.affine, c0.to_real(tangential - L.Phi * X).norm());

    const RVec Xc = X - (eta.dot(X) / eta_sigma) * L.sigma;
    const RVec Yc = Y - (eta.dot(Y) / eta_sigma) * L.sigma;
    out.contact = std::max(out.contact, std::abs(Xc.dot(deta * Yc) - 2.0 * Xc.dot(c0.omega_flat * Yc)));
  }
  return out;
}

namespace {

// grad: real-frame gradient of the Hamiltonian at u.
double hamiltonian_residual_from_gradient(const ChartPoint& c0, const RVec& grad) {
  const int kappa = sign_of(c0.k());
  const RVec w = c0.s.xi();
  const RMat Wt = c0.omega_flat.transpose();
  const double det = Wt.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-14) throw DegenerateMetric("flat symplectic form is singular");
  const RVec X = Wt.partialPivLu().solve(c0.jac_inv.transpose() * grad);
  const RVec sigma = c0.s.J * w;
  return (c0.to_real(X) - kHamiltonianSign * kappa * sigma).norm();
}

}  // namespace

double hamiltonian_field_residual(const PrepotentialAst& ast, const CVec& u) {
  const auto c0 = chart_point(ast, u);
  require_on_sphere(c0.s);
  return hamiltonian_residual_from_gradient(c0, 2.0 * c0.k() * c0.s.dk);
}

double hamiltonian_field_residual(const PrepotentialAst& ast, const CVec& u, const ScalarField& H) {
  const auto c0 = chart_point(ast, u);
  require_on_sphere(c0.s);
  const RVec w = c0.s.xi();
  const auto m = w.size();
  const double h = 1e-3 * (1.0 + w.norm());
  RVec grad(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    auto at = [&](double t) {
      RVec q = w;
      q[a] += t;
      return H(from_real_frame(q));
    };
    grad[a] = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
  }
  return hamiltonian_residual_from_gradient(c0, grad);
}

WarpedResiduals warped_product_residuals(const PrepotentialAst& ast, const CVec& u, double r,
                                         const RVec& X, const RVec& Y) {
  if (!(r > 0.0)) throw PreconditionError("radius must be positive");
  const auto c0 = chart_point(ast, u);
  require_on_sphere(c0.s);
  require_tangent(c0.s, X, "X");
  require_tangent(c0.s, Y, "Y");
  const int kappa = sign_of(c0.k());
  const CVec seed = r * u;
  const RVec pr = r * c0.p;
  const RVec Xf = c0.to_flat(X);
  const RVec Yf = c0.to_flat(Y);

  auto homogeneous = [&](const RVec& V0) {
    return [&ast, &seed, V0](const RVec& p) -> RVec {
      const auto c = chart_point_at(ast, p, seed);
      return std::sqrt(2.0 * std::abs(c.k())) * level_extension(c, V0);
    };
  };

  WarpedResiduals out;
  const auto split = gauss_split(ast, u, X, Y);
  const RVec expected = r * (c0.to_flat(split.tangential) - kappa * c0.s.metric(X, Y) * c0.p);
  const RVec got = flat_derivative(homogeneous(Yf), pr, RVec(r * Xf), kGaussStep);
  out.w1 = c0.to_real(got - expected).norm();

  const auto Xtilde = homogeneous(Xf);
  const RVec Xt = Xtilde(pr);
  auto xi_field = [&](const RVec& p) -> RVec {
    const auto c = chart_point_at(ast, p, seed);
    return c.s.flat_jac * c.s.xi();
  };
  const double a = c0.to_real(flat_derivative(xi_field, pr, Xt, kGaussStep) - Xt).norm();
  const double b = c0.to_real(flat_derivative(Xtilde, pr, pr, kGaussStep) - Xt).norm();
  out.w2 = std::max(a, b);
  return out;
}

double cone_isometry_residual(const PrepotentialAst& ast, const CVec& u, double r, const RVec& X,
                              const RVec& Y) {
  const auto s1 = domain_sample(ast, u);
  const auto s2 = domain_sample(ast, CVec(r * u));
  return std::abs(s2.metric(r * X, r * Y) - r * r * s1.metric(X, Y));
}

}  // namespace skcone
