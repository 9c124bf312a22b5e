#include "skcone/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "skcone/cone.hpp"
#include "skcone/expr.hpp"
#include "skcone/geometry.hpp"
#include "skcone/homogeneous.hpp"
#include "skcone/jet.hpp"
#include "skcone/projective.hpp"

namespace skcone {

using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kWarpRadius = 3.0;
const cplx kProjectiveScale = std::polar(1.7, 0.6);

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::mt19937_64 stream(std::uint64_t seed, std::string_view salt, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ fnv1a(salt)) + index));
}

RVec gaussian(std::mt19937_64& rng, Eigen::Index m) {
  std::normal_distribution<double> nd;
  RVec v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = nd(rng);
  return v;
}

// Per-sample state shared by the checks. Random draws come from streams
// keyed by (seed, purpose, sample index).
class SampleContext {
 public:
  SampleContext(const PrepotentialAst& ast, const SuiteConfig& cfg, std::size_t index, CVec z,
                std::optional<double> q_ratio)
      : ast(ast), cfg(cfg), index(index), z(std::move(z)), q_ratio(q_ratio) {}

  const PrepotentialAst& ast;
  const SuiteConfig& cfg;
  std::size_t index;
  CVec z;
  std::optional<double> q_ratio;

  const SphereSample& sphere() {
    if (!sphere_) sphere_ = project_to_sphere(ast, z);
    return *sphere_;
  }
  const CVec& u() { return sphere().u; }

  RVec ambient(int which) {
    auto rng = stream(cfg.seed, "ambient", index * 16 + static_cast<std::uint64_t>(which));
    const RVec v = gaussian(rng, 2 * ast.n_vars());
    return v / v.norm();
  }

  RVec tangent(int which) {
    auto rng = stream(cfg.seed, "tangent", index * 16 + static_cast<std::uint64_t>(which));
    const RMat T = sphere().frame_matrix();
    const RVec c = gaussian(rng, T.cols());
    return T * (c / c.norm());
  }

  RVec horizontal(int which) {
    const RVec h = horizontal_project(ast, u(), ambient(8 + which));
    const double len = h.norm();
    if (len < 1e-12) throw InadmissiblePoint("horizontal space is trivial");
    return horizontal_project(ast, u(), h / len);
  }

  const SasakiResiduals& sasaki() {
    if (!sasaki_) {
      auto pairs = default_tangent_pairs(sphere(), 3);
      pairs.emplace_back(tangent(0), tangent(1));
      sasaki_ = sasaki_residuals(ast, u(), pairs);
    }
    return *sasaki_;
  }

  const WarpedResiduals& warped() {
    if (!warped_) warped_ = warped_product_residuals(ast, u(), kWarpRadius, tangent(0), tangent(1));
    return *warped_;
  }

  const QuarticCase& quartic(QuarticTag tag) {
    auto& slot = quartic_[static_cast<int>(tag)];
    if (!slot) {
      const int nv = ast.n_vars();
      switch (tag) {
        case QuarticTag::A: slot = QuarticCase::make_A(std::clamp(nv - 1, 1, 4)); break;
        case QuarticTag::BD: slot = QuarticCase::make_BD(std::clamp(nv, 2, 5)); break;
        case QuarticTag::E6: slot = QuarticCase::make_E6(); break;
        case QuarticTag::F: slot = QuarticCase::make_F(); break;
        case QuarticTag::G: slot = QuarticCase::make_G(); break;
      }
    }
    return *slot;
  }

  double quartic_invariance(QuarticTag tag) {
    const auto& qc = quartic(tag);
    auto rng = stream(cfg.seed, std::string("quartic.") + std::string(to_string(tag)), index);
    const CVec v = random_vector(qc, rng);
    const RepElement gen = random_generator(qc, rng);
    return lie_invariance_residual(qc, v, gen);
  }

 private:
  std::optional<SphereSample> sphere_;
  std::optional<SasakiResiduals> sasaki_;
  std::optional<WarpedResiduals> warped_;
  std::optional<QuarticCase> quartic_[5];
};

using SampleCheck = std::function<double(SampleContext&)>;

double relative(double r, double scale) { return r / (1.0 + std::abs(scale)); }

const std::map<std::string, SampleCheck>& sample_checks() {
  static const std::map<std::string, SampleCheck> table = {
      {"expr.homogeneity",
       [](SampleContext& c) {
         const std::vector<cplx> scales = {2.0, cplx(1.0, 1.0), cplx(0.0, 0.5)};
         const auto r = check_homogeneity(c.ast, std::span<const CVec>(&c.z, 1), scales);
         if (!r.skipped.empty()) throw EvalSingularity(0, "sample is singular");
         return r.scale_residual;
       }},
      {"expr.euler",
       [](SampleContext& c) {
         const auto r = check_homogeneity(c.ast, std::span<const CVec>(&c.z, 1), {});
         if (!r.skipped.empty()) throw EvalSingularity(0, "sample is singular");
         return r.euler_residual;
       }},
      {"expr.jet_fd", [](SampleContext& c) { return jet_fd_discrepancy(c.ast, c.z); }},
      {"geom.hermitian",
       [](SampleContext& c) {
         const auto s = domain_sample(c.ast, c.z);
         const auto m = s.g.rows();
         double r = (s.h - s.h.adjoint()).cwiseAbs().maxCoeff();
         r = std::max(r, (s.g - s.g.transpose()).cwiseAbs().maxCoeff());
         r = std::max(r, (s.omega + s.omega.transpose()).cwiseAbs().maxCoeff());
         r = std::max(r, (s.J * s.J + RMat::Identity(m, m)).cwiseAbs().maxCoeff());
         r = std::max(r, (s.omega - s.J.transpose() * s.g).cwiseAbs().maxCoeff());
         const RVec X = c.ambient(0), Y = c.ambient(1);
         const cplx h = s.hermitian(X, Y);
         r = std::max(r, std::abs(h.real() - s.metric(X, Y)));
         r = std::max(r, std::abs(-h.imag() - X.dot(s.omega * Y)));
         return r;
       }},
      {"lemma1.h_xi",
       [](SampleContext& c) { return relative(lemma1_residuals(c.ast, c.z).r1, kahler_potential(c.ast, c.z)); }},
      {"lemma1.g_xi",
       [](SampleContext& c) { return relative(lemma1_residuals(c.ast, c.z).r2, kahler_potential(c.ast, c.z)); }},
      {"lemma1.g_xi_xi",
       [](SampleContext& c) { return relative(lemma1_residuals(c.ast, c.z).r3, kahler_potential(c.ast, c.z)); }},
      {"prop.xi_position",
       [](SampleContext& c) {
         const auto s = domain_sample(c.ast, c.z);
         return relative(xi_position_residual(s), s.flat.norm());
       }},
      {"cor.metriccone.scaling",
       [](SampleContext& c) {
         const auto s = domain_sample(c.ast, c.z);
         const RVec X = c.ambient(0);
         return relative(cone_scaling_residual(c.ast, c.z, X, 2.0), 4.0 * s.metric(X, X));
       }},
      {"cor.npotential.hessian",
       [](SampleContext& c) {
         const auto s = domain_sample(c.ast, c.z);
         const RMat pushed = pushforward_metric(s);
         return (flat_hessian_of_k(s) - pushed).norm() / pushed.norm();
       }},
      {"cor.npotential.fd",
       [](SampleContext& c) {
         const RMat an = flat_hessian_of_k(c.ast, c.z);
         return (an - flat_hessian_of_k_fd(c.ast, c.z)).norm() / an.norm();
       }},
      {"eq.special.dnablaJ", [](SampleContext& c) { return dnabla_J_residual(c.ast, c.z); }},
      {"sec1.omega_parallel", [](SampleContext& c) { return omega_flat_variation(c.ast, c.z); }},
      {"prop.contact.deta", [](SampleContext& c) { return contact_form_residual(c.ast, c.z); }},
      {"sphere.on_level",
       [](SampleContext& c) {
         const auto& sp = c.sphere();
         return std::abs(kahler_potential(c.ast, sp.u) - 0.5 * sp.kappa);
       }},
      {"sphere.sigma_length",
       [](SampleContext& c) {
         const auto& sp = c.sphere();
         const auto s = domain_sample(c.ast, sp.u);
         double r = std::abs(s.metric(sp.sigma, sp.sigma) - sp.kappa);
         r = std::max(r, std::abs(sp.eta.dot(sp.sigma) - sp.kappa));
         for (const auto& T : sp.frame) r = std::max(r, std::abs(s.dk.dot(T)));
         return r;
       }},
      {"thm.affinesphere.gauss",
       [](SampleContext& c) {
         const RVec X = c.tangent(0), Y = c.tangent(1);
         const double gxy = domain_sample(c.ast, c.u()).metric(X, Y);
         return relative(gauss_split(c.ast, c.u(), X, Y).normal_coeff - gxy, gxy);
       }},
      {"thm.affinesphere.shape", [](SampleContext& c) { return shape_residual(c.ast, c.u(), c.tangent(0)); }},
      {"thm.affinesphere.mean_curvature",
       [](SampleContext& c) { return mean_curvature_residual(c.ast, c.u()); }},
      {"thm.affinesphere.volume",
       [](SampleContext& c) { return blaschke_volume_residual(c.ast, c.u(), c.sphere().frame); }},
      {"sasaki.killing", [](SampleContext& c) { return c.sasaki().killing; }},
      {"sasaki.structure", [](SampleContext& c) { return c.sasaki().structure; }},
      {"sasaki.contact", [](SampleContext& c) { return c.sasaki().contact; }},
      {"prop.asc.affine_sasaki", [](SampleContext& c) { return c.sasaki().affine; }},
      {"cor.metriccone.isometry",
       [](SampleContext& c) {
         const RVec X = c.tangent(0), Y = c.tangent(1);
         const double gxy = domain_sample(c.ast, c.u()).metric(X, Y);
         return relative(cone_isometry_residual(c.ast, c.u(), kWarpRadius, X, Y),
                         kWarpRadius * kWarpRadius * gxy);
       }},
      {"eq.wpr.w1", [](SampleContext& c) { return c.warped().w1; }},
      {"eq.wpr.w2", [](SampleContext& c) { return c.warped().w2; }},
      {"remark2.hamiltonian", [](SampleContext& c) { return hamiltonian_field_residual(c.ast, c.u()); }},
      {"remark2.sigma_xq",
       [](SampleContext& c) {
         if (!c.q_ratio) throw PreconditionError("prepotential is not of case A");
         const auto eps = case_a_signature(c.ast, c.z);
         if (!eps) throw PreconditionError("prepotential is not of case A");
         const auto qc = QuarticCase::make_A(c.ast.n_vars() - 1, *eps);
         const double ratio = *c.q_ratio;
         return hamiltonian_field_residual(c.ast, c.u(), [&qc, ratio](const CVec& z) {
           return quartic_eval(qc, z).real() / ratio;
         });
       }},
      {"prop.hyperspheres.submersion",
       [](SampleContext& c) {
         const RVec X = c.horizontal(0);
         const double gxx = domain_sample(c.ast, c.u()).metric(X, X);
         return relative(submersion_residual(c.ast, c.u(), X), gxx);
       }},
      {"projective.invariance",
       [](SampleContext& c) {
         const RVec X = c.ambient(2);
         return relative(projective_invariance_residual(c.ast, c.z, X, kProjectiveScale),
                         projective_metric(c.ast, c.z, X));
       }},
      {"projective.pullback",
       [](SampleContext& c) {
         const RVec X = c.horizontal(0), Y = c.horizontal(1);
         const double gxy = domain_sample(c.ast, c.u()).metric(X, Y);
         return relative(pullback_residual(c.ast, c.u(), X, Y), gxy);
       }},
      {"projective.kernel",
       [](SampleContext& c) {
         const auto k = projective_kernel(c.ast, c.z);
         if (c.ast.n_vars() > 1 && k.min_singular < 1e-8)
           throw DegenerateMetric("projective metric degenerates on the horizontal space");
         return k.vertical;
       }},
      {"projective.fubini_study",
       [](SampleContext& c) {
         const RVec X = c.ambient(3);
         return relative(fubini_study_compare(c.z, X), fubini_study_closed_form(c.z, X));
       }},
      {"sec5.A.invariance", [](SampleContext& c) { return c.quartic_invariance(QuarticTag::A); }},
      {"sec5.BD.invariance", [](SampleContext& c) { return c.quartic_invariance(QuarticTag::BD); }},
      {"sec5.E6.invariance", [](SampleContext& c) { return c.quartic_invariance(QuarticTag::E6); }},
      {"sec5.F.invariance", [](SampleContext& c) { return c.quartic_invariance(QuarticTag::F); }},
      {"sec5.G.invariance", [](SampleContext& c) { return c.quartic_invariance(QuarticTag::G); }},
  };
  return table;
}

json point_json(const CVec& z) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < z.size(); ++i) arr.push_back({z[i].real(), z[i].imag()});
  return arr;
}

CVec point_from_json(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string(key) + " must be an array of [re, im] pairs");
  CVec z(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (e.is_number()) {
      z[static_cast<Eigen::Index>(i)] = e.get<double>();
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      z[static_cast<Eigen::Index>(i)] = cplx(e[0].get<double>(), e[1].get<double>());
    } else {
      throw ConfigError(std::string(key) + " entries must be numbers or [re, im] pairs");
    }
  }
  return z;
}

std::vector<std::string> selected_checks(const SuiteConfig& cfg) {
  std::vector<std::string> ids;
  for (const auto& id : cfg.checks) {
    if (id == "all") {
      for (const auto& info : check_registry()) ids.push_back(info.id);
    } else {
      check_info(id);
      ids.push_back(id);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

CheckResult make_result(const std::string& id, std::size_t sample, CVec point, double residual, double tol) {
  CheckResult r;
  r.id = id;
  r.sample = sample;
  r.point = std::move(point);
  r.residual = residual;
  r.tolerance = tol;
  r.pass = residual <= tol;
  return r;
}

CheckResult error_result(const std::string& id, std::size_t sample, CVec point, double tol, const std::string& what) {
  CheckResult r = make_result(id, sample, std::move(point), kNaN, tol);
  r.error = what;
  return r;
}

}  // namespace

double ToleranceProfile::of(ToleranceClass c) const {
  switch (c) {
    case ToleranceClass::Analytic: return analytic;
    case ToleranceClass::ChartFd: return chart_fd;
    case ToleranceClass::Invariance: return invariance;
  }
  return 0.0;
}

void ToleranceProfile::validate() const {
  if (!(analytic > 0.0 && chart_fd > 0.0 && invariance > 0.0))
    throw ConfigError("tolerances must be positive");
  if (!(analytic <= chart_fd)) throw ConfigError("tolerances: analytic must not exceed chart_fd");
}

const std::vector<CheckInfo>& check_registry() {
  using C = ToleranceClass;
  static const std::vector<CheckInfo> registry = {
      {"expr.homogeneity", C::Analytic, 1.0, true, false},
      {"expr.euler", C::Analytic, 1.0, true, false},
      {"expr.jet_fd", C::ChartFd, 0.1, true, false},
      {"geom.hermitian", C::Analytic, 1.0, true, false},
      {"lemma1.h_xi", C::Analytic, 1.0, true, false},
      {"lemma1.g_xi", C::Analytic, 1.0, true, false},
      {"lemma1.g_xi_xi", C::Analytic, 1.0, true, false},
      {"prop.xi_position", C::Analytic, 1.0, true, false},
      {"cor.metriccone.scaling", C::Analytic, 1.0, true, false},
      {"cor.npotential.hessian", C::Analytic, 1.0, true, false},
      {"cor.npotential.fd", C::ChartFd, 1.0, true, false},
      {"eq.ma.spread", C::Analytic, 1.0, false, false},
      {"eq.special.dnablaJ", C::ChartFd, 1.0, true, false},
      {"sec1.omega_parallel", C::ChartFd, 0.1, true, false},
      {"prop.contact.deta", C::ChartFd, 0.1, true, false},
      {"sphere.on_level", C::Analytic, 1.0, true, true},
      {"sphere.sigma_length", C::Analytic, 1.0, true, true},
      {"thm.affinesphere.gauss", C::ChartFd, 1.0, true, true},
      {"thm.affinesphere.shape", C::ChartFd, 1.0, true, true},
      {"thm.affinesphere.mean_curvature", C::ChartFd, 0.1, true, true},
      {"thm.affinesphere.volume", C::Analytic, 1.0, true, true},
      {"sasaki.killing", C::ChartFd, 1.0, true, true},
      {"sasaki.structure", C::ChartFd, 1.0, true, true},
      {"sasaki.contact", C::ChartFd, 0.1, true, true},
      {"prop.asc.affine_sasaki", C::ChartFd, 1.0, true, true},
      {"cor.metriccone.isometry", C::Analytic, 1.0, true, true},
      {"eq.wpr.w1", C::ChartFd, 1.0, true, true},
      {"eq.wpr.w2", C::ChartFd, 1.0, true, true},
      {"remark2.hamiltonian", C::Analytic, 1.0, true, true},
      {"remark2.sigma_xq", C::ChartFd, 0.1, true, true},
      {"prop.hyperspheres.submersion", C::Analytic, 1.0, true, true},
      {"projective.invariance", C::Analytic, 1.0, true, false},
      {"projective.pullback", C::Analytic, 1.0, true, true},
      {"projective.kernel", C::Analytic, 1.0, true, false},
      {"projective.fubini_study", C::Analytic, 1.0, true, false},
      {"sec5.A.invariance", C::Invariance, 1.0, true, false},
      {"sec5.BD.invariance", C::Invariance, 1.0, true, false},
      {"sec5.E6.invariance", C::Invariance, 1.0, true, false},
      {"sec5.F.invariance", C::Invariance, 1.0, true, false},
      {"sec5.G.invariance", C::Invariance, 1.0, true, false},
      {"sec5.A.q_ksq", C::Analytic, 0.1, false, false},
  };
  return registry;
}

const CheckInfo& check_info(const std::string& id) {
  for (const auto& info : check_registry())
    if (info.id == id) return info;
  throw ConfigError("unknown check id '" + id + "'");
}

SuiteConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"prepotential", "n_vars",        "seed",
                                                 "sample_count", "base_point",    "sample_radius",
                                                 "checks",       "tolerances",    "output_path",
                                                 "attempt_budget"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  for (const char* key : {"prepotential", "n_vars", "base_point"})
    if (!j.contains(key)) throw ConfigError(std::string("config is missing '") + key + "'");

  SuiteConfig cfg;
  try {
    cfg.prepotential = j.at("prepotential").get<std::string>();
    cfg.n_vars = j.at("n_vars").get<int>();
    if (j.contains("seed")) {
      const auto& s = j.at("seed");
      if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0))
        throw ConfigError("seed must be a non-negative integer");
      cfg.seed = s.get<std::uint64_t>();
    }
    if (j.contains("sample_count")) cfg.sample_count = j.at("sample_count").get<int>();
    cfg.base_point = point_from_json(j.at("base_point"), "base_point");
    if (j.contains("sample_radius")) cfg.sample_radius = j.at("sample_radius").get<double>();
    cfg.checks = j.contains("checks") ? j.at("checks").get<std::vector<std::string>>()
                                      : std::vector<std::string>{"all"};
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      if (!t.is_object()) throw ConfigError("tolerances must be an object");
      for (const auto& [key, value] : t.items()) {
        if (key == "analytic") cfg.tolerances.analytic = value.get<double>();
        else if (key == "chart_fd") cfg.tolerances.chart_fd = value.get<double>();
        else if (key == "invariance") cfg.tolerances.invariance = value.get<double>();
        else throw ConfigError("unknown tolerance class '" + key + "'");
      }
    }
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    if (j.contains("attempt_budget")) cfg.attempt_budget = j.at("attempt_budget").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }

  if (cfg.n_vars < 1) throw ConfigError("n_vars must be at least 1");
  if (cfg.sample_count < 1) throw ConfigError("sample_count must be at least 1");
  if (cfg.base_point.size() != cfg.n_vars) throw ConfigError("base_point must have n_vars entries");
  if (!(cfg.sample_radius >= 0.0)) throw ConfigError("sample_radius must be non-negative");
  cfg.tolerances.validate();
  for (const auto& id : cfg.checks)
    if (id != "all") check_info(id);
  return cfg;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.pass; });
}

std::size_t VerificationReport::passed_count() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& r) { return r.pass; }));
}

std::vector<CVec> sample_points(const SuiteConfig& config) {
  const auto ast = parse_prepotential(config.prepotential, config.n_vars);
  if (config.base_point.size() != config.n_vars) throw ConfigError("base_point must have n_vars entries");
  if (!is_admissible(ast, config.base_point)) throw InadmissiblePoint("base_point is not admissible");
  const bool positive = kahler_potential(ast, config.base_point) > 0.0;
  const std::size_t count = static_cast<std::size_t>(config.sample_count);
  std::vector<CVec> out;
  out.reserve(count);
  if (config.sample_radius == 0.0) {
    out.assign(count, config.base_point);
    return out;
  }
  const std::size_t budget = config.attempt_budget ? config.attempt_budget : 100 * count;
  const auto dim = 2 * static_cast<Eigen::Index>(config.n_vars);
  for (std::size_t attempt = 0; attempt < budget && out.size() < count; ++attempt) {
    auto rng = stream(config.seed, "sample", attempt);
    RVec dir = gaussian(rng, dim);
    const double radius =
        config.sample_radius * std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0 / dim);
    dir *= radius / dir.norm();
    const CVec z = config.base_point + from_real_frame(dir);
    if (!is_admissible(ast, z)) continue;
    if ((kahler_potential(ast, z) > 0.0) != positive) continue;
    out.push_back(z);
  }
  if (out.size() < count)
    throw AdmissibleRegionTooSmall("only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                                   " admissible samples after " + std::to_string(budget) + " attempts");
  return out;
}

VerificationReport run_suite(const SuiteConfig& config, unsigned threads) {
  config.tolerances.validate();
  const auto ids = selected_checks(config);
  const auto ast = parse_prepotential(config.prepotential, config.n_vars);

  VerificationReport report;
  report.prepotential = pretty_print(ast);
  report.n_vars = config.n_vars;
  report.seed = config.seed;
  if (ids.empty()) return report;

  const auto samples = sample_points(config);
  auto tol_of = [&](const std::string& id) {
    const auto& info = check_info(id);
    return config.tolerances.of(info.cls) * info.factor;
  };
  auto wanted = [&](const char* id) { return std::binary_search(ids.begin(), ids.end(), std::string(id)); };

  std::vector<CheckResult> results;
  if (wanted("eq.ma.spread")) {
    try {
      const auto ma = monge_ampere_spread(ast, samples);
      double mean = 0.0;
      for (double v : ma.values) mean += v;
      report.fitted_constants["monge_ampere_constant"] = mean / static_cast<double>(ma.values.size());
      results.push_back(make_result("eq.ma.spread", 0, {}, ma.rel_spread, tol_of("eq.ma.spread")));
    } catch (const std::exception& e) {
      results.push_back(error_result("eq.ma.spread", 0, {}, tol_of("eq.ma.spread"), e.what()));
    }
  }

  std::optional<double> q_ratio;
  if (wanted("sec5.A.q_ksq") || wanted("remark2.sigma_xq")) {
    try {
      const auto eps = case_a_signature(ast, config.base_point);
      if (!eps || config.n_vars < 2) throw PreconditionError("prepotential is not of case A");
      const auto qc = QuarticCase::make_A(config.n_vars - 1, *eps);
      const auto q = q_proportional_ksq(qc, ast, samples);
      q_ratio = q.ratio;
      report.fitted_constants["q_over_ksq"] = q.ratio;
      if (wanted("sec5.A.q_ksq"))
        results.push_back(make_result("sec5.A.q_ksq", 0, {}, q.rel_spread, tol_of("sec5.A.q_ksq")));
    } catch (const std::exception& e) {
      if (wanted("sec5.A.q_ksq"))
        results.push_back(error_result("sec5.A.q_ksq", 0, {}, tol_of("sec5.A.q_ksq"), e.what()));
    }
  }
  if (wanted("projective.fubini_study")) report.fitted_constants["fubini_study_constant"] = fubini_study_constant();

  std::vector<std::string> per_sample;
  for (const auto& id : ids)
    if (check_info(id).per_sample) per_sample.push_back(id);

  std::vector<std::vector<CheckResult>> buckets(samples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      SampleContext ctx(ast, config, i, samples[i], q_ratio);
      for (const auto& id : per_sample) {
        const auto& info = check_info(id);
        const double tol = tol_of(id);
        CVec point = samples[i];
        try {
          if (info.on_sphere) point = ctx.u();
          const double r = sample_checks().at(id)(ctx);
          buckets[i].push_back(make_result(id, i, point, r, tol));
        } catch (const std::exception& e) {
          buckets[i].push_back(error_result(id, i, point, tol, e.what()));
        }
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& b : buckets)
    for (auto& r : b) results.push_back(std::move(r));

  std::stable_sort(results.begin(), results.end(), [](const CheckResult& a, const CheckResult& b) {
    return a.id != b.id ? a.id < b.id : a.sample < b.sample;
  });
  for (const auto& r : results) {
    auto& s = report.summary[r.id];
    ++s.count;
    if (r.pass) ++s.passed;
    if (std::isfinite(r.residual)) s.max_residual = std::max(s.max_residual, r.residual);
  }
  report.checks = std::move(results);
  return report;
}

std::string report_to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& r : report.checks) {
    json c = {{"id", r.id},
              {"sample", r.sample},
              {"point", r.point.size() ? point_json(r.point) : json(nullptr)},
              {"residual", std::isfinite(r.residual) ? json(r.residual) : json(nullptr)},
              {"tolerance", r.tolerance},
              {"pass", r.pass}};
    if (!r.error.empty()) c["error"] = r.error;
    checks.push_back(std::move(c));
  }
  json by_check = json::object();
  for (const auto& [id, s] : report.summary)
    by_check[id] = {{"count", s.count}, {"passed", s.passed}, {"max_residual", s.max_residual}};
  const std::size_t passed = report.passed_count();
  json doc = {
      {"meta",
       {{"prepotential", report.prepotential},
        {"n_vars", report.n_vars},
        {"seed", report.seed},
        {"conventions",
         {{"h", "g - i*omega"},
          {"omega", "g(J., .)"},
          {"real_frame", "Re z then Im z"},
          {"flat_order", "x then y"},
          {"hamiltonian_sign", kHamiltonianSign}}},
        {"fitted_constants", report.fitted_constants}}},
      {"checks", std::move(checks)},
      {"summary",
       {{"total", report.checks.size()},
        {"passed", passed},
        {"failed", report.checks.size() - passed},
        {"by_check", std::move(by_check)}}}};
  return doc.dump(2) + "\n";
}

}  // namespace skcone
