#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "skcone/cone.hpp"
#include "skcone/expr.hpp"
#include "skcone/geometry.hpp"
#include "skcone/homogeneous.hpp"
#include "skcone/jet.hpp"
#include "skcone/projective.hpp"
#include "skcone/verify.hpp"

namespace skcone::cli {
namespace {

using json = nlohmann::json;

constexpr double kParseTolerance = 1e-9;

struct UsageError : Error {
  using Error::Error;
};

bool has_variable(const Node& node) {
  if (node.kind == NodeKind::Variable) return true;
  if (node.lhs && has_variable(*node.lhs)) return true;
  return node.rhs && has_variable(*node.rhs);
}

/// Comma-separated complex constants in the expression syntax, e.g. "1,-i,2+0.5*i".
CVec parse_complex_csv(const std::string& text, const char* flag) {
  std::vector<cplx> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    PrepotentialAst ast = [&] {
      try {
        return parse_prepotential(item, 1);
      } catch (const ParseError& e) {
        throw UsageError(std::string(flag) + ": bad entry '" + item + "': " + e.what());
      }
    }();
    if (has_variable(ast.root()))
      throw UsageError(std::string(flag) + ": entry '" + item + "' is not a constant");
    values.push_back(evaluate(ast, CVec::Zero(1)));
  }
  if (values.empty()) throw UsageError(std::string(flag) + " is empty");
  CVec v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

json complex_json(const CVec& z) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < z.size(); ++i) arr.push_back({z[i].real(), z[i].imag()});
  return arr;
}

json vec_json(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string format_complex(cplx q) {
  if (q.imag() == 0.0) return format_number(q.real());
  std::string s = format_number(q.real());
  if (q.imag() >= 0.0) s += "+";
  return s + format_number(q.imag()) + "i";
}

CVec point_for(const PrepotentialAst& ast, const std::string& text) {
  CVec z = parse_complex_csv(text, "--point");
  if (z.size() != ast.n_vars())
    throw UsageError("--point has " + std::to_string(z.size()) + " entries, expected " +
                     std::to_string(ast.n_vars()));
  return z;
}

struct Options {
  std::string config;
  std::string expr;
  int nvars = 0;
  std::uint64_t seed = 1;
  int samples = 64;
  std::string out;
  std::string quartic_case;
  std::string coeffs;
  std::string point;
  std::string vector;
  unsigned threads = 0;
};

int cmd_parse(const Options& o, std::ostream& out) {
  const auto ast = parse_prepotential(o.expr, o.nvars);
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal;
  std::vector<CVec> points;
  for (int s = 0; s < o.samples; ++s) {
    CVec z(o.nvars);
    for (auto& c : z) c = cplx(normal(rng), normal(rng));
    points.push_back(std::move(z));
  }
  const std::vector<cplx> scales{2.0, 0.5, cplx(1.0, 1.0), cplx(0.0, -1.5)};
  const auto rep = check_homogeneity(ast, points, scales);
  const bool pass =
      rep.skipped.size() < points.size() && rep.scale_residual <= kParseTolerance &&
      rep.euler_residual <= kParseTolerance;
  json doc = {{"expr", pretty_print(ast)},
              {"n_vars", o.nvars},
              {"homogeneity",
               {{"samples", points.size()},
                {"scale_residual", rep.scale_residual},
                {"euler_residual", rep.euler_residual},
                {"skipped", rep.skipped},
                {"tolerance", kParseTolerance},
                {"pass", pass}}}};
  out << doc.dump(2) << "\n";
  return pass ? 0 : 1;
}

int cmd_verify(const Options& o, const CLI::App& sub, std::ostream& out) {
  SuiteConfig cfg = load_config(o.config);
  if (sub.count("--seed")) cfg.seed = o.seed;
  if (sub.count("--samples")) cfg.sample_count = o.samples;
  if (sub.count("--out")) cfg.output_path = o.out;
  const unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto report = run_suite(cfg, threads);
  const std::string text = report_to_json(report);
  if (cfg.output_path.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + cfg.output_path);
    f << text;
    if (!f) throw ConfigError("failed writing " + cfg.output_path);
    out << (report.all_passed() ? "PASS " : "FAIL ") << report.passed_count() << "/"
        << report.checks.size() << " checks -> " << cfg.output_path << "\n";
  }
  return report.all_passed() ? 0 : 1;
}

int cmd_sphere(const Options& o, std::ostream& out) {
  const auto ast = parse_prepotential(o.expr, o.nvars);
  const CVec z = point_for(ast, o.point);
  const auto sph = project_to_sphere(ast, z);
  const auto sample = domain_sample(ast, sph.u);
  json frame = json::array();
  for (const auto& v : sph.frame) frame.push_back(vec_json(v));
  json doc = {{"u", complex_json(sph.u)},
              {"kappa", sph.kappa},
              {"k", sample.k},
              {"E", vec_json(sph.E)},
              {"sigma", vec_json(sph.sigma)},
              {"g_sigma_sigma", sample.metric(sph.sigma, sph.sigma)},
              {"eta", vec_json(sph.eta)},
              {"frame", std::move(frame)},
              {"g_ind", mat_json(sph.g_ind)}};
  out << doc.dump(2) << "\n";
  return 0;
}

int cmd_projective(const Options& o, std::ostream& out) {
  const auto ast = parse_prepotential(o.expr, o.nvars);
  const CVec u = point_for(ast, o.point);
  json doc = {{"u", complex_json(u)}};
  if (!o.vector.empty()) {
    const CVec x = parse_complex_csv(o.vector, "--vector");
    if (x.size() != u.size()) throw UsageError("--vector and --point differ in length");
    const auto ps = projective_sample(ast, u, to_real_frame(x));
    doc["X"] = complex_json(x);
    doc["X_h"] = complex_json(from_real_frame(ps.X_h));
    doc["gbar"] = ps.gbar_val;
  } else {
    const Eigen::Index m = 2 * u.size();
    RMat gram(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = a; b < m; ++b)
        gram(a, b) = gram(b, a) =
            projective_metric(ast, u, RVec::Unit(m, a), RVec::Unit(m, b));
    doc["gbar_matrix"] = mat_json(gram);
  }
  out << doc.dump(2) << "\n";
  return 0;
}

int cmd_quartic(const Options& o, std::ostream& out) {
  const QuarticTag tag = parse_quartic_tag(o.quartic_case);
  const CVec v = parse_complex_csv(o.coeffs, "--coeffs");
  const auto len = static_cast<int>(v.size());
  QuarticCase qc;
  switch (tag) {
    case QuarticTag::A:
      if (len < 2) throw UsageError("case A needs at least 2 coefficients");
      qc = QuarticCase::make_A(len - 1);
      break;
    case QuarticTag::BD:
      if (len % 2 != 0 || len < 6) throw UsageError("case BD needs 2(n+1) coefficients with n >= 2");
      qc = QuarticCase::make_BD(len / 2 - 1);
      break;
    case QuarticTag::E6: qc = QuarticCase::make_E6(); break;
    case QuarticTag::F: qc = QuarticCase::make_F(); break;
    case QuarticTag::G: qc = QuarticCase::make_G(); break;
  }
  if (len != qc.dimension())
    throw UsageError("case " + std::string(to_string(tag)) + " expects " +
                     std::to_string(qc.dimension()) + " coefficients, got " + std::to_string(len));
  if (qc.is_real() && v.imag().cwiseAbs().maxCoeff() > 0.0)
    throw UsageError("case " + std::string(to_string(tag)) + " takes real coefficients");
  out << format_complex(quartic_eval(qc, v)) << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for conic and projective special Kaehler domains", "skcone"};
  app.require_subcommand(1);
  Options o;

  auto* parse = app.add_subcommand("parse", "Parse a prepotential and check degree-2 homogeneity");
  parse->add_option("--expr", o.expr, "Prepotential F")->required();
  parse->add_option("--nvars", o.nvars, "Number of complex variables")->required()->check(CLI::PositiveNumber);
  parse->add_option("--seed", o.seed, "Seed for the test points")->capture_default_str();
  parse->add_option("--samples", o.samples, "Number of test points")->capture_default_str()->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run a verification suite from a JSON config");
  verify->add_option("--config", o.config, "Suite config")->required()->check(CLI::ExistingFile);
  verify->add_option("--seed", o.seed, "Override the config seed");
  verify->add_option("--samples", o.samples, "Override the config sample count")->check(CLI::PositiveNumber);
  verify->add_option("--out", o.out, "Write the report here instead of stdout");
  verify->add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)");

  auto* sphere = app.add_subcommand("sphere", "Affine sphere and Sasaki data at a point");
  sphere->add_option("--expr", o.expr, "Prepotential F")->required();
  sphere->add_option("--nvars", o.nvars, "Number of complex variables")->required()->check(CLI::PositiveNumber);
  sphere->add_option("--point", o.point, "Point z as complex CSV")->required();

  auto* proj = app.add_subcommand("projective", "Projective special Kaehler metric at a point");
  proj->add_option("--expr", o.expr, "Prepotential F")->required();
  proj->add_option("--nvars", o.nvars, "Number of complex variables")->required()->check(CLI::PositiveNumber);
  proj->add_option("--point", o.point, "Point z as complex CSV")->required();
  proj->add_option("--vector", o.vector, "Tangent vector as complex CSV; omit for the full matrix");

  auto* quartic = app.add_subcommand("quartic", "Evaluate a quartic invariant");
  quartic->add_option("--case", o.quartic_case, "A, BD, E6, F or G")->required();
  quartic->add_option("--coeffs", o.coeffs, "Vector components as complex CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) return cmd_parse(o, out);
    if (*verify) return cmd_verify(o, *verify, out);
    if (*sphere) return cmd_sphere(o, out);
    if (*proj) return cmd_projective(o, out);
    return cmd_quartic(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace skcone::cli
