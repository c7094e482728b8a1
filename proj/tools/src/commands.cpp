#include "dqhelmert_cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dqhelmert/dqhelmert.hpp"
#include "dqhelmert_cli/input.hpp"
#include "dqhelmert_cli/report.hpp"

namespace dqhelmert::cli {
namespace {

struct RunConfig {
  std::string method = "dqa-constrained";
  std::string quat_form = "unit";
  std::string mode = "symmetric";
  int dim = 3;
  double tol = 1e-11;
  int max_iter = 100;
  std::string weights = "auto";
  std::string format = "text";
  bool full_covariance = false;
  std::string out;
};

// Input problems that surface after argument parsing.
struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorCode::kInvalidProblem, what) {}
};

void AddCommon(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--mode", cfg.mode, "symmetric (both frames noisy) or asymmetric")
      ->check(CLI::IsMember({"symmetric", "asymmetric"}))
      ->capture_default_str();
  cmd.add_option("--dim", cfg.dim, "2 or 3")->check(CLI::IsMember(std::vector<int>{2, 3}))->capture_default_str();
  cmd.add_option("--format", cfg.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd.add_option("--out", cfg.out, "write the report here instead of stdout");
}

void AddSolverOptions(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--tol", cfg.tol, "stopping tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--max-iter", cfg.max_iter, "iteration limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--weights", cfg.weights,
                 "auto (CSV columns if present), unit, or a 6n x 6n weight matrix file")
      ->capture_default_str();
  cmd.add_flag("--full-covariance", cfg.full_covariance, "include covariance matrices");
}

Dimension Dim(const RunConfig& cfg) { return cfg.dim == 2 ? Dimension::k2D : Dimension::k3D; }

std::ifstream Open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot open '{}'", path));
  return in;
}

Problem LoadProblem(const std::string& path, const RunConfig& cfg) {
  std::ifstream in = Open(path);
  ControlPointFile file = ReadControlPoints(in, Dim(cfg));
  Problem problem = std::move(file.problem);
  problem.mode = cfg.mode == "asymmetric" ? Mode::kAsymmetric : Mode::kSymmetric;
  if (cfg.weights == "unit") {
    problem.weights.kind = weights::Unit{};
  } else if (cfg.weights != "auto") {
    std::ifstream matrix = Open(cfg.weights);
    problem.weights.kind = weights::FullMatrix{ReadMatrix(matrix, 6 * problem.size())};
  }
  return problem;
}

SolverOptions Options(const RunConfig& cfg) {
  SolverOptions options;
  options.tolerance = cfg.tol;
  options.max_iterations = cfg.max_iter;
  return options;
}

SolveResult SolveWith(const std::string& method, const std::string& form,
                      const Problem& problem, const SolverOptions& options) {
  if (method == "dqa-simplified") return SolveSimplified(problem, options);
  if (method == "qa") return SolveQa(problem, options);
  return form == "scaled" ? SolveScaled(problem, options) : SolveConstrained(problem, options);
}

void Emit(const std::string& text, const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out);
  if (!file || !(file << text)) throw UsageError(fmt::format("cannot write '{}'", cfg.out));
}

std::string Render(const json& doc, const RunConfig& cfg, const std::function<std::string(const json&)>& text) {
  return cfg.format == "json" ? doc.dump(2) + "\n" : text(doc);
}

int Solve(const RunConfig& cfg, const std::string& path, std::ostream& out, std::ostream& err) {
  if (cfg.quat_form == "scaled" && cfg.method != "dqa-constrained") {
    throw UsageError("--quat-form scaled requires --method dqa-constrained");
  }
  const Problem problem = LoadProblem(path, cfg);
  SolveResult result;
  try {
    result = SolveWith(cfg.method, cfg.quat_form, problem, Options(cfg));
  } catch (const Error& e) {
    if (IsInputError(e.code())) throw;
    const json failure = FailureReport(e);
    if (cfg.format == "json") out << failure.dump(2) << "\n";
    err << FailureText(failure);
    return kSolverFailure;
  }
  Emit(Render(SolveReport(result, problem, cfg.full_covariance), cfg, SolveText), cfg, out);
  return kOk;
}

int Compare(const RunConfig& cfg, const std::string& path, std::ostream& out) {
  const Problem problem = LoadProblem(path, cfg);
  const std::pair<std::string, std::string> runs[] = {
      {"dqa-constrained", "unit"},
      {"dqa-constrained", "scaled"},
      {"dqa-simplified", "unit"},
      {"qa", "unit"},
  };
  std::vector<CompareEntry> entries;
  std::vector<SolveResult> solved;
  for (const auto& [method, form] : runs) {
    CompareEntry entry;
    entry.label = method == "dqa-constrained" ? method + "/" + form : method;
    try {
      const SolveResult result = SolveWith(method, form, problem, Options(cfg));
      entry.report = SolveReport(result, problem, cfg.full_covariance);
      entry.ok = true;
      solved.push_back(result);
    } catch (const Error& e) {
      entry.report = FailureReport(e);
    }
    entries.push_back(std::move(entry));
  }
  const json report = CompareReport(entries, MaxPairwiseDeviation(solved),
                                    static_cast<int>(solved.size()));
  Emit(Render(report, cfg, CompareText), cfg, out);
  return report["pass"].get<bool>() ? kOk : kSolverFailure;
}

Quaternion QuaternionFrom(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 4) {
    throw UsageError(fmt::format("parameter '{}' must be an array of 4 numbers", name));
  }
  return Quaternion(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                    j[3].get<double>());
}

// Accepts a solve report or {"lambda": .., "r": [4], "s": [4]}.
SolveResult LoadParameters(const std::string& path) {
  std::ifstream in = Open(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
  SolveResult params;
  try {
    if (doc.contains("parameters")) {
      const json& p = doc["parameters"];
      params.lambda = p.at("lambda").at("value").get<double>();
      params.r = QuaternionFrom(p.at("r").at("value"), "r");
      params.s = QuaternionFrom(p.at("s").at("value"), "s");
    } else {
      params.lambda = doc.at("lambda").get<double>();
      params.r = QuaternionFrom(doc.at("r"), "r");
      params.s = QuaternionFrom(doc.at("s"), "s");
    }
  } catch (const json::exception& e) {
    throw UsageError(fmt::format("'{}': missing or malformed parameters: {}", path, e.what()));
  }
  if (std::abs(params.r.squaredNorm() - 1.0) > 1e-9) {
    throw UsageError(fmt::format("r is not a unit quaternion (|r|^2 = {})", params.r.squaredNorm()));
  }
  if (std::abs(params.r.coeffs().dot(params.s.coeffs())) > 1e-6 * (1.0 + params.s.norm())) {
    throw UsageError("r and s are not orthogonal");
  }
  return params;
}

int Transform(const RunConfig& cfg, const std::string& params_path, const std::string& points_path,
              std::ostream& out) {
  const SolveResult params = LoadParameters(params_path);
  std::ifstream in = Open(points_path);
  const std::vector<NamedPoint> points = ReadPoints(in, Dim(cfg));
  const int d = cfg.dim;

  json doc = json::array();
  for (const NamedPoint& p : points) {
    const Vec3 t = TransformPoint(params, p.coords);
    json src = json::array(), dst = json::array();
    for (int i = 0; i < d; ++i) {
      src.push_back(p.coords[i]);
      dst.push_back(t[i]);
    }
    doc.push_back({{"id", p.id}, {"source", src}, {"target", dst}});
  }
  const auto text = [d](const json& rows) {
    std::string s = d == 3 ? "id,x,y,z,X,Y,Z\n" : "id,x,y,X,Y\n";
    for (const auto& r : rows) {
      s += r["id"].get<std::string>();
      for (const char* frame : {"source", "target"}) {
        for (const auto& x : r[frame]) s += fmt::format(",{:.6f}", x.get<double>());
      }
      s += "\n";
    }
    return s;
  };
  Emit(Render(doc, cfg, text), cfg, out);
  return kOk;
}

struct GenConfig {
  std::uint64_t seed = 1;
  int n = 7;
  int dim = 3;
  double noise = 0.01;
  double max_angle = 90.0;
  std::string weights = "none";
  std::string out;
};

int Generate(const GenConfig& g, std::ostream& out) {
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
  std::uniform_real_distribution<double> scale(0.5, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vec3 axis = Vec3::UnitZ();
  if (g.dim == 3) {
    do {
      axis = Vec3(normal(rng), normal(rng), normal(rng));
    } while (axis.norm() < 1e-6);
    axis.normalize();
  }
  const double angle = unit(rng) * g.max_angle * std::numbers::pi / 180.0;
  const Vec3 v = axis * std::sin(angle / 2.0);
  const Quaternion r(v.x(), v.y(), v.z(), std::cos(angle / 2.0));
  const double lambda = scale(rng);
  Vec3 t(coord(rng), coord(rng), g.dim == 3 ? coord(rng) : 0.0);
  const Mat3 rot = RotationFromUnitQuat(r);

  std::string s;
  s += fmt::format("# generated: seed {}, n {}, dim {}, noise {}, max angle {} deg\n", g.seed, g.n,
                   g.dim, g.noise, g.max_angle);
  s += fmt::format("# planted lambda {:.17g}\n", lambda);
  s += fmt::format("# planted r {:.17g} {:.17g} {:.17g} {:.17g}\n", r.coeffs()[0], r.coeffs()[1],
                   r.coeffs()[2], r.coeffs()[3]);
  s += fmt::format("# planted t {:.17g} {:.17g} {:.17g}\n", t.x(), t.y(), t.z());
  s += fmt::format("# planted angle {:.17g} deg\n", angle * 180.0 / std::numbers::pi);
  s += g.dim == 3 ? "id,x,y,z,X,Y,Z" : "id,x,y,X,Y";
  s += g.weights == "variances" ? ",var_src,var_dst\n" : g.weights == "scalar" ? ",w\n" : "\n";

  const double variance = std::max(g.noise * g.noise, 1e-12);
  for (int i = 0; i < g.n; ++i) {
    Vec3 x(coord(rng), coord(rng), g.dim == 3 ? coord(rng) : 0.0);
    Vec3 X = t + lambda * rot * x;
    for (int k = 0; k < g.dim; ++k) {
      x[k] += g.noise * normal(rng);
      X[k] += g.noise * normal(rng);
    }
    s += fmt::format("P{}", i + 1);
    for (int k = 0; k < g.dim; ++k) s += fmt::format(",{:.17g}", x[k]);
    for (int k = 0; k < g.dim; ++k) s += fmt::format(",{:.17g}", X[k]);
    if (g.weights == "variances") s += fmt::format(",{:.17g},{:.17g}", variance, variance);
    if (g.weights == "scalar") s += fmt::format(",{:.17g}", 1.0 + unit(rng));
    s += "\n";
  }
  RunConfig sink;
  sink.out = g.out;
  Emit(s, sink, out);
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity transformation estimation with dual quaternions", "dqhelmert"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string input, params_path;

  CLI::App* solve = app.add_subcommand("solve", "estimate the transformation from control points");
  solve->add_option("--method", cfg.method, "dqa-constrained, dqa-simplified or qa")
      ->check(CLI::IsMember({"dqa-constrained", "dqa-simplified", "qa"}))
      ->capture_default_str();
  solve->add_option("--quat-form", cfg.quat_form, "unit or scaled (dqa-constrained only)")
      ->check(CLI::IsMember({"unit", "scaled"}))
      ->capture_default_str();
  AddCommon(*solve, cfg);
  AddSolverOptions(*solve, cfg);
  solve->add_option("points", input, "control point CSV")->required();

  CLI::App* compare = app.add_subcommand("compare", "run every solver and compare the results");
  AddCommon(*compare, cfg);
  AddSolverOptions(*compare, cfg);
  compare->add_option("points", input, "control point CSV")->required();

  CLI::App* transform = app.add_subcommand("transform", "apply estimated parameters to points");
  AddCommon(*transform, cfg);
  transform->add_option("--params", params_path, "solve JSON report or {lambda, r, s}")->required();
  transform->add_option("points", input, "CSV with id,x,y[,z]")->required();

  GenConfig gen_cfg;
  CLI::App* gen = app.add_subcommand("gen", "write a synthetic control point CSV");
  gen->add_option("--seed", gen_cfg.seed, "random seed")->capture_default_str();
  gen->add_option("--n", gen_cfg.n, "number of points")->check(CLI::Range(3, 1000000))->capture_default_str();
  gen->add_option("--dim", gen_cfg.dim, "2 or 3")->check(CLI::IsMember(std::vector<int>{2, 3}))->capture_default_str();
  gen->add_option("--noise", gen_cfg.noise, "coordinate noise std. dev. [m]")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  gen->add_option("--max-angle", gen_cfg.max_angle, "largest rotation [deg]")
      ->check(CLI::Range(0.0, 179.0))
      ->capture_default_str();
  gen->add_option("--weights", gen_cfg.weights, "none, variances or scalar")
      ->check(CLI::IsMember({"none", "variances", "scalar"}))
      ->capture_default_str();
  gen->add_option("--out", gen_cfg.out, "output file");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (solve->parsed()) return Solve(cfg, input, out, err);
    if (compare->parsed()) return Compare(cfg, input, out);
    if (transform->parsed()) return Transform(cfg, params_path, input, out);
    return Generate(gen_cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return IsInputError(e.code()) ? kInputError : kSolverFailure;
  }
}

}  // namespace dqhelmert::cli
