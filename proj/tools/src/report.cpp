#include "dqhelmert_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dqhelmert/constrained.hpp"
#include "dqhelmert/precision.hpp"

namespace dqhelmert::cli {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

json Array(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json Matrix(const DenseMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(Array(m.row(i).transpose()));
  return out;
}

json Trace(const std::vector<IterationRecord>& trace) {
  json out = json::array();
  for (const IterationRecord& r : trace) {
    out.push_back({{"iteration", r.iteration},
                   {"step", r.step},
                   {"delta_lambda", r.delta_lambda},
                   {"objective", r.objective},
                   {"condition", r.condition},
                   {"step_scale", r.step_scale}});
  }
  return out;
}

json Param(double value, const json& sigma) { return {{"value", value}, {"sigma", sigma}}; }

// Text helpers reading back from the document.
std::string Fixed(const json& j, int decimals) {
  if (j.is_null()) return "-";
  return fmt::format("{:.{}f}", j.get<double>(), decimals);
}

std::string Sig(const json& j, int digits) {
  if (j.is_null()) return "-";
  return fmt::format("{:.{}g}", j.get<double>(), digits);
}

std::string Sci(const json& j) {
  if (j.is_null()) return "-";
  return fmt::format("{:.3e}", j.get<double>());
}

void Row(std::string& out, const std::string& name, const std::string& value,
         const std::string& sigma) {
  out += fmt::format("  {:<16}{:>24}  {:>20}\n", name, value, sigma);
}

json SigmaAt(const json& sigma, size_t i) {
  return sigma.is_null() ? json(nullptr) : sigma.at(i);
}

void QuaternionRows(std::string& out, const std::string& name, const json& q) {
  static const char* kSuffix[] = {"1", "2", "3", "4"};
  for (size_t i = 0; i < 4; ++i) {
    Row(out, name + kSuffix[i], Sig(q["value"][i], 12), Sig(SigmaAt(q["sigma"], i), 6));
  }
}

void CovarianceBlock(std::string& out, const std::string& title, const json& block) {
  out += title + "\n";
  std::string line = "  ";
  for (const auto& label : block["labels"]) line += fmt::format("{:>12}", label.get<std::string>());
  out += line + "\n";
  const auto& labels = block["labels"];
  for (size_t i = 0; i < block["matrix"].size(); ++i) {
    line = fmt::format("  {:<8}", labels[i].get<std::string>());
    for (const auto& x : block["matrix"][i]) line += fmt::format("{:>12.4g}", x.get<double>());
    out += line + "\n";
  }
}

}  // namespace

json SolveReport(const SolveResult& result, const Problem& problem, bool full_covariance) {
  json report;
  report["method"] = std::string(ToString(result.method));
  report["quat_form"] = std::string(ToString(result.form));
  report["mode"] = result.mode == Mode::kSymmetric ? "symmetric" : "asymmetric";
  report["dim"] = static_cast<int>(result.dim);
  report["points"] = result.num_points;
  report["converged"] = result.converged;
  report["iterations"] = result.iterations;
  report["sigma0"] = result.sigma0;
  report["dof"] = result.dof;
  report["objective"] = result.objective;
  if (result.dim == Dimension::k2D) {
    report["dof_planar"] = result.dof_planar;
    report["sigma0_planar"] =
        result.dof_planar > 0 ? std::sqrt(std::max(0.0, result.objective) / result.dof_planar)
                              : 0.0;
  }

  json warnings = json::array();
  for (const auto& w : result.warnings) warnings.push_back(w);

  std::optional<CovarianceReport> cov;
  try {
    cov = Covariance(result);
  } catch (const Error& e) {
    warnings.push_back(fmt::format("no precision estimates: {}", e.what()));
  }
  const SixParams six = cov ? cov->six : GeometricParameters(result);
  const auto sig = [&](auto get) { return cov ? json(get(*cov)) : json(nullptr); };

  json params;
  params["lambda"] = Param(result.lambda, sig([](const auto& c) { return c.sigma_lambda; }));
  const bool scaled = result.form == QuatForm::kScaled;
  // In scaled form the quaternion sigmas belong to the scaled quaternions.
  params["r"] = {{"value", Array(result.r.coeffs())},
                 {"sigma", cov && !scaled ? Array(cov->sigma_r) : json(nullptr)}};
  params["s"] = {{"value", Array(result.s.coeffs())},
                 {"sigma", cov && !scaled && cov->sigma_s ? Array(*cov->sigma_s) : json(nullptr)}};
  if (result.scaled) {
    params["scaled"] = {
        {"r", {{"value", Array(result.scaled->r.coeffs())},
               {"sigma", cov ? Array(cov->sigma_r) : json(nullptr)}}},
        {"s", {{"value", Array(result.scaled->s.coeffs())},
               {"sigma", cov && cov->sigma_s ? Array(*cov->sigma_s) : json(nullptr)}}}};
  }
  const char* angle_names[] = {"epsilon", "psi", "omega"};
  const double angles[] = {six.angles.epsilon, six.angles.psi, six.angles.omega};
  for (int i = 0; i < 3; ++i) {
    params["angles_deg"][angle_names[i]] =
        Param(angles[i] * kDeg, cov ? json(six.sigma[i] * kDeg) : json(nullptr));
  }
  const char* axes[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    params["translation"][axes[i]] =
        Param(six.translation[i], cov ? json(six.sigma[3 + i]) : json(nullptr));
  }
  report["parameters"] = params;

  // Observed minus adjusted, the negated corrections.
  json residuals = json::array();
  for (int i = 0; i < result.num_points; ++i) {
    residuals.push_back({{"id", problem.points[i].id},
                         {"source", Array(-result.sourceCorrection(i))},
                         {"target", Array(-result.targetCorrection(i))}});
  }
  report["residuals"] = residuals;
  report["iteration_log"] = Trace(result.trace);

  const double closure = ClosureCheck(result, problem);
  report["closure"] = {{"max_deviation", closure},
                       {"tolerance", kClosureTolerance},
                       {"pass", closure < kClosureTolerance}};
  report["warnings"] = warnings;

  if (full_covariance && cov) {
    json labels = json::array();
    for (const auto& l : cov->labels) labels.push_back(l);
    report["covariance"] = {
        {"quaternion", {{"labels", labels}, {"matrix", Matrix(cov->quaternion_block)}}},
        {"six",
         {{"labels", {"epsilon", "psi", "omega", "t_x", "t_y", "t_z"}},
          {"units", "rad, m"},
          {"matrix", Matrix(six.cov)}}},
        {"full", Matrix(cov->full)}};
  }
  return report;
}

std::string SolveText(const json& report) {
  std::string out;
  out += fmt::format("method     {} ({} form), {}, {}D, {} points\n",
                     report["method"].get<std::string>(), report["quat_form"].get<std::string>(),
                     report["mode"].get<std::string>(), report["dim"].get<int>(),
                     report["points"].get<int>());
  out += fmt::format("converged  {} after {} iterations\n",
                     report["converged"].get<bool>() ? "yes" : "no",
                     report["iterations"].get<int>());
  out += fmt::format("sigma0     {}  (dof {})\n", Sig(report["sigma0"], 10),
                     report["dof"].get<int>());
  if (report.contains("sigma0_planar")) {
    out += fmt::format("sigma0 2D  {}  (dof {})\n", Sig(report["sigma0_planar"], 10),
                       report["dof_planar"].get<int>());
  }

  const json& p = report["parameters"];
  out += "\nparameters\n";
  Row(out, "", "value", "sigma");
  Row(out, "lambda", Sig(p["lambda"]["value"], 11), Sig(p["lambda"]["sigma"], 9));
  for (const char* a : {"epsilon", "psi", "omega"}) {
    Row(out, fmt::format("{} [deg]", a), Fixed(p["angles_deg"][a]["value"], 9),
        Fixed(p["angles_deg"][a]["sigma"], 9));
  }
  for (const char* t : {"x", "y", "z"}) {
    Row(out, fmt::format("t_{} [m]", t), Fixed(p["translation"][t]["value"], 4),
        Fixed(p["translation"][t]["sigma"], 4));
  }
  out += "\nquaternions\n";
  QuaternionRows(out, "r", p["r"]);
  QuaternionRows(out, "s", p["s"]);
  if (p.contains("scaled")) {
    QuaternionRows(out, "qs", p["scaled"]["r"]);
    QuaternionRows(out, "ss", p["scaled"]["s"]);
  }

  out += "\nresiduals (observed - adjusted) [m]\n";
  out += fmt::format("  {:<16}{:>11}{:>11}{:>11}{:>11}{:>11}{:>11}\n", "id", "v_x", "v_y", "v_z",
                     "v_X", "v_Y", "v_Z");
  for (const auto& r : report["residuals"]) {
    std::string line = fmt::format("  {:<16}", r["id"].get<std::string>());
    for (const char* frame : {"source", "target"}) {
      for (const auto& x : r[frame]) line += fmt::format("{:>11.4f}", x.get<double>());
    }
    out += line + "\n";
  }

  out += "\niterations\n";
  out += fmt::format("  {:>4}{:>12}{:>12}{:>12}{:>12}{:>8}\n", "it", "step", "d_lambda",
                     "vTPv", "cond", "scale");
  for (const auto& r : report["iteration_log"]) {
    out += fmt::format("  {:>4}{:>12}{:>12}{:>12}{:>12}{:>8}\n", r["iteration"].get<int>(),
                       Sci(r["step"]), Sci(r["delta_lambda"]), Sci(r["objective"]),
                       Sci(r["condition"]), Sig(r["step_scale"], 4));
  }

  const json& c = report["closure"];
  out += fmt::format("\nclosure    max deviation {} m (tolerance {}): {}\n",
                     Sci(c["max_deviation"]), Sig(c["tolerance"], 3),
                     c["pass"].get<bool>() ? "PASS" : "FAIL");
  for (const auto& w : report["warnings"]) out += "warning    " + w.get<std::string>() + "\n";

  if (report.contains("covariance")) {
    out += "\n";
    CovarianceBlock(out, "quaternion covariance", report["covariance"]["quaternion"]);
    out += "\n";
    CovarianceBlock(out, "six-parameter covariance [rad, m]", report["covariance"]["six"]);
  }
  return out;
}

json FailureReport(const Error& error) {
  json failure = {{"error", std::string(ToString(error.code()))}, {"message", error.what()}};
  if (const auto* solver = dynamic_cast<const SolverError*>(&error)) {
    failure["iteration_log"] = Trace(solver->trace());
  }
  return failure;
}

std::string FailureText(const json& failure) {
  const std::string message = failure["message"].get<std::string>();
  std::string out = fmt::format("{}: {}\n", failure["error"].get<std::string>(), message);
  if (failure.contains("iteration_log") && message.find("\n  iter ") == std::string::npos) {
    for (const auto& r : failure["iteration_log"]) {
      out += fmt::format("  iter {}: step {}, dlambda {}, vTPv {}, cond {}\n",
                         r["iteration"].get<int>(), Sci(r["step"]), Sci(r["delta_lambda"]),
                         Sci(r["objective"]), Sci(r["condition"]));
    }
  }
  return out;
}

double MaxPairwiseDeviation(const std::vector<SolveResult>& results) {
  std::vector<Eigen::Matrix<double, 7, 1>> vectors;
  for (const SolveResult& r : results) {
    const SixParams six = GeometricParameters(r);
    Eigen::Matrix<double, 7, 1> v;
    v << r.lambda, six.angles.epsilon * kDeg, six.angles.psi * kDeg, six.angles.omega * kDeg,
        six.translation;
    vectors.push_back(v);
  }
  double worst = 0.0;
  for (size_t i = 0; i < vectors.size(); ++i) {
    for (size_t j = i + 1; j < vectors.size(); ++j) {
      worst = std::max(worst, (vectors[i] - vectors[j]).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

json CompareReport(const std::vector<CompareEntry>& entries, double max_deviation,
                   int successes) {
  json methods = json::array();
  for (const CompareEntry& e : entries) {
    methods.push_back({{"label", e.label}, {"ok", e.ok}, {"report", e.report}});
  }
  return {{"methods", methods},
          {"successes", successes},
          {"max_deviation", successes >= 2 ? json(max_deviation) : json(nullptr)},
          {"tolerance", kCompareTolerance},
          {"pass", successes == static_cast<int>(entries.size()) &&
                       (successes < 2 || max_deviation <= kCompareTolerance)}};
}

std::string CompareText(const json& report) {
  const json& methods = report["methods"];
  std::string out = fmt::format("  {:<16}", "");
  for (const auto& m : methods) out += fmt::format("{:>26}", m["label"].get<std::string>());
  out += "\n";

  using Getter = json (*)(const json&);
  const auto line = [&](const std::string& name, Getter get, auto format) {
    std::string text = fmt::format("  {:<16}", name);
    for (const auto& m : methods) {
      text += fmt::format("{:>26}", m["ok"].get<bool>() ? format(get(m["report"])) : "-");
    }
    out += text + "\n";
  };
  const auto fixed = [](int d) { return [d](const json& j) { return Fixed(j, d); }; };
  const auto sig = [](int d) { return [d](const json& j) { return Sig(j, d); }; };

  line("lambda", [](const json& r) { return r["parameters"]["lambda"]["value"]; }, sig(11));
  line("  sigma", [](const json& r) { return r["parameters"]["lambda"]["sigma"]; }, sig(6));
  line("epsilon [deg]", [](const json& r) { return r["parameters"]["angles_deg"]["epsilon"]["value"]; }, fixed(9));
  line("  sigma", [](const json& r) { return r["parameters"]["angles_deg"]["epsilon"]["sigma"]; }, fixed(9));
  line("psi [deg]", [](const json& r) { return r["parameters"]["angles_deg"]["psi"]["value"]; }, fixed(9));
  line("  sigma", [](const json& r) { return r["parameters"]["angles_deg"]["psi"]["sigma"]; }, fixed(9));
  line("omega [deg]", [](const json& r) { return r["parameters"]["angles_deg"]["omega"]["value"]; }, fixed(9));
  line("  sigma", [](const json& r) { return r["parameters"]["angles_deg"]["omega"]["sigma"]; }, fixed(9));
  line("t_x [m]", [](const json& r) { return r["parameters"]["translation"]["x"]["value"]; }, fixed(4));
  line("  sigma", [](const json& r) { return r["parameters"]["translation"]["x"]["sigma"]; }, fixed(4));
  line("t_y [m]", [](const json& r) { return r["parameters"]["translation"]["y"]["value"]; }, fixed(4));
  line("  sigma", [](const json& r) { return r["parameters"]["translation"]["y"]["sigma"]; }, fixed(4));
  line("t_z [m]", [](const json& r) { return r["parameters"]["translation"]["z"]["value"]; }, fixed(4));
  line("  sigma", [](const json& r) { return r["parameters"]["translation"]["z"]["sigma"]; }, fixed(4));
  line("sigma0", [](const json& r) { return r["sigma0"]; }, sig(10));
  line("iterations", [](const json& r) { return r["iterations"]; },
       [](const json& j) { return std::to_string(j.get<int>()); });

  for (const auto& m : methods) {
    if (!m["ok"].get<bool>()) {
      out += fmt::format("{} failed: {}", m["label"].get<std::string>(),
                         FailureText(m["report"]));
    }
  }
  if (report["max_deviation"].is_null()) {
    out += "max deviation    n/a (fewer than two methods succeeded)\n";
  } else {
    out += fmt::format("max deviation    {} (tolerance {})\n", Sci(report["max_deviation"]),
                       Sig(report["tolerance"], 3));
  }
  out += fmt::format("verdict          {}\n", report["pass"].get<bool>() ? "PASS" : "FAIL");
  return out;
}

}  // namespace dqhelmert::cli
