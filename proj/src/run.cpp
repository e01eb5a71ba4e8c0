#include "tvpbreak/run.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "tvpbreak/breakpipe.hpp"
#include "tvpbreak/csv_io.hpp"
#include "tvpbreak/report.hpp"

namespace tvpbreak {

namespace {

using nlohmann::json;

void invalid(const std::string& message) { throw Error(ErrorCode::InvalidConfig, message); }

std::string norm_name(DegreeNorm norm) { return norm == DegreeNorm::Spectral ? "spectral" : "frobenius"; }

std::string mode_name(TimeVarying mode) { return mode == TimeVarying::PiOnly ? "pi" : "all"; }

json lambda_json(const LambdaSetting& setting) {
  if (std::holds_alternative<AutoLambda>(setting)) return "auto";
  if (const auto* value = std::get_if<double>(&setting)) return *value;
  return nullptr;
}

DetectConfig detect_config(const RunConfig& config, bool full_path) {
  DetectConfig detect;
  detect.solver.kkt_tol = config.kkt_tol;
  detect.solver.max_sweeps = config.max_sweeps;
  detect.solver.objective_tol = config.objective_tol;
  if (const auto* value = std::get_if<double>(&config.lambda)) {
    detect.lambda_choice = FixedLambda{*value};
    return detect;
  }
  PathSelection selection;
  selection.path.num_lambdas = config.num_lambdas;
  selection.path.min_ratio = config.min_ratio;
  selection.path.mode = config.concurrent_path ? PathMode::ConcurrentColdStart : PathMode::SequentialWarmStart;
  selection.stop_at_fixed_k = !full_path;
  if (const auto* k = std::get_if<FixedKCriterion>(&config.lambda)) selection.criterion = *k;
  detect.lambda_choice = selection;
  return detect;
}

void write_report(const std::filesystem::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

template <typename Writer>
std::filesystem::path write_plot(const std::filesystem::path& report_path, Writer&& writer) {
  std::ostringstream csv;
  writer(csv);
  const auto plot = plot_path_for(report_path);
  write_text_file(plot, csv.str());
  return plot;
}

json run_fit(const RunConfig& config, bool lambda_path) {
  const RegressionPanel panel = read_panel_csv(config.input);
  const BreakReport report = detect_breaks(panel, detect_config(config, lambda_path));
  const std::filesystem::path output(config.output);
  write_report(output, break_report_json(report, panel, lambda_path ? "lambda-path" : "fit", run_config_json(config)));
  const auto plot = write_plot(output, [&](std::ostream& out) {
    if (lambda_path) {
      write_lambda_plot_csv(out, report);
    } else {
      write_path_plot_csv(out, report, panel);
    }
  });
  std::vector<int> periods;
  for (const auto& event : report.breaks) periods.push_back(event.period);
  return {{"report", output.string()}, {"plot", plot.string()}, {"lambda", report.lambda_used},
          {"breaks", periods}, {"converged", report.diagnostics.converged}};
}

json run_vecm(const RunConfig& config) {
  const MultivariateSeries series = read_series_csv(config.input);
  VecmSpec spec;
  spec.lag_order = config.lags.value_or(1);
  spec.coint_rank = config.rank.value_or(1);
  spec.degree_norm = config.degree_norm.value_or(DegreeNorm::Spectral);
  const TimeVarying mode = config.time_varying.value_or(TimeVarying::PiOnly);
  const ComovementResult result = comovement_pipeline(series, spec, detect_config(config, false), mode);
  const RegressionPanel panel = build_vecm_panel(series, spec, mode);

  const std::filesystem::path output(config.output);
  write_report(output, comovement_report_json(result, panel, run_config_json(config)));
  const auto plot = write_plot(output, [&](std::ostream& out) { write_degree_plot_csv(out, result.comovement); });
  return {{"report", output.string()}, {"plot", plot.string()}, {"lambda", result.report.lambda_used},
          {"breaks", result.comovement.break_periods}};
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json run_synth(const RunConfig& config) {
  const SynthOptions& opt = config.synth;
  const std::uint64_t seed = config.seed.value_or(0);
  const std::filesystem::path output(config.output);
  std::filesystem::path truth_path = output;
  truth_path.replace_extension(".truth.json");

  json truth;
  truth["seed"] = seed;
  if (opt.kind == SynthKind::Panel) {
    SyntheticScenario sc;
    sc.seed = seed;
    sc.periods = opt.periods;
    sc.obs_dim = opt.obs_dim;
    sc.coef_dim = opt.coef_dim;
    sc.jumps = opt.jumps;
    sc.base_beta = opt.base_beta.empty() ? Eigen::VectorXd::Ones(opt.coef_dim) : to_vector(opt.base_beta);
    sc.noise_scale = opt.noise;
    sc.design = opt.design;
    sc.labels = opt.labels;
    const auto [panel, path] = generate_panel(sc);
    std::ostringstream csv;
    write_panel_csv(csv, panel);
    write_text_file(output, csv.str());

    json jumps = json::array();
    for (const auto& j : sc.jumps) {
      jumps.push_back({{"period_index", j.period}, {"jump", std::vector<double>(j.jump.data(), j.jump.data() + j.jump.size())}});
    }
    truth["kind"] = "panel";
    truth["jumps"] = std::move(jumps);
    truth["beta0"] = std::vector<double>(path.beta0.data(), path.beta0.data() + path.beta0.size());
  } else {
    if (opt.alpha.size() != opt.beta.size() || opt.alpha.empty()) invalid("alpha and beta must have the same length");
    const auto m = static_cast<Eigen::Index>(opt.alpha.size());
    const Eigen::VectorXd alpha = to_vector(opt.alpha);
    const Eigen::VectorXd beta = to_vector(opt.beta);
    VecmScenario sc;
    sc.seed = seed;
    sc.lag_order = 1;
    sc.effective_periods = opt.periods;
    sc.gammas = {opt.gamma * Eigen::MatrixXd::Identity(m, m)};
    sc.mu = Eigen::VectorXd::Zero(m);
    sc.pi = alpha * beta.transpose();
    if (opt.alpha_doubling_period) sc.jumps.push_back({*opt.alpha_doubling_period, sc.pi});
    sc.noise_scale = opt.noise;
    sc.labels = opt.labels;
    const auto [series, vtruth] = generate_vecm(sc);
    std::ostringstream csv;
    write_series_csv(csv, series);
    write_text_file(output, csv.str());
    truth["kind"] = "vecm";
    truth["lag_order"] = sc.lag_order;
    truth["alpha"] = opt.alpha;
    truth["beta"] = opt.beta;
    truth["gamma"] = opt.gamma;
    truth["alpha_doubling_period"] = opt.alpha_doubling_period ? json(*opt.alpha_doubling_period) : json(nullptr);
  }
  truth["run_config"] = run_config_json(config);
  write_report(truth_path, truth);
  return {{"data", output.string()}, {"truth", truth_path.string()}, {"seed", seed}};
}

}  // namespace

std::string subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::Fit: return "fit";
    case Subcommand::Vecm: return "vecm";
    case Subcommand::Synth: return "synth";
    case Subcommand::LambdaPath: return "lambda-path";
  }
  return "unknown";
}

void validate_run_config(const RunConfig& c) {
  const bool vecm = c.subcommand == Subcommand::Vecm;
  const bool synth = c.subcommand == Subcommand::Synth;
  if (c.output.empty()) invalid("--output is required");
  if (!synth && c.input.empty()) invalid("--input is required for " + subcommand_name(c.subcommand));
  if (synth && !c.input.empty()) invalid("synth does not read --input");
  if (!vecm && (c.lags || c.rank || c.degree_norm || c.time_varying)) {
    invalid("--lags, --rank, --degree-norm and --time-varying require the vecm subcommand");
  }
  if (!synth && c.seed) invalid("--seed requires the synth subcommand");
  if (c.lags && *c.lags < 1) invalid("--lags must be at least 1");
  if (c.rank && *c.rank < 1) invalid("--rank must be at least 1");
  if (const auto* value = std::get_if<double>(&c.lambda); value && !(*value > 0.0 && std::isfinite(*value))) {
    invalid("--lambda must be 'auto' or a positive number");
  }
  if (const auto* k = std::get_if<FixedKCriterion>(&c.lambda); k && k->k < 0) invalid("--fixed-k must be nonnegative");
  if (c.subcommand == Subcommand::LambdaPath && std::holds_alternative<double>(c.lambda)) {
    invalid("lambda-path traces a grid; a fixed --lambda does not apply");
  }
  if (c.num_lambdas < 1) invalid("--num-lambdas must be positive");
  if (!(c.min_ratio > 0.0 && c.min_ratio <= 1.0)) invalid("--min-ratio must lie in (0, 1]");
  if (!(c.kkt_tol > 0.0) || !(c.objective_tol >= 0.0) || c.max_sweeps < 1) invalid("tolerances must be positive");
}

json run_config_json(const RunConfig& c) {
  json doc = {{"subcommand", subcommand_name(c.subcommand)},
              {"input", c.input.empty() ? json(nullptr) : json(c.input)},
              {"output", c.output},
              {"lambda", lambda_json(c.lambda)},
              {"fixed_k", nullptr},
              {"num_lambdas", c.num_lambdas},
              {"min_ratio", c.min_ratio},
              {"kkt_tol", c.kkt_tol},
              {"max_sweeps", c.max_sweeps},
              {"objective_tol", c.objective_tol},
              {"path_mode", c.concurrent_path ? "concurrent" : "sequential"}};
  if (const auto* k = std::get_if<FixedKCriterion>(&c.lambda)) doc["fixed_k"] = k->k;
  if (c.subcommand == Subcommand::Vecm) {
    doc["lags"] = c.lags.value_or(1);
    doc["rank"] = c.rank.value_or(1);
    doc["degree_norm"] = norm_name(c.degree_norm.value_or(DegreeNorm::Spectral));
    doc["time_varying"] = mode_name(c.time_varying.value_or(TimeVarying::PiOnly));
  }
  if (c.subcommand == Subcommand::Synth) doc["seed"] = c.seed.value_or(0);
  return doc;
}

json error_json(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", error_name(code)}, {"exit_code", exit_code(code)}, {"message", message}}}};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_run_config(config);
    json summary;
    switch (config.subcommand) {
      case Subcommand::Fit: summary = run_fit(config, false); break;
      case Subcommand::LambdaPath: summary = run_fit(config, true); break;
      case Subcommand::Vecm: summary = run_vecm(config); break;
      case Subcommand::Synth: summary = run_synth(config); break;
    }
    summary["subcommand"] = subcommand_name(config.subcommand);
    out << summary.dump() << '\n';
    return 0;
  } catch (const Error& e) {
    err << error_json(e.code(), e.what()).dump() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << json{{"error", {{"code", "Internal"}, {"exit_code", 1}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
}

int run(const RunConfig& config) { return run(config, std::cout, std::cerr); }

}  // namespace tvpbreak
