#include <charconv>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvpbreak/error.hpp"
#include "tvpbreak/run.hpp"

using namespace tvpbreak;

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string cell = text.substr(start, end - start);
    double v = 0.0;
    const char* first = cell.data() + (!cell.empty() && cell.front() == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw Error(ErrorCode::InvalidConfig, flag + ": '" + cell + "' is not a number");
    }
    values.push_back(v);
    start = end + 1;
  }
  return values;
}

// "period:v1,v2,..."
PanelJump parse_jump(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--jump expects period:v1,v2,...");
  PanelJump jump;
  const std::string head = text.substr(0, colon);
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), jump.period);
  if (head.empty() || ec != std::errc() || ptr != head.data() + head.size()) {
    throw Error(ErrorCode::InvalidConfig, "--jump: bad period '" + head + "'");
  }
  const auto values = parse_list(text.substr(colon + 1), "--jump");
  jump.jump = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return jump;
}

struct RawOptions {
  std::string lambda = "auto";
  int fixed_k = 0;
  int lags = 1;
  int rank = 1;
  std::string degree_norm = "spectral";
  std::string time_varying = "pi";
  std::uint64_t seed = 0;
  std::vector<std::string> jumps;
  std::string base_beta;
  std::string alpha;
  std::string beta;
  int double_alpha_at = 0;
};

struct Flags {
  CLI::Option* lambda = nullptr;
  CLI::Option* fixed_k = nullptr;
  CLI::Option* lags = nullptr;
  CLI::Option* rank = nullptr;
  CLI::Option* degree_norm = nullptr;
  CLI::Option* time_varying = nullptr;
  CLI::Option* seed = nullptr;
};

Flags add_common(CLI::App* app, RunConfig& config, RawOptions& raw) {
  Flags f;
  app->add_option("--input", config.input, "Input CSV");
  app->add_option("--output", config.output, "Output file");
  f.lambda = app->add_option("--lambda", raw.lambda, "auto (path + BIC) or a fixed penalty");
  f.fixed_k = app->add_option("--fixed-k", raw.fixed_k, "Pick the largest lambda with exactly this many breaks");
  app->add_option("--num-lambdas", config.num_lambdas, "Grid size of the lambda path");
  app->add_option("--min-ratio", config.min_ratio, "Smallest lambda as a fraction of lambda_max");
  app->add_option("--kkt-tol", config.kkt_tol, "Relative KKT tolerance");
  app->add_option("--max-sweeps", config.max_sweeps, "Sweep limit per solve");
  app->add_option("--objective-tol", config.objective_tol, "Relative objective change treated as flat");
  app->add_flag("--concurrent-path", config.concurrent_path, "Solve path points independently in parallel");
  f.lags = app->add_option("--lags", raw.lags, "VEC difference lags k");
  f.rank = app->add_option("--rank", raw.rank, "Cointegration rank r");
  f.degree_norm = app->add_option("--degree-norm", raw.degree_norm, "spectral or frobenius")
                      ->check(CLI::IsMember({"spectral", "frobenius"}));
  f.time_varying = app->add_option("--time-varying", raw.time_varying, "pi (only Pi varies) or all")
                       ->check(CLI::IsMember({"pi", "all"}));
  f.seed = app->add_option("--seed", raw.seed, "Generator seed");
  return f;
}

void add_synth(CLI::App* app, SynthOptions& s, RawOptions& raw) {
  static const std::map<std::string, SynthKind> kinds{{"panel", SynthKind::Panel}, {"vecm", SynthKind::Vecm}};
  static const std::map<std::string, DesignDistribution> designs{{"normal", DesignDistribution::StandardNormal},
                                                                 {"constant", DesignDistribution::UnitConstant}};
  static const std::map<std::string, LabelStyle> labels{
      {"none", LabelStyle::None}, {"index", LabelStyle::Index}, {"monthly", LabelStyle::Monthly}};
  app->add_option("--kind", s.kind, "panel or vecm")->transform(CLI::CheckedTransformer(kinds));
  app->add_option("--periods", s.periods, "T (effective periods for vecm)");
  app->add_option("--obs-dim", s.obs_dim, "m");
  app->add_option("--coef-dim", s.coef_dim, "n");
  app->add_option("--jump", raw.jumps, "period:v1,...,vn (repeatable)");
  app->add_option("--base-beta", raw.base_beta, "Comma-separated beta_0");
  app->add_option("--noise", s.noise, "Noise scale");
  app->add_option("--design", s.design, "normal or constant")->transform(CLI::CheckedTransformer(designs));
  app->add_option("--labels", s.labels, "none, index or monthly")->transform(CLI::CheckedTransformer(labels));
  app->add_option("--alpha", raw.alpha, "VEC loading vector");
  app->add_option("--beta", raw.beta, "VEC cointegrating vector");
  app->add_option("--gamma", s.gamma, "Gamma_1 = gamma * I");
  app->add_option("--double-alpha-at", raw.double_alpha_at, "Effective period at which alpha doubles");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural break detection in time-varying regressions and VEC models"};
  app.require_subcommand(1);

  RunConfig config;
  RawOptions raw;
  std::map<CLI::App*, std::pair<Subcommand, Flags>> commands;
  const std::vector<std::pair<Subcommand, std::string>> names{
      {Subcommand::Fit, "Detect breaks in a panel CSV"},
      {Subcommand::Vecm, "Comovement analysis of a multivariate series CSV"},
      {Subcommand::Synth, "Write a synthetic panel or VEC series"},
      {Subcommand::LambdaPath, "Trace the full lambda path of a panel CSV"}};
  for (const auto& [sub, description] : names) {
    CLI::App* cmd = app.add_subcommand(subcommand_name(sub), description);
    commands[cmd] = {sub, add_common(cmd, config, raw)};
    if (sub == Subcommand::Synth) add_synth(cmd, config.synth, raw);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json(ErrorCode::InvalidConfig, e.what()).dump() << '\n';
    return exit_code(ErrorCode::InvalidConfig);
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const auto& [sub, flags] = commands.at(cmd);
    config.subcommand = sub;

    if (flags.fixed_k->count() > 0) {
      if (flags.lambda->count() > 0) throw Error(ErrorCode::InvalidConfig, "--lambda and --fixed-k are exclusive");
      config.lambda = FixedKCriterion{raw.fixed_k};
    } else if (raw.lambda != "auto") {
      config.lambda = parse_list(raw.lambda, "--lambda").at(0);
      if (raw.lambda.find(',') != std::string::npos) throw Error(ErrorCode::InvalidConfig, "--lambda takes one value");
    }
    if (flags.lags->count() > 0) config.lags = raw.lags;
    if (flags.rank->count() > 0) config.rank = raw.rank;
    if (flags.degree_norm->count() > 0) {
      config.degree_norm = raw.degree_norm == "spectral" ? DegreeNorm::Spectral : DegreeNorm::Frobenius;
    }
    if (flags.time_varying->count() > 0) {
      config.time_varying = raw.time_varying == "pi" ? TimeVarying::PiOnly : TimeVarying::All;
    }
    if (flags.seed->count() > 0) config.seed = raw.seed;

    if (sub == Subcommand::Synth) {
      for (const auto& j : raw.jumps) config.synth.jumps.push_back(parse_jump(j));
      if (!raw.base_beta.empty()) config.synth.base_beta = parse_list(raw.base_beta, "--base-beta");
      if (!raw.alpha.empty()) config.synth.alpha = parse_list(raw.alpha, "--alpha");
      if (!raw.beta.empty()) config.synth.beta = parse_list(raw.beta, "--beta");
      if (raw.double_alpha_at > 0) config.synth.alpha_doubling_period = raw.double_alpha_at;
    }
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.what()).dump() << '\n';
    return exit_code(e.code());
  }
  return run(config);
}
