#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tvpbreak/error.hpp"
#include "tvpbreak/group_lasso.hpp"
#include "tvpbreak/synthgen.hpp"
#include "tvpbreak/vecm.hpp"

namespace tvpbreak {

enum class Subcommand { Fit, Vecm, Synth, LambdaPath };

struct AutoLambda {};  // path + BIC
using LambdaSetting = std::variant<AutoLambda, double, FixedKCriterion>;

enum class SynthKind { Panel, Vecm };

/// Options of the synth subcommand. Panel runs use the jump list; VEC runs build
/// Pi = alpha beta' and add alpha beta' at alpha_doubling_period (alpha doubled).
struct SynthOptions {
  SynthKind kind = SynthKind::Panel;
  int periods = 60;
  int obs_dim = 2;
  int coef_dim = 3;
  std::vector<PanelJump> jumps;
  std::vector<double> base_beta;  // empty means all ones
  double noise = 0.1;
  DesignDistribution design = DesignDistribution::StandardNormal;
  LabelStyle labels = LabelStyle::Index;
  std::vector<double> alpha{-0.3, 0.15, 0.0};
  std::vector<double> beta{1.0, -1.0, 0.0};
  double gamma = 0.2;  // Gamma_1 = gamma I
  std::optional<int> alpha_doubling_period;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::Fit;
  std::string input;
  std::string output;
  std::optional<int> lags;
  std::optional<int> rank;
  LambdaSetting lambda = AutoLambda{};
  int num_lambdas = 50;
  double min_ratio = 0.01;
  std::optional<DegreeNorm> degree_norm;
  std::optional<TimeVarying> time_varying;
  double kkt_tol = 1e-6;
  int max_sweeps = 10000;
  double objective_tol = 1e-10;
  bool concurrent_path = false;
  std::optional<std::uint64_t> seed;
  SynthOptions synth;
};

/// Throws InvalidConfig when options contradict the subcommand (for example a
/// rank outside vecm, or a seed outside synth).
void validate_run_config(const RunConfig& config);

/// The config as it appears under "run_config" in reports.
nlohmann::json run_config_json(const RunConfig& config);

/// Machine-readable error document written to the error stream.
nlohmann::json error_json(ErrorCode code, const std::string& message);

/// Runs one subcommand. Returns 0 on success, otherwise the exit code of the
/// error after writing error_json to `err`. A short JSON summary goes to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);
int run(const RunConfig& config);

std::string subcommand_name(Subcommand s);

}  // namespace tvpbreak
