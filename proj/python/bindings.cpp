#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tvpbreak/breakpipe.hpp"
#include "tvpbreak/csv_io.hpp"
#include "tvpbreak/error.hpp"
#include "tvpbreak/panel.hpp"
#include "tvpbreak/report.hpp"
#include "tvpbreak/synthgen.hpp"
#include "tvpbreak/vecm.hpp"

namespace py = pybind11;
using namespace tvpbreak;

namespace {

RegressionPanel make_panel(std::vector<Eigen::MatrixXd> designs, std::vector<Eigen::VectorXd> responses,
                           std::optional<std::vector<std::string>> labels) {
  return validate_panel(PanelData{std::move(designs), std::move(responses), std::move(labels)});
}

DetectConfig make_detect_config(std::optional<double> lambda, std::optional<int> fixed_k, int num_lambdas,
                                double min_ratio, bool concurrent, double kkt_tol, int max_sweeps,
                                double objective_tol, bool sqrt_size_weights) {
  if (lambda && fixed_k) throw Error(ErrorCode::InvalidConfig, "lambda and fixed_k are mutually exclusive");
  DetectConfig config;
  if (lambda) {
    config.lambda_choice = FixedLambda{*lambda};
  } else {
    PathSelection selection;
    selection.path.num_lambdas = num_lambdas;
    selection.path.min_ratio = min_ratio;
    selection.path.mode = concurrent ? PathMode::ConcurrentColdStart : PathMode::SequentialWarmStart;
    if (fixed_k) selection.criterion = FixedKCriterion{*fixed_k};
    config.lambda_choice = selection;
  }
  config.solver.kkt_tol = kkt_tol;
  config.solver.max_sweeps = max_sweeps;
  config.solver.objective_tol = objective_tol;
  config.weighting = sqrt_size_weights ? GroupWeighting::SqrtSize : GroupWeighting::Unit;
  return config;
}

MultivariateSeries make_series(Eigen::MatrixXd values, std::optional<std::vector<std::string>> labels) {
  return MultivariateSeries{std::move(values), std::move(labels)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Structural breaks in time-varying regressions via group LASSO on coefficient differences.";

  // Owned by the module for the interpreter's lifetime.
  static const py::handle error_type = PyErr_NewException("tvpbreak._core.TvpbreakError", PyExc_RuntimeError, nullptr);
  m.attr("TvpbreakError") = error_type;
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = error_type(e.what());
      instance.attr("code") = std::string(error_name(e.code()));
      instance.attr("exit_code") = exit_code(e.code());
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::enum_<DegreeNorm>(m, "DegreeNorm")
      .value("SPECTRAL", DegreeNorm::Spectral)
      .value("FROBENIUS", DegreeNorm::Frobenius);
  py::enum_<TimeVarying>(m, "TimeVarying").value("PI_ONLY", TimeVarying::PiOnly).value("ALL", TimeVarying::All);
  py::enum_<DesignDistribution>(m, "DesignDistribution")
      .value("STANDARD_NORMAL", DesignDistribution::StandardNormal)
      .value("UNIT_CONSTANT", DesignDistribution::UnitConstant);
  py::enum_<LabelStyle>(m, "LabelStyle")
      .value("NONE", LabelStyle::None)
      .value("INDEX", LabelStyle::Index)
      .value("MONTHLY", LabelStyle::Monthly);

  py::class_<RegressionPanel>(m, "RegressionPanel")
      .def(py::init(&make_panel), py::arg("designs"), py::arg("responses"), py::arg("labels") = py::none())
      .def_property_readonly("periods", &RegressionPanel::periods)
      .def_property_readonly("obs_dim", &RegressionPanel::obs_dim)
      .def_property_readonly("coef_dim", &RegressionPanel::coef_dim)
      .def_property_readonly("designs", &RegressionPanel::design_blocks)
      .def_property_readonly("responses", &RegressionPanel::responses)
      .def_property_readonly("labels", &RegressionPanel::period_labels)
      .def("stacked_response", &RegressionPanel::stacked_response)
      .def("__repr__", [](const RegressionPanel& p) {
        return "RegressionPanel(periods=" + std::to_string(p.periods()) + ", obs_dim=" +
               std::to_string(p.obs_dim()) + ", coef_dim=" + std::to_string(p.coef_dim()) + ")";
      });

  py::class_<MultivariateSeries>(m, "MultivariateSeries")
      .def(py::init(&make_series), py::arg("values"), py::arg("labels") = py::none())
      .def_readonly("values", &MultivariateSeries::values)
      .def_readonly("labels", &MultivariateSeries::labels)
      .def_property_readonly("length", &MultivariateSeries::length)
      .def_property_readonly("dim", &MultivariateSeries::dim);

  py::class_<CoefficientPath>(m, "CoefficientPath")
      .def_readonly("beta0", &CoefficientPath::beta0)
      .def_readonly("deltas", &CoefficientPath::deltas)
      .def_readonly("betas", &CoefficientPath::betas)
      .def_property_readonly("periods", &CoefficientPath::periods);
  m.def("reconstruct_path", &reconstruct_path, py::arg("beta0"), py::arg("deltas"));
  m.def("difference_path", &difference_path, py::arg("beta0"), py::arg("betas"));

  py::class_<BreakEvent>(m, "BreakEvent")
      .def_readonly("period", &BreakEvent::period)
      .def_readonly("label", &BreakEvent::label)
      .def_readonly("magnitude", &BreakEvent::magnitude)
      .def_readonly("jump", &BreakEvent::jump)
      .def("__repr__", [](const BreakEvent& b) {
        return "BreakEvent(period=" + std::to_string(b.period) + ", magnitude=" + format_double(b.magnitude) + ")";
      });

  py::class_<PathSummaryRow>(m, "PathSummaryRow")
      .def_readonly("lambda_", &PathSummaryRow::lambda)
      .def_readonly("active_count", &PathSummaryRow::active_count)
      .def_readonly("objective", &PathSummaryRow::objective)
      .def_readonly("sweeps", &PathSummaryRow::sweeps)
      .def_readonly("converged", &PathSummaryRow::converged)
      .def_readonly("kkt_residual", &PathSummaryRow::kkt_residual)
      .def_readonly("bic", &PathSummaryRow::bic);

  py::class_<BreakDiagnostics>(m, "BreakDiagnostics")
      .def_readonly("sweeps", &BreakDiagnostics::sweeps)
      .def_readonly("objective", &BreakDiagnostics::objective)
      .def_readonly("kkt_residual", &BreakDiagnostics::kkt_residual)
      .def_readonly("converged", &BreakDiagnostics::converged)
      .def_readonly("not_converged_warning", &BreakDiagnostics::not_converged_warning)
      .def_readonly("unconverged_path_points", &BreakDiagnostics::unconverged_path_points)
      .def_readonly("lambda_max", &BreakDiagnostics::lambda_max)
      .def_readonly("response_scale", &BreakDiagnostics::response_scale)
      .def_readonly("ridge_used", &BreakDiagnostics::ridge_used)
      .def_readonly("baseline_rank", &BreakDiagnostics::baseline_rank)
      .def_readonly("baseline_residual_norm", &BreakDiagnostics::baseline_residual_norm)
      .def_readonly("degenerate", &BreakDiagnostics::degenerate);

  py::class_<BreakReport>(m, "BreakReport")
      .def_readonly("breaks", &BreakReport::breaks)
      .def_readonly("path", &BreakReport::path)
      .def_readonly("lambda_used", &BreakReport::lambda_used)
      .def_readonly("criterion", &BreakReport::criterion)
      .def_readonly("diagnostics", &BreakReport::diagnostics)
      .def_readonly("lambda_path", &BreakReport::lambda_path)
      .def_property_readonly("break_periods", [](const BreakReport& r) {
        std::vector<int> periods;
        for (const auto& b : r.breaks) periods.push_back(b.period);
        return periods;
      });

  m.def(
      "detect_breaks",
      [](const RegressionPanel& panel, std::optional<double> lambda, std::optional<int> fixed_k, int num_lambdas,
         double min_ratio, bool concurrent, double kkt_tol, int max_sweeps, double objective_tol,
         bool sqrt_size_weights) {
        const DetectConfig config = make_detect_config(lambda, fixed_k, num_lambdas, min_ratio, concurrent, kkt_tol,
                                                       max_sweeps, objective_tol, sqrt_size_weights);
        py::gil_scoped_release release;
        return detect_breaks(panel, config);
      },
      py::arg("panel"), py::kw_only(), py::arg("lambda_") = py::none(), py::arg("fixed_k") = py::none(),
      py::arg("num_lambdas") = 50, py::arg("min_ratio") = 0.01, py::arg("concurrent") = false,
      py::arg("kkt_tol") = 1e-6, py::arg("max_sweeps") = 10000, py::arg("objective_tol") = 1e-10,
      py::arg("sqrt_size_weights") = false,
      "Break detection with BIC selection (default), a fixed number of breaks, or a fixed lambda.");

  m.def(
      "report_json",
      [](const BreakReport& report, const RegressionPanel& panel) {
        return break_report_json(report, panel, "fit", nlohmann::json::object()).dump();
      },
      py::arg("report"), py::arg("panel"), "Report document as a JSON string.");

  py::class_<VecmFit>(m, "VecmFit")
      .def_readonly("gammas", &VecmFit::gammas)
      .def_readonly("mu", &VecmFit::mu)
      .def_readonly("pi", &VecmFit::pi)
      .def_readonly("alpha", &VecmFit::alpha)
      .def_readonly("beta_star", &VecmFit::beta_star)
      .def_readonly("effective_T", &VecmFit::effective_T)
      .def_readonly("ridge_used", &VecmFit::ridge_used)
      .def_readonly("residual_norm", &VecmFit::residual_norm);

  py::class_<ComovementSeries>(m, "ComovementSeries")
      .def_readonly("periods", &ComovementSeries::periods)
      .def_readonly("alphas", &ComovementSeries::alphas)
      .def_readonly("degrees", &ComovementSeries::degrees)
      .def_readonly("break_periods", &ComovementSeries::break_periods);

  py::class_<ComovementResult>(m, "ComovementResult")
      .def_readonly("fit", &ComovementResult::fit)
      .def_readonly("report", &ComovementResult::report)
      .def_readonly("comovement", &ComovementResult::comovement)
      .def_readonly("pi_path", &ComovementResult::pi_path);

  m.def(
      "comovement_pipeline",
      [](const MultivariateSeries& series, int lags, int rank, bool intercept, DegreeNorm degree_norm,
         TimeVarying mode, std::optional<double> lambda, std::optional<int> fixed_k, int num_lambdas,
         double min_ratio, bool concurrent, double kkt_tol, int max_sweeps) {
        const VecmSpec spec{lags, rank, intercept, degree_norm};
        const DetectConfig config =
            make_detect_config(lambda, fixed_k, num_lambdas, min_ratio, concurrent, kkt_tol, max_sweeps, 1e-10, false);
        py::gil_scoped_release release;
        return comovement_pipeline(series, spec, config, mode);
      },
      py::arg("series"), py::kw_only(), py::arg("lags") = 1, py::arg("rank") = 1, py::arg("intercept") = true,
      py::arg("degree_norm") = DegreeNorm::Spectral, py::arg("mode") = TimeVarying::PiOnly,
      py::arg("lambda_") = py::none(), py::arg("fixed_k") = py::none(), py::arg("num_lambdas") = 50,
      py::arg("min_ratio") = 0.01, py::arg("concurrent") = false, py::arg("kkt_tol") = 1e-6,
      py::arg("max_sweeps") = 10000);

  m.def(
      "fit_vecm_invariant",
      [](const MultivariateSeries& series, int lags, int rank, bool intercept) {
        return fit_vecm_invariant(series, VecmSpec{lags, rank, intercept, DegreeNorm::Spectral});
      },
      py::arg("series"), py::kw_only(), py::arg("lags") = 1, py::arg("rank") = 1, py::arg("intercept") = true);
  m.def("decompose_pi", &decompose_pi, py::arg("pi"), py::arg("rank"), "Returns (alpha, beta_star).");
  m.def("recover_alpha", &recover_alpha, py::arg("pi_t"), py::arg("beta_star"));
  m.def("comovement_degree", &comovement_degree, py::arg("alpha"), py::arg("norm") = DegreeNorm::Spectral);

  m.def(
      "generate_panel",
      [](std::uint64_t seed, int periods, int obs_dim, int coef_dim, const Eigen::VectorXd& base_beta,
         const std::vector<std::pair<int, Eigen::VectorXd>>& jumps, double noise_scale, DesignDistribution design,
         LabelStyle labels) {
        SyntheticScenario sc{seed, periods, obs_dim, coef_dim, {}, base_beta, noise_scale, design, labels};
        for (const auto& [period, jump] : jumps) sc.jumps.push_back({period, jump});
        return generate_panel(sc);
      },
      py::arg("seed"), py::arg("periods"), py::arg("obs_dim"), py::arg("coef_dim"), py::kw_only(),
      py::arg("base_beta"), py::arg("jumps") = std::vector<std::pair<int, Eigen::VectorXd>>{},
      py::arg("noise_scale") = 0.0, py::arg("design") = DesignDistribution::StandardNormal,
      py::arg("labels") = LabelStyle::None, "Returns (panel, true coefficient path).");

  py::class_<VecmTruth>(m, "VecmTruth")
      .def_readonly("pi_path", &VecmTruth::pi_path)
      .def_readonly("gammas", &VecmTruth::gammas)
      .def_readonly("mu", &VecmTruth::mu);

  m.def(
      "generate_vecm",
      [](std::uint64_t seed, int effective_periods, const std::vector<Eigen::MatrixXd>& gammas,
         const Eigen::VectorXd& mu, const Eigen::MatrixXd& pi,
         const std::vector<std::pair<int, Eigen::MatrixXd>>& jumps, double noise_scale,
         std::optional<Eigen::VectorXd> initial_level, int burn_in, LabelStyle labels) {
        VecmScenario sc;
        sc.seed = seed;
        sc.lag_order = static_cast<int>(gammas.size());
        sc.effective_periods = effective_periods;
        sc.gammas = gammas;
        sc.mu = mu;
        sc.pi = pi;
        for (const auto& [period, change] : jumps) sc.jumps.push_back({period, change});
        sc.noise_scale = noise_scale;
        if (initial_level) sc.initial_level = *initial_level;
        sc.burn_in = burn_in;
        sc.labels = labels;
        return generate_vecm(sc);
      },
      py::arg("seed"), py::arg("effective_periods"), py::kw_only(), py::arg("gammas"), py::arg("mu"), py::arg("pi"),
      py::arg("jumps") = std::vector<std::pair<int, Eigen::MatrixXd>>{}, py::arg("noise_scale") = 1.0,
      py::arg("initial_level") = py::none(), py::arg("burn_in") = 100, py::arg("labels") = LabelStyle::None,
      "Returns (series, truth). The lag order is len(gammas).");
  m.def("stationary_spectral_radius", &stationary_spectral_radius, py::arg("gammas"), py::arg("pi"));

  m.def("read_series_csv", &read_series_csv, py::arg("path"));
  m.def("read_panel_csv", &read_panel_csv, py::arg("path"));
  m.def("write_series_csv", py::overload_cast<const std::filesystem::path&, const MultivariateSeries&>(&write_series_csv),
        py::arg("path"), py::arg("series"));
  m.def("write_panel_csv", py::overload_cast<const std::filesystem::path&, const RegressionPanel&>(&write_panel_csv),
        py::arg("path"), py::arg("panel"));
  m.def("format_double", &format_double, py::arg("x"));
}
