#include <doctest.h>

#include "support.hpp"
#include "tvpbreak/baseline.hpp"
#include "tvpbreak/error.hpp"
#include "tvpbreak/group_lasso.hpp"
#include "tvpbreak/synthgen.hpp"

using namespace tvpbreak;

namespace {

struct Instance {
  DifferenceDesign design;
  ResidualTarget target;
};

Instance random_instance(PortableRng& rng, int T, int m, int n, bool normalize = true) {
  const auto panel = testing::random_panel(rng, T, m, n);
  auto [design, target] = build_design(panel, Eigen::VectorXd::Zero(n), normalize);
  return {std::move(design), std::move(target)};
}

Instance two_by_one() {
  const auto panel = testing::panel_from({Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 3.0)},
                                         {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)});
  auto [design, target] = build_design(panel, Eigen::VectorXd::Zero(1), false);
  return {std::move(design), std::move(target)};
}

}  // namespace

TEST_CASE("group_soft_threshold examples") {
  CHECK(group_soft_threshold(Eigen::Vector2d(3, 4), 5.0).isZero(0.0));
  CHECK(group_soft_threshold(Eigen::Vector2d(3, 4), 2.5).isApprox(Eigen::Vector2d(1.5, 2.0), 1e-15));
  CHECK(group_soft_threshold(Eigen::Vector2d(3, 4), 0.0) == Eigen::Vector2d(3, 4));
  CHECK(group_soft_threshold(Eigen::Vector2d::Zero(), 1.0).isZero(0.0));
}

TEST_CASE("lambda_max examples") {
  const auto inst = two_by_one();
  CHECK(lambda_max(inst.design, inst.target) == doctest::Approx(5.0));
  CHECK(lambda_max(inst.design, inst.target, Eigen::Vector2d(1.0, 0.5)) == doctest::Approx(6.0));
  const ResidualTarget zero{Eigen::VectorXd::Zero(2)};
  CHECK(lambda_max(inst.design, zero) == 0.0);
}

TEST_CASE("solve validates its configuration") {
  const auto inst = two_by_one();
  SolverConfig config;
  config.lambda = 0.0;
  CHECK_THROWS_AS(solve(inst.design, inst.target, config), Error);
  config.lambda = 1.0;
  config.kkt_tol = 0.0;
  CHECK_THROWS_AS(solve(inst.design, inst.target, config), Error);
  config.kkt_tol = 1e-6;
  config.group_weights = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(solve(inst.design, inst.target, config), Error);
  config.group_weights = Eigen::Vector2d(1.0, -1.0);
  CHECK_THROWS_AS(solve(inst.design, inst.target, config), Error);
  config.group_weights.resize(0);
  CHECK_THROWS_AS(solve(inst.design, inst.target, config, Eigen::MatrixXd::Zero(2, 2)), Error);
}

TEST_CASE("KKT certificate and zero solution above lambda_max on random instances") {
  PortableRng rng(31);
  int converged = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int T = testing::random_int(rng, 2, 30);
    const int m = testing::random_int(rng, 1, 4);
    const int n = testing::random_int(rng, 1, 4);
    const auto inst = random_instance(rng, T, m, n);
    const Eigen::VectorXd w = make_group_weights(T, n, trial % 3 == 0 ? GroupWeighting::SqrtSize : GroupWeighting::Unit);
    const double top = lambda_max(inst.design, inst.target, w);
    REQUIRE(top > 0.0);

    SolverConfig config;
    config.group_weights = w;
    config.lambda = top * (0.02 + 0.98 * rng.uniform());
    const auto sol = solve(inst.design, inst.target, config);
    if (sol.converged) {
      ++converged;
      const Eigen::MatrixXd A = testing::dense_scaled_matrix(inst.design);
      const Eigen::VectorXd b = inst.design.solver_target(inst.target);
      const Eigen::VectorXd x = testing::flatten(sol.scaled_deltas);
      const Eigen::VectorXd g = A.transpose() * (A * x - b);
      for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd gt = g.segment(t * n, n);
        const Eigen::VectorXd xt = x.segment(t * n, n);
        if (xt.norm() > 0.0) {
          CHECK((gt + config.lambda * w(t) * xt / xt.norm()).norm() <= config.kkt_tol * config.lambda * (1.0 + 1e-6));
        } else {
          CHECK(gt.norm() <= config.lambda * w(t) * (1.0 + config.kkt_tol));
        }
      }
    }

    config.lambda = 1.001 * top;
    const auto zero = solve(inst.design, inst.target, config);
    CHECK(zero.active_set.empty());
    CHECK(zero.deltas.isZero(0.0));
    CHECK(zero.scaled_deltas.isZero(0.0));
  }
  CHECK(converged == 120);
}

TEST_CASE("n = 1 matches a dense proximal-gradient LASSO oracle") {
  PortableRng rng(32);
  for (int trial = 0; trial < 25; ++trial) {
    const int T = testing::random_int(rng, 2, 10);
    const int m = testing::random_int(rng, 1, 3);
    const auto inst = random_instance(rng, T, m, 1, trial % 2 == 0);
    const double top = lambda_max(inst.design, inst.target);
    SolverConfig config;
    config.lambda = top * (0.05 + 0.9 * rng.uniform());
    config.kkt_tol = 1e-10;
    config.max_sweeps = 200000;
    const auto sol = solve(inst.design, inst.target, config);
    REQUIRE(sol.converged);

    const Eigen::MatrixXd A = testing::dense_scaled_matrix(inst.design);
    const Eigen::VectorXd b = inst.design.solver_target(inst.target);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(T);
    const Eigen::VectorXd oracle =
        testing::lasso_polish(A, b, testing::dense_prox_gradient(A, b, 1, config.lambda, w, 200000), config.lambda, w);
    CHECK(testing::dense_kkt(A, b, oracle, 1, config.lambda, w) <= 1e-9 * config.lambda);

    const Eigen::VectorXd x = testing::flatten(sol.scaled_deltas);
    CHECK((x - oracle).cwiseAbs().maxCoeff() <= 1e-6);
    const double f_oracle = testing::dense_objective(A, b, oracle, 1, config.lambda, w);
    CHECK(std::abs(sol.objective - f_oracle) <= 1e-8 * f_oracle);
  }
}

TEST_CASE("objective is nonincreasing across sweeps") {
  PortableRng rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(rng, testing::random_int(rng, 3, 40), 2, 3);
    SolverConfig config;
    config.lambda = lambda_max(inst.design, inst.target) * (0.01 + 0.5 * rng.uniform());
    config.record_objective_trace = true;
    config.extrapolate = trial % 2 == 0;
    const auto sol = solve(inst.design, inst.target, config);
    REQUIRE(sol.objective_trace.size() == static_cast<std::size_t>(sol.sweeps) + 1);
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k) {
      CHECK(sol.objective_trace[k] <= sol.objective_trace[k - 1] * (1.0 + 1e-14) + 1e-300);
    }
  }
}

TEST_CASE("warm and cold starts reach the same objective") {
  PortableRng rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(rng, testing::random_int(rng, 3, 30), 2, 2);
    const double top = lambda_max(inst.design, inst.target);
    SolverConfig config;
    config.lambda = top * 0.6;
    const auto first = solve(inst.design, inst.target, config);
    config.lambda = top * 0.3;
    const auto cold = solve(inst.design, inst.target, config);
    const auto warm = solve(inst.design, inst.target, config, first.deltas);
    CHECK(cold.converged);
    CHECK(warm.converged);
    CHECK(std::abs(cold.objective - warm.objective) <= 1e-8 * cold.objective);
    // Restarting from the solution itself certifies immediately.
    const auto again = solve(inst.design, inst.target, config, cold.deltas);
    CHECK(again.sweeps <= 1);
  }
}

TEST_CASE("kkt_residual measures the certificate") {
  PortableRng rng(35);
  const auto inst = random_instance(rng, 8, 2, 2);
  const double top = lambda_max(inst.design, inst.target);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(8);
  CHECK(kkt_residual(inst.design, inst.target, top, w, Eigen::MatrixXd::Zero(2, 8)) <= 1e-12);
  CHECK(kkt_residual(inst.design, inst.target, 0.5 * top, w, Eigen::MatrixXd::Zero(2, 8)) ==
        doctest::Approx(0.5 * top));
}

TEST_CASE("lambda_grid and paths") {
  SUBCASE("grid shape") {
    const auto grid = lambda_grid(2.0, 5, 0.01);
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == 2.0);
    CHECK(grid.back() == doctest::Approx(0.02));
    CHECK(grid[2] == doctest::Approx(0.2));
    CHECK(lambda_grid(3.0, 1, 0.5) == std::vector<double>{3.0});
    CHECK_THROWS_AS(lambda_grid(1.0, 0, 0.1), Error);
    CHECK_THROWS_AS(lambda_grid(1.0, 3, 0.0), Error);
  }
  PortableRng rng(36);
  const auto inst = random_instance(rng, 12, 2, 2);
  SUBCASE("first point is empty, single-point path") {
    const auto path = solve_path(inst.design, inst.target, SolverConfig{});
    REQUIRE(path.size() == 50);
    CHECK(path.front().solution.active_set.empty());
    for (std::size_t k = 1; k < path.size(); ++k) CHECK(path[k].lambda < path[k - 1].lambda);
    PathOptions one;
    one.num_lambdas = 1;
    const auto single = solve_path(inst.design, inst.target, SolverConfig{}, one);
    REQUIRE(single.size() == 1);
    CHECK(single[0].lambda == doctest::Approx(lambda_max(inst.design, inst.target)));
  }
  SUBCASE("concurrent cold starts are certified and agree with warm starts") {
    PathOptions options;
    options.num_lambdas = 12;
    const auto warm = solve_path(inst.design, inst.target, SolverConfig{}, options);
    options.mode = PathMode::ConcurrentColdStart;
    const auto cold = solve_path(inst.design, inst.target, SolverConfig{}, options);
    REQUIRE(cold.size() == warm.size());
    for (std::size_t k = 0; k < cold.size(); ++k) {
      CHECK(cold[k].solution.converged);
      CHECK(cold[k].solution.objective == doctest::Approx(warm[k].solution.objective).epsilon(1e-8));
    }
  }
  SUBCASE("zero target") {
    CHECK_THROWS_AS(solve_path(inst.design, ResidualTarget{Eigen::VectorXd::Zero(24)}, SolverConfig{}), Error);
  }
}

TEST_CASE("select_lambda") {
  PortableRng rng(37);
  const auto inst = random_instance(rng, 15, 2, 2);
  PathOptions options;
  options.num_lambdas = 20;
  const auto path = solve_path(inst.design, inst.target, SolverConfig{}, options);
  SUBCASE("fixed_k = 0 picks lambda_max") {
    CHECK(select_lambda(path, inst.design, inst.target, FixedKCriterion{0}) == 0);
  }
  SUBCASE("fixed_k picks the largest matching lambda") {
    for (int k = 1; k <= 3; ++k) {
      std::optional<std::size_t> expected;
      for (std::size_t i = 0; i < path.size() && !expected; ++i) {
        if (static_cast<int>(path[i].solution.active_set.size()) == k) expected = i;
      }
      if (expected) {
        CHECK(select_lambda(path, inst.design, inst.target, FixedKCriterion{k}) == *expected);
      } else {
        CHECK_THROWS_AS(select_lambda(path, inst.design, inst.target, FixedKCriterion{k}), Error);
      }
    }
    CHECK_THROWS_AS(select_lambda(path, inst.design, inst.target, FixedKCriterion{1000}), Error);
  }
  SUBCASE("bic picks the minimum score") {
    const std::size_t chosen = select_lambda(path, inst.design, inst.target, BicCriterion{});
    for (const auto& point : path) {
      CHECK(bic_score(inst.design, inst.target, path[chosen].solution) <=
            bic_score(inst.design, inst.target, point.solution));
    }
    const std::vector<PathPoint> single(path.begin() + 3, path.begin() + 4);
    CHECK(select_lambda(single, inst.design, inst.target, BicCriterion{}) == 0);
  }
  SUBCASE("bic formula") {
    const auto& sol = path[5].solution;
    const double rows = 30.0;
    const double rss = residual_sum_squares(inst.design, inst.target, sol.deltas);
    const double df = 2.0 + static_cast<double>((sol.deltas.array() != 0.0).count());
    CHECK(bic_score(inst.design, inst.target, sol) == doctest::Approx(rows * std::log(rss / rows) + std::log(rows) * df));
  }
}

TEST_CASE("planted breaks appear on the path") {
  SUBCASE("one jump at t* = 25, T = 50") {
    SyntheticScenario sc;
    sc.seed = 4;
    sc.periods = 50;
    sc.obs_dim = 2;
    sc.coef_dim = 2;
    sc.base_beta = Eigen::Vector2d(1.0, -1.0);
    sc.noise_scale = 0.05;
    sc.jumps = {{25, Eigen::Vector2d(1.0, 0.0)}};
    const auto [panel, truth] = generate_panel(sc);
    auto [design, target] = build_design(panel, fit_baseline(panel).beta0, true);
    const auto path = solve_path(design, target, SolverConfig{});
    bool found = false;
    for (const auto& point : path) found = found || point.solution.active_set == std::vector<int>{25};
    CHECK(found);
  }
  SUBCASE("two jumps") {
    SyntheticScenario sc;
    sc.seed = 2;
    sc.periods = 60;
    sc.obs_dim = 2;
    sc.coef_dim = 3;
    sc.base_beta = Eigen::Vector3d(1.0, -1.0, 0.5);
    sc.noise_scale = 0.02;
    sc.jumps = {{20, Eigen::Vector3d(1.0, 0.0, 0.0)}, {40, Eigen::Vector3d(0.0, -1.0, 0.0)}};
    const auto [panel, truth] = generate_panel(sc);
    auto [design, target] = build_design(panel, fit_baseline(panel).beta0, true);
    PathOptions options;
    options.num_lambdas = 100;
    const auto path = solve_path(design, target, SolverConfig{}, options);
    bool found = false;
    for (const auto& point : path) found = found || point.solution.active_set == std::vector<int>{20, 40};
    CHECK(found);
  }
}
