#include <doctest.h>

#include "support.hpp"
#include "tvpbreak/baseline.hpp"
#include "tvpbreak/error.hpp"
#include "tvpbreak/power_iteration.hpp"

using namespace tvpbreak;

namespace {

Eigen::MatrixXd stacked_design(const RegressionPanel& panel) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(panel.obs_dim()) * panel.periods(), panel.coef_dim());
  for (int t = 0; t < panel.periods(); ++t) A.middleRows(t * panel.obs_dim(), panel.obs_dim()) = panel.design(t);
  return A;
}

}  // namespace

TEST_CASE("fit_baseline examples") {
  SUBCASE("constant design gives the mean") {
    const auto panel = testing::panel_from({Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)},
                                           {Eigen::VectorXd::Constant(1, 1), Eigen::VectorXd::Constant(1, 2),
                                            Eigen::VectorXd::Constant(1, 3)});
    const auto fit = fit_baseline(panel);
    CHECK(fit.beta0(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fit.rank == 1);
    CHECK_FALSE(fit.ridge_used);
  }
  SUBCASE("identity design") {
    const auto panel = testing::panel_from({Eigen::MatrixXd::Identity(2, 2)}, {Eigen::Vector2d(5, 7)});
    const auto fit = fit_baseline(panel);
    CHECK(fit.beta0(0) == doctest::Approx(5.0));
    CHECK(fit.beta0(1) == doctest::Approx(7.0));
    CHECK(fit.residual_norm == doctest::Approx(0.0));
  }
  SUBCASE("random 20-period panel matches the pseudoinverse") {
    PortableRng rng(3);
    const auto panel = testing::random_panel(rng, 20, 2, 3);
    const auto fit = fit_baseline(panel);
    const Eigen::VectorXd oracle = testing::pinv_solve(stacked_design(panel), panel.stacked_response());
    CHECK((fit.beta0 - oracle).norm() <= 1e-10 * (1.0 + oracle.norm()));
    CHECK(fit.rank == 3);
  }
}

TEST_CASE("fit_baseline invariants over random panels") {
  PortableRng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int T = testing::random_int(rng, 1, 15);
    const int m = testing::random_int(rng, 1, 4);
    const int n = testing::random_int(rng, 1, 4);
    const auto panel = testing::random_panel(rng, T, m, n);
    const auto fit = fit_baseline(panel);
    const Eigen::MatrixXd A = stacked_design(panel);
    const Eigen::VectorXd y = panel.stacked_response();
    if (!fit.ridge_used) {
      const Eigen::VectorXd b = A.transpose() * y;
      CHECK((A.transpose() * A * fit.beta0 - b).norm() <= 1e-8 * (1.0 + b.norm()));
    }
    CHECK(fit.residual_norm == doctest::Approx((y - A * fit.beta0).norm()).epsilon(1e-10));

    // Scaling equivariance.
    PanelData scaled;
    for (int t = 0; t < T; ++t) {
      scaled.design_blocks.push_back(panel.design(t));
      scaled.responses.push_back(-3.5 * panel.response(t));
    }
    const auto fit_scaled = fit_baseline(validate_panel(std::move(scaled)));
    CHECK((fit_scaled.beta0 + 3.5 * fit.beta0).norm() <= 1e-9 * (1.0 + fit.beta0.norm()));
  }
}

TEST_CASE("rank-deficient designs") {
  SUBCASE("collinear columns use the ridge fallback") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 2, 3, 6;
    const auto panel = testing::panel_from({X, X}, {Eigen::Vector2d(1, 2), Eigen::Vector2d(2, 1)});
    const auto fit = fit_baseline(panel);
    CHECK(fit.rank == 1);
    CHECK(fit.ridge_used);
    CHECK(fit.beta0.allFinite());
  }
  SUBCASE("without a ridge the minimum-norm solution is returned") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 2, 3, 6;
    const auto panel = testing::panel_from({X}, {Eigen::Vector2d(1, 2)});
    const auto fit = fit_baseline(panel, 0.0);
    CHECK_FALSE(fit.ridge_used);
    CHECK((fit.beta0 - testing::pinv_solve(X, Eigen::Vector2d(1, 2))).norm() <= 1e-10);
  }
  SUBCASE("all-zero design") {
    const auto panel = testing::panel_from({Eigen::MatrixXd::Zero(2, 2)}, {Eigen::Vector2d(1, 2)});
    CHECK_THROWS_WITH_AS(fit_baseline(panel, 0.0), doctest::Contains("zero"), Error);
    CHECK(fit_baseline(panel).ridge_used);
  }
  SUBCASE("negative ridge") {
    const auto panel = testing::panel_from({Eigen::MatrixXd::Identity(1, 1)}, {Eigen::VectorXd::Ones(1)});
    CHECK_THROWS_AS(fit_baseline(panel, -1.0), Error);
  }
}

TEST_CASE("power iteration matches a dense eigensolver") {
  PortableRng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::random_int(rng, 1, 6);
    const Eigen::MatrixXd B = testing::random_matrix(rng, n + 2, n);
    const Eigen::MatrixXd S = B.transpose() * B;
    const double exact = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().maxCoeff();
    const auto result = largest_eigenvalue(S);
    CHECK(result.eigenvalue == doctest::Approx(exact).epsilon(1e-6));
    CHECK(result.eigenvalue <= exact * (1.0 + 1e-12));
  }
  CHECK(largest_eigenvalue(Eigen::MatrixXd::Zero(3, 3)).eigenvalue == 0.0);
}
