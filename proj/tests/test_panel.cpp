#include <doctest.h>

#include <limits>

#include "support.hpp"
#include "tvpbreak/error.hpp"
#include "tvpbreak/panel.hpp"

using namespace tvpbreak;

namespace {

Eigen::MatrixXd mat1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }
Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

ErrorCode code_of(PanelData data) {
  try {
    validate_panel(std::move(data));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("validate_panel accepts a consistent panel") {
  PanelData data{{mat1(2), mat1(3)}, {vec1(1), vec1(1)}, std::nullopt};
  const RegressionPanel panel = validate_panel(data);
  CHECK(panel.periods() == 2);
  CHECK(panel.obs_dim() == 1);
  CHECK(panel.coef_dim() == 1);
  CHECK(panel.design(1)(0, 0) == 3.0);
  CHECK_FALSE(panel.label(0).has_value());
}

TEST_CASE("validate_panel rejects bad shapes, values and labels") {
  SUBCASE("response of the wrong length") {
    CHECK(code_of({{mat1(2), mat1(3)}, {vec1(1), Eigen::VectorXd::Ones(2)}, std::nullopt}) ==
          ErrorCode::DimensionMismatch);
  }
  SUBCASE("design of the wrong shape") {
    CHECK(code_of({{mat1(2), Eigen::MatrixXd::Ones(1, 2)}, {vec1(1), vec1(1)}, std::nullopt}) ==
          ErrorCode::DimensionMismatch);
  }
  SUBCASE("count mismatch") {
    CHECK(code_of({{mat1(2), mat1(3)}, {vec1(1)}, std::nullopt}) == ErrorCode::DimensionMismatch);
  }
  SUBCASE("NaN in X_1") {
    CHECK(code_of({{mat1(std::numeric_limits<double>::quiet_NaN())}, {vec1(1)}, std::nullopt}) ==
          ErrorCode::NonFiniteEntry);
  }
  SUBCASE("infinite response") {
    CHECK(code_of({{mat1(1)}, {vec1(std::numeric_limits<double>::infinity())}, std::nullopt}) ==
          ErrorCode::NonFiniteEntry);
  }
  SUBCASE("no periods") { CHECK(code_of({}) == ErrorCode::EmptyPanel); }
  SUBCASE("labels out of order") {
    CHECK(code_of({{mat1(1), mat1(1)}, {vec1(1), vec1(1)}, std::vector<std::string>{"2001-02", "2001-01"}}) ==
          ErrorCode::NonMonotonicDates);
  }
  SUBCASE("repeated label") {
    CHECK(code_of({{mat1(1), mat1(1)}, {vec1(1), vec1(1)}, std::vector<std::string>{"3", "3"}}) ==
          ErrorCode::NonMonotonicDates);
  }
  SUBCASE("label count") {
    CHECK(code_of({{mat1(1), mat1(1)}, {vec1(1), vec1(1)}, std::vector<std::string>{"1"}}) ==
          ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("integer labels order numerically, dates lexicographically") {
  CHECK(label_less("9", "10"));
  CHECK_FALSE(label_less("10", "9"));
  CHECK(label_less("1993-12-01", "2008-08-01"));
  PanelData data{{mat1(1), mat1(1), mat1(1)}, {vec1(1), vec1(1), vec1(1)}, std::vector<std::string>{"8", "9", "10"}};
  CHECK(validate_panel(data).label(2) == "10");
}

TEST_CASE("reconstruct_path examples") {
  SUBCASE("prefix sum") {
    Eigen::MatrixXd deltas(1, 3);
    deltas << 0, 2, 0;
    const auto path = reconstruct_path(vec1(1), deltas);
    CHECK(path.betas(0, 0) == 1.0);
    CHECK(path.betas(0, 1) == 3.0);
    CHECK(path.betas(0, 2) == 3.0);
    CHECK(path.deltas == deltas);
  }
  SUBCASE("zero case") {
    const auto path = reconstruct_path(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 1));
    CHECK(path.betas.isZero(0.0));
  }
  SUBCASE("two coefficients") {
    Eigen::MatrixXd deltas(2, 2);
    deltas << 1, -1, 1, -1;
    const auto path = reconstruct_path(Eigen::Vector2d(1, -1), deltas);
    Eigen::MatrixXd expected(2, 2);
    expected << 2, 1, 0, -1;
    CHECK(path.betas == expected);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(reconstruct_path(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(3, 4)), Error);
  }
}

TEST_CASE("difference_path inverts reconstruct_path and reconstruction is linear") {
  PortableRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::random_int(rng, 1, 4);
    const int T = testing::random_int(rng, 1, 12);
    const Eigen::VectorXd b0 = testing::random_vector(rng, n);
    const Eigen::MatrixXd d = testing::random_matrix(rng, n, T);
    const auto path = reconstruct_path(b0, d);
    CHECK((difference_path(b0, path.betas) - d).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + path.betas.cwiseAbs().maxCoeff()));

    const Eigen::VectorXd b1 = testing::random_vector(rng, n);
    const Eigen::MatrixXd e = testing::random_matrix(rng, n, T);
    const double a = rng.normal();
    const double c = rng.normal();
    const auto combined = reconstruct_path(a * b0 + c * b1, a * d + c * e);
    const Eigen::MatrixXd separate = a * path.betas + c * reconstruct_path(b1, e).betas;
    CHECK((combined.betas - separate).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + separate.cwiseAbs().maxCoeff()));
  }
}
