#include "footcast/diagnostics.hpp"

#include <doctest.h>

#include <random>

using namespace footcast;

namespace {

Eigen::MatrixXd iid(int n, int chains, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, chains);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

Eigen::MatrixXd ar1(int n, int chains, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, chains);
  const double innovation = std::sqrt(1 - rho * rho);
  for (int c = 0; c < chains; ++c) {
    double v = normal(rng);
    for (int i = 0; i < n; ++i) {
      v = rho * v + innovation * normal(rng);
      x(i, c) = v;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("R-hat") {
  CHECK(split_rhat(Eigen::MatrixXd::Constant(100, 4, 2.5)) == 1.0);
  CHECK(split_rhat(iid(1000, 4, 1)) < 1.01);
  Eigen::MatrixXd offset = iid(1000, 2, 2);
  offset.col(1).array() += 10.0;
  CHECK(split_rhat(offset) > 2.0);
  // a trend inside each chain is caught by splitting
  Eigen::MatrixXd trend = iid(1000, 4, 3);
  for (int i = 0; i < 1000; ++i) trend.row(i).array() += 4.0 * i / 1000.0;
  CHECK(split_rhat(trend) > 1.1);
  // scale differences are caught by the folded variant
  Eigen::MatrixXd scale = iid(1000, 4, 4);
  scale.col(0) *= 5.0;
  CHECK(split_rhat(scale) > 1.05);
  CHECK_THROWS_AS(split_rhat(Eigen::MatrixXd::Zero(3, 2)), std::invalid_argument);
}

TEST_CASE("ESS for independent draws") {
  const auto x = iid(1000, 4, 5);
  const double bulk = ess_bulk(x).value;
  const double tail = ess_tail(x).value;
  CHECK(bulk >= 3200);
  CHECK(bulk <= 4800);
  CHECK(tail >= 2800);
  CHECK(tail <= 4000);
}

TEST_CASE("ESS for AR(1)") {
  const double rho = 0.9;
  const auto x = ar1(5000, 4, rho, 6);
  const double expected = x.size() * (1 - rho) / (1 + rho);
  CHECK(ess_bulk(x).value == doctest::Approx(expected).epsilon(0.3));
  CHECK(ess_basic(x).value == doctest::Approx(expected).epsilon(0.3));
}

TEST_CASE("degenerate input") {
  const auto r = ess_bulk(Eigen::MatrixXd::Constant(50, 4, 1.0));
  CHECK(r.degenerate);
  CHECK(r.value == 200);
  CHECK(ess_tail(Eigen::MatrixXd::Constant(50, 4, 1.0)).degenerate);
}

TEST_CASE("rank normalisation") {
  Eigen::MatrixXd x(2, 2);
  x << 3, 1, 2, 2;
  const auto z = rank_normalize(x);
  CHECK(z(1, 0) == z(1, 1));  // ties share a score
  CHECK(z(0, 1) < z(1, 0));
  CHECK(z(0, 0) > z(1, 0));
  CHECK(z.sum() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("per-parameter table") {
  std::vector<Eigen::MatrixXd> chains{iid(200, 2, 7), iid(200, 2, 8)};
  const auto d = compute_diagnostics(chains, {"a", "b"}, 3);
  REQUIRE(d.parameters.size() == 2);
  CHECK(d.parameters[1].name == "b");
  CHECK(d.divergences == 3);
  CHECK(d.max_rhat() < 1.05);
  CHECK(d.min_ess_bulk() > 100);
  CHECK_THROWS_AS(compute_diagnostics(chains, {"a"}), std::invalid_argument);
}
