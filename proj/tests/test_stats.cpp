#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gibbsstab/rng.hpp"
#include "gibbsstab/stats.hpp"

using namespace gstab;

TEST_CASE("moments and quantiles") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(variance(v) == doctest::Approx(5.0 / 3));
  CHECK(std_error(v) == doctest::Approx(std::sqrt(5.0 / 12)));
  CHECK(quantile(v, 0.3) == doctest::Approx(1.9));
  CHECK(quantile(std::vector<double>{4, 1, 3, 2}, 0.3) == doctest::Approx(1.9));
  CHECK(median(std::vector<double>{5, 1, 3}) == 3.0);
  CHECK(median(v) == 2.5);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(skewness(std::vector<double>{-1, 0, 1}) == 0.0);
  CHECK(skewness(std::vector<double>{0, 0, 0, 1}) > 0.0);
}

TEST_CASE("autocorrelation of an AR(1) sequence") {
  RngStream rng(5);
  std::vector<double> v(200000);
  double x = 0.0;
  for (auto& e : v) e = x = 0.7 * x + rng.normal();
  const auto r = acf(v, 3);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(0.7).epsilon(0.02));
  CHECK(r[1] == doctest::Approx(0.49).epsilon(0.04));
  CHECK(lag1_slope(v) == doctest::Approx(0.7).epsilon(0.02));
  // Long-run variance of unit-noise AR(1) is 1 / (1 - 0.7)^2.
  const double se = batch_means_se(v, 50);
  const double want = 1.0 / (1 - 0.7) / std::sqrt(static_cast<double>(v.size()));
  CHECK(se == doctest::Approx(want).epsilon(0.3));
}

TEST_CASE("Kolmogorov-Smirnov statistics") {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100);
  CHECK(ks_statistic(grid, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.005));
  CHECK(ks_two_sample(grid, grid) == 0.0);
  std::vector<double> shifted = grid;
  for (auto& x : shifted) x += 10.0;
  CHECK(ks_two_sample(grid, shifted) == 1.0);
  const std::vector<double> a{1, 2, 3}, b{2.5};
  CHECK(ks_two_sample(a, b) == doctest::Approx(2.0 / 3));
}

TEST_CASE("log mean exp") {
  const std::vector<double> big{1000.0, 1000.0};
  CHECK(log_mean_exp(big) == doctest::Approx(1000.0));
  const std::vector<double> mixed{0.0, std::log(3.0)};
  CHECK(log_mean_exp(mixed) == doctest::Approx(std::log(2.0)));
}
