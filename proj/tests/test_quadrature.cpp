#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gibbsstab/quadrature.hpp"

using namespace gstab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("finite intervals") {
  const QuadResult r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.abs_error <= 1e-9 * 2.0);
  CHECK(integrate([](double x) { return x * x; }, 3.0, 1.0).value == doctest::Approx(-26.0 / 3).epsilon(1e-13));
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("infinite ranges with the tangent map") {
  CHECK(integrate([](double x) { return std::exp(-x * x); }, -kInf, kInf).value ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
  // Cauchy tails decay like 1/x^2.
  auto cauchy = [](double x) { return 1.0 / (std::numbers::pi * (1 + x * x)); };
  CHECK(integrate(cauchy, -kInf, kInf).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate(cauchy, 40.0, kInf).value == doctest::Approx(0.5 - std::atan(40.0) / std::numbers::pi).epsilon(1e-9));
  CHECK(integrate(cauchy, -kInf, -1e4).value == doctest::Approx(std::atan(1e-4) / std::numbers::pi).epsilon(1e-8));
}

TEST_CASE("breakpoints resolve a narrow peak far from the origin") {
  auto f = [](double x) { return std::exp(-0.5 * (x - 1e4) * (x - 1e4) / 1e-4); };
  const double want = std::sqrt(2 * std::numbers::pi) * 1e-2;
  const std::vector<double> pts{-kInf, 1e4 - 0.1, 1e4, 1e4 + 0.1, kInf};
  CHECK(integrate(f, pts).value == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("truncation policy") {
  QuadConfig cfg;
  cfg.tail_policy = TailPolicy::Truncate;
  cfg.truncate_scales = 40;
  CHECK(integrate([](double x) { return std::exp(-std::abs(x)); }, -kInf, kInf, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("absolute tolerance lets a vanishing integral converge") {
  QuadConfig cfg;
  cfg.abs_tol = 1e-12;
  const QuadResult r = integrate([](double x) { return x * std::exp(-x * x); }, -kInf, kInf, cfg);
  CHECK(std::abs(r.value) < 1e-11);
}

TEST_CASE("non-convergence reports the achieved tolerance") {
  QuadConfig cfg;
  cfg.max_subdivisions = 4;
  cfg.rel_tol = 1e-14;
  auto f = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3333)); };
  try {
    integrate(f, 0.0, 1.0, cfg);
    FAIL("expected a QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.achieved_rel_error() > 1e-14);
    CHECK(std::isfinite(e.achieved_rel_error()));
  }
  CHECK_THROWS_AS(integrate([](double) { return NAN; }, 0.0, 1.0), QuadratureError);
  const double one[] = {0.0};
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, one), InvalidArgument);
}
