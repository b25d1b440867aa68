#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "gibbsstab/oracle.hpp"
#include "support.hpp"

using namespace gstab;
using testing::boost_integrate;
using testing::boost_integrate_line;
using testing::kInf;

namespace {

const char kCodes[] = "CEGL";

HierModel cg5() { return HierModel::simple(ErrorDist::cauchy(1.0), ErrorDist::gaussian(std::sqrt(5.0)), 0.0); }

double upper_normal_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Independent Boost quadrature of the conditional density. The integrand
// is scaled by its largest value on a coarse grid so that far-out theta
// does not underflow.
struct BoostConditional {
  const HierModel& m;
  double theta;
  double ref = -kInf;

  BoostConditional(const HierModel& model, double t) : m(model), theta(t) {
    const double y = m.y_scalar();
    const double lo = std::min(y, theta) - 10.0, hi = std::max(y, theta) + 10.0;
    for (int i = 0; i <= 4000; ++i) ref = std::max(ref, log_f(lo + (hi - lo) * i / 4000.0));
  }
  double log_f(double x) const { return m.f1().log_density(m.y_scalar() - x) + m.f2().log_density(x - theta); }
  double integral(const std::function<double(double)>& h) const {
    const double y = m.y_scalar();
    return boost_integrate_line([&](double x) { return h(x) * std::exp(log_f(x) - ref); }, {y, theta, 0.5 * (y + theta)},
                                1e-11);
  }
  double log_c() const { return ref + std::log(integral([](double) { return 1.0; })); }
  double mean() const {
    return theta + integral([&](double x) { return x - theta; }) / integral([](double) { return 1.0; });
  }
};

}  // namespace

TEST_CASE("conditional mean examples") {
  const auto gg = HierModel::simple(ErrorDist::gaussian(1), ErrorDist::gaussian(1), 0.0);
  CHECK(std::abs(conditional_mean(gg, 4.0).value - 2.0) <= 1e-9);

  const auto ge = HierModel::simple(ErrorDist::gaussian(1), ErrorDist::double_exp(1), 0.0);
  CHECK(std::abs(conditional_mean(ge, 50.0).value - ge_limit_mean(0.0, 1.0, 1.0)) <= 1e-3);
  CHECK(ge_limit_mean(0.0, 1.0, 1.0) == 1.0);
  CHECK(ge_limit_mean(2.0, 3.0, 2.0) == 6.5);

  const auto ll = HierModel::simple(ErrorDist::exp_power(1, 3), ErrorDist::exp_power(1, 3), 0.0);
  CHECK(std::abs(conditional_mean(ll, 100.0).value / 100.0 - 0.5) <= 1e-3);
}

TEST_CASE("oracle agrees with independent quadrature across cells") {
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const auto m = HierModel::simple(dist_from_code(kCodes[a], 1.0), dist_from_code(kCodes[b], 1.5), 0.5);
      for (double theta : {0.0, 5.0, 50.0, -30.0}) {
        CAPTURE(m.id());
        CAPTURE(theta);
        const BoostConditional oracle(m, theta);
        const ConditionalDensity cd(m, theta);
        CHECK(std::abs(cd.log_normalizer() - oracle.log_c()) <= 1e-8);
        const OracleValue c = normalizing_constant(m, theta);
        CHECK(c.est_error <= 1e-8 * c.value);
        CHECK(conditional_mean(m, theta).value == doctest::Approx(oracle.mean()).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("conditional tail probability examples") {
  const auto m = cg5();
  const double want = 2 * upper_normal_tail(10 / std::sqrt(5.0));
  CHECK(want == doctest::Approx(7.7e-6).epsilon(0.01));
  const double nc = conditional_tail_prob(m, 1e4, 10.0, Frame::NonCentred).value;
  CHECK(nc == doctest::Approx(want).epsilon(0.2));
  CHECK(conditional_tail_prob(m, 1e4, 10.0, Frame::Centred).value == doctest::Approx(1.0).epsilon(1e-6));
  for (int a = 0; a < 4; ++a) {
    const auto mm = HierModel::simple(dist_from_code(kCodes[a]), dist_from_code(kCodes[3 - a]), 1.0);
    CHECK(conditional_tail_prob(mm, 7.0, 0.0, Frame::Centred).value == 1.0);
    CHECK(conditional_tail_prob(mm, 7.0, 0.0, Frame::NonCentred).value == 1.0);
  }
}

TEST_CASE("tail probability and central mass add to one") {
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const auto m = HierModel::simple(dist_from_code(kCodes[a]), dist_from_code(kCodes[b]), 0.0);
      for (double theta : {3.0, 100.0, 1e4}) {
        const ConditionalDensity cd(m, theta);
        for (double k : {0.5, 10.0}) {
          const double tail = conditional_tail_prob(m, theta, k, Frame::Centred).value;
          CHECK(tail + cd.mass(-k, k) == doctest::Approx(1.0).epsilon(1e-8));
          const double tail_nc = conditional_tail_prob(m, theta, k, Frame::NonCentred).value;
          CHECK(tail_nc + cd.mass(theta - k, theta + k) == doctest::Approx(1.0).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("partially centred tail interpolates the two frames") {
  const auto m = cg5();
  for (double theta : {20.0, 300.0}) {
    CHECK(conditional_tail_prob_pc(m, theta, 10.0, 0.0).value ==
          doctest::Approx(conditional_tail_prob(m, theta, 10.0, Frame::Centred).value).epsilon(1e-10));
    CHECK(conditional_tail_prob_pc(m, theta, 10.0, 1.0).value ==
          doctest::Approx(conditional_tail_prob(m, theta, 10.0, Frame::NonCentred).value).epsilon(1e-10));
  }
}

TEST_CASE("normalising constant is translation invariant") {
  for (int a = 0; a < 4; ++a) {
    const auto m = HierModel::simple(dist_from_code(kCodes[a]), dist_from_code(kCodes[(a + 1) % 4]), 0.3);
    const auto shifted = HierModel::simple(m.f1(), m.f2(), 0.3 + 123.25);
    for (double theta : {-4.0, 2.0, 60.0}) {
      CHECK(normalizing_constant(shifted, theta + 123.25).value ==
            doctest::Approx(normalizing_constant(m, theta).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("marginal tail probability") {
  SUBCASE("motivating example") {
    const auto m = cg5();
    const double v = marginal_tail_prob(m, 40.0).value;
    CHECK(std::abs(v - 0.015) <= 0.003);
    // Independent: c_theta is the density of Z1 + Z2 at y - theta, so
    // P(|Theta| > a) = 2 E[P(Z1 > a - Z2)].
    const double sd = std::sqrt(5.0);
    const double oracle =
        2 * boost_integrate_line(
                [&](double u) {
                  const double phi = std::exp(-0.5 * u * u / 5.0) / (sd * std::sqrt(2 * std::numbers::pi));
                  return phi * (0.5 - std::atan(40.0 - u) / std::numbers::pi);
                },
                {0.0, 40.0}, 1e-13);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-7));
  }
  SUBCASE("gaussian marginal") {
    const auto gg = HierModel::simple(ErrorDist::gaussian(1), ErrorDist::gaussian(1), 0.0);
    CHECK(std::abs(marginal_tail_prob(gg, 2.0).value - std::erfc(1.0)) <= 1e-6);
    CHECK(std::abs(marginal_tail_prob(gg, 2.0).value - 0.1573) <= 1e-4);
  }
  SUBCASE("zero threshold") {
    CHECK(marginal_tail_prob(cg5(), 0.0).value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("marginal posterior tabulation") {
  const auto m = HierModel::simple(ErrorDist::cauchy(1.0), ErrorDist::gaussian(std::sqrt(5.0)), 2.0);
  const MarginalPosterior post(m);
  CHECK(boost_integrate_line([&](double t) { return post.density(t); }, {2.0}, 1e-10) ==
        doctest::Approx(1.0).epsilon(1e-7));
  CHECK(post.cdf(2.0) == doctest::Approx(0.5).epsilon(1e-8));
  const auto tab = post.tabulate(-200, 200, 4001);
  for (std::size_t i = 1; i < tab.cdf.size(); ++i) CHECK(tab.cdf[i] >= tab.cdf[i - 1]);
  for (double p : {0.02, 0.3, 0.5, 0.9}) {
    CHECK(post.cdf(tab.quantile(p)) == doctest::Approx(p).epsilon(1e-4));
    CHECK(tab.cdf_at(tab.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK(tab.cdf_at(17.3) == doctest::Approx(post.cdf(17.3)).epsilon(1e-5));
}

TEST_CASE("conditional quantile inverts the CDF") {
  const ConditionalDensity cd(HierModel::simple(ErrorDist::cauchy(), ErrorDist::cauchy(), 0.0), 40.0);
  for (double p : {0.01, 0.25, 0.5, 0.8, 0.999}) CHECK(cd.cdf(cd.quantile(p)) == doctest::Approx(p).epsilon(1e-7));
  const std::vector<double> pts{-5.0, 0.0, 20.0, 39.0, 41.0};
  const auto sorted = cd.cdf_sorted(pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(sorted[i] == doctest::Approx(cd.cdf(pts[i])).epsilon(1e-9));
}

TEST_CASE("gaussian rate") {
  CHECK(gaussian_rate(1, 1, 0) == 0.5);
  CHECK(std::abs(gaussian_rate(1, 1, 0.5)) < 1e-15);
  CHECK(gaussian_rate(1, 2, 1) == doctest::Approx(0.8).epsilon(1e-14));
  SUBCASE("matches the conditional-regression algebra") {
    // E[X | theta] = w theta with w = s1^2 / (s1^2 + s2^2) (y = 0); U = X - rho theta;
    // Theta | U = u is Gaussian with mean c u, where c comes from completing
    // the square in (u + rho t)^2 / s1^2 + (u - (1 - rho) t)^2 / s2^2.
    for (double s1 : {0.5, 1.0, 3.0}) {
      for (double s2 : {0.7, 1.0, 2.0}) {
        for (double rho : {0.0, 0.2, 0.5, 0.9, 1.0}) {
          const double w = s1 * s1 / (s1 * s1 + s2 * s2);
          const double prec = rho * rho / (s1 * s1) + (1 - rho) * (1 - rho) / (s2 * s2);
          const double c = (-rho / (s1 * s1) + (1 - rho) / (s2 * s2)) / prec;
          CHECK(gaussian_rate(s1, s2, rho) == doctest::Approx(c * (w - rho)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("cdf distance examples") {
  const auto m = cg5();
  CHECK(cdf_distance(m, 1e4, Frame::NonCentred, Reference::located(ErrorDist::gaussian(std::sqrt(5.0)))).value <= 0.01);
  const auto gc = HierModel::simple(ErrorDist::gaussian(1.0), ErrorDist::cauchy(1.0), 0.0);
  CHECK(cdf_distance(gc, 1e4, Frame::Centred, Reference::located(ErrorDist::gaussian(1.0), 0.0)).value <= 0.01);
  for (int a = 0; a < 4; ++a) {
    const auto s = HierModel::simple(dist_from_code(kCodes[a]), dist_from_code(kCodes[(a + 2) % 4]), 1.5);
    CHECK(cdf_distance(s, 1.5, Frame::Centred, Reference::self()).value <= 1e-12);
  }
  // Far from the limit the distance is large.
  CHECK(cdf_distance(m, 1e4, Frame::Centred, Reference::located(ErrorDist::cauchy(1.0))).value > 0.9);
}

TEST_CASE("double-exponential pull towards the data") {
  // sigma1 = 1, sigma2 = 1/s with s = 2: limit shift -2 / (s^2 - 1).
  const auto ee = HierModel::simple(ErrorDist::double_exp(1.0), ErrorDist::double_exp(0.5), 0.0);
  const double bound = -2.0 / (4.0 - 1.0);
  CHECK(ee_limit_shift(1.0, 0.5) == doctest::Approx(bound).epsilon(1e-14));
  for (double theta : {50.0, 100.0, 500.0}) {
    const double shift = conditional_mean(ee, theta).value - theta;
    CHECK(shift <= bound * 0.8);
    CHECK(shift >= bound * 1.2);
  }
  // Equal scales: the conditional law is symmetric about (y + theta) / 2.
  const auto e1 = HierModel::simple(ErrorDist::double_exp(1.0), ErrorDist::double_exp(1.0), 0.0);
  CHECK(conditional_mean(e1, 10.0).value == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("exp-power limit weight") {
  const double beta = 3.0;
  const double a = beta / (beta - 1.0);
  CHECK(ll_limit_weight(1.0, 1.0, beta) == 0.5);
  const double w = ll_limit_weight(1.0, 2.0, beta);
  CHECK(w == doctest::Approx(1.0 / (1.0 + std::pow(2.0, a))).epsilon(1e-14));
  const auto ll = HierModel::simple(ErrorDist::exp_power(1.0, beta), ErrorDist::exp_power(2.0, beta), 0.0);
  CHECK(std::abs(conditional_mean(ll, 1e3).value / 1e3 - w) <= 1e-3);
}
