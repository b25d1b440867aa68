#include "gibbsstab/error_dists.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gibbsstab/error.hpp"

namespace gstab {

namespace {

using std::numbers::pi;

double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

ErrorDist::ErrorDist(DistKind kind, double scale, double beta)
    : kind_(kind), scale_(scale), beta_(beta), log_norm_(0.0) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("error distribution scale must be positive and finite");
  }
  switch (kind_) {
    case DistKind::Cauchy:
      log_norm_ = -std::log(pi * scale_);
      break;
    case DistKind::DoubleExp:
      log_norm_ = -std::log(2.0 * scale_);
      break;
    case DistKind::Gaussian:
      log_norm_ = -std::log(scale_) - 0.5 * std::log(2.0 * pi);
      break;
    case DistKind::ExpPower:
      if (!(beta_ > 2.0) || !std::isfinite(beta_)) {
        throw InvalidArgument("exponential power beta must be > 2");
      }
      log_norm_ = std::log(beta_) - std::log(2.0 * scale_) - std::lgamma(1.0 / beta_);
      break;
  }
}

ErrorDist ErrorDist::cauchy(double scale) { return {DistKind::Cauchy, scale, 0.0}; }
ErrorDist ErrorDist::double_exp(double scale) { return {DistKind::DoubleExp, scale, 1.0}; }
ErrorDist ErrorDist::gaussian(double scale) { return {DistKind::Gaussian, scale, 2.0}; }
ErrorDist ErrorDist::exp_power(double scale, double beta) { return {DistKind::ExpPower, scale, beta}; }

double ErrorDist::log_density(double x) const {
  const double z = x / scale_;
  switch (kind_) {
    case DistKind::Cauchy:
      return log_norm_ - std::log1p(z * z);
    case DistKind::DoubleExp:
      return log_norm_ - std::abs(z);
    case DistKind::Gaussian:
      return log_norm_ - 0.5 * z * z;
    case DistKind::ExpPower:
      return log_norm_ - std::pow(std::abs(z), beta_);
  }
  return 0.0;
}

double ErrorDist::density(double x) const { return std::exp(log_density(x)); }

double ErrorDist::dlog_density(double x) const {
  const double z = x / scale_;
  switch (kind_) {
    case DistKind::Cauchy:
      return -2.0 * z / (scale_ * (1.0 + z * z));
    case DistKind::DoubleExp:
      return x == 0.0 ? 0.0 : -sign(x) / scale_;
    case DistKind::Gaussian:
      return -z / scale_;
    case DistKind::ExpPower:
      return -sign(x) * beta_ * std::pow(std::abs(z), beta_ - 1.0) / scale_;
  }
  return 0.0;
}

double ErrorDist::log_density_diff(double x, double ref) const {
  const double a = x / scale_;
  const double b = ref / scale_;
  const double d = (x - ref) / scale_;
  switch (kind_) {
    case DistKind::Cauchy:
      // log((1 + b^2) / (1 + a^2))
      return std::log1p(-d * (a + b) / (1.0 + a * a));
    case DistKind::DoubleExp:
      if ((a >= 0.0) == (b >= 0.0)) return a >= 0.0 ? -d : d;
      return std::abs(b) - std::abs(a);
    case DistKind::Gaussian:
      return -0.5 * d * (a + b);
    case DistKind::ExpPower: {
      const double aa = std::abs(a);
      const double ab = std::abs(b);
      if ((a >= 0.0) != (b >= 0.0) || ab == 0.0 || aa == 0.0) {
        return std::pow(ab, beta_) - std::pow(aa, beta_);
      }
      // |a|^beta - |b|^beta = |b|^beta expm1(beta log1p((|a| - |b|)/|b|))
      const double rel = (a >= 0.0 ? d : -d) / ab;
      return -std::pow(ab, beta_) * std::expm1(beta_ * std::log1p(rel));
    }
  }
  return 0.0;
}

double ErrorDist::cdf(double x) const {
  const double z = x / scale_;
  switch (kind_) {
    case DistKind::Cauchy:
      // atan form loses the far tail; use the complementary angle there.
      if (z < -1.0) return std::atan(-1.0 / z) / pi;
      if (z > 1.0) return 1.0 - std::atan(1.0 / z) / pi;
      return 0.5 + std::atan(z) / pi;
    case DistKind::DoubleExp:
      return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    case DistKind::Gaussian:
      return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    case DistKind::ExpPower: {
      const double t = std::pow(std::abs(z), beta_);
      const double upper = 0.5 * boost::math::gamma_q(1.0 / beta_, t);
      return z < 0.0 ? upper : 1.0 - upper;
    }
  }
  return 0.0;
}

double ErrorDist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile probability must be in (0,1)");
  switch (kind_) {
    case DistKind::Cauchy:
      return scale_ * std::tan(pi * (p - 0.5));
    case DistKind::DoubleExp:
      return p < 0.5 ? scale_ * std::log(2.0 * p) : -scale_ * std::log(2.0 * (1.0 - p));
    case DistKind::Gaussian:
      return -scale_ * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    case DistKind::ExpPower: {
      const double tail = p < 0.5 ? 2.0 * p : 2.0 * (1.0 - p);
      const double t = boost::math::gamma_q_inv(1.0 / beta_, tail);
      const double r = scale_ * std::pow(t, 1.0 / beta_);
      return p < 0.5 ? -r : r;
    }
  }
  return 0.0;
}

double ErrorDist::sample(RngStream& rng) const {
  switch (kind_) {
    case DistKind::Cauchy:
      return scale_ * std::tan(pi * (rng.uniform() - 0.5));
    case DistKind::DoubleExp:
      return (rng.bernoulli(0.5) ? 1.0 : -1.0) * scale_ * rng.exponential();
    case DistKind::Gaussian:
      return scale_ * rng.normal();
    case DistKind::ExpPower: {
      // |X/s|^beta ~ Gamma(1/beta, 1)
      const double g = rng.gamma(1.0 / beta_);
      const double r = scale_ * std::pow(g, 1.0 / beta_);
      return rng.bernoulli(0.5) ? r : -r;
    }
  }
  return 0.0;
}

TailClass ErrorDist::tail_class() const {
  switch (kind_) {
    case DistKind::Cauchy:
      return TailClass::Polynomial;
    case DistKind::DoubleExp:
      return TailClass::Exponential;
    case DistKind::Gaussian:
      return TailClass::Gaussian;
    case DistKind::ExpPower:
      return TailClass::LighterThanGaussian;
  }
  return TailClass::Gaussian;
}

char ErrorDist::code() const {
  switch (kind_) {
    case DistKind::Cauchy:
      return 'C';
    case DistKind::DoubleExp:
      return 'E';
    case DistKind::Gaussian:
      return 'G';
    case DistKind::ExpPower:
      return 'L';
  }
  return '?';
}

std::string ErrorDist::id() const {
  std::ostringstream os;
  os << code() << '(' << scale_;
  if (kind_ == DistKind::ExpPower) os << ',' << beta_;
  os << ')';
  return os.str();
}

ErrorDist dist_from_code(char code, double scale, double beta) {
  switch (code) {
    case 'C':
      return ErrorDist::cauchy(scale);
    case 'E':
      return ErrorDist::double_exp(scale);
    case 'G':
      return ErrorDist::gaussian(scale);
    case 'L':
      return ErrorDist::exp_power(scale, beta);
    default:
      throw InvalidArgument(std::string("unknown distribution code '") + code + "'");
  }
}

std::string_view to_string(TailClass c) {
  switch (c) {
    case TailClass::Polynomial:
      return "polynomial";
    case TailClass::Exponential:
      return "exponential";
    case TailClass::Gaussian:
      return "gaussian";
    case TailClass::LighterThanGaussian:
      return "lighter-than-gaussian";
  }
  return "?";
}

}  // namespace gstab
