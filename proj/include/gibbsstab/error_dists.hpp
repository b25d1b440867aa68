#pragma once

#include <string>
#include <string_view>

#include "gibbsstab/error.hpp"
#include "gibbsstab/rng.hpp"

namespace gstab {

enum class DistKind { Cauchy, DoubleExp, Gaussian, ExpPower };

/// Tail heaviness, ordered heaviest first. The stability lookup only needs
/// the relative order of the two error laws.
enum class TailClass { Polynomial = 0, Exponential = 1, Gaussian = 2, LighterThanGaussian = 3 };

/// Symmetric, zero-centred error law with a positive scale.
///
/// Densities are fully normalised:
///   Cauchy     1 / (pi s (1 + (x/s)^2))
///   DoubleExp  exp(-|x|/s) / (2 s)
///   Gaussian   exp(-(x/s)^2 / 2) / (s sqrt(2 pi))
///   ExpPower   beta / (2 s Gamma(1/beta)) exp(-|x/s|^beta),  beta > 2
class ErrorDist {
 public:
  static ErrorDist cauchy(double scale = 1.0);
  static ErrorDist double_exp(double scale = 1.0);
  static ErrorDist gaussian(double scale = 1.0);
  static ErrorDist exp_power(double scale = 1.0, double beta = 3.0);

  DistKind kind() const { return kind_; }
  double scale() const { return scale_; }
  /// Shape exponent; 1 for DoubleExp, 2 for Gaussian, 0 for Cauchy.
  double beta() const { return beta_; }

  double log_density(double x) const;
  double density(double x) const;
  /// d/dx log density.
  double dlog_density(double x) const;
  /// log f(x) - log f(ref), accurate when x is close to ref even where
  /// both log densities are huge in magnitude.
  double log_density_diff(double x, double ref) const;
  double cdf(double x) const;
  double quantile(double p) const;
  double sample(RngStream& rng) const;

  TailClass tail_class() const;
  /// One-letter code: C, E, G or L.
  char code() const;
  /// e.g. "C(1)" or "L(1,3)".
  std::string id() const;

  friend bool operator==(const ErrorDist&, const ErrorDist&) = default;

 private:
  ErrorDist(DistKind kind, double scale, double beta);

  DistKind kind_;
  double scale_;
  double beta_;
  double log_norm_;  // log of the normalising constant
};

inline double log_density(const ErrorDist& d, double x) { return d.log_density(x); }
inline double sample(const ErrorDist& d, RngStream& rng) { return d.sample(rng); }
inline TailClass tail_class(const ErrorDist& d) { return d.tail_class(); }

/// Default member of each family (scale 1, beta 3) from its letter code.
ErrorDist dist_from_code(char code, double scale = 1.0, double beta = 3.0);

std::string_view to_string(TailClass c);

}  // namespace gstab
