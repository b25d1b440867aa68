#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gibbsstab/error_dists.hpp"
#include "gibbsstab/hier_model.hpp"
#include "gibbsstab/quadrature.hpp"

namespace gstab {

/// Which quantity the conditional law describes: X itself or X - theta.
enum class Frame { Centred, NonCentred };

struct OracleValue {
  double value = 0.0;
  double est_error = 0.0;
};

/// The conditional law pi(x | y, theta) = f1(y - x) f2(x - theta) / c_theta
/// of a single-observation model, integrated numerically.
///
/// Quadrature breakpoints are laid out on geometric ladders around y, theta
/// and the mode, with widths taken from the two scales, so the integrand is
/// resolved whether the mass sits near y, near theta, in between or at both.
/// The integrand is evaluated relative to its value at a reference point
/// with `log_density_diff`, which keeps full relative accuracy when both log
/// densities are huge.
class ConditionalDensity {
 public:
  ConditionalDensity(const HierModel& model, double theta, QuadConfig cfg = {});

  double theta() const { return theta_; }
  double y() const { return y_; }
  double log_normalizer() const { return log_ref_ + std::log(z_.value); }
  /// c_theta with its absolute error estimate.
  OracleValue normalizer() const;

  double log_density(double x) const;
  /// Unnormalised density divided by its value at the reference point.
  double scaled_density(double x) const;

  /// Integral of h(x) pi(x | y, theta) over [a, b]. `abs_floor` is an
  /// absolute tolerance on the normalised result, needed when h changes
  /// sign and the integral may vanish.
  QuadResult expect(const Integrand& h, double a = -kInf, double b = kInf, double abs_floor = 0.0) const;
  double mass(double a, double b) const;
  OracleValue mean() const;
  double cdf(double x) const;
  /// CDF at sorted points, summing consecutive pieces.
  std::vector<double> cdf_sorted(std::span<const double> points) const;
  double quantile(double p) const;

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  QuadResult integrate_range(const Integrand& g, double a, double b, double abs_tol = 0.0) const;

  ErrorDist f1_, f2_;
  double y_, theta_;
  QuadConfig cfg_;
  double xref_ = 0.0;
  double log_ref_ = 0.0;
  double tail_scale_ = 1.0;
  std::vector<double> breaks_;
  QuadResult z_;
};

OracleValue normalizing_constant(const HierModel& model, double theta, const QuadConfig& cfg = {});
OracleValue conditional_mean(const HierModel& model, double theta, const QuadConfig& cfg = {});

/// P(|X| > k | y, theta) (Centred) or P(|X - theta| > k | y, theta).
OracleValue conditional_tail_prob(const HierModel& model, double theta, double k, Frame frame,
                                  const QuadConfig& cfg = {});
/// P(|X - rho theta| > k | y, theta): the tail of U = X - rho Theta.
OracleValue conditional_tail_prob_pc(const HierModel& model, double theta, double k, double rho,
                                     const QuadConfig& cfg = {});

/// Marginal posterior of Theta under the flat prior: density proportional to
/// c_theta, which is the density of Z1 + Z2 at y - theta.
class MarginalPosterior {
 public:
  explicit MarginalPosterior(const HierModel& model, QuadConfig cfg = {});

  double log_c(double theta) const;
  /// Normalised density.
  double density(double theta) const;
  /// Integral of c_theta over the real line, with error estimate.
  OracleValue total() const { return total_; }
  /// P(|Theta| > a | y).
  OracleValue tail_prob(double a) const;
  double cdf(double t) const;

  /// Tabulated CDF on a grid, for fast inverse-CDF sampling and KS checks.
  struct Table {
    std::vector<double> theta;
    std::vector<double> cdf;
    double cdf_at(double t) const;
    double quantile(double p) const;
  };
  Table tabulate(double lo, double hi, int n) const;

 private:
  // Integral of c_theta over theta in [a, b]; infinite ends use theta = c +- s/t.
  QuadResult integrate_c(double a, double b) const;

  HierModel model_;
  QuadConfig inner_cfg_;
  QuadConfig outer_cfg_;
  double y_;
  double log_ref_;
  double scale_;
  OracleValue total_;
};

/// P(|Theta| > a | y) with the outer integral over c_theta done by nested
/// quadrature. Throws if the outer integral does not converge.
OracleValue marginal_tail_prob(const HierModel& model, double a, const QuadConfig& cfg = {});

/// Lag-one autocorrelation of the Theta chain for the all-Gaussian model
/// under U = X - rho Theta:
/// (rho - (1 - k))^2 / (rho^2 k + (1 - rho)^2 (1 - k)),  k = s2^2 / (s2^2 + s1^2).
double gaussian_rate(double sigma1, double sigma2, double rho);

/// Reference law for cdf_distance: a located error distribution, or the
/// conditional law itself.
struct Reference {
  std::optional<ErrorDist> dist;
  double location = 0.0;

  static Reference located(ErrorDist d, double loc = 0.0) { return {d, loc}; }
  static Reference self() { return {}; }
};

/// Largest CDF gap between the conditional law (in the given frame) and the
/// reference, over 512 grid points spread evenly in reference probability.
OracleValue cdf_distance(const HierModel& model, double theta, Frame frame, const Reference& ref,
                         const QuadConfig& cfg = {});

/// Tail-limit helpers with closed forms.
///
/// Gaussian f1, double-exponential f2: X | y, theta -> N(y + s1^2/s2, s1^2)
/// as theta -> +inf.
double ge_limit_mean(double y, double sigma1, double sigma2);
/// Exponential-power pair with common beta: X / theta -> s1^a / (s1^a + s2^a),
/// a = beta / (beta - 1).
double ll_limit_weight(double sigma1, double sigma2, double beta);
/// Double-exponential pair with sigma1 > sigma2:
/// E[X - theta | y, theta] -> -2 sigma1 sigma2^2 / (sigma1^2 - sigma2^2) as
/// theta -> +inf, i.e. -2 / (s^2 - 1) for sigma1 = 1, sigma2 = 1/s.
double ee_limit_shift(double sigma1, double sigma2);

}  // namespace gstab
