#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbsstab/hier_model.hpp"
#include "gibbsstab/rng.hpp"
#include "gibbsstab/slice.hpp"

namespace gstab {

/// Rate used for the auxiliary precision Q in the Cauchy scale mixture.
enum class QRate {
  /// Ga(1, (1 + (y-x)^2)/2): Ga(1/2, 1/2) prior times the N(0, 1/q) likelihood.
  Derived,
  /// Ga(1, (y-x)^2/2): the likelihood term alone, without the prior rate.
  LikelihoodOnly,
};

class ConditionalSamplingError : public Error {
 public:
  ConditionalSamplingError(const std::string& what, double theta, std::vector<double> x_prev);
  double theta() const { return theta_; }
  const std::vector<double>& x_prev() const { return x_prev_; }

 private:
  double theta_;
  std::vector<double> x_prev_;
};

/// Slice width used when cfg.initial_width is not set: max(sigma1, sigma2).
double slice_width(const HierModel& model, const SliceConfig& cfg);

/// x_i ~ prod_j f1(y_ij - x_i) f2(x_i - theta), independently over i.
/// Exact when both errors are Gaussian; otherwise cfg.n_sweeps slice updates
/// started at x_prev, each followed by a reflection about (ybar_i + theta)/2.
std::vector<double> sample_x_given_theta(const HierModel& model, double theta, std::span<const double> x_prev,
                                         RngStream& rng, const SliceConfig& cfg = {});

/// A draw from L(X | y, theta) that does not depend on a previous state:
/// each coordinate starts at whichever of ybar_i and theta has the higher
/// conditional density and is run through `burn_sweeps` slice sweeps.
std::vector<double> sample_x_fresh(const HierModel& model, double theta, RngStream& rng, const SliceConfig& cfg = {},
                                   int burn_sweeps = 25);

/// theta ~ prod_i f2(x_i - theta) (flat prior). Exact for m = 1 and for a
/// Gaussian f2; slice sampling from theta_start (default mean(x)) otherwise.
double sample_theta_given_x(const HierModel& model, std::span<const double> x, RngStream& rng,
                            const SliceConfig& cfg = {}, std::optional<double> theta_start = std::nullopt);

/// Non-centred update: theta ~ prod_ij f1(y_ij - xt_i - theta).
double sample_theta_given_xtilde(const HierModel& model, std::span<const double> xt, RngStream& rng,
                                 const SliceConfig& cfg = {}, std::optional<double> theta_start = std::nullopt);

/// Partially centred update with U = X - rho Theta:
/// theta ~ prod_i [prod_j f1(y_ij - u_i - rho theta)] f2(u_i - (1 - rho) theta).
double sample_theta_given_u(const HierModel& model, std::span<const double> u, double rho, RngStream& rng,
                            const SliceConfig& cfg = {}, std::optional<double> theta_start = std::nullopt);

/// Q | Y = y, X = x for Cauchy observation error with unit scale.
double sample_q_given_xy(double y, double x, RngStream& rng, QRate rate = QRate::Derived);

/// X | Y = y, Theta = theta, Q = q  ~  N(theta/(q+1) + q y/(q+1), 1/(q+1)).
double sample_x_given_theta_q(double y, double theta, double q, RngStream& rng);

/// Scaled, replicated forms used by the grouped kernel: Z1 = sigma1 V / sqrt(Q).
double sample_q_given_xy(double y, double x, double sigma1, RngStream& rng, QRate rate);
double sample_x_given_theta_q(std::span<const double> y_i, std::span<const double> q_i, double theta, double sigma1,
                              double sigma2, RngStream& rng);

}  // namespace gstab
