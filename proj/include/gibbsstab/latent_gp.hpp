#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gibbsstab/error_dists.hpp"
#include "gibbsstab/hier_model.hpp"
#include "gibbsstab/kernels.hpp"
#include "gibbsstab/rng.hpp"
#include "gibbsstab/slice.hpp"

namespace gstab {

/// Sigma_ij = marginal_var * phi^|i-j|. Throws unless |phi| < 1, p >= 1 and
/// marginal_var > 0.
Eigen::MatrixXd build_ar1_cov(int p, double phi, double marginal_var = 1.0);

/// y = X + Z1 with X = 1 theta + Sigma^{1/2} Z2, Z1 iid from f1, flat prior
/// on theta.
class LgpModel {
 public:
  /// Throws if Sigma is not symmetric positive definite or dimensions clash.
  LgpModel(Eigen::MatrixXd sigma, Eigen::VectorXd y, ErrorDist f1 = ErrorDist::cauchy(1.0));

  /// Draws y at level theta with stream RngStream::derive(seed, 0).
  static Eigen::VectorXd simulate(const Eigen::MatrixXd& sigma, const ErrorDist& f1, double theta,
                                  std::uint64_t seed);

  int p() const { return static_cast<int>(y_.size()); }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& y() const { return y_; }
  const ErrorDist& f1() const { return f1_; }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }
  /// 1' Sigma^{-1} 1
  double ones_precision() const { return ones_precision_; }

  /// sum_i log f1(y_i - x_i) - (x - 1 theta)' Sigma^{-1} (x - 1 theta) / 2,
  /// dropping constants.
  double log_target(const Eigen::VectorXd& x, double theta) const;
  Eigen::VectorXd grad_log_target(const Eigen::VectorXd& x, double theta) const;

  /// 1 theta + Sigma^{1/2} xi with xi standard normal (the prior of X).
  Eigen::VectorXd sample_prior_x(double theta, RngStream& rng) const;

  std::string id() const;

 private:
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd y_;
  ErrorDist f1_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd ones_solve_;
  double ones_precision_ = 0.0;
};

struct GaussianMoments {
  double mean;
  double var;
};

/// Theta | X = x ~ N(1' Sigma^{-1} x / 1' Sigma^{-1} 1, 1 / 1' Sigma^{-1} 1).
GaussianMoments theta_given_x_moments(const LgpModel& model, const Eigen::VectorXd& x);
GaussianMoments theta_given_x_moments(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& x);
double theta_given_x(const LgpModel& model, const Eigen::VectorXd& x, RngStream& rng);
double theta_given_x(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& x, RngStream& rng);

struct MalaConfig {
  double step_size = 0.25;
  int n_inner = 5;
  double target_accept = 0.57;
  void validate() const;
};

struct MalaResult {
  Eigen::VectorXd x;
  double accept_rate;
};

/// n_inner Metropolis-adjusted Langevin moves targeting pi(x | y, theta):
/// x' = x + (eps^2/2) grad log pi(x) + eps xi. Throws if the gradient is not
/// finite.
MalaResult mala_block_update(const LgpModel& model, const Eigen::VectorXd& x, double theta, const MalaConfig& cfg,
                             RngStream& rng);

struct LgpState {
  double theta = 0.0;
  Eigen::VectorXd x;  // model scale
};

struct LgpRunConfig {
  MalaConfig mala;
  /// Leading iterations during which log(step_size) is adapted towards
  /// mala.target_accept. They stay in the trace; Trace::burn_in records them.
  std::size_t tune_iter = 500;
  SliceConfig slice;
};

/// One scan. Centred: MALA on X | theta, then the exact Theta | X draw.
/// NonCentred: MALA on X~ = X - 1 theta (the same moves shifted, as the
/// target is translation equivariant), then a slice update of
/// theta ~ prod_i f1(y_i - x~_i - theta). Returns the MALA acceptance rate.
double lgp_step(const LgpModel& model, const Parametrisation& par, LgpState& state, const MalaConfig& mala,
                const SliceConfig& slice, RngStream& rng);

/// Chain from theta0 with X started at a prior draw around theta0.
/// Tuned step size and post-tuning acceptance go to Trace::stats.
Trace run_lgp_chain(const LgpModel& model, const Parametrisation& par, double theta0, const LgpRunConfig& cfg,
                    std::size_t n_iter, std::uint64_t seed, bool record_x = false, std::size_t chain_index = 0);

/// n_rep independent one-step moves of the Theta chain from theta0. Each
/// rep uses the stream RngStream::derive(seed, rep): X starts at a prior draw
/// around theta0, is refreshed by `warmup` MALA block updates at theta0 and
/// then one lgp_step is taken. Returns the resulting Theta_1 values.
std::vector<double> lgp_one_step_draws(const LgpModel& model, const Parametrisation& par, double theta0,
                                       std::size_t n_rep, std::uint64_t seed, const MalaConfig& mala,
                                       int warmup = 5, const SliceConfig& slice = {});

}  // namespace gstab
