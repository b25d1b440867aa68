#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbsstab/hier_model.hpp"
#include "gibbsstab/kernels.hpp"
#include "gibbsstab/oracle.hpp"

namespace gstab {

struct DiagConfig {
  /// Exponent of the drift function V(theta) = exp(alpha |theta|).
  double alpha = 0.05;
  std::vector<double> theta_ladder{1e2, 1e3, 1e4};
  std::size_t n_rep = 10000;
  /// Radius k of the set |theta| <= k that return times are measured to,
  /// and of the tail event in the tightness check.
  double mode_radius = 10.0;
  double ks_threshold = 0.05;
  double drift_threshold = 0.95;
  /// Tightness passes when the tail probability is at most 1 - ptip_eps.
  double ptip_eps = 0.1;
  std::size_t return_seeds = 20;
  std::size_t return_max_iter = 2000;
  /// Largest median return time (from the top rung) accepted as uniform.
  double return_envelope = 25.0;
  /// CDF distance below which a robustness limit counts as reached.
  double limit_tol = 0.01;
  /// Smallest pull d accepted for DUR / PUR.
  double pull_min = 0.05;
  KernelOptions kernel;
  void validate() const;
};

struct DriftEstimate {
  double ratio;
  double se;
};

/// One-step moves from a fixed starting point, n_rep independent draws.
/// For Theta-chain kernels each draw refreshes X | theta0 and reports
/// Theta_1; for the grouped kernel X0 = start and X_1 is reported.
std::vector<double> one_step_draws(const Parametrisation& kernel, const HierModel& model, double start,
                                   std::size_t n_rep, std::uint64_t seed, const KernelOptions& opts = {});

/// Monte Carlo estimate of E[exp(alpha |Theta_1|) | theta0] / exp(alpha |theta0|),
/// computed in log space. alpha = 0 gives exactly 1.
DriftEstimate drift_ratio(const Parametrisation& kernel, const HierModel& model, double theta0, double alpha,
                          std::size_t n_rep, std::uint64_t seed, const KernelOptions& opts = {});
DriftEstimate drift_ratio_from_draws(const std::vector<double>& draws, double theta0, double alpha);

struct IncrementTest {
  double theta0;
  /// Two-sample KS against the previous rung (absent for the first rung).
  std::optional<double> ks_prev;
  /// One-sample KS against the registered limit law, if any.
  std::optional<double> ks_limit;
};

using LimitCdf = std::function<double(double)>;

std::vector<IncrementTest> increment_stationarity(const Parametrisation& kernel, const HierModel& model,
                                                  const std::vector<double>& ladder, std::size_t n_rep,
                                                  std::uint64_t seed, const std::optional<LimitCdf>& limit = {},
                                                  const KernelOptions& opts = {});

struct ReturnTimes {
  double theta0;
  double median;
  double q25;
  double q75;
  std::size_t n_censored;
  std::vector<std::size_t> times;
};

/// First n >= 0 with |Theta_n| <= radius, per seed, censored at max_iter
/// (censored runs count as max_iter in the quantiles).
ReturnTimes return_time(const Parametrisation& kernel, const HierModel& model, double theta0, double radius,
                        std::size_t max_iter, std::size_t n_seeds, std::uint64_t seed,
                        const KernelOptions& opts = {});

struct DriftPoint {
  double theta0;
  double ratio;
  double se;
};

struct StabilityReport {
  std::string model_id;
  std::string kernel_id;
  std::uint64_t seed = 0;
  DiagConfig config;
  std::vector<DriftPoint> drift_curve;
  std::vector<IncrementTest> increment_tests;
  /// Oracle tail probabilities of the updated block at +-rung.
  std::vector<std::pair<double, double>> tail_probs;
  std::vector<ReturnTimes> return_times;
  /// Tail increment ratios (Theta_1 - y) / (theta0 - y) at the top rung:
  /// mean and quartiles.
  std::vector<double> tail_ratio_summary;
  Stability classification = Stability::Geometric;
  std::string evidence;
};

/// Empirical U / G / N verdict:
///  N  if increments at the two largest rungs agree (KS <= ks_threshold) and
///     the drift ratio at the largest rung is >= 1 - 2 stderr;
///  U  if the oracle tail probability of the updated block stays <= 1 - ptip_eps
///     across the ladder and the median return time from the largest rung is
///     within return_envelope;
///  G  otherwise, flagged ambiguous when some drift ratio exceeds drift_threshold.
///
/// When `limit` is given, increments at every rung are also tested against it.
StabilityReport classify(const Parametrisation& kernel, const HierModel& model, const DiagConfig& cfg,
                         std::uint64_t seed, const std::optional<LimitCdf>& limit = {});

struct PropertyReport {
  bool rip = false, rid = false, dur = false, pur = false, ptip_p0 = false, ptip_p1 = false;
  std::vector<double> ladder;
  std::vector<double> rip_distance;  // Centred frame vs Z1 + y
  std::vector<double> rid_distance;  // NonCentred frame vs Z2
  std::vector<double> conditional_means;
  std::vector<double> tail_p0;
  std::vector<double> tail_p1;
  double dur_pull = 0.0;  // min over rungs of |theta| - |E[X | theta]|
  double pur_pull = 0.0;  // min over rungs of sgn(theta) (E[X | theta] - y)
};

/// Oracle-ladder verdicts of the robustness, relevance and tightness
/// properties for a single-observation model.
PropertyReport property_check(const HierModel& model, const DiagConfig& cfg = {}, const QuadConfig& qcfg = {});

}  // namespace gstab
