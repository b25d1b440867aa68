#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsstab/error_dists.hpp"

namespace gstab {

/// Linear hierarchical model with scalar random effects
///
///   y_ij = x_i + z1_ij,   j = 1..m_i
///   x_i  = theta + z2_i,  i = 1..m
///
/// with a flat prior on theta. m = m_1 = 1 gives the two-line model.
class HierModel {
 public:
  HierModel(ErrorDist f1, ErrorDist f2, std::vector<std::vector<double>> y);
  static HierModel simple(ErrorDist f1, ErrorDist f2, double y = 0.0);

  const ErrorDist& f1() const { return f1_; }
  const ErrorDist& f2() const { return f2_; }
  const std::vector<std::vector<double>>& y() const { return y_; }
  std::size_t m() const { return y_.size(); }
  std::size_t total_obs() const { return total_obs_; }
  double y_mean(std::size_t i) const { return y_mean_[i]; }
  bool is_simple() const { return y_.size() == 1 && y_[0].size() == 1; }
  /// The single observation of a simple model; throws otherwise.
  double y_scalar() const;

  /// Log density of x_i given theta and its data, up to the flat prior:
  /// sum_j log f1(y_ij - x_i) + log f2(x_i - theta).
  double x_log_conditional(std::size_t i, double xi, double theta) const;

  /// sum_i [ sum_j log f1(y_ij - x_i) + log f2(x_i - theta) ]
  double joint_log_density(std::span<const double> x, double theta) const;

  /// e.g. "f1=C(1),f2=G(2.23607),y=[[0]]"
  std::string id() const;

 private:
  ErrorDist f1_;
  ErrorDist f2_;
  std::vector<std::vector<double>> y_;
  std::vector<double> y_mean_;
  std::size_t total_obs_ = 0;
};

/// Which blocks the two-component Gibbs sampler updates.
struct Parametrisation {
  enum class Kind { Centred, NonCentred, PartiallyCentred, Grouped, Hybrid };

  Kind kind = Kind::Centred;
  double rho = 0.0;    // PartiallyCentred: U = X - rho * Theta
  double p_mix = 0.5;  // Hybrid: probability of a centred step

  static Parametrisation centred() { return {Kind::Centred, 0.0, 0.5}; }
  static Parametrisation non_centred() { return {Kind::NonCentred, 1.0, 0.5}; }
  static Parametrisation partially_centred(double rho);
  static Parametrisation grouped() { return {Kind::Grouped, 0.0, 0.5}; }
  static Parametrisation hybrid(double p_mix = 0.5);

  /// "P0", "P1", "PC(0.25)", "grouped", "hybrid(0.5)"
  std::string id() const;
  friend bool operator==(const Parametrisation&, const Parametrisation&) = default;
};

enum class Stability { Uniform, Geometric, NonGeometric };

/// Single-letter code: U, G or N.
char to_code(Stability s);
Stability stability_from_code(char c);
std::string_view to_string(Stability s);

std::vector<double> to_noncentred(std::span<const double> x, double theta);
std::vector<double> from_noncentred(std::span<const double> xt, double theta);

/// Theoretical stability class of the centred (P0) or non-centred (P1) sampler.
///
/// The (E,E) cell depends on r = sigma2 / sigma1: r > 1 gives P0 uniform and
/// P1 geometric, r < 1 the mirror image, r == 1 geometric for both.
/// Throws for other parametrisations.
Stability theoretical_stability(const HierModel& model, const Parametrisation& par);
Stability theoretical_stability(const ErrorDist& f1, const ErrorDist& f2, const Parametrisation& par);

}  // namespace gstab
