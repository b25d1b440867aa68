#pragma once

#include <functional>
#include <optional>

#include "gibbsstab/error.hpp"
#include "gibbsstab/rng.hpp"

namespace gstab {

struct SliceConfig {
  double initial_width = 0.0;  // <= 0: derived from the model scales
  int max_stepout = 1000;
  int max_shrink = 200;
  /// Slice updates per conditional draw.
  int n_sweeps = 3;
  /// Interleave a random-scan reflection move (see `reflect_move`).
  bool reflect = true;

  void validate() const;
};

class SliceExhausted : public Error {
 public:
  SliceExhausted(double x0, int shrinks);
  double x0() const { return x0_; }

 private:
  double x0_;
};

using LogDensity1D = std::function<double(double)>;

/// One stepping-out + shrinkage slice update of a univariate log density,
/// started at x0. `logf_x0` may be passed to save an evaluation.
double slice_update(const LogDensity1D& logf, double x0, double width, const SliceConfig& cfg, RngStream& rng,
                    std::optional<double> logf_x0 = std::nullopt);

/// Metropolis move through the involution x -> 2c - x, proposed with
/// probability 1/2. Leaves logf invariant and lets a chain cross between
/// two modes placed symmetrically about c.
double reflect_move(const LogDensity1D& logf, double x, double centre, RngStream& rng);

/// n_sweeps slice updates, each followed by a reflection move about
/// `centre` when one is given and cfg.reflect is set.
double slice_sweeps(const LogDensity1D& logf, double x0, double width, const SliceConfig& cfg, RngStream& rng,
                    std::optional<double> centre = std::nullopt);

}  // namespace gstab
