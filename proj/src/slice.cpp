#include "gibbsstab/slice.hpp"

#include <cmath>
#include <string>

namespace gstab {

void SliceConfig::validate() const {
  if (max_stepout < 1 || max_shrink < 50 || n_sweeps < 1) {
    throw InvalidArgument("slice config needs max_stepout >= 1, max_shrink >= 50, n_sweeps >= 1");
  }
  if (!std::isfinite(initial_width)) throw InvalidArgument("slice initial_width must be finite");
}

SliceExhausted::SliceExhausted(double x0, int shrinks)
    : Error("slice shrinkage exhausted after " + std::to_string(shrinks) + " proposals starting from x0 = " +
            std::to_string(x0)),
      x0_(x0) {}

double slice_update(const LogDensity1D& logf, double x0, double width, const SliceConfig& cfg, RngStream& rng,
                    std::optional<double> logf_x0) {
  const double g0 = logf_x0 ? *logf_x0 : logf(x0);
  if (!std::isfinite(g0)) throw SliceExhausted(x0, 0);
  const double level = g0 - rng.exponential();

  double left = x0 - width * rng.uniform();
  double right = left + width;
  int j = static_cast<int>(std::floor(cfg.max_stepout * rng.uniform()));
  int k = cfg.max_stepout - 1 - j;
  while (j-- > 0 && logf(left) > level) left -= width;
  while (k-- > 0 && logf(right) > level) right += width;

  for (int s = 0; s < cfg.max_shrink; ++s) {
    const double x1 = rng.uniform(left, right);
    if (logf(x1) >= level) return x1;
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
  }
  throw SliceExhausted(x0, cfg.max_shrink);
}

double reflect_move(const LogDensity1D& logf, double x, double centre, RngStream& rng) {
  if (!rng.bernoulli(0.5)) return x;
  const double proposal = 2.0 * centre - x;
  const double log_ratio = logf(proposal) - logf(x);
  if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) return proposal;
  return x;
}

double slice_sweeps(const LogDensity1D& logf, double x0, double width, const SliceConfig& cfg, RngStream& rng,
                    std::optional<double> centre) {
  double x = x0;
  for (int s = 0; s < cfg.n_sweeps; ++s) {
    x = slice_update(logf, x, width, cfg, rng);
    if (centre && cfg.reflect) x = reflect_move(logf, x, *centre, rng);
  }
  return x;
}

}  // namespace gstab
