#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gibbsstab/error.hpp"

namespace gstab {

enum class TailPolicy {
  /// Infinite ends are mapped onto a finite range with x = c + s tan(u).
  TangentMap,
  /// Infinite ends are cut `truncate_scales` tail scales past the last breakpoint.
  Truncate,
};

struct QuadConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-300;
  int max_subdivisions = 20000;
  TailPolicy tail_policy = TailPolicy::TangentMap;
  double truncate_scales = 60.0;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_rel_error);
  double achieved_rel_error() const { return achieved_; }

 private:
  double achieved_;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod integration over the segments
/// delimited by `breakpoints` (sorted; the first may be -inf and the last
/// +inf). `tail_scale` sets the length scale of the tangent map on infinite
/// segments. Stops when the summed error estimate is below
/// max(abs_tol, rel_tol |value|).
QuadResult integrate(const Integrand& f, std::span<const double> breakpoints, const QuadConfig& cfg = {},
                     double tail_scale = 1.0);

QuadResult integrate(const Integrand& f, double a, double b, const QuadConfig& cfg = {}, double tail_scale = 1.0);

}  // namespace gstab
