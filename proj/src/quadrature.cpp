#include "gibbsstab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

namespace gstab {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525163591, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                       0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                       0.295524224714752870173892994651338};

constexpr double kInf = std::numeric_limits<double>::infinity();

// A segment of the real line, integrated in a variable u through x = map(u).
struct Segment {
  enum class Map { Identity, Upper, Lower, Whole } map;
  double anchor;
  double scale;

  double x(double u) const {
    switch (map) {
      case Map::Identity:
        return u;
      case Map::Upper:
        return anchor + scale * std::tan(u);
      case Map::Lower:
        return anchor - scale * std::tan(u);
      case Map::Whole:
        return scale * std::tan(u);
    }
    return u;
  }
  double jacobian(double u) const {
    if (map == Map::Identity) return 1.0;
    const double c = std::cos(u);
    return scale / (c * c);
  }
};

struct Piece {
  std::size_t seg;
  double lo, hi;
  double value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk21(const Integrand& f, const Segment& s, std::size_t seg, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  auto eval = [&](double u) {
    const double x = s.x(u);
    const double v = f(x);
    return std::isfinite(x) ? v * s.jacobian(u) : 0.0;
  };
  const double fc = eval(centre);
  double kron = fc * kWgk[10];
  double gauss = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const double sum = eval(centre - dx) + eval(centre + dx);
    kron += kWgk[static_cast<std::size_t>(j)] * sum;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * sum;
  }
  kron *= half;
  gauss *= half;
  double err = std::abs(kron - gauss);
  if (!std::isfinite(kron)) err = kInf;
  // Intervals that can no longer be split in floating point are final.
  if (hi - lo <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) err = 0.0;
  return {seg, lo, hi, kron, err};
}

}  // namespace

QuadratureError::QuadratureError(const std::string& what, double achieved_rel_error)
    : Error(what + " (achieved relative error " + std::to_string(achieved_rel_error) + ")"),
      achieved_(achieved_rel_error) {}

QuadResult integrate(const Integrand& f, std::span<const double> breakpoints, const QuadConfig& cfg, double tail_scale) {
  if (breakpoints.size() < 2) throw InvalidArgument("integration needs at least two breakpoints");
  if (!(tail_scale > 0.0)) throw InvalidArgument("tail scale must be positive");
  const double half_pi = 0.5 * std::numbers::pi;

  std::vector<Segment> segs;
  std::vector<std::pair<double, double>> ranges;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    double a = breakpoints[i];
    double b = breakpoints[i + 1];
    if (!(a < b)) continue;
    if (cfg.tail_policy == TailPolicy::Truncate) {
      if (std::isinf(a) && std::isinf(b)) {
        a = -cfg.truncate_scales * tail_scale;
        b = cfg.truncate_scales * tail_scale;
      } else if (std::isinf(a)) {
        a = b - cfg.truncate_scales * tail_scale;
      } else if (std::isinf(b)) {
        b = a + cfg.truncate_scales * tail_scale;
      }
    }
    if (std::isinf(a) && std::isinf(b)) {
      segs.push_back({Segment::Map::Whole, 0.0, tail_scale});
      ranges.emplace_back(-half_pi, half_pi);
    } else if (std::isinf(b)) {
      segs.push_back({Segment::Map::Upper, a, tail_scale});
      ranges.emplace_back(0.0, half_pi);
    } else if (std::isinf(a)) {
      segs.push_back({Segment::Map::Lower, b, tail_scale});
      ranges.emplace_back(0.0, half_pi);
    } else {
      segs.push_back({Segment::Map::Identity, 0.0, 1.0});
      ranges.emplace_back(a, b);
    }
  }

  std::priority_queue<Piece> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    Piece p = gk21(f, segs[i], i, ranges[i].first, ranges[i].second);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int n = static_cast<int>(heap.size());
  auto converged = [&] { return total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
  while (!converged() && !heap.empty() && heap.top().error > 0.0) {
    if (n >= cfg.max_subdivisions) {
      throw QuadratureError("quadrature did not converge within " + std::to_string(cfg.max_subdivisions) +
                                " subintervals",
                            total != 0.0 ? total_err / std::abs(total) : total_err);
    }
    const Piece p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.lo + p.hi);
    const Piece left = gk21(f, segs[p.seg], p.seg, p.lo, mid);
    const Piece right = gk21(f, segs[p.seg], p.seg, mid, p.hi);
    total += left.value + right.value - p.value;
    total_err += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  // Recompute sums from scratch to shed accumulated rounding from the updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(total)) throw QuadratureError("integrand produced a non-finite integral", kInf);
  return {total, total_err, n};
}

QuadResult integrate(const Integrand& f, double a, double b, const QuadConfig& cfg, double tail_scale) {
  if (a == b) return {};
  if (a > b) {
    QuadResult r = integrate(f, b, a, cfg, tail_scale);
    r.value = -r.value;
    return r;
  }
  const double pts[2] = {a, b};
  return integrate(f, std::span<const double>(pts, 2), cfg, tail_scale);
}

}  // namespace gstab
