#pragma once

// Shared helpers for the unit tests. The quadrature here is Boost's, so
// oracle values computed with it are independent of the library integrator.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

/// Adaptive Gauss-Kronrod (61 points) from Boost; handles infinite limits.
inline double boost_integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol, &err);
}

/// Integral over the real line split at the given points, so peaks away
/// from the origin are not missed.
inline double boost_integrate_line(const std::function<double(double)>& f, std::vector<double> cuts,
                                   double tol = 1e-12) {
  std::sort(cuts.begin(), cuts.end());
  double s = boost_integrate(f, -kInf, cuts.front(), tol);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += boost_integrate(f, cuts[i], cuts[i + 1], tol);
  return s + boost_integrate(f, cuts.back(), kInf, tol);
}

/// CDF of a density at sorted points: one adaptive integral up to the first
/// point, then 10-point Gauss-Legendre on each gap.
inline std::vector<double> quad_cdf_sorted(const std::function<double(double)>& density, std::span<const double> pts) {
  std::vector<double> out(pts.size());
  if (pts.empty()) return out;
  double acc = boost_integrate(density, -kInf, pts[0], 1e-10);
  out[0] = acc;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i] > pts[i - 1]) acc += boost::math::quadrature::gauss<double, 10>::integrate(density, pts[i - 1], pts[i]);
    out[i] = acc;
  }
  return out;
}

/// Kolmogorov-Smirnov distance between a sample and a density, with the CDF
/// obtained by quadrature.
inline double ks_vs_density(std::vector<double> sample, const std::function<double(double)>& density) {
  std::sort(sample.begin(), sample.end());
  const std::vector<double> F = quad_cdf_sorted(density, sample);
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    d = std::max({d, std::abs(F[i] - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - F[i])});
  }
  return d;
}

inline double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(std::span<const double> v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / ("gibbsstab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace testing
