#include "gibbsstab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbsstab/error.hpp"

namespace gstab {

namespace {
void require_nonempty(std::span<const double> v, std::size_t n = 1) {
  if (v.size() < n) throw InvalidArgument("not enough data for the statistic");
}
}  // namespace

double mean(std::span<const double> v) {
  require_nonempty(v);
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  require_nonempty(v, 2);
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double std_error(std::span<const double> v) { return std::sqrt(variance(v) / static_cast<double>(v.size())); }

double skewness(std::span<const double> v) {
  require_nonempty(v, 3);
  const double m = mean(v);
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

double quantile(std::span<const double> v, double p) {
  require_nonempty(v);
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile level must be in [0,1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median(std::span<const double> v) { return quantile(v, 0.5); }

std::vector<double> acf(std::span<const double> v, std::size_t max_lag) {
  require_nonempty(v, 2);
  const double m = mean(v);
  const std::size_t n = v.size();
  double c0 = 0.0;
  for (double x : v) c0 += (x - m) * (x - m);
  std::vector<double> out;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    if (lag >= n || c0 == 0.0) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) c += (v[i] - m) * (v[i + lag] - m);
    out.push_back(c / c0);
  }
  return out;
}

double lag1_slope(std::span<const double> v) {
  require_nonempty(v, 3);
  const std::size_t n = v.size() - 1;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += v[i];
    my += v[i + 1];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (v[i] - mx) * (v[i + 1] - my);
    sxx += (v[i] - mx) * (v[i] - mx);
  }
  return sxy / sxx;
}

double batch_means_se(std::span<const double> v, std::size_t n_batches) {
  if (n_batches < 2) throw InvalidArgument("batch means need at least two batches");
  const std::size_t b = v.size() / n_batches;
  if (b < 1) throw InvalidArgument("too few samples for the requested batches");
  std::vector<double> means;
  for (std::size_t k = 0; k < n_batches; ++k) means.push_back(mean(v.subspan(k * b, b)));
  return std::sqrt(variance(means) / static_cast<double>(n_batches));
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  require_nonempty(sample);
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a);
  require_nonempty(b);
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double log_mean_exp(std::span<const double> a) {
  require_nonempty(a);
  const double mx = *std::max_element(a.begin(), a.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : a) s += std::exp(v - mx);
  return mx + std::log(s / static_cast<double>(a.size()));
}

}  // namespace gstab
