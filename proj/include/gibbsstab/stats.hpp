#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gstab {

double mean(std::span<const double> v);
/// Unbiased sample variance.
double variance(std::span<const double> v);
double std_error(std::span<const double> v);
/// Sample skewness g1 = m3 / m2^{3/2}.
double skewness(std::span<const double> v);
/// Linear-interpolation quantile (type 7) of unsorted data.
double quantile(std::span<const double> v, double p);
double median(std::span<const double> v);

/// Autocorrelations at lags 1..max_lag.
std::vector<double> acf(std::span<const double> v, std::size_t max_lag);
/// Least-squares slope of v[n+1] on v[n].
double lag1_slope(std::span<const double> v);
/// Standard error of the mean from non-overlapping batch means.
double batch_means_se(std::span<const double> v, std::size_t n_batches = 50);

/// sup |F_n - F| of a sample against a continuous CDF.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
/// sup |F_n - G_m| between two samples.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// log(mean(exp(a_i))) computed without overflow.
double log_mean_exp(std::span<const double> a);

}  // namespace gstab
