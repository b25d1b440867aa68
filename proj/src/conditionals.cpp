#include "gibbsstab/conditionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gstab {

namespace {

bool both_gaussian(const HierModel& m) {
  return m.f1().kind() == DistKind::Gaussian && m.f2().kind() == DistKind::Gaussian;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_dim(const HierModel& model, std::size_t n, const char* what) {
  if (n != model.m()) {
    throw InvalidArgument(std::string(what) + " has " + std::to_string(n) + " entries, model has m = " +
                          std::to_string(model.m()));
  }
}

template <class F>
auto with_context(double theta, std::span<const double> x_prev, F&& f) {
  try {
    return f();
  } catch (const SliceExhausted& e) {
    throw ConditionalSamplingError(e.what(), theta, std::vector<double>(x_prev.begin(), x_prev.end()));
  }
}

}  // namespace

ConditionalSamplingError::ConditionalSamplingError(const std::string& what, double theta, std::vector<double> x_prev)
    : Error(what + " (theta = " + std::to_string(theta) + ")"), theta_(theta), x_prev_(std::move(x_prev)) {}

double slice_width(const HierModel& model, const SliceConfig& cfg) {
  if (cfg.initial_width > 0.0) return cfg.initial_width;
  return std::max(model.f1().scale(), model.f2().scale());
}

std::vector<double> sample_x_given_theta(const HierModel& model, double theta, std::span<const double> x_prev,
                                         RngStream& rng, const SliceConfig& cfg) {
  check_dim(model, x_prev.size(), "x_prev");
  std::vector<double> x(model.m());
  if (both_gaussian(model)) {
    const double p1 = 1.0 / (model.f1().scale() * model.f1().scale());
    const double p2 = 1.0 / (model.f2().scale() * model.f2().scale());
    for (std::size_t i = 0; i < model.m(); ++i) {
      const auto ni = static_cast<double>(model.y()[i].size());
      const double prec = ni * p1 + p2;
      const double mean = (ni * model.y_mean(i) * p1 + theta * p2) / prec;
      x[i] = rng.normal(mean, 1.0 / std::sqrt(prec));
    }
    return x;
  }
  const double w = slice_width(model, cfg);
  return with_context(theta, x_prev, [&] {
    for (std::size_t i = 0; i < model.m(); ++i) {
      auto logf = [&](double xi) { return model.x_log_conditional(i, xi, theta); };
      x[i] = slice_sweeps(logf, x_prev[i], w, cfg, rng, 0.5 * (model.y_mean(i) + theta));
    }
    return x;
  });
}

std::vector<double> sample_x_fresh(const HierModel& model, double theta, RngStream& rng, const SliceConfig& cfg,
                                   int burn_sweeps) {
  std::vector<double> start(model.m());
  for (std::size_t i = 0; i < model.m(); ++i) {
    const double a = model.y_mean(i);
    start[i] = model.x_log_conditional(i, a, theta) >= model.x_log_conditional(i, theta, theta) ? a : theta;
  }
  if (both_gaussian(model)) return sample_x_given_theta(model, theta, start, rng, cfg);
  SliceConfig burn = cfg;
  burn.n_sweeps = std::max(burn_sweeps, 1);
  return sample_x_given_theta(model, theta, start, rng, burn);
}

double sample_theta_given_x(const HierModel& model, std::span<const double> x, RngStream& rng, const SliceConfig& cfg,
                            std::optional<double> theta_start) {
  check_dim(model, x.size(), "x");
  const ErrorDist& f2 = model.f2();
  if (model.m() == 1) return x[0] - f2.sample(rng);
  if (f2.kind() == DistKind::Gaussian) {
    return rng.normal(mean_of(x), f2.scale() / std::sqrt(static_cast<double>(x.size())));
  }
  const double start = theta_start.value_or(mean_of(x));
  auto logf = [&](double t) {
    double acc = 0.0;
    for (double xi : x) acc += f2.log_density(xi - t);
    return acc;
  };
  return with_context(start, x, [&] { return slice_sweeps(logf, start, slice_width(model, cfg), cfg, rng); });
}

double sample_theta_given_xtilde(const HierModel& model, std::span<const double> xt, RngStream& rng,
                                 const SliceConfig& cfg, std::optional<double> theta_start) {
  check_dim(model, xt.size(), "x_tilde");
  const ErrorDist& f1 = model.f1();
  if (model.is_simple()) return model.y_scalar() - xt[0] - f1.sample(rng);
  if (f1.kind() == DistKind::Gaussian) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.m(); ++i) {
      for (double yij : model.y()[i]) acc += yij - xt[i];
    }
    const auto n = static_cast<double>(model.total_obs());
    return rng.normal(acc / n, f1.scale() / std::sqrt(n));
  }
  double centre = 0.0;
  for (std::size_t i = 0; i < model.m(); ++i) centre += model.y_mean(i) - xt[i];
  centre /= static_cast<double>(model.m());
  const double start = theta_start.value_or(centre);
  auto logf = [&](double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.m(); ++i) {
      for (double yij : model.y()[i]) acc += f1.log_density(yij - xt[i] - t);
    }
    return acc;
  };
  return with_context(start, xt, [&] { return slice_sweeps(logf, start, slice_width(model, cfg), cfg, rng); });
}

double sample_theta_given_u(const HierModel& model, std::span<const double> u, double rho, RngStream& rng,
                            const SliceConfig& cfg, std::optional<double> theta_start) {
  check_dim(model, u.size(), "u");
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("rho must lie in [0,1]");
  if (rho == 0.0) return sample_theta_given_x(model, u, rng, cfg, theta_start);
  if (rho == 1.0) return sample_theta_given_xtilde(model, u, rng, cfg, theta_start);

  const ErrorDist& f1 = model.f1();
  const ErrorDist& f2 = model.f2();
  if (both_gaussian(model)) {
    const double p1 = 1.0 / (f1.scale() * f1.scale());
    const double p2 = 1.0 / (f2.scale() * f2.scale());
    double prec = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < model.m(); ++i) {
      const auto ni = static_cast<double>(model.y()[i].size());
      prec += ni * rho * rho * p1 + (1.0 - rho) * (1.0 - rho) * p2;
      lin += rho * ni * (model.y_mean(i) - u[i]) * p1 + (1.0 - rho) * u[i] * p2;
    }
    return rng.normal(lin / prec, 1.0 / std::sqrt(prec));
  }

  // Each factor pair pulls theta towards (ybar_i - u_i)/rho and u_i/(1 - rho).
  double centre = 0.0;
  for (std::size_t i = 0; i < model.m(); ++i) {
    centre += 0.5 * ((model.y_mean(i) - u[i]) / rho + u[i] / (1.0 - rho));
  }
  centre /= static_cast<double>(model.m());
  const double start = theta_start.value_or(centre);
  auto logf = [&](double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.m(); ++i) {
      for (double yij : model.y()[i]) acc += f1.log_density(yij - u[i] - rho * t);
      acc += f2.log_density(u[i] - (1.0 - rho) * t);
    }
    return acc;
  };
  return with_context(start, u, [&] {
    return slice_sweeps(logf, start, slice_width(model, cfg), cfg, rng, centre);
  });
}

double sample_q_given_xy(double y, double x, double sigma1, RngStream& rng, QRate rate) {
  const double r = (y - x) / sigma1;
  const double beta = rate == QRate::Derived ? 0.5 * (1.0 + r * r) : 0.5 * r * r;
  if (!(beta > 0.0)) throw InvalidArgument("Q conditional rate is zero (likelihood-only rate with y == x)");
  return rng.exponential() / beta;
}

double sample_q_given_xy(double y, double x, RngStream& rng, QRate rate) { return sample_q_given_xy(y, x, 1.0, rng, rate); }

double sample_x_given_theta_q(std::span<const double> y_i, std::span<const double> q_i, double theta, double sigma1,
                              double sigma2, RngStream& rng) {
  const double p1 = 1.0 / (sigma1 * sigma1);
  const double p2 = 1.0 / (sigma2 * sigma2);
  double prec = p2;
  double lin = theta * p2;
  for (std::size_t j = 0; j < y_i.size(); ++j) {
    if (!(q_i[j] > 0.0)) throw InvalidArgument("q must be positive");
    prec += q_i[j] * p1;
    lin += q_i[j] * y_i[j] * p1;
  }
  return rng.normal(lin / prec, 1.0 / std::sqrt(prec));
}

double sample_x_given_theta_q(double y, double theta, double q, RngStream& rng) {
  const double yy[1] = {y};
  const double qq[1] = {q};
  return sample_x_given_theta_q(yy, qq, theta, 1.0, 1.0, rng);
}

}  // namespace gstab
