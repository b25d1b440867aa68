#include "gibbsstab/kernels.hpp"

#include <charconv>
#include <ostream>

namespace gstab {

namespace {

using Kind = Parametrisation::Kind;

void require_grouped_model(const HierModel& model) {
  if (model.f1().kind() != DistKind::Cauchy || model.f2().kind() != DistKind::Gaussian) {
    throw InvalidArgument("grouped kernel needs Cauchy observation error and Gaussian hidden error");
  }
}

std::vector<std::vector<double>> draw_q(const HierModel& model, std::span<const double> x, QRate rate,
                                        RngStream& rng) {
  std::vector<std::vector<double>> q(model.m());
  for (std::size_t i = 0; i < model.m(); ++i) {
    q[i].reserve(model.y()[i].size());
    for (double yij : model.y()[i]) q[i].push_back(sample_q_given_xy(yij, x[i], model.f1().scale(), rng, rate));
  }
  return q;
}

ChainState centred_scan(const HierModel& model, const ChainState& s, RngStream& rng, const KernelOptions& o) {
  ChainState next;
  next.x = sample_x_given_theta(model, s.theta, s.x, rng, o.slice);
  next.theta = sample_theta_given_x(model, next.x, rng, o.slice, s.theta);
  return next;
}

ChainState partial_scan(const HierModel& model, const ChainState& s, double rho, RngStream& rng,
                        const KernelOptions& o) {
  // With theta fixed, U = X - rho theta is a shift of X, so the U draw is the X draw.
  ChainState next;
  const std::vector<double> x = sample_x_given_theta(model, s.theta, s.x, rng, o.slice);
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] - rho * s.theta;
  next.theta = sample_theta_given_u(model, u, rho, rng, o.slice, s.theta);
  next.x.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) next.x[i] = u[i] + rho * next.theta;
  return next;
}

ChainState grouped_scan(const HierModel& model, const ChainState& s, RngStream& rng, const KernelOptions& o) {
  // Theta and Q are conditionally independent given X.
  ChainState next;
  next.theta = sample_theta_given_x(model, s.x, rng, o.slice, s.theta);
  next.q = draw_q(model, s.x, o.q_rate, rng);
  next.x.resize(model.m());
  for (std::size_t i = 0; i < model.m(); ++i) {
    next.x[i] = sample_x_given_theta_q(model.y()[i], next.q[i], next.theta, model.f1().scale(), model.f2().scale(), rng);
  }
  return next;
}

}  // namespace

ChainState initial_state(const Parametrisation& kernel, const HierModel& model, double theta0, RngStream& rng,
                         const KernelOptions& opts) {
  if (kernel.kind == Kind::Grouped) require_grouped_model(model);
  ChainState s;
  s.theta = theta0;
  s.x = sample_x_fresh(model, theta0, rng, opts.slice, opts.init_sweeps);
  if (kernel.kind == Kind::Grouped) s.q = draw_q(model, s.x, opts.q_rate, rng);
  return s;
}

ChainState step(const Parametrisation& kernel, const HierModel& model, const ChainState& state, RngStream& rng,
                const KernelOptions& opts) {
  if (state.x.size() != model.m()) throw InvalidArgument("chain state does not match the model dimension");
  try {
    switch (kernel.kind) {
      case Kind::Centred:
        return centred_scan(model, state, rng, opts);
      case Kind::NonCentred:
        return partial_scan(model, state, 1.0, rng, opts);
      case Kind::PartiallyCentred:
        return partial_scan(model, state, kernel.rho, rng, opts);
      case Kind::Grouped:
        require_grouped_model(model);
        return grouped_scan(model, state, rng, opts);
      case Kind::Hybrid:
        if (rng.bernoulli(kernel.p_mix)) return centred_scan(model, state, rng, opts);
        return partial_scan(model, state, 1.0, rng, opts);
    }
  } catch (const ConditionalSamplingError& e) {
    throw ConditionalSamplingError(std::string(e.what()) + " in kernel " + kernel.id(), e.theta(), e.x_prev());
  }
  return state;
}

Trace run_chain(const Parametrisation& kernel, const HierModel& model, double theta0, std::size_t n_iter,
                std::uint64_t seed, const KernelOptions& opts, bool record_x, std::size_t chain_index) {
  if (n_iter < 1) throw InvalidArgument("n_iter must be >= 1");
  opts.slice.validate();
  RngStream rng = RngStream::derive(seed, chain_index);
  Trace trace;
  trace.seed = seed;
  trace.kernel_id = kernel.id();
  trace.model_id = model.id();
  trace.n_iter = n_iter;
  trace.theta0 = theta0;
  trace.thetas.reserve(n_iter);
  if (record_x) trace.xs.reserve(n_iter);

  ChainState s = initial_state(kernel, model, theta0, rng, opts);
  for (std::size_t n = 0; n < n_iter; ++n) {
    s = step(kernel, model, s, rng, opts);
    trace.thetas.push_back(s.theta);
    if (record_x) trace.xs.push_back(s.x);
  }
  return trace;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const Trace& trace, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "iter,theta";
  const std::size_t m = trace.xs.empty() ? 0 : trace.xs.front().size();
  for (std::size_t i = 0; i < m; ++i) os << ",x_" << (i + 1);
  os << '\n';
  for (std::size_t n = 0; n < trace.thetas.size(); ++n) {
    os << (n + 1) << ',' << format_double(trace.thetas[n]);
    if (m) {
      for (double v : trace.xs[n]) os << ',' << format_double(v);
    }
    os << '\n';
  }
}

}  // namespace gstab
