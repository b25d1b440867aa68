#include "gibbsstab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gibbsstab/stats.hpp"

namespace gstab {

namespace {

using Kind = Parametrisation::Kind;

// Seed tags keep the sub-streams of one classification apart.
constexpr std::uint64_t kRungTag = 100;
constexpr std::uint64_t kReturnTag = 200;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Frame coefficient rho of the block U = X - rho Theta that the kernel
// updates, when the oracle can evaluate its tail.
std::optional<double> oracle_frame(const Parametrisation& k) {
  switch (k.kind) {
    case Kind::Centred:
      return 0.0;
    case Kind::NonCentred:
      return 1.0;
    case Kind::PartiallyCentred:
      return k.rho;
    default:
      return std::nullopt;
  }
}

}  // namespace

void DiagConfig::validate() const {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be non-negative");
  if (theta_ladder.empty()) throw InvalidArgument("theta ladder must not be empty");
  for (std::size_t i = 0; i < theta_ladder.size(); ++i) {
    if (!(theta_ladder[i] > 0.0)) throw InvalidArgument("theta ladder rungs must be positive");
    if (i > 0 && !(theta_ladder[i] > theta_ladder[i - 1])) {
      throw InvalidArgument("theta ladder must be strictly increasing");
    }
  }
  if (n_rep < 2) throw InvalidArgument("n_rep must be >= 2");
  if (!(mode_radius > 0.0)) throw InvalidArgument("mode_radius must be positive");
  if (!(ks_threshold > 0.0 && ks_threshold < 1.0)) throw InvalidArgument("ks_threshold must be in (0,1)");
  if (!(drift_threshold > 0.0 && drift_threshold < 1.0)) throw InvalidArgument("drift_threshold must be in (0,1)");
  if (!(ptip_eps > 0.0 && ptip_eps < 1.0)) throw InvalidArgument("ptip_eps must be in (0,1)");
  if (return_seeds < 1 || return_max_iter < 1) throw InvalidArgument("return-time settings must be positive");
  if (!(return_envelope > 0.0)) throw InvalidArgument("return_envelope must be positive");
  if (!(limit_tol > 0.0) || !(pull_min > 0.0)) throw InvalidArgument("limit_tol and pull_min must be positive");
  kernel.slice.validate();
}

std::vector<double> one_step_draws(const Parametrisation& kernel, const HierModel& model, double start,
                                   std::size_t n_rep, std::uint64_t seed, const KernelOptions& opts) {
  std::vector<double> out;
  out.reserve(n_rep);
  for (std::size_t r = 0; r < n_rep; ++r) {
    RngStream rng = RngStream::derive(seed, r);
    if (kernel.kind == Kind::Grouped) {
      ChainState s;
      s.theta = start;
      s.x.assign(model.m(), start);
      out.push_back(step(kernel, model, s, rng, opts).x[0]);
    } else {
      const ChainState s = initial_state(kernel, model, start, rng, opts);
      out.push_back(step(kernel, model, s, rng, opts).theta);
    }
  }
  return out;
}

DriftEstimate drift_ratio_from_draws(const std::vector<double>& draws, double theta0, double alpha) {
  if (draws.size() < 2) throw InvalidArgument("drift ratio needs at least two draws");
  std::vector<double> a(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) a[i] = alpha * (std::abs(draws[i]) - std::abs(theta0));
  const double log_ratio = log_mean_exp(a);
  const double ratio = std::exp(log_ratio);
  if (!std::isfinite(log_ratio)) return {ratio, std::numeric_limits<double>::infinity()};
  std::vector<double> rel(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) rel[i] = std::exp(a[i] - log_ratio);
  return {ratio, ratio * std_error(rel)};
}

DriftEstimate drift_ratio(const Parametrisation& kernel, const HierModel& model, double theta0, double alpha,
                          std::size_t n_rep, std::uint64_t seed, const KernelOptions& opts) {
  return drift_ratio_from_draws(one_step_draws(kernel, model, theta0, n_rep, seed, opts), theta0, alpha);
}

std::vector<IncrementTest> increment_stationarity(const Parametrisation& kernel, const HierModel& model,
                                                  const std::vector<double>& ladder, std::size_t n_rep,
                                                  std::uint64_t seed, const std::optional<LimitCdf>& limit,
                                                  const KernelOptions& opts) {
  if (ladder.size() < 2) throw InvalidArgument("increment stationarity needs at least two rungs");
  std::vector<IncrementTest> out;
  std::vector<double> prev;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    std::vector<double> inc = one_step_draws(kernel, model, ladder[k], n_rep, derive_seed(seed, kRungTag + k), opts);
    for (double& v : inc) v -= ladder[k];
    IncrementTest t{ladder[k], std::nullopt, std::nullopt};
    if (!prev.empty()) t.ks_prev = ks_two_sample(prev, inc);
    if (limit) t.ks_limit = ks_statistic(inc, *limit);
    out.push_back(t);
    prev = std::move(inc);
  }
  return out;
}

ReturnTimes return_time(const Parametrisation& kernel, const HierModel& model, double theta0, double radius,
                        std::size_t max_iter, std::size_t n_seeds, std::uint64_t seed, const KernelOptions& opts) {
  if (n_seeds < 1) throw InvalidArgument("return time needs at least one seed");
  ReturnTimes rt{theta0, 0.0, 0.0, 0.0, 0, {}};
  std::vector<double> t;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    std::size_t n = 0;
    if (std::abs(theta0) > radius) {
      RngStream rng = RngStream::derive(seed, s);
      ChainState st = initial_state(kernel, model, theta0, rng, opts);
      n = max_iter;
      bool hit = false;
      for (std::size_t i = 1; i <= max_iter; ++i) {
        st = step(kernel, model, st, rng, opts);
        if (std::abs(st.theta) <= radius) {
          n = i;
          hit = true;
          break;
        }
      }
      if (!hit) ++rt.n_censored;
    }
    rt.times.push_back(n);
    t.push_back(static_cast<double>(n));
  }
  rt.median = median(t);
  rt.q25 = quantile(t, 0.25);
  rt.q75 = quantile(t, 0.75);
  return rt;
}

StabilityReport classify(const Parametrisation& kernel, const HierModel& model, const DiagConfig& cfg,
                         std::uint64_t seed, const std::optional<LimitCdf>& limit) {
  cfg.validate();
  StabilityReport rep;
  rep.model_id = model.id();
  rep.kernel_id = kernel.id();
  rep.seed = seed;
  rep.config = cfg;
  const auto& ladder = cfg.theta_ladder;
  const double y0 = model.y_mean(0);

  std::vector<double> prev;
  std::vector<double> top_draws;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double t0 = ladder[k];
    std::vector<double> draws = one_step_draws(kernel, model, t0, cfg.n_rep, derive_seed(seed, kRungTag + k), cfg.kernel);
    const DriftEstimate d = drift_ratio_from_draws(draws, t0, cfg.alpha);
    rep.drift_curve.push_back({t0, d.ratio, d.se});
    std::vector<double> inc(draws);
    for (double& v : inc) v -= t0;
    IncrementTest it{t0, std::nullopt, std::nullopt};
    if (!prev.empty()) it.ks_prev = ks_two_sample(prev, inc);
    if (limit) it.ks_limit = ks_statistic(inc, *limit);
    rep.increment_tests.push_back(it);
    prev = std::move(inc);
    if (k + 1 == ladder.size()) top_draws = std::move(draws);
  }
  {
    std::vector<double> ratios(top_draws.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) ratios[i] = (top_draws[i] - y0) / (ladder.back() - y0);
    rep.tail_ratio_summary = {mean(ratios), quantile(ratios, 0.25), median(ratios), quantile(ratios, 0.75)};
  }

  std::ostringstream ev;
  const DriftPoint& top = rep.drift_curve.back();
  const bool rw_like = ladder.size() >= 2 && rep.increment_tests.back().ks_prev &&
                       *rep.increment_tests.back().ks_prev <= cfg.ks_threshold;
  const bool no_drift = top.ratio >= 1.0 - 2.0 * top.se;
  if (rw_like && no_drift) {
    rep.classification = Stability::NonGeometric;
    ev << "N: increments at the two largest rungs agree (KS " << fmt(*rep.increment_tests.back().ks_prev)
       << " <= " << fmt(cfg.ks_threshold) << ") and the drift ratio at " << fmt(top.theta0) << " is "
       << fmt(top.ratio) << " (se " << fmt(top.se) << "), not below 1";
    rep.evidence = ev.str();
    return rep;
  }

  // Tightness of the updated block, from the oracle.
  const std::optional<double> rho = oracle_frame(kernel);
  bool tight = false;
  std::string tight_note;
  if (!rho) {
    tight_note = "no oracle frame for kernel " + kernel.id();
  } else if (!model.is_simple()) {
    tight_note = "oracle tightness needs a single-observation model";
  } else {
    tight = true;
    for (double t0 : ladder) {
      double p = 0.0;
      for (double sgn : {1.0, -1.0}) {
        p = std::max(p, conditional_tail_prob_pc(model, sgn * t0, cfg.mode_radius, *rho).value);
      }
      rep.tail_probs.emplace_back(t0, p);
      if (p > 1.0 - cfg.ptip_eps) tight = false;
    }
  }
  if (tight) {
    const ReturnTimes rt = return_time(kernel, model, ladder.back(), cfg.mode_radius, cfg.return_max_iter,
                                       cfg.return_seeds, derive_seed(seed, kReturnTag), cfg.kernel);
    rep.return_times.push_back(rt);
    if (rt.median <= cfg.return_envelope) {
      rep.classification = Stability::Uniform;
      ev << "U: tail probability P(|U| > " << fmt(cfg.mode_radius) << ") stays <= " << fmt(1.0 - cfg.ptip_eps)
         << " on the ladder (max ";
      double mx = 0.0;
      for (const auto& [t, p] : rep.tail_probs) mx = std::max(mx, p);
      ev << fmt(mx) << ") and the median return time from " << fmt(ladder.back()) << " is " << fmt(rt.median);
      rep.evidence = ev.str();
      return rep;
    }
    ev << "tight, but median return time " << fmt(rt.median) << " exceeds the envelope " << fmt(cfg.return_envelope)
       << "; ";
  } else if (!tight_note.empty()) {
    ev << tight_note << "; ";
  } else {
    ev << "updated block not tight (tail probability reaches " << fmt(rep.tail_probs.back().second) << "); ";
  }

  rep.classification = Stability::Geometric;
  double worst = 0.0;
  for (const auto& d : rep.drift_curve) {
    if (d.theta0 > cfg.mode_radius) worst = std::max(worst, d.ratio);
  }
  ev << "G: increments ";
  if (rep.increment_tests.back().ks_prev) ev << "differ across rungs (KS " << fmt(*rep.increment_tests.back().ks_prev) << ")";
  if (!no_drift) ev << ", drift ratio " << fmt(top.ratio) << " at " << fmt(top.theta0);
  if (worst > cfg.drift_threshold) {
    ev << "; ambiguous: drift ratio " << fmt(worst) << " exceeds " << fmt(cfg.drift_threshold);
  }
  rep.evidence = ev.str();
  return rep;
}

PropertyReport property_check(const HierModel& model, const DiagConfig& cfg, const QuadConfig& qcfg) {
  if (!model.is_simple()) throw InvalidArgument("property_check needs a single-observation model");
  cfg.validate();
  PropertyReport r;
  r.ladder = cfg.theta_ladder;
  const double y = model.y_scalar();
  double dur = std::numeric_limits<double>::infinity();
  double pur = std::numeric_limits<double>::infinity();
  double max_p0 = 0.0, max_p1 = 0.0;
  for (double t : r.ladder) {
    r.rip_distance.push_back(cdf_distance(model, t, Frame::Centred, Reference::located(model.f1(), y), qcfg).value);
    r.rid_distance.push_back(cdf_distance(model, t, Frame::NonCentred, Reference::located(model.f2(), 0.0), qcfg).value);
    double p0 = 0.0, p1 = 0.0;
    for (double sgn : {1.0, -1.0}) {
      const double th = y + sgn * t;
      const double m = conditional_mean(model, th, qcfg).value;
      if (sgn > 0) r.conditional_means.push_back(m);
      dur = std::min(dur, std::abs(th) - std::abs(m));
      pur = std::min(pur, sgn * (m - y));
      p0 = std::max(p0, conditional_tail_prob(model, th, cfg.mode_radius, Frame::Centred, qcfg).value);
      p1 = std::max(p1, conditional_tail_prob(model, th, cfg.mode_radius, Frame::NonCentred, qcfg).value);
    }
    r.tail_p0.push_back(p0);
    r.tail_p1.push_back(p1);
    max_p0 = std::max(max_p0, p0);
    max_p1 = std::max(max_p1, p1);
  }
  r.dur_pull = dur;
  r.pur_pull = pur;
  r.rip = r.rip_distance.back() <= cfg.limit_tol;
  r.rid = r.rid_distance.back() <= cfg.limit_tol;
  r.dur = dur >= cfg.pull_min;
  r.pur = pur >= cfg.pull_min;
  r.ptip_p0 = max_p0 <= 1.0 - cfg.ptip_eps;
  r.ptip_p1 = max_p1 <= 1.0 - cfg.ptip_eps;
  return r;
}

}  // namespace gstab
