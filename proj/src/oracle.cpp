#include "gibbsstab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

namespace gstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Geometric ladder of breakpoints c, c +- w 4^k out to `span`.
void add_ladder(std::vector<double>& pts, double c, double w, double span) {
  pts.push_back(c);
  for (double d = w; d <= span; d *= 4.0) {
    pts.push_back(c - d);
    pts.push_back(c + d);
  }
}

std::vector<double> finish_breaks(std::vector<double> pts, double a, double b) {
  std::vector<double> out;
  out.push_back(a);
  std::sort(pts.begin(), pts.end());
  for (double p : pts) {
    if (!(p > a && p < b)) continue;
    const double last = out.back();
    const double gap = 1e-12 * std::max({1.0, std::abs(p), std::abs(last)});
    if (std::isfinite(last) && p - last <= gap) continue;
    out.push_back(p);
  }
  if (std::isfinite(b) && out.size() > 1 && b - out.back() <= 1e-12 * std::max(1.0, std::abs(b))) out.pop_back();
  out.push_back(b);
  return out;
}

// Normalised result of num / z with first-order error propagation.
OracleValue ratio(const QuadResult& num, const QuadResult& z) {
  const double v = num.value / z.value;
  return {v, num.abs_error / z.value + std::abs(v) * z.abs_error / z.value};
}

void require_simple(const HierModel& model) {
  if (!model.is_simple()) throw InvalidArgument("the quadrature oracle needs a single-observation model");
}

}  // namespace

ConditionalDensity::ConditionalDensity(const HierModel& model, double theta, QuadConfig cfg)
    : f1_(model.f1()), f2_(model.f2()), y_(0.0), theta_(theta), cfg_(cfg) {
  require_simple(model);
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  y_ = model.y_scalar();
  const double s1 = f1_.scale();
  const double s2 = f2_.scale();
  const double smax = std::max(s1, s2);
  const double smin = std::min(s1, s2);
  tail_scale_ = smax;

  const double lo = std::min(y_, theta_);
  const double hi = std::max(y_, theta_);
  const double mid = 0.5 * (lo + hi);
  auto rel = [&](double x) { return f1_.log_density_diff(y_ - x, y_ - mid) + f2_.log_density_diff(x - theta_, mid - theta_); };

  double mode = mid;
  if (hi > lo) {
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -rel(x); }, lo, hi, 52);
    mode = r.first;
  }
  xref_ = mode;
  for (double c : {y_, theta_}) {
    if (rel(c) > rel(xref_)) xref_ = c;
  }
  log_ref_ = f1_.log_density(y_ - xref_) + f2_.log_density(xref_ - theta_);

  // Curvature width at the mode, from a second difference.
  const double delta = 1e-3 * smin;
  auto relm = [&](double x) { return f1_.log_density_diff(y_ - x, y_ - mode) + f2_.log_density_diff(x - theta_, mode - theta_); };
  const double curv = -(relm(mode + delta) + relm(mode - delta)) / (delta * delta);
  double wmode = curv > 0.0 ? 1.0 / std::sqrt(curv) : smax;
  wmode = std::clamp(wmode, 1e-9 * smax, smax);

  const double span = (hi - lo) + 40.0 * smax;
  std::vector<double> pts;
  add_ladder(pts, y_, s1, span);
  add_ladder(pts, theta_, s2, span);
  add_ladder(pts, mode, wmode, span);
  breaks_ = finish_breaks(std::move(pts), -kInf, kInf);

  z_ = integrate_range([](double) { return 1.0; }, -kInf, kInf);
  if (!(z_.value > 0.0)) throw QuadratureError("conditional density integrated to zero", kInf);
}

double ConditionalDensity::scaled_density(double x) const {
  return std::exp(f1_.log_density_diff(y_ - x, y_ - xref_) + f2_.log_density_diff(x - theta_, xref_ - theta_));
}

double ConditionalDensity::log_density(double x) const {
  return f1_.log_density_diff(y_ - x, y_ - xref_) + f2_.log_density_diff(x - theta_, xref_ - theta_) -
         std::log(z_.value);
}

OracleValue ConditionalDensity::normalizer() const {
  const double scale = std::exp(log_ref_);
  return {scale * z_.value, scale * z_.abs_error};
}

QuadResult ConditionalDensity::integrate_range(const Integrand& g, double a, double b, double abs_tol) const {
  if (!(a < b)) return {};
  std::vector<double> pts;
  pts.push_back(a);
  for (double p : breaks_) {
    if (p > a && p < b) pts.push_back(p);
  }
  pts.push_back(b);
  QuadConfig cfg = cfg_;
  cfg.abs_tol = std::max(cfg.abs_tol, abs_tol);
  return integrate([&](double x) { return g(x) * scaled_density(x); }, pts, cfg, tail_scale_);
}

QuadResult ConditionalDensity::expect(const Integrand& h, double a, double b, double abs_floor) const {
  const QuadResult r = integrate_range(h, a, b, abs_floor * z_.value);
  const OracleValue v = ratio(r, z_);
  return {v.value, v.est_error, r.intervals};
}

double ConditionalDensity::mass(double a, double b) const {
  return expect([](double) { return 1.0; }, a, b).value;
}

OracleValue ConditionalDensity::mean() const {
  const double c = xref_;
  const double l1 = expect([c](double x) { return std::abs(x - c); }).value;
  const QuadResult r = expect([c](double x) { return x - c; }, -kInf, kInf, cfg_.rel_tol * l1);
  return {c + r.value, r.abs_error};
}

double ConditionalDensity::cdf(double x) const {
  if (x <= xref_) return mass(-kInf, x);
  return 1.0 - mass(x, kInf);
}

std::vector<double> ConditionalDensity::cdf_sorted(std::span<const double> points) const {
  std::vector<double> out;
  out.reserve(points.size());
  if (points.empty()) return out;
  // Accumulate from both ends towards the reference point so that each side
  // keeps small absolute error in its own tail.
  std::size_t split = 0;
  while (split < points.size() && points[split] <= xref_) ++split;
  out.assign(points.size(), 0.0);
  double acc = 0.0;
  double prev = -kInf;
  for (std::size_t i = 0; i < split; ++i) {
    acc += mass(prev, points[i]);
    out[i] = acc;
    prev = points[i];
  }
  acc = 0.0;
  prev = kInf;
  for (std::size_t i = points.size(); i-- > split;) {
    acc += mass(points[i], prev);
    out[i] = 1.0 - acc;
    prev = points[i];
  }
  return out;
}

double ConditionalDensity::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must be in (0,1)");
  const double s = tail_scale_;
  double lo = xref_ - s;
  double hi = xref_ + s;
  while (cdf(lo) > p) lo = xref_ - 2.0 * (xref_ - lo);
  while (cdf(hi) < p) hi = xref_ + 2.0 * (hi - xref_);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)}); ++it) {
    const double m = 0.5 * (lo + hi);
    (cdf(m) < p ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

OracleValue normalizing_constant(const HierModel& model, double theta, const QuadConfig& cfg) {
  return ConditionalDensity(model, theta, cfg).normalizer();
}

OracleValue conditional_mean(const HierModel& model, double theta, const QuadConfig& cfg) {
  return ConditionalDensity(model, theta, cfg).mean();
}

OracleValue conditional_tail_prob(const HierModel& model, double theta, double k, Frame frame, const QuadConfig& cfg) {
  return conditional_tail_prob_pc(model, theta, k, frame == Frame::Centred ? 0.0 : 1.0, cfg);
}

OracleValue conditional_tail_prob_pc(const HierModel& model, double theta, double k, double rho,
                                     const QuadConfig& cfg) {
  if (!(k >= 0.0)) throw InvalidArgument("tail radius k must be non-negative");
  const ConditionalDensity cd(model, theta, cfg);
  const double c = rho * theta;
  if (k == 0.0) return {1.0, 0.0};
  const QuadResult inner = cd.expect([](double) { return 1.0; }, c - k, c + k);
  if (inner.value < 0.5) return {1.0 - inner.value, inner.abs_error};
  const QuadResult lower = cd.expect([](double) { return 1.0; }, -kInf, c - k);
  const QuadResult upper = cd.expect([](double) { return 1.0; }, c + k, kInf);
  return {lower.value + upper.value, lower.abs_error + upper.abs_error};
}

MarginalPosterior::MarginalPosterior(const HierModel& model, QuadConfig cfg)
    : model_(model), inner_cfg_(cfg), outer_cfg_(cfg), y_(0.0), log_ref_(0.0), scale_(1.0) {
  require_simple(model);
  y_ = model.y_scalar();
  scale_ = std::max(model.f1().scale(), model.f2().scale());
  outer_cfg_.rel_tol = std::max(cfg.rel_tol * 100.0, 1e-8);
  log_ref_ = log_c(y_);
  try {
    const QuadResult r = integrate_c(-kInf, kInf);
    total_ = {r.value, r.abs_error};
  } catch (const QuadratureError& e) {
    throw Error(std::string("marginal posterior normaliser did not converge (improper posterior?): ") + e.what());
  }
  if (!std::isfinite(total_.value) || !(total_.value > 0.0)) {
    throw Error("marginal posterior normaliser is not finite and positive");
  }
}

double MarginalPosterior::log_c(double theta) const {
  const double d = model_.y_scalar() - theta;
  const ErrorDist& f1 = model_.f1();
  const ErrorDist& f2 = model_.f2();
  // For symmetric unimodal errors c_theta <= f1(d/2) + f2(d/2): skip the
  // inner quadrature where that bound is negligible.
  const double bound = std::log(f1.density(0.5 * d) + f2.density(0.5 * d));
  if (bound - log_ref_ < -700.0) return -kInf;
  // Far out, the density of Z1 + Z2 is the sum of the two heavy tails.
  if (std::abs(d) > 1e8 * scale_) return std::log(f1.density(d) + f2.density(d));
  return ConditionalDensity(model_, theta, inner_cfg_).log_normalizer();
}

double MarginalPosterior::density(double theta) const {
  return std::exp(log_c(theta) - log_ref_) / total_.value;
}

QuadResult MarginalPosterior::integrate_c(double a, double b) const {
  if (!(a < b)) return {};
  constexpr double kLadderSpan = 1e6;
  std::vector<double> pts;
  add_ladder(pts, y_, scale_, kLadderSpan * scale_);
  const std::vector<double> br = finish_breaks(std::move(pts), a, b);
  // Beyond the ladder c_theta decays like a power of |theta|; a tangent map
  // scaled to the last rung keeps that mass where the rule can see it.
  double tail = kLadderSpan * scale_;
  if (std::isfinite(a)) tail = std::max(tail, std::abs(a - y_));
  if (std::isfinite(b)) tail = std::max(tail, std::abs(b - y_));
  return integrate([&](double t) { return std::exp(log_c(t) - log_ref_); }, br, outer_cfg_, tail);
}

OracleValue MarginalPosterior::tail_prob(double a) const {
  if (!(a >= 0.0)) throw InvalidArgument("tail threshold must be non-negative");
  if (a == 0.0) return {1.0, 0.0};
  const QuadResult z{total_.value, total_.est_error, 0};
  const QuadResult inner = integrate_c(-a, a);
  const OracleValue in = ratio(inner, z);
  if (in.value < 0.5) return {1.0 - in.value, in.est_error};
  QuadResult tails = integrate_c(-kInf, -a);
  const QuadResult up = integrate_c(a, kInf);
  tails.value += up.value;
  tails.abs_error += up.abs_error;
  return ratio(tails, z);
}

double MarginalPosterior::cdf(double t) const {
  const QuadResult z{total_.value, total_.est_error, 0};
  if (t <= y_) return ratio(integrate_c(-kInf, t), z).value;
  return 1.0 - ratio(integrate_c(t, kInf), z).value;
}

MarginalPosterior::Table MarginalPosterior::tabulate(double lo, double hi, int n) const {
  if (n < 2 || !(lo < hi)) throw InvalidArgument("tabulation needs n >= 2 and lo < hi");
  Table t;
  t.theta.resize(static_cast<std::size_t>(n));
  t.cdf.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.theta[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  double acc = cdf(lo);
  t.cdf[0] = acc;
  for (std::size_t i = 1; i < t.theta.size(); ++i) {
    acc += integrate_c(t.theta[i - 1], t.theta[i]).value / total_.value;
    t.cdf[i] = std::min(acc, 1.0);
  }
  return t;
}

double MarginalPosterior::Table::cdf_at(double t) const {
  if (t <= theta.front()) return cdf.front();
  if (t >= theta.back()) return cdf.back();
  const auto it = std::upper_bound(theta.begin(), theta.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - theta.begin());
  const double w = (t - theta[i - 1]) / (theta[i] - theta[i - 1]);
  return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
}

double MarginalPosterior::Table::quantile(double p) const {
  if (p <= cdf.front()) return theta.front();
  if (p >= cdf.back()) return theta.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), p);
  const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  const double span = cdf[i] - cdf[i - 1];
  const double w = span > 0.0 ? (p - cdf[i - 1]) / span : 0.5;
  return theta[i - 1] + w * (theta[i] - theta[i - 1]);
}

OracleValue marginal_tail_prob(const HierModel& model, double a, const QuadConfig& cfg) {
  if (!(a >= 0.0)) throw InvalidArgument("tail threshold must be non-negative");
  if (a == 0.0) return {1.0, 0.0};
  return MarginalPosterior(model, cfg).tail_prob(a);
}

double gaussian_rate(double sigma1, double sigma2, double rho) {
  if (!(sigma1 > 0.0 && sigma2 > 0.0)) throw InvalidArgument("scales must be positive");
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("rho must be in [0,1]");
  const double k = sigma2 * sigma2 / (sigma2 * sigma2 + sigma1 * sigma1);
  const double num = rho - (1.0 - k);
  return num * num / (rho * rho * k + (1.0 - rho) * (1.0 - rho) * (1.0 - k));
}

OracleValue cdf_distance(const HierModel& model, double theta, Frame frame, const Reference& ref,
                         const QuadConfig& cfg) {
  constexpr int kGrid = 512;
  const ConditionalDensity cd(model, theta, cfg);
  const double shift = frame == Frame::Centred ? 0.0 : theta;
  std::vector<double> pts(kGrid);
  std::vector<double> fref(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double p = (i + 0.5) / kGrid;
    const auto k = static_cast<std::size_t>(i);
    if (ref.dist) {
      pts[k] = ref.location + ref.dist->quantile(p);
      fref[k] = ref.dist->cdf(pts[k] - ref.location);
    } else {
      pts[k] = cd.quantile(p) - shift;
      fref[k] = p;
    }
  }
  if (!ref.dist) {
    // The reference is the conditional law itself.
    std::vector<double> x(pts);
    for (double& v : x) v += shift;
    const std::vector<double> f = cd.cdf_sorted(x);
    double d = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(f[i] - cd.cdf(x[i])));
    return {d, 1e2 * cfg.rel_tol};
  }
  std::vector<double> x(pts);
  for (double& v : x) v += shift;
  const std::vector<double> f = cd.cdf_sorted(x);
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(f[i] - fref[i]));
  return {d, 1e2 * cfg.rel_tol};
}

double ge_limit_mean(double y, double sigma1, double sigma2) {
  if (!(sigma1 > 0.0 && sigma2 > 0.0)) throw InvalidArgument("scales must be positive");
  return y + sigma1 * sigma1 / sigma2;
}

double ll_limit_weight(double sigma1, double sigma2, double beta) {
  if (!(sigma1 > 0.0 && sigma2 > 0.0)) throw InvalidArgument("scales must be positive");
  if (!(beta > 1.0)) throw InvalidArgument("beta must exceed 1");
  const double a = beta / (beta - 1.0);
  const double p1 = std::pow(sigma1, a);
  const double p2 = std::pow(sigma2, a);
  return p1 / (p1 + p2);
}

double ee_limit_shift(double sigma1, double sigma2) {
  if (!(sigma1 > sigma2 && sigma2 > 0.0)) throw InvalidArgument("the limit needs sigma1 > sigma2 > 0");
  return -2.0 * sigma1 * sigma2 * sigma2 / (sigma1 * sigma1 - sigma2 * sigma2);
}

}  // namespace gstab
