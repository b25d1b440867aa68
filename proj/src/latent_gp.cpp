#include "gibbsstab/latent_gp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gstab {

Eigen::MatrixXd build_ar1_cov(int p, double phi, double marginal_var) {
  if (p < 1) throw InvalidArgument("AR(1) covariance needs p >= 1");
  if (!(std::abs(phi) < 1.0)) throw InvalidArgument("AR(1) coefficient must satisfy |phi| < 1");
  if (!(marginal_var > 0.0)) throw InvalidArgument("AR(1) marginal variance must be positive");
  Eigen::MatrixXd s(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) s(i, j) = marginal_var * std::pow(phi, std::abs(i - j));
  }
  return s;
}

LgpModel::LgpModel(Eigen::MatrixXd sigma, Eigen::VectorXd y, ErrorDist f1)
    : sigma_(std::move(sigma)), y_(std::move(y)), f1_(f1) {
  if (y_.size() < 1) throw InvalidArgument("latent GP model needs p >= 1");
  if (sigma_.rows() != y_.size() || sigma_.cols() != y_.size()) {
    throw InvalidArgument("covariance is " + std::to_string(sigma_.rows()) + "x" + std::to_string(sigma_.cols()) +
                          " but y has length " + std::to_string(y_.size()));
  }
  if (!y_.allFinite() || !sigma_.allFinite()) throw InvalidArgument("latent GP inputs must be finite");
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sigma_.cwiseAbs().maxCoeff()) {
    throw InvalidArgument("covariance is not symmetric");
  }
  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success) throw InvalidArgument("covariance is not positive definite");
  ones_solve_ = llt_.solve(Eigen::VectorXd::Ones(y_.size()));
  ones_precision_ = ones_solve_.sum();
  if (!(ones_precision_ > 0.0)) throw InvalidArgument("covariance factorization is numerically singular");
}

Eigen::VectorXd LgpModel::simulate(const Eigen::MatrixXd& sigma, const ErrorDist& f1, double theta,
                                   std::uint64_t seed) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw InvalidArgument("covariance is not positive definite");
  RngStream rng = RngStream::derive(seed, 0);
  const Eigen::Index p = sigma.rows();
  Eigen::VectorXd xi(p);
  for (Eigen::Index i = 0; i < p; ++i) xi(i) = rng.normal();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(p, theta) + llt.matrixL() * xi;
  Eigen::VectorXd y(p);
  for (Eigen::Index i = 0; i < p; ++i) y(i) = x(i) + f1.sample(rng);
  return y;
}

double LgpModel::log_target(const Eigen::VectorXd& x, double theta) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y_.size(); ++i) s += f1_.log_density(y_(i) - x(i));
  const Eigen::VectorXd r = x.array() - theta;
  return s - 0.5 * r.dot(llt_.solve(r));
}

Eigen::VectorXd LgpModel::grad_log_target(const Eigen::VectorXd& x, double theta) const {
  const Eigen::VectorXd r = x.array() - theta;
  Eigen::VectorXd g = -llt_.solve(r);
  for (Eigen::Index i = 0; i < y_.size(); ++i) g(i) -= f1_.dlog_density(y_(i) - x(i));
  return g;
}

Eigen::VectorXd LgpModel::sample_prior_x(double theta, RngStream& rng) const {
  Eigen::VectorXd xi(y_.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
  return Eigen::VectorXd::Constant(y_.size(), theta) + llt_.matrixL() * xi;
}

std::string LgpModel::id() const {
  std::ostringstream os;
  os << "lgp(p=" << p() << ",f1=" << f1_.id() << ")";
  return os.str();
}

GaussianMoments theta_given_x_moments(const LgpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.p()) throw InvalidArgument("x has the wrong dimension");
  const Eigen::VectorXd sx = model.llt().solve(x);
  const double prec = model.ones_precision();
  return {sx.sum() / prec, 1.0 / prec};
}

GaussianMoments theta_given_x_moments(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& x) {
  if (sigma.rows() != x.size() || sigma.cols() != x.size()) throw InvalidArgument("x has the wrong dimension");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw Error("covariance factorization failed");
  const double prec = llt.solve(Eigen::VectorXd::Ones(x.size())).sum();
  const double num = llt.solve(x).sum();
  return {num / prec, 1.0 / prec};
}

double theta_given_x(const LgpModel& model, const Eigen::VectorXd& x, RngStream& rng) {
  const GaussianMoments m = theta_given_x_moments(model, x);
  return rng.normal(m.mean, std::sqrt(m.var));
}

double theta_given_x(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& x, RngStream& rng) {
  const GaussianMoments m = theta_given_x_moments(sigma, x);
  return rng.normal(m.mean, std::sqrt(m.var));
}

void MalaConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw InvalidArgument("MALA step size must be positive");
  if (n_inner < 1) throw InvalidArgument("MALA n_inner must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0)) throw InvalidArgument("MALA target_accept must be in (0,1)");
}

namespace {

std::string describe(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "[";
  const Eigen::Index n = std::min<Eigen::Index>(x.size(), 8);
  for (Eigen::Index i = 0; i < n; ++i) os << (i ? ", " : "") << x(i);
  if (x.size() > n) os << ", ...";
  os << "]";
  return os.str();
}

Eigen::VectorXd checked_grad(const LgpModel& model, const Eigen::VectorXd& x, double theta) {
  Eigen::VectorXd g = model.grad_log_target(x, theta);
  if (!g.allFinite()) throw Error("non-finite MALA gradient at x = " + describe(x));
  return g;
}

}  // namespace

MalaResult mala_block_update(const LgpModel& model, const Eigen::VectorXd& x0, double theta, const MalaConfig& cfg,
                             RngStream& rng) {
  cfg.validate();
  if (x0.size() != model.p()) throw InvalidArgument("x has the wrong dimension");
  const double eps = cfg.step_size;
  const double h = 0.5 * eps * eps;
  Eigen::VectorXd x = x0;
  double lp = model.log_target(x, theta);
  Eigen::VectorXd g = checked_grad(model, x, theta);
  int accepted = 0;
  Eigen::VectorXd xi(x.size());
  for (int k = 0; k < cfg.n_inner; ++k) {
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
    const Eigen::VectorXd prop = x + h * g + eps * xi;
    const double lp_prop = model.log_target(prop, theta);
    const Eigen::VectorXd g_prop = model.grad_log_target(prop, theta);
    double log_ratio = -std::numeric_limits<double>::infinity();
    if (std::isfinite(lp_prop) && g_prop.allFinite()) {
      const double fwd = (prop - x - h * g).squaredNorm();
      const double bwd = (x - prop - h * g_prop).squaredNorm();
      log_ratio = lp_prop - lp - (bwd - fwd) / (4.0 * h);
    }
    if (std::log(rng.uniform()) < log_ratio) {
      x = prop;
      lp = lp_prop;
      g = g_prop;
      ++accepted;
    }
  }
  return {x, static_cast<double>(accepted) / cfg.n_inner};
}

double lgp_step(const LgpModel& model, const Parametrisation& par, LgpState& state, const MalaConfig& mala,
                const SliceConfig& slice, RngStream& rng) {
  const MalaResult r = mala_block_update(model, state.x, state.theta, mala, rng);
  switch (par.kind) {
    case Parametrisation::Kind::Centred:
      state.x = r.x;
      state.theta = theta_given_x(model, state.x, rng);
      break;
    case Parametrisation::Kind::NonCentred: {
      const Eigen::VectorXd xt = r.x.array() - state.theta;
      const ErrorDist& f1 = model.f1();
      const Eigen::VectorXd& y = model.y();
      auto logf = [&](double t) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) s += f1.log_density(y(i) - xt(i) - t);
        return s;
      };
      const double width = slice.initial_width > 0.0 ? slice.initial_width : f1.scale();
      state.theta = slice_sweeps(logf, state.theta, width, slice, rng);
      state.x = xt.array() + state.theta;
      break;
    }
    default:
      throw InvalidArgument("latent GP chains support P0 and P1 only, got " + par.id());
  }
  return r.accept_rate;
}

Trace run_lgp_chain(const LgpModel& model, const Parametrisation& par, double theta0, const LgpRunConfig& cfg,
                    std::size_t n_iter, std::uint64_t seed, bool record_x, std::size_t chain_index) {
  if (n_iter < 1) throw InvalidArgument("n_iter must be >= 1");
  cfg.mala.validate();
  cfg.slice.validate();
  RngStream rng = RngStream::derive(seed, chain_index);
  LgpState state{theta0, model.sample_prior_x(theta0, rng)};
  MalaConfig mala = cfg.mala;

  Trace tr;
  tr.seed = seed;
  tr.kernel_id = par.id();
  tr.model_id = model.id();
  tr.n_iter = n_iter;
  tr.burn_in = std::min(cfg.tune_iter, n_iter);
  tr.theta0 = theta0;
  tr.thetas.reserve(n_iter);

  double log_eps = std::log(mala.step_size);
  double acc_sum = 0.0;
  std::size_t acc_n = 0;
  for (std::size_t n = 0; n < n_iter; ++n) {
    const double acc = lgp_step(model, par, state, mala, cfg.slice, rng);
    if (n < cfg.tune_iter) {
      // Robbins-Monro on log step size.
      log_eps += (acc - mala.target_accept) / std::pow(static_cast<double>(n) + 1.0, 0.6);
      mala.step_size = std::exp(log_eps);
    } else {
      acc_sum += acc;
      ++acc_n;
    }
    tr.thetas.push_back(state.theta);
    if (record_x) tr.xs.emplace_back(state.x.data(), state.x.data() + state.x.size());
  }
  tr.stats["mala_step_size"] = mala.step_size;
  tr.stats["mala_n_inner"] = mala.n_inner;
  tr.stats["mala_target_accept"] = mala.target_accept;
  if (acc_n > 0) tr.stats["mala_accept_rate"] = acc_sum / static_cast<double>(acc_n);
  return tr;
}

std::vector<double> lgp_one_step_draws(const LgpModel& model, const Parametrisation& par, double theta0,
                                       std::size_t n_rep, std::uint64_t seed, const MalaConfig& mala, int warmup,
                                       const SliceConfig& slice) {
  mala.validate();
  slice.validate();
  std::vector<double> out;
  out.reserve(n_rep);
  for (std::size_t r = 0; r < n_rep; ++r) {
    RngStream rng = RngStream::derive(seed, r);
    LgpState state{theta0, model.sample_prior_x(theta0, rng)};
    for (int k = 0; k < warmup; ++k) state.x = mala_block_update(model, state.x, theta0, mala, rng).x;
    lgp_step(model, par, state, mala, slice, rng);
    out.push_back(state.theta);
  }
  return out;
}

}  // namespace gstab
