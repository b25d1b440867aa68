#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gibbsstab/conditionals.hpp"
#include "gibbsstab/hier_model.hpp"

namespace gstab {

struct ChainState {
  double theta = 0.0;
  /// Random effects on the model scale, whatever the parametrisation.
  std::vector<double> x;
  /// Auxiliary precisions q_ij; only populated for the grouped kernel.
  std::vector<std::vector<double>> q;
};

struct KernelOptions {
  SliceConfig slice;
  QRate q_rate = QRate::Derived;
  /// Slice sweeps used for the initial X draw of a chain.
  int init_sweeps = 25;
};

/// Monitored output of one chain. `thetas[n]` is Theta after iteration n+1.
struct Trace {
  std::vector<double> thetas;
  std::vector<std::vector<double>> xs;  // empty unless recorded
  std::uint64_t seed = 0;
  std::string kernel_id;
  std::string model_id;
  std::size_t n_iter = 0;
  std::size_t burn_in = 0;
  double theta0 = 0.0;
  /// Kernel-specific run statistics (acceptance rates, tuned step sizes).
  std::map<std::string, double> stats;
};

/// Valid starting state: theta0 plus one conditional draw of X (and Q).
ChainState initial_state(const Parametrisation& kernel, const HierModel& model, double theta0, RngStream& rng,
                         const KernelOptions& opts = {});

/// One full Gibbs scan.
///
///  P0       x' ~ L(X | y, theta),            theta' ~ L(Theta | X = x')
///  P1       x~' = x' - theta,                 theta' ~ L(Theta | y, X~ = x~'), x = x~' + theta'
///  PC(rho)  u' = x' - rho theta,              theta' ~ L(Theta | y, U = u'),   x = u' + rho theta'
///  grouped  (theta', q') ~ L(Theta | X) L(Q | X, y), then x' ~ L(X | y, theta', q')
///  hybrid   a P0 scan with probability p_mix, a P1 scan otherwise
///
/// The grouped kernel needs Cauchy observation error and a Gaussian hidden
/// error. Conditional-sampler failures are rethrown with the kernel id.
ChainState step(const Parametrisation& kernel, const HierModel& model, const ChainState& state, RngStream& rng,
                const KernelOptions& opts = {});

/// Runs n_iter scans from theta0 with the stream RngStream::derive(seed, 0).
/// Deterministic in (kernel, model, theta0, n_iter, seed, opts).
Trace run_chain(const Parametrisation& kernel, const HierModel& model, double theta0, std::size_t n_iter,
                std::uint64_t seed, const KernelOptions& opts = {}, bool record_x = false, std::size_t chain_index = 0);

/// `iter,theta[,x_1..x_m]` with optional leading `# ` comment lines.
/// Values use the shortest round-trip decimal form.
void write_trace_csv(std::ostream& os, const Trace& trace, const std::vector<std::string>& comments = {});

std::string format_double(double v);

}  // namespace gstab
