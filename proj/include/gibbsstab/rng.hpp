#pragma once

#include <cstdint>
#include <random>

namespace gstab {

/// A single random stream. One chain owns one stream; streams are never
/// shared between threads.
///
/// Independent streams are derived from a base seed and a stream index with
/// `RngStream::derive`: the pair is hashed through SplitMix64 and the four
/// resulting words seed a Mersenne twister through std::seed_seq. Chain k of
/// a run with seed s always uses `derive(s, k)`.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  static RngStream derive(std::uint64_t seed, std::uint64_t stream_index);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Exponential with rate 1.
  double exponential();
  /// Gamma(shape, rate = 1).
  double gamma(double shape);
  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Integer seed for sub-task `index` of a run seeded with `seed`, using the
/// same SplitMix64 mixing as RngStream::derive.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace gstab
