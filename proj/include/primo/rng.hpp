#pragma once

#include <cstdint>
#include <random>

namespace primo {

/// Purpose tags for derived random streams. Every random draw in the library
/// comes from a stream keyed by (root seed, purpose, index), so results do not
/// depend on evaluation order or threading.
enum class StreamPurpose : std::uint64_t {
  covariance = 1,
  association = 2,
  projection = 3,
  subsample = 4,
  design = 5,
  phenotype = 6,
  snp_selection = 7,
  test = 99,
};

/// Seeded Mersenne Twister with Gaussian helpers.
///
/// This is a statistical generator, not a cryptographic one. Noise drawn from
/// it is suitable for experiments and reproducible tests; a deployment that
/// needs a formal privacy guarantee must swap in a secure sampler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from a root seed through std::seed_seq.
  static Rng stream(std::uint64_t root_seed, StreamPurpose purpose, std::uint64_t index = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Deterministic child seed (used for per-trial seeds in sweeps).
std::uint64_t derive_seed(std::uint64_t root_seed, std::uint64_t index);

}  // namespace primo
