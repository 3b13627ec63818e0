#include "primo/rng.hpp"

#include <vector>

namespace primo {
namespace {

std::mt19937_64 seeded_engine(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> halves;
  halves.reserve(2 * words.size());
  for (std::uint64_t w : words) {
    halves.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    halves.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(halves.begin(), halves.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded_engine({seed})) {}

Rng Rng::stream(std::uint64_t root_seed, StreamPurpose purpose, std::uint64_t index) {
  Rng rng(0);
  rng.engine_ = seeded_engine({root_seed, static_cast<std::uint64_t>(purpose), index});
  return rng;
}

std::uint64_t derive_seed(std::uint64_t root_seed, std::uint64_t index) {
  auto engine = seeded_engine({root_seed, 0x5eedULL, index});
  return engine();
}

}  // namespace primo
