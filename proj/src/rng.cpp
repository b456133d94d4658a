#include "ruinlab/rng.hpp"

#include <cmath>

namespace ruinlab {

Rng::Rng(std::uint64_t seed) noexcept {
  std::uint64_t state = seed;
  for (auto& word : s_) {
    state += 0x9e3779b97f4a7c15ULL;
    word = mix64(state);
  }
}

double Rng::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

}  // namespace ruinlab
