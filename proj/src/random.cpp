#include "pilotpbr/random.hpp"

namespace pilotpbr {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(mix(seed)) {}

Rng Rng::for_stream(std::uint64_t seed, std::uint64_t index) {
  Rng rng(0);
  // Hashing twice keeps stream seeds apart from plain Rng(seed) seeds.
  rng.engine_.seed(mix(mix(seed) ^ mix(~index)));
  return rng;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace pilotpbr
