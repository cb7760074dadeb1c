#pragma once

#include <cstdint>
#include <random>

namespace pilotpbr {

// Seeded generator with a portable uniform draw. std::uniform_real_distribution
// is implementation-defined, so the [0,1) mapping is done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for sample `index` under `seed`. Used wherever work is
  // pre-assigned to indices so results do not depend on execution order.
  static Rng for_stream(std::uint64_t seed, std::uint64_t index);

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pilotpbr
