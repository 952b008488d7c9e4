#pragma once

#include <cstdint>
#include <string_view>

#include "cei/common.hpp"

namespace cei {

// Counter-based generator built on the splitmix64 finalizer. Output depends
// only on (seed, stream, counter), so any draw can be reproduced without
// replaying the sequence and the same numbers come out on every platform.
// std::normal_distribution is implementation-defined; this is not.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  double next_double();  // uniform [0, 1)
  double next_normal();  // Box-Muller, two uniforms per draw

  Vec uniform_vec(int n);
  Vec normal_vec(int n);

 private:
  std::uint64_t state_;
  std::uint64_t increment_;
};

// Stable stream derivation for naming independent substreams
// ("init", "pool", ...) of one seed.
std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag,
                            std::uint64_t index = 0);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cei
