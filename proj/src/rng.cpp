#include "cei/rng.hpp"

#include <cmath>

namespace cei {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL))),
      increment_(splitmix64(stream) | 1ULL) {}

std::uint64_t CounterRng::next_u64() {
  state_ += increment_;
  return splitmix64(state_);
}

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  // 1-u keeps the log argument in (0, 1].
  const double u1 = 1.0 - next_double();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

Vec CounterRng::uniform_vec(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = next_double();
  return v;
}

Vec CounterRng::normal_vec(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = next_normal();
  return v;
}

std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag,
                            std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  for (char ch : tag) h = splitmix64(h ^ static_cast<std::uint64_t>(ch));
  return splitmix64(h ^ splitmix64(index));
}

}  // namespace cei
