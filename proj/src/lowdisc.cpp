#include "cei/lowdisc.hpp"

#include <cmath>
#include <vector>

#include "cei/rng.hpp"

namespace cei {

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  primes.reserve(count);
  int candidate = 2;
  while (static_cast<int>(primes.size()) < count) {
    bool is_prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(candidate);
    ++candidate;
  }
  return primes;
}

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return value;
}

}  // namespace

Mat halton_unit(int n, int dim, std::uint64_t seed, int skip) {
  require(n >= 0 && dim >= 1, "halton_unit: need n >= 0, dim >= 1");
  const auto primes = first_primes(dim);
  CounterRng rng(derive_stream(seed, "halton"));
  Vec shift = rng.uniform_vec(dim);
  Mat pts(n, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < n; ++i) {
      double u = radical_inverse(static_cast<std::uint64_t>(i + skip + 1),
                                 primes[j]) +
                 shift[j];
      pts(i, j) = u - std::floor(u);
    }
  }
  return pts;
}

}  // namespace cei
