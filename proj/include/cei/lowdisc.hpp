#pragma once

#include <cstdint>

#include "cei/common.hpp"

namespace cei {

// Scrambled Halton points in the unit cube, (n x dim) row-per-point.
// Scrambling is a seeded Cranley-Patterson rotation per dimension; the same
// (n, dim, seed) always yields the same matrix. skip shifts the sequence
// start (index 0 of the raw sequence is the origin and is always skipped).
Mat halton_unit(int n, int dim, std::uint64_t seed, int skip = 0);

}  // namespace cei
