#pragma once

#include <cmath>

namespace cei {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;
inline constexpr double kInvSqrt2 = 0.7071067811865475244;

inline double norm_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// CDF through erfc: accurate far into the tails, which matters because
// Phi(-B_c) shows up in bound denominators. Underflows to exactly 0/1 only
// past |z| ~ 38 where double has nothing left to represent.
inline double norm_cdf(double z) {
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

}  // namespace cei
