#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace spectral {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// character of the circle [0,1): e(x) = exp(2*pi*i*x)
inline cplx e(double x) {
  return {std::cos(two_pi * x), std::sin(two_pi * x)};
}

// input/spec validation failure; maps to CLI exit code 2
struct spec_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a cross-checked internal invariant failed; maps to CLI exit code 3
struct invariant_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// uniform double in [0,1) with a fixed, implementation-independent mapping
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace spectral
