#pragma once

#include <cmath>
#include <cstddef>

namespace kanvmc::vmath {

// Elementwise kernels; `in` and `out` may not alias.
void sin(const double* in, double* out, std::size_t n);
void cos(const double* in, double* out, std::size_t n);
void sin(const float* in, float* out, std::size_t n);
void cos(const float* in, float* out, std::size_t n);

// Extended precision, used for reference evaluations.
inline void sin(const long double* in, long double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(in[i]);
}
inline void cos(const long double* in, long double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(in[i]);
}

}  // namespace kanvmc::vmath
