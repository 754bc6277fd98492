#include "kanvmc/vmath.hpp"

#include <cmath>

namespace kanvmc::vmath {

namespace {

template <typename T>
void sin_kernel(const T* __restrict in, T* __restrict out, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(in[i]);
}

template <typename T>
void cos_kernel(const T* __restrict in, T* __restrict out, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(in[i]);
}

}  // namespace

void sin(const double* in, double* out, std::size_t n) { sin_kernel(in, out, n); }
void cos(const double* in, double* out, std::size_t n) { cos_kernel(in, out, n); }
void sin(const float* in, float* out, std::size_t n) { sin_kernel(in, out, n); }
void cos(const float* in, float* out, std::size_t n) { cos_kernel(in, out, n); }

}  // namespace kanvmc::vmath
