#pragma once

// Data-parallel inner loops used by the operator algebra and the integrator.
//
// Every kernel has a scalar reference implementation. Wider variants (AVX2+FMA
// on x86-64) are compiled into separate translation units and selected once at
// startup from the CPU feature flags. SEA_DYN_KERNELS=scalar|avx2|auto
// overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sea::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);
  // sum_i (err[i] / (atol + rtol * max(|y0[i]|, |y1[i]|)))^2
  double (*error_sq_sum)(const double* err, const double* y0, const double* y1, double atol,
                         double rtol, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the features.
const KernelTable* avx2_table();

// Tables usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

// The table chosen for this process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace sea::kernels
