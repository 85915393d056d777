#include "sea/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace sea::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

double error_sq_sum_scalar(const double* err, const double* y0, const double* y1, double atol,
                           double rtol, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / scale;
    sum += q * q;
  }
  return sum;
}

constexpr KernelTable kScalar{"scalar", dot_scalar, axpy_scalar, gemv_scalar, error_sq_sum_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace sea::kernels
