#include "rclass/kernels.hpp"

namespace rclass::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double quad_form_scalar(const double* a, const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += v[i] * dot_scalar(a + i * n, v, n);
  }
  return acc;
}

void weighted_diff_scalar(const double* x, const double* c, const double* w, double* out,
                          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * (x[i] - c[i]);
}

void chebyshev2_scalar(const double* x, std::size_t n, double* out) {
  out[0] = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = x[j];
    out[1 + 2 * j] = v;
    out[2 + 2 * j] = 2.0 * v * v - 1.0;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar, &dot_scalar, &quad_form_scalar,
                                 &weighted_diff_scalar, &chebyshev2_scalar};
  return table;
}

}  // namespace rclass::kernels
