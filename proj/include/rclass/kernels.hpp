#pragma once

// Data-parallel inner loops used by inference and learning.
//
// Every kernel has a portable scalar reference implementation. On x86-64 an
// AVX2/FMA variant is compiled into its own translation unit and selected at
// runtime when the CPU supports it. The two must agree to within a few ulps;
// tests/unit/test_kernels.cpp checks that on random inputs.

#include <cstddef>
#include <span>
#include <string_view>

namespace rclass::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // v^T A v for a symmetric n x n matrix A (layout-agnostic because A = A^T)
  double (*quad_form_sym)(const double* a, const double* v, std::size_t n);
  // out[i] = w[i] * (x[i] - c[i])
  void (*weighted_diff)(const double* x, const double* c, const double* w, double* out,
                        std::size_t n);
  // out = [1, x0, 2x0^2-1, x1, 2x1^2-1, ...], length 2n+1
  void (*chebyshev2)(const double* x, std::size_t n, double* out);
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports_avx2();

// The table used by the library. Chosen once from the CPU features; the
// RCLASS_ISA environment variable ("scalar" or "avx2") overrides the choice.
const KernelTable& active();

// Test hook: pin the active table. Falls back to scalar if `isa` is unavailable.
void force_isa(Isa isa);

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double quad_form_sym(std::span<const double> a, std::span<const double> v) {
  return active().quad_form_sym(a.data(), v.data(), v.size());
}

}  // namespace rclass::kernels
