#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "rclass/inference.hpp"
#include "rclass/kernels.hpp"

using namespace rclass;
using namespace rclass::kernels;

namespace {

std::vector<double> random_buffer(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Reassociation inside the vector loops moves the last few bits only.
bool close(double a, double b, double magnitude) {
  return std::abs(a - b) <= 1e-13 * std::max(1.0, magnitude);
}

struct IsaGuard {
  ~IsaGuard() { force_isa(cpu_supports_avx2() ? Isa::Avx2 : Isa::Scalar); }
};

}  // namespace

TEST_CASE("scalar table is always available") {
  const KernelTable& t = scalar_table();
  CHECK(t.isa == Isa::Scalar);
  const double a[3] = {1, 2, 3}, b[3] = {4, 5, 6};
  CHECK(t.dot(a, b, 3) == doctest::Approx(32.0));
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(isa_name(Isa::Avx2) == "avx2");
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* avx = avx2_table();
  if (avx == nullptr || !cpu_supports_avx2()) {
    MESSAGE("AVX2 variant not available on this host; equivalence not exercised");
    return;
  }
  const KernelTable& ref = scalar_table();
  std::mt19937_64 rng(7);

  // lengths straddle the 4-wide vector body and every tail size
  for (std::size_t n = 0; n <= 37; ++n) {
    CAPTURE(n);
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = random_buffer(rng, n, -2.0, 2.0);
      const auto b = random_buffer(rng, n, -2.0, 2.0);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(close(avx->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), mag));

      const auto c = random_buffer(rng, n, -1.0, 1.0);
      const auto w = random_buffer(rng, n, 0.0, 1.0);
      std::vector<double> o1(n), o2(n);
      avx->weighted_diff(a.data(), c.data(), w.data(), o1.data(), n);
      ref.weighted_diff(a.data(), c.data(), w.data(), o2.data(), n);
      CHECK(o1 == o2);

      std::vector<double> e1(2 * n + 1), e2(2 * n + 1);
      avx->chebyshev2(a.data(), n, e1.data());
      ref.chebyshev2(a.data(), n, e2.data());
      for (std::size_t i = 0; i < e1.size(); ++i) CHECK(close(e1[i], e2[i], 8.0));

      if (n > 0 && n <= 16) {
        const Matrix s = testing::random_spd(rng, static_cast<Eigen::Index>(n));
        double qmag = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) qmag += std::abs(a[i] * s(i, j) * a[j]);
        CHECK(close(avx->quad_form_sym(s.data(), a.data(), n),
                    ref.quad_form_sym(s.data(), a.data(), n), qmag));
      }
    }
  }
}

TEST_CASE("forcing the ISA switches the active table and results stay put") {
  IsaGuard restore;
  std::mt19937_64 rng(11);
  const Rule r = testing::make_rule(testing::random_vec(rng, 5), testing::random_spd(rng, 5), 3);
  const Vector x = testing::random_vec(rng, 5);
  const Vector lambda = testing::random_vec(rng, 5);

  force_isa(Isa::Scalar);
  CHECK(active().isa == Isa::Scalar);
  const double d_scalar = weighted_mahalanobis_sq(r, x, lambda);
  const Vector e_scalar = chebyshev_expand(x);

  force_isa(Isa::Avx2);
  const bool avx = avx2_table() != nullptr && cpu_supports_avx2();
  CHECK(active().isa == (avx ? Isa::Avx2 : Isa::Scalar));
  CHECK(weighted_mahalanobis_sq(r, x, lambda) == doctest::Approx(d_scalar).epsilon(1e-13));
  CHECK((chebyshev_expand(x) - e_scalar).cwiseAbs().maxCoeff() < 1e-15);
}
