#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "rclass/parameters.hpp"
#include "rclass/structure.hpp"

using namespace rclass;
using rclass::testing::make_rule;
using rclass::testing::vec;

TEST_CASE("local RLS") {
  Rule r = make_rule(vec({0.5, 0.5}), 0.2, 2);
  std::mt19937_64 rng(12);

  SUBCASE("a perfectly predicted target leaves the weights alone without decay") {
    r.out_weights.setRandom();
    const Matrix before = r.out_weights;
    const Vector xe = chebyshev_expand(vec({0.3, 0.7}));
    const Vector t = (xe.transpose() * r.out_weights).transpose();
    fwgrls_update(r, xe, 0.8, t, 1.0, 0.0);
    CHECK((r.out_weights - before).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("decay alone shrinks the weights") {
    r.out_weights.setConstant(2.0);
    r.out_cov = Matrix::Identity(5, 5);
    const Vector xe = chebyshev_expand(vec({0.3, 0.7}));
    const Vector t = (xe.transpose() * r.out_weights).transpose();
    const double before = r.out_weights.norm();
    fwgrls_update(r, xe, 1.0, t, 1.0, 0.1);
    CHECK(r.out_weights.norm() < before);
  }
  SUBCASE("the covariance stays symmetric positive definite") {
    std::uniform_real_distribution<double> f(1e-4, 1.0), lam(0.9, 1.0);
    for (int k = 0; k < 500; ++k) {
      const Vector xe = chebyshev_expand(testing::random_vec(rng, 2, -1, 1));
      fwgrls_update(r, xe, f(rng), testing::random_vec(rng, 2), lam(rng), 1e-3);
      REQUIRE(r.out_cov.allFinite());
      REQUIRE((r.out_cov - r.out_cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
      const Eigen::SelfAdjointEigenSolver<Matrix> es(r.out_cov);
      REQUIRE(es.eigenvalues().minCoeff() > 0.0);
    }
    CHECK(r.out_weights.allFinite());
  }
  SUBCASE("a noiseless linear target is recovered") {
    Matrix truth = Matrix::Zero(5, 2);
    truth.col(0) = vec({0.2, 1.0, 0.0, -0.5, 0.0});
    truth.col(1) = vec({-0.3, 0.0, 0.0, 0.8, 0.0});
    for (int k = 0; k < 400; ++k) {
      const Vector xe = chebyshev_expand(testing::random_vec(rng, 2, -1, 1));
      fwgrls_update(r, xe, 1.0, (xe.transpose() * truth).transpose(), 1.0, 0.0);
    }
    CHECK((r.out_weights - truth).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("Lyapunov bound") {
  CHECK(lyapunov_eta_bound(1, 1, 1) == doctest::Approx(2.0 * std::sqrt(std::numbers::pi)));
  CHECK(lyapunov_eta_bound(1, 1, 1) == doctest::Approx(3.5449).epsilon(1e-4));
  CHECK(lyapunov_eta_bound(10, 1, 1) == doctest::Approx(10 * lyapunov_eta_bound(1, 1, 1)));
  CHECK(lyapunov_eta_bound(1, 3, 1) == doctest::Approx(9 * lyapunov_eta_bound(1, 1, 1)));
}

TEST_CASE("learning-rate adaptation") {
  const HyperParams cfg;
  ZedmState s;
  s.eta = 0.01;
  s.f0_prev = 0.2;
  adapt_eta(s, 0.3, cfg, 1.0);
  CHECK(s.eta == doctest::Approx(0.011));
  CHECK(s.f0_prev == 0.3);

  s.eta = 0.01;
  adapt_eta(s, 0.1, cfg, 1.0);
  CHECK(s.eta == doctest::Approx(0.009));

  // a rising density cannot push eta past the bound
  s.A = 1000.0;
  s.n = 1;
  s.eta = 1.0;
  for (int k = 0; k < 50; ++k) {
    adapt_eta(s, 1.0 + k, cfg, 1.0);
    CHECK(s.eta < lyapunov_eta_bound(1.0, 1.0, 1000.0));
    CHECK(s.eta > 0.0);
  }
}

TEST_CASE("Parzen density at zero") {
  ZedmState s;
  CHECK(parzen_f0(s, 1.0) == 0.0);
  s.A = 4.0;
  s.n = 4;
  CHECK(parzen_f0(s, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
}

TEST_CASE("recurrent weights stay inside their clamp") {
  std::mt19937_64 rng(21);
  HyperParams cfg;
  cfg.eta_init = 5.0;
  for (double floor : {0.0, 0.5}) {
    cfg.gamma_floor = floor;
    ModelState m = ModelState::create(cfg, 2, 2);
    m.fweights.weights = Vector::Ones(2);
    for (std::uint64_t id = 1; id <= 3; ++id) {
      Rule r = make_rule(testing::random_vec(rng, 2), 0.3, 2, 0, 1.0, id);
      r.out_weights.setRandom();
      r.prev_temporal = testing::random_vec(rng, 2);
      m.rules.push_back(r);
    }
    for (int k = 0; k < 300; ++k) {
      const Vector x = testing::random_vec(rng, 2);
      const ForwardPass pass = forward(m, x);
      const Vector t = k % 2 ? vec({1.0, 0.0}) : vec({0.0, 1.0});
      zedm_update(m, pass, static_cast<std::size_t>(k % 3), t);
      for (const Rule& r : m.rules) {
        REQUIRE(r.rec_weights.minCoeff() >= floor);
        REQUIRE(r.rec_weights.maxCoeff() <= 1.0);
      }
    }
    CHECK(m.zedm.A > 0.0);
    CHECK(m.zedm.n == 300);
  }
}
