#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "rclass/errors.hpp"
#include "rclass/structure.hpp"

using namespace rclass;
using rclass::testing::make_rule;
using rclass::testing::vec;

namespace {

ModelState blank(int C, int u, HyperParams cfg = {}) { return ModelState::create(cfg, C, u); }

bool bit_identical(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("coverage threshold and volumes") {
  // chi2 with 1 dof at 0.95 is 3.8415
  CHECK(coverage_threshold(1, 0.05) == doctest::Approx(std::exp(-3.841458820694124)));
  CHECK(coverage_threshold(4, 0.05) < coverage_threshold(1, 0.05));
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 / 3.0 * std::numbers::pi));
  // Sigma = diag(4, 9): sqrt(det) = 6
  Matrix inv(2, 2);
  inv << 0.25, 0.0, 0.0, 1.0 / 9.0;
  CHECK(volume_from_inv_cov(inv) == doctest::Approx(6.0 * std::numbers::pi));
  Matrix bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(volume_from_inv_cov(bad), SingularCovariance);
}

TEST_CASE("distance-based check") {
  ModelState m = blank(2, 2);
  const Matrix small = Matrix::Identity(2, 2) * 100.0;  // radius 0.1
  const Matrix large = Matrix::Identity(2, 2) * 4.0;    // radius 0.5
  CHECK(ds_check(m, small));
  m.rules.push_back(make_rule(vec({0.5, 0.5}), 0.3, 2, 0));
  CHECK(ds_check(m, large));
  CHECK_FALSE(ds_check(m, small));
  // only rules of the asked class count; a class without rules passes
  CHECK(ds_check(m, small, 1));
  CHECK_FALSE(ds_check(m, small, 0));
}

TEST_CASE("data quality") {
  DQState s;
  const Matrix A = Matrix::Identity(2, 2);
  CHECK(dq_update(s, vec({0.3, 0.4}), A) == 1.0);
  // a sample is folded in when the next one arrives
  CHECK(s.U == 0.0);
  dq_update(s, vec({0.3, 0.4}), A);
  CHECK(s.U == doctest::Approx(1.0));
  // one stored point, evaluated on itself: radicand (1 + |x|^2) - 2|x|^2 + |x|^2 = 1
  CHECK(dq_at(s, vec({0.3, 0.4}), A) == doctest::Approx(1.0));
  // (6, 8): 101 - 10 + 0.25
  CHECK(dq_at(s, vec({6.0, 8.0}), A) == doctest::Approx(std::sqrt(1.0 / 91.25)));
  CHECK(s.U == doctest::Approx(1.0));
  CHECK_FALSE(s.clamped);
}

TEST_CASE("class potential") {
  ClassPotentialState s;
  s.cb.assign(2, 0.0);
  s.dd.assign(2, Vector::Zero(2));
  s.count.assign(2, 0.0);
  CHECK(class_potential(s, vec({0.2, 0.2}), 0) == 0.0);
  class_potential_ingest(s, vec({0.2, 0.2}), 0);
  CHECK(class_potential(s, vec({0.2, 0.2}), 0) == doctest::Approx(1.0));
  CHECK(class_potential(s, vec({0.9, 0.9}), 0) < 1.0);
  CHECK(class_potential(s, vec({0.2, 0.2}), 1) == 0.0);
}

TEST_CASE("new rule initialisation") {
  SUBCASE("the first rule sits on the sample with the configured radius") {
    HyperParams cfg;
    cfg.initial_radius = 0.5;
    cfg.max_radius = 0.5;
    ModelState m = blank(3, 2, cfg);
    Placement p{};
    const Rule r = init_new_rule(m, vec({0.5, 0.5}), 2, &p);
    CHECK(p == Placement::First);
    CHECK(r.centroid == vec({0.5, 0.5}));
    CHECK(r.inv_cov(0, 0) == doctest::Approx(4.0));
    CHECK(r.inv_cov(1, 1) == doctest::Approx(4.0));
    CHECK(r.inv_cov(0, 1) == 0.0);
    CHECK(r.class_support[2] == 1.0);
    CHECK(r.support == 1.0);
    CHECK(r.rec_weights == Vector::Constant(3, cfg.gamma_init));
  }
  SUBCASE("a sample away from all rules gets its own cluster") {
    ModelState m = blank(2, 2);
    m.fweights.weights = Vector::Ones(2);
    m.rules.push_back(make_rule(vec({0.1, 0.1}), 0.05, 2, 0));
    Placement p{};
    const Rule r = init_new_rule(m, vec({0.9, 0.9}), 1, &p);
    CHECK(p == Placement::NonOverlap);
    CHECK(r.centroid == vec({0.9, 0.9}));
    // 0.5 * 0.8 = 0.4 per axis, inside [min_radius, max_radius]
    CHECK(r.inv_cov(0, 0) == doctest::Approx(1.0 / 0.16));
  }
  SUBCASE("spreads are clamped to the configured radii") {
    ModelState m = blank(2, 1);
    m.fweights.weights = Vector::Ones(1);
    m.rules.push_back(make_rule(vec({0.0}), 0.01, 2, 0));
    const Rule far = init_new_rule(m, vec({10.0}), 1);
    CHECK(far.inv_cov(0, 0) == doctest::Approx(1.0 / (0.5 * 0.5)));
  }
}

TEST_CASE("winner adaptation") {
  SUBCASE("a sample on the centre only rescales the inverse covariance") {
    std::mt19937_64 rng(2);
    Rule r = make_rule(vec({0.4, 0.6}), testing::random_spd(rng, 2), 2, 0, 3.0);
    const Matrix before = r.inv_cov;
    adapt_winner(r, vec({0.4, 0.6}), 1);
    const double alpha = 1.0 / 4.0;
    CHECK(r.centroid == vec({0.4, 0.6}));
    CHECK((r.inv_cov - before / (1.0 - alpha)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.support == 4.0);
    CHECK(r.class_support[1] == 1.0);
    CHECK(r.class_support[0] == 3.0);
  }
  SUBCASE("one prior sample: the centroid moves to the mean") {
    Rule r = make_rule(vec({0.0}), 1.0, 2);
    adapt_winner(r, vec({1.0}), 0);
    CHECK(r.centroid[0] == doctest::Approx(0.5));
  }
  SUBCASE("the result stays positive definite") {
    std::mt19937_64 rng(8);
    Rule r = make_rule(vec({0.5, 0.5, 0.5}), 0.2, 2);
    for (int k = 0; k < 300; ++k) {
      adapt_winner(r, testing::random_vec(rng, 3), k % 2);
      REQUIRE(is_spd(r.inv_cov));
    }
    CHECK(r.support == doctest::Approx(301.0));
  }
}

TEST_CASE("ERS pruning") {
  SUBCASE("a lone rule is never pruned") {
    ModelState m = blank(2, 1);
    m.rules.push_back(make_rule(vec({0.5}), 0.2, 2));
    m.rules[0].age = 1000;
    for (int k = 0; k < 50; ++k) CHECK_FALSE(ers_update(m).has_value());
  }
  SUBCASE("a rule whose consequents collapse to zero is pruned") {
    ModelState m = blank(2, 1);
    m.config.prune_grace = 0;
    m.rules.push_back(make_rule(vec({0.3}), 0.2, 2, 0, 1.0, 1));
    m.rules.push_back(make_rule(vec({0.7}), 0.2, 2, 0, 1.0, 2));
    m.rules[0].out_weights.setConstant(1.0);
    m.rules[1].out_weights.setConstant(1.0);
    for (int k = 0; k < 5; ++k) CHECK_FALSE(ers_update(m).has_value());
    m.rules[1].out_weights.setZero();
    const auto victim = ers_update(m);
    REQUIRE(victim.has_value());
    CHECK(*victim == 1);
  }
  SUBCASE("identical rules with identical histories survive") {
    ModelState m = blank(2, 1);
    m.config.prune_grace = 0;
    m.rules.push_back(make_rule(vec({0.5}), 0.2, 2, 0, 1.0, 1));
    m.rules.push_back(make_rule(vec({0.5}), 0.2, 2, 0, 1.0, 2));
    for (int k = 0; k < 20; ++k) {
      for (Rule& r : m.rules) r.out_weights.setConstant(1.0 + 0.01 * k);
      CHECK_FALSE(ers_update(m).has_value());
    }
    CHECK(m.rules[0].ers.mean == m.rules[1].ers.mean);
  }
  SUBCASE("the only rule of a class is exempt") {
    ModelState m = blank(2, 1);
    m.config.prune_grace = 0;
    m.rules.push_back(make_rule(vec({0.3}), 0.2, 2, 0, 1.0, 1));
    m.rules.push_back(make_rule(vec({0.7}), 0.2, 2, 1, 1.0, 2));
    for (Rule& r : m.rules) r.out_weights.setConstant(1.0);
    for (int k = 0; k < 5; ++k) ers_update(m);
    m.rules[1].out_weights.setZero();
    CHECK(sole_class_carrier(m.rules, 1));
    CHECK_FALSE(ers_update(m).has_value());
  }
}

TEST_CASE("P+ potential") {
  const Vector ones = Vector::Ones(1);
  Rule r = make_rule(vec({0.0}), 1.0, 2);
  CHECK(pplus_update(r, vec({0.0}), ones) == doctest::Approx(1.0));
  Rule s = make_rule(vec({0.0}), 1.0, 2);
  // d = 4: 1 / sqrt(1 + 4/2)
  CHECK(pplus_update(s, vec({2.0}), ones) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(s.pplus.prev_value == 1.0);
  CHECK(s.pplus.n_obs == 1);

  // samples drifting away drive the potential down and flag the decline
  Rule t = make_rule(vec({0.0}), 1.0, 2);
  for (int k = 0; k < 20; ++k) pplus_update(t, vec({0.01 * (k % 3)}), ones);
  bool flagged = false;
  for (int k = 0; k < 5; ++k) {
    pplus_update(t, vec({5.0}), ones);
    flagged = flagged || t.pplus.declining;
  }
  CHECK(flagged);
  t.age = 0;
  CHECK_FALSE(pplus_declining(t, 10));
}

TEST_CASE("archive and recall") {
  ModelState m = blank(2, 2);
  std::mt19937_64 rng(6);
  for (std::uint64_t id = 1; id <= 3; ++id) {
    Rule r = make_rule(testing::random_vec(rng, 2), testing::random_spd(rng, 2), 2, 0, 5.0, id);
    r.out_weights.setRandom();
    r.rec_weights = testing::random_vec(rng, 2);
    m.rules.push_back(r);
  }
  const Rule kept = m.rules[1];
  archive_rule(m, 1);
  REQUIRE(m.rules.size() == 2);
  REQUIRE(m.archive.size() == 1);
  m.archive[0].pplus.value = 0.9;
  m.archive[0].age = 77;
  m.archive[0].ers.push(3.0);

  CHECK_FALSE(recall_check(m, 0.95).has_value());
  CHECK_FALSE(recall_check(m, 0.5, {kept.id}).has_value());
  const auto idx = recall_check(m, 0.5);
  REQUIRE(idx.has_value());
  recall_rule(m, *idx);
  CHECK(m.archive.empty());
  const Rule& back = m.rules.back();
  CHECK(back.id == kept.id);
  CHECK(bit_identical(back.centroid, kept.centroid));
  CHECK(bit_identical(back.inv_cov, kept.inv_cov));
  CHECK(bit_identical(back.out_weights, kept.out_weights));
  CHECK(bit_identical(back.out_cov, kept.out_cov));
  CHECK(bit_identical(back.rec_weights, kept.rec_weights));
  CHECK(back.support == kept.support);
  CHECK(back.age == 0);
  CHECK(back.ers.n_obs == 0);
}

TEST_CASE("splitting") {
  ModelState m = blank(2, 2);
  Matrix inv(2, 2);
  inv << 0.25, 0.0, 0.0, 1.0;  // Sigma = diag(4, 1)
  m.rules.push_back(make_rule(vec({0.0, 0.0}), inv, 2, 0, 8.0, 1));
  m.rules.push_back(make_rule(vec({5.0, 5.0}), 0.05, 2, 1, 2.0, 2));
  m.next_rule_id = 3;

  const auto kids = split_check(m, 0);
  REQUIRE(kids.has_value());
  const auto& [a, b] = *kids;
  CHECK(std::abs(a.centroid[0]) == doctest::Approx(2.0));
  CHECK(a.centroid[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((a.centroid + b.centroid).norm() < 1e-12);
  // the deflated inverse is singular, so the variance along the axis is quartered
  CHECK(a.inv_cov(0, 0) == doctest::Approx(1.0));
  CHECK(a.inv_cov(1, 1) == doctest::Approx(1.0));
  CHECK(is_spd(a.inv_cov));
  CHECK(a.support + b.support == doctest::Approx(8.0));
  CHECK(a.id == 3);
  CHECK(b.id == 4);

  SUBCASE("a winner below the tolerance share does not split") {
    CHECK_FALSE(split_check(m, 1).has_value());
  }
  SUBCASE("a young lone rule does not split") {
    ModelState lone = blank(2, 2);
    lone.rules.push_back(make_rule(vec({0.0, 0.0}), inv, 2, 0, 1.0));
    CHECK_FALSE(split_check(lone, 0).has_value());
  }
}

TEST_CASE("forgetting") {
  Rule r = make_rule(vec({0.0}), 1.0, 2, 0, 10.0);
  SUBCASE("a falling potential never grows the support") {
    r.pplus.prev_value = 0.8;
    r.pplus.value = 0.7;
    const Forgetting f = forgetting_update(r);
    CHECK(f.lambda == doctest::Approx(1.01));
    CHECK(f.lambda_trans == 0.0);
    CHECK(r.support == 10.0);
  }
  SUBCASE("a rising potential decays the support") {
    r.pplus.prev_value = 0.7;
    r.pplus.value = 0.8;
    const Forgetting f = forgetting_update(r);
    CHECK(f.lambda == doctest::Approx(0.99));
    CHECK(f.lambda_trans == doctest::Approx(0.099));
    CHECK(r.support == doctest::Approx(9.01));
    CHECK(r.class_support.sum() == doctest::Approx(r.support));
  }
  SUBCASE("no change, no forgetting") {
    const Forgetting f = forgetting_update(r);
    CHECK(f.lambda == 1.0);
    CHECK(f.lambda_trans == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("merge check") {
  SUBCASE("identical unit-covariance rules sit on the boundary and do not merge") {
    const Rule a = make_rule(vec({0.2, 0.2}), Matrix::Identity(2, 2), 2);
    const MergeCheck mc = merge_check(a, a);
    CHECK(mc.score == doctest::Approx(0.0));
    CHECK(mc.merged_volume == doctest::Approx(rule_volume(a)));
    CHECK(mc.merged_volume <= mc.volume_limit);
    CHECK_FALSE(mc.merge);
  }
  SUBCASE("far-apart rules blow up the merged volume") {
    const Rule a = make_rule(vec({0.0, 0.0}), 0.05, 2);
    const Rule b = make_rule(vec({10.0, 10.0}), 0.05, 2);
    const MergeCheck mc = merge_check(a, b);
    CHECK(mc.merged_volume > mc.volume_limit);
    CHECK_FALSE(mc.merge);
    CHECK_FALSE(merge_admissible(a, b, 0.05));
  }
  SUBCASE("heavily overlapping compact rules merge") {
    const Rule a = make_rule(vec({0.50, 0.50}), 0.1, 2, 0, 4.0);
    const Rule b = make_rule(vec({0.52, 0.49}), 0.12, 2, 0, 6.0);
    const MergeCheck mc = merge_check(a, b);
    CHECK(mc.overlap == doctest::Approx(-mc.score));
    CHECK(mc.overlap > 0.0);
    CHECK(mc.merged_volume <= mc.volume_limit);
    CHECK(mc.merge);
    CHECK(merge_admissible(a, b, 0.05));
  }
  SUBCASE("rules of different classes are not admissible") {
    const Rule a = make_rule(vec({0.50, 0.50}), 0.1, 2, 0);
    const Rule b = make_rule(vec({0.50, 0.50}), 0.1, 2, 1);
    CHECK_FALSE(merge_admissible(a, b, 0.05));
  }
}

TEST_CASE("merging rules") {
  Rule a = make_rule(vec({0.0, 0.0}), 0.1, 2, 0, 3.0, 1);
  Rule b = make_rule(vec({1.0, 2.0}), 0.2, 2, 0, 1.0, 2);
  a.out_weights.setConstant(1.0);
  b.out_weights.setConstant(3.0);

  const Rule m = merge_rules(b, a, 0.5);
  CHECK(m.id == a.id);  // the higher-support rule carries on
  CHECK(m.centroid[0] == doctest::Approx(0.25));
  CHECK(m.centroid[1] == doctest::Approx(0.5));
  CHECK(m.support == 4.0);
  CHECK(m.class_support.sum() == doctest::Approx(4.0));
  CHECK(m.inv_cov(0, 0) == doctest::Approx(0.75 * 100.0 + 0.25 * 25.0));
  CHECK(is_spd(m.inv_cov));
  // parallel consequents: similarity 1 >= overlap, so delta = 1
  CHECK(consequent_similarity(a, b) == doctest::Approx(1.0));
  CHECK(m.out_weights(0, 0) == doctest::Approx(1.0 + 0.75 * (1.0 - 3.0)));
}

TEST_CASE("consequent similarity") {
  Rule a = make_rule(vec({0.0}), 1.0, 1);
  Rule b = make_rule(vec({0.0}), 1.0, 1);
  a.out_weights(0, 0) = 1.0;
  b.out_weights(0, 0) = -1.0;
  CHECK(consequent_similarity(a, b) == doctest::Approx(1.0));  // antiparallel
  b.out_weights(0, 0) = 0.0;
  b.out_weights(1, 0) = 1.0;
  CHECK(consequent_similarity(a, b) == doctest::Approx(0.0));  // orthogonal
  const Rule m = merge_rules(a, b, 0.3);
  CHECK(bit_identical(m.out_weights, a.out_weights));
}

TEST_CASE("grow decision") {
  ModelState m = blank(2, 1);
  m.fweights.weights = Vector::Ones(1);
  const GrowAssessment first = grow_decision(m, vec({0.3}), 0);
  CHECK(first.decision == GrowDecision::Grow);
  CHECK(first.placement == Placement::First);
  CHECK(first.dq_new == 1.0);

  m.rules.push_back(first.candidate);
  m.next_rule_id = 2;
  // a sample of a class without rules is novel and passes the class-aware DS
  const GrowAssessment other = grow_decision(m, vec({0.9}), 1);
  CHECK(other.winner == -1);
  CHECK(other.ds);
  CHECK(other.decision == GrowDecision::Grow);
  CHECK(other.dq_rules.size() == 1);
}
