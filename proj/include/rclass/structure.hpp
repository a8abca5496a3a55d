#pragma once

// Structural half of how-to-learn: growing, new-rule placement, premise
// adaptation of the winner, pruning (ERS and P+), recall, splitting,
// per-rule forgetting and merging.

#include <optional>
#include <utility>

#include "rclass/types.hpp"

namespace rclass {

// exp(-chi2_u quantile at 1 - alpha): firing below this means x lies outside
// the rule's confidence ellipsoid.
double coverage_threshold(int u, double alpha);

// Volume of the unit ball in R^u.
double unit_ball_volume(int u);

// V_unit(u) * sqrt(det(Sigma)) computed from the inverse covariance.
// Throws SingularCovariance if inv_cov is not positive definite.
double volume_from_inv_cov(const Matrix& inv_cov);
double rule_volume(const Rule& rule);

// Hypothetical volume >= largest live volume; true for an empty rule base.
// With a class index only rules of that dominant class are compared, and a
// class without rules passes.
bool ds_check(const ModelState& model, const Matrix& candidate_inv_cov, int only_class = -1);

// Recursive data-quality density of x against all previously ingested
// samples, weighted by their own density. Folds x into the accumulators.
// Returns 1 for the first sample. A non-positive radicand yields 0 and sets
// state.clamped.
double dq_update(DQState& state, const Vector& x, const Matrix& candidate_inv_cov);

// Same density evaluated at `point` without touching the accumulators.
double dq_at(const DQState& state, const Vector& point, const Matrix& inv_cov);

// Potential of class o at x from that class's previous samples; 0 when the
// class has none.
double class_potential(const ClassPotentialState& state, const Vector& x, int o);
void class_potential_ingest(ClassPotentialState& state, const Vector& x, int o);

enum class Placement { First, NonOverlap, ClassOverlap, RuleOverlap };

// Builds the rule that would be added for (x, true_class). Pure.
Rule init_new_rule(const ModelState& model, const Vector& x, int true_class,
                   Placement* placement = nullptr);

enum class GrowDecision { Grow, AdaptOnly, Reserve };

struct GrowAssessment {
  GrowDecision decision = GrowDecision::Reserve;
  Rule candidate;
  Placement placement = Placement::First;
  bool ds = false;
  double dq_new = 1.0;
  int winner = -1;  // best-firing rule of the sample's class, -1 if none
  std::vector<double> dq_rules;  // DQ at each live centroid, same order as model.rules
};

// Updates the DQ accumulators with x and classifies the sample.
GrowAssessment grow_decision(ModelState& model, const Vector& x, int true_class);

// Sequential ML update of the centroid and the inverse covariance (rank-one,
// no re-inversion). Supports are incremented. A non-PD result is rejected
// and the previous inverse covariance is re-symmetrised and regularised.
void adapt_winner(Rule& rule, const Vector& x, int label);

// True when no other live rule shares rule i's dominant class. Such rules are
// exempt from pruning so a rarely seen class keeps its representative.
bool sole_class_carrier(const std::vector<Rule>& rules, std::size_t i);

// ERS_i = sum_o sum_j |W_ioj| * V_i / sum V. Updates every rule's history and
// returns the index of at most one rule that fell below mean - std of its own
// history (past the grace period). Never selects when M < 2 or a sole class
// carrier.
std::optional<std::size_t> ers_update(ModelState& model);

// One step of the P+ recursion for x; returns the new value.
double pplus_update(Rule& rule, const Vector& x, const Vector& lambda);

// True when the last P+ value fell below mean - std of the rule's previous
// history (past the grace period).
bool pplus_declining(const Rule& rule, std::uint64_t grace);

// Moves rules[index] into the archive.
void archive_rule(ModelState& model, std::size_t index);

// Archived rule with the largest P+ if it beats max_live_dq. Rules whose ids
// are listed in exclude_ids are not candidates.
std::optional<std::size_t> recall_check(const ModelState& model, double max_live_dq,
                                        const std::vector<std::uint64_t>& exclude_ids = {});

// Moves archive[index] back into the rule base unchanged.
void recall_rule(ModelState& model, std::size_t index);

// Children of an over-sized winner, or nullopt when no split is due.
std::optional<std::pair<Rule, Rule>> split_check(const ModelState& model, std::size_t winner);

struct Forgetting {
  double lambda = 1.0;
  double lambda_trans = 0.0;
  double support = 0.0;
};

// Support decay driven by the change of the rule's P+ value.
Forgetting forgetting_update(Rule& rule);

struct MergeCheck {
  double score = 0.0;           // the printed Bhattacharyya-style expression
  double overlap = 0.0;         // -score: positive when the clusters overlap
  double merged_volume = 0.0;
  double volume_limit = 0.0;    // u (V_a + V_b)
  bool merge = false;
};

MergeCheck merge_check(const Rule& winner, const Rule& other);

// Extra gate applied on top of merge_check: both rules vote for the same
// class and at least one centroid lies inside the other's chi-square
// coverage region. The printed overlap score is positive for distant compact
// clusters, so it cannot serve as the proximity test on its own.
bool merge_admissible(const Rule& a, const Rule& b, double chi2_alpha);

// Angle-based similarity of the linear consequent terms, in [0,1].
double consequent_similarity(const Rule& a, const Rule& b);

// Weighted-average premise merge plus participatory consequent merge.
Rule merge_rules(const Rule& winner, const Rule& other, double overlap);

// Symmetric, positive definite within a relative tolerance.
bool is_spd(const Matrix& m);

}  // namespace rclass
