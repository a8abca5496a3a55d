#pragma once

// What-to-learn: decides per sample whether to ask for a label, under a
// windowed label budget, an adaptive conflict threshold and a class-imbalance
// override.

#include "rclass/types.hpp"

namespace rclass {

// y1 / (y1 + y2) over the two largest outputs after shifting them to be
// non-negative; clamped to [0,1]. Throws DegenerateOutputs if every shifted
// output is zero. Requires C >= 2.
double output_conflict(const Vector& outputs);

// Bayesian class posterior from the rule base (log-softened class and rule
// priors, Gaussian likelihood). Non-negative and sums to 1. Throws EmptyModel.
Vector input_conflict(const ModelState& model, const Vector& x);

// Z <- Z (xi-1)/xi + labeled; b <- Z/xi; n_queried += 1.
SelectionState update_budget(SelectionState state, bool labeled);

// theta <- theta (1 - s) on accept, theta (1 + s) on reject; clamped to [1/C, 1].
SelectionState update_threshold(SelectionState state, bool accepted, int n_classes);

// 1/C + B (1 - 1/C)
double init_threshold(int n_classes, double budget);

// 1 - (C/N) min_o N_o; 0 when N = 0.
double imbalance_factor(const std::vector<double>& class_counts, double total);

// True iff the imbalance gate is open and both posteriors peak on the same
// minority class (count below minority_share of its balanced share N/C).
bool minority_override(const ModelState& model, const Vector& input_posterior,
                       const Vector& outputs);

struct Verdict {
  bool query = false;
  bool cold_start = false;     // empty model or fewer than two classes labeled
  bool uncovered = false;      // no rule fires above the coverage threshold
  bool budget_blocked = false;
  bool conflicted = false;
  bool override_fired = false;
  double output_conf = 1.0;
  double input_conf = 1.0;
  Vector input_posterior;
};

struct DecideResult {
  Verdict verdict;
  SelectionState next;  // theta adapted; Z untouched (see update_budget)
};

// Pure given (model, state, x). The caller applies `next` and, once the
// label outcome is known, update_budget.
DecideResult decide(const ModelState& model, const SelectionState& state, const Vector& x);

}  // namespace rclass
