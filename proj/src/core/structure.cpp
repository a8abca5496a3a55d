#include "rclass/structure.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "rclass/errors.hpp"
#include "rclass/inference.hpp"

namespace rclass {

namespace {

constexpr double kPdRelTol = 1e-9;
constexpr double kRegularizer = 1e-8;

double log_det_spd(const Matrix& m) {
  const Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw SingularCovariance("matrix is not positive definite");
  const Matrix L = llt.matrixL();
  return 2.0 * L.diagonal().array().log().sum();
}

double log_unit_ball(int u) {
  const double h = 0.5 * static_cast<double>(u);
  return h * std::log(std::numbers::pi) - std::lgamma(h + 1.0);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Pushes v into stats and reports whether v was below mean - std of the
// history that preceded it.
bool push_and_test(RunningStats& stats, double v) {
  const bool below = stats.n_obs >= 2 && v < stats.mean - stats.std();
  stats.push(v);
  return below;
}

double dq_eval(const DQState& s, const Vector& p, const Matrix& A, bool* clamped) {
  if (s.U <= 0.0) return 1.0;
  const double a = p.dot(A * p);
  const double b = p.dot(A * s.moment1);
  const double c = (A * s.moment2).trace();
  const double rad = s.U * (1.0 + a) - 2.0 * b + c;
  if (!(rad > 0.0)) {
    if (clamped) *clamped = true;
    return 0.0;
  }
  return std::sqrt(s.U / rad);
}

}  // namespace

double coverage_threshold(int u, double alpha) {
  const boost::math::chi_squared dist(static_cast<double>(u));
  return std::exp(-boost::math::quantile(dist, 1.0 - alpha));
}

bool is_spd(const Matrix& m) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  if (!m.isApprox(m.transpose(), 1e-9) && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    return false;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() > kPdRelTol * top && top > 0.0;
}

double unit_ball_volume(int u) { return std::exp(log_unit_ball(u)); }

double volume_from_inv_cov(const Matrix& inv_cov) {
  const auto u = static_cast<int>(inv_cov.rows());
  return std::exp(log_unit_ball(u) - 0.5 * log_det_spd(inv_cov));
}

double rule_volume(const Rule& rule) { return volume_from_inv_cov(rule.inv_cov); }

bool ds_check(const ModelState& model, const Matrix& candidate_inv_cov, int only_class) {
  double largest = 0.0;
  for (const Rule& r : model.rules) {
    if (only_class >= 0 && r.dominant_class() != only_class) continue;
    largest = std::max(largest, rule_volume(r));
  }
  if (largest == 0.0) return true;
  return volume_from_inv_cov(candidate_inv_cov) >= largest;
}

double dq_update(DQState& s, const Vector& x, const Matrix& A) {
  if (s.n > 0) {
    s.U += s.prev_dq;
    s.moment1 += s.prev_dq * s.prev_x;
    s.moment2 += s.prev_dq * (s.prev_x * s.prev_x.transpose());
  } else {
    s.moment1 = Vector::Zero(x.size());
    s.moment2 = Matrix::Zero(x.size(), x.size());
  }
  bool clamped = false;
  const double dq = dq_eval(s, x, A, &clamped);
  s.clamped = clamped;
  s.prev_dq = dq;
  s.prev_x = x;
  ++s.n;
  return dq;
}

double dq_at(const DQState& s, const Vector& p, const Matrix& A) {
  return dq_eval(s, p, A, nullptr);
}

double class_potential(const ClassPotentialState& s, const Vector& x, int o) {
  const double n = s.count[o];
  if (n <= 0.0) return 0.0;
  const double rad = n * (x.squaredNorm() + 1.0) + s.cb[o] - 2.0 * x.dot(s.dd[o]);
  if (!(rad > 0.0)) return 0.0;
  return std::sqrt(n / rad);
}

void class_potential_ingest(ClassPotentialState& s, const Vector& x, int o) {
  s.cb[o] += x.squaredNorm();
  s.dd[o] += x;
  s.count[o] += 1.0;
}

Rule init_new_rule(const ModelState& model, const Vector& x, int true_class,
                   Placement* placement) {
  const HyperParams& cfg = model.config;
  const int u = model.n_features;
  const int C = model.n_classes;

  Rule r;
  r.id = model.next_rule_id;
  r.out_weights = Matrix::Zero(2 * u + 1, C);
  r.out_cov = cfg.init_cov_big * Matrix::Identity(2 * u + 1, 2 * u + 1);
  r.rec_weights = Vector::Constant(C, cfg.gamma_init);
  r.prev_temporal = Vector::Zero(C);
  r.support = 1.0;
  r.class_support = Vector::Zero(C);
  r.class_support[true_class] = 1.0;

  Placement kind = Placement::First;
  Vector dist;
  if (model.rules.empty()) {
    r.centroid = x;
    dist = Vector::Constant(u, cfg.initial_radius);
  } else {
    const Vector& lambda = model.fweights.weights;
    std::size_t win = 0;
    double r_win = -1.0;
    int ia = -1, ie = -1, nearest = 0;
    double d_ia = std::numeric_limits<double>::infinity();
    double d_ie = d_ia, d_near = d_ia;
    for (std::size_t i = 0; i < model.rules.size(); ++i) {
      const Rule& ri = model.rules[i];
      const double f = spatial_firing(ri, x, lambda);
      if (f > r_win) {
        r_win = f;
        win = i;
      }
      const double d = (x - ri.centroid).norm();
      if (d < d_near) {
        d_near = d;
        nearest = static_cast<int>(i);
      }
      if (ri.dominant_class() == true_class) {
        if (d < d_ia) {
          d_ia = d;
          ia = static_cast<int>(i);
        }
      } else if (d < d_ie) {
        d_ie = d;
        ie = static_cast<int>(i);
      }
    }
    r.out_weights = model.rules[win].out_weights;
    double gamma_sum = 0.0;
    for (const Rule& ri : model.rules) gamma_sum += ri.rec_weights.sum();
    r.rec_weights = Vector::Constant(
        C, gamma_sum / static_cast<double>(model.rules.size() * static_cast<std::size_t>(C)));

    if (r_win < coverage_threshold(u, cfg.chi2_alpha) || ia < 0 || ie < 0) {
      kind = Placement::NonOverlap;
      const Vector& ref = model.rules[ia >= 0 ? ia : nearest].centroid;
      r.centroid = x;
      dist = cfg.nonoverlap_factor * (x - ref);
    } else {
      const Vector& c_ia = model.rules[ia].centroid;
      const Vector& c_ie = model.rules[ie].centroid;
      const double fac = d_ie > 0.0 ? d_ia / d_ie : 1.0;
      Vector zeta(C);
      for (int o = 0; o < C; ++o) zeta[o] = class_potential(model.class_potential, x, o);
      if (argmax_lowest(zeta) != true_class) {
        kind = Placement::ClassOverlap;
        r.centroid = x - cfg.overlap_shift * (c_ie - x);
      } else {
        kind = Placement::RuleOverlap;
        r.centroid = x - cfg.overlap_shift * (c_ia - x);
      }
      dist = fac * (r.centroid - c_ie);
    }
  }

  Vector inv_var(u);
  for (int j = 0; j < u; ++j) {
    const double s = std::clamp(std::abs(dist[j]), cfg.min_radius, cfg.max_radius);
    inv_var[j] = 1.0 / (s * s);
  }
  if (model.rules.empty()) {
    // the first rule takes the configured radius as-is
    for (int j = 0; j < u; ++j) inv_var[j] = 1.0 / (cfg.initial_radius * cfg.initial_radius);
  }
  r.inv_cov = inv_var.asDiagonal();
  if (placement) *placement = kind;
  return r;
}

GrowAssessment grow_decision(ModelState& model, const Vector& x, int true_class) {
  GrowAssessment g;
  g.candidate = init_new_rule(model, x, true_class, &g.placement);
  g.dq_new = dq_update(model.dq, x, g.candidate.inv_cov);
  if (model.rules.empty()) {
    g.ds = true;
    g.decision = GrowDecision::Grow;
    return g;
  }
  g.ds = ds_check(model, g.candidate.inv_cov, true_class);
  g.dq_rules.reserve(model.rules.size());
  for (const Rule& r : model.rules) g.dq_rules.push_back(dq_at(model.dq, r.centroid, g.candidate.inv_cov));
  const auto [lo, hi] = std::minmax_element(g.dq_rules.begin(), g.dq_rules.end());
  // the adaptation target is the best-firing rule of the sample's own class;
  // a sample outside that rule's coverage region is novel rather than a minor
  // conflict, so it never drags a rule towards it
  double best = 0.0;
  for (std::size_t i = 0; i < model.rules.size(); ++i) {
    const Rule& r = model.rules[i];
    if (r.dominant_class() != true_class) continue;
    const double f = spatial_firing(r, x, model.fweights.weights);
    if (f > best) {
      best = f;
      g.winner = static_cast<int>(i);
    }
  }
  const bool novel = best < coverage_threshold(model.n_features, model.config.chi2_alpha);
  const bool extreme = novel || g.dq_new >= *hi || g.dq_new <= *lo;
  if (!extreme) {
    g.decision = GrowDecision::AdaptOnly;
  } else {
    g.decision = g.ds ? GrowDecision::Grow : GrowDecision::Reserve;
  }
  return g;
}

void adapt_winner(Rule& rule, const Vector& x, int label) {
  const double n = std::max(rule.support, 1.0);
  const double a = 1.0 / (n + 1.0);
  const Vector v = x - rule.centroid;
  rule.centroid += v / (rule.support + 1.0);

  const Vector sv = rule.inv_cov * v;
  const double denom = 1.0 + a * v.dot(sv);
  Matrix next = rule.inv_cov / (1.0 - a) - (a / (1.0 - a)) * (sv * sv.transpose()) / denom;
  next = symmetrize(next);
  if (is_spd(next)) {
    rule.inv_cov = next;
  } else {
    rule.inv_cov = symmetrize(rule.inv_cov) +
                   kRegularizer * Matrix::Identity(rule.inv_cov.rows(), rule.inv_cov.cols());
  }
  rule.support += 1.0;
  rule.class_support[label] += 1.0;
}

bool sole_class_carrier(const std::vector<Rule>& rules, std::size_t i) {
  const int cls = rules[i].dominant_class();
  for (std::size_t j = 0; j < rules.size(); ++j) {
    if (j != i && rules[j].dominant_class() == cls) return false;
  }
  return true;
}

std::optional<std::size_t> ers_update(ModelState& model) {
  const std::size_t M = model.rules.size();
  std::vector<double> vol(M);
  double total = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    vol[i] = rule_volume(model.rules[i]);
    total += vol[i];
  }
  std::optional<std::size_t> victim;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < M; ++i) {
    Rule& r = model.rules[i];
    const double ers = r.out_weights.cwiseAbs().sum() * (total > 0.0 ? vol[i] / total : 0.0);
    const bool below = push_and_test(r.ers, ers);
    if (below && r.age >= model.config.prune_grace && ers < worst &&
        !sole_class_carrier(model.rules, i)) {
      worst = ers;
      victim = i;
    }
  }
  if (M < 2) return std::nullopt;
  return victim;
}

double pplus_update(Rule& rule, const Vector& x, const Vector& lambda) {
  PPlusStats& p = rule.pplus;
  const double d = weighted_mahalanobis_sq(rule, x, lambda);
  // N counts the creation point plus every sample seen since, so the value
  // stays 1/sqrt(1 + mean d) over that set.
  const double N = static_cast<double>(p.n_obs) + 3.0;
  const double q_prev = 1.0 / (p.value * p.value) - 1.0;
  const double q = ((N - 2.0) * q_prev + d) / (N - 1.0);
  p.prev_value = p.value;
  p.value = 1.0 / std::sqrt(1.0 + q);
  ++p.n_obs;
  p.declining = push_and_test(p.history, p.value);
  return p.value;
}

bool pplus_declining(const Rule& rule, std::uint64_t grace) {
  return rule.age >= grace && rule.pplus.declining;
}

void archive_rule(ModelState& model, std::size_t index) {
  model.archive.push_back(std::move(model.rules[index]));
  model.rules.erase(model.rules.begin() + static_cast<std::ptrdiff_t>(index));
}

std::optional<std::size_t> recall_check(const ModelState& model, double max_live_dq,
                                        const std::vector<std::uint64_t>& exclude_ids) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < model.archive.size(); ++i) {
    const Rule& r = model.archive[i];
    if (std::find(exclude_ids.begin(), exclude_ids.end(), r.id) != exclude_ids.end()) continue;
    if (!best || r.pplus.value > model.archive[*best].pplus.value) best = i;
  }
  if (best && model.archive[*best].pplus.value > max_live_dq) return best;
  return std::nullopt;
}

void recall_rule(ModelState& model, std::size_t index) {
  Rule& r = model.archive[index];
  // reinstated as a fresh slot: parameters are untouched, but the pruning
  // histories and the grace period start over
  r.age = 0;
  r.ers = RunningStats{};
  r.pplus.history = RunningStats{};
  r.pplus.declining = false;
  model.rules.push_back(std::move(r));
  model.archive.erase(model.archive.begin() + static_cast<std::ptrdiff_t>(index));
}

std::optional<std::pair<Rule, Rule>> split_check(const ModelState& model, std::size_t winner) {
  const HyperParams& cfg = model.config;
  const Rule& w = model.rules[winner];
  const auto M = model.rules.size();
  if (M < 2 && w.support < 2.0 * model.n_features) return std::nullopt;
  double total = 0.0;
  for (const Rule& r : model.rules) total += rule_volume(r);
  const double vw = rule_volume(w);
  if (!(vw > cfg.split_tolerance * total)) return std::nullopt;

  // the largest covariance eigenvalue is the smallest one of the inverse
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(w.inv_cov));
  const double mu = es.eigenvalues()[0];
  const Vector g = es.eigenvectors().col(0);
  const double a_max = 1.0 / mu;
  const Vector offset = cfg.split_offset * std::sqrt(a_max) * g;

  Matrix child_inv = symmetrize(w.inv_cov - (1.0 / a_max) * (g * g.transpose()));
  if (!is_spd(child_inv)) child_inv = symmetrize(w.inv_cov + (3.0 / a_max) * (g * g.transpose()));

  Rule a = w;
  a.centroid = w.centroid + offset;
  a.inv_cov = child_inv;
  a.support = w.support / 2.0;
  a.class_support = w.class_support / 2.0;
  a.ers = RunningStats{};
  a.age = 0;
  a.pplus.history = RunningStats{};
  a.pplus.declining = false;
  Rule b = a;
  b.centroid = w.centroid - offset;
  a.id = model.next_rule_id;
  b.id = model.next_rule_id + 1;
  return std::make_pair(std::move(a), std::move(b));
}

Forgetting forgetting_update(Rule& rule) {
  Forgetting f;
  f.lambda = 1.0 - 0.1 * (rule.pplus.value - rule.pplus.prev_value);
  f.lambda_trans = std::clamp(-9.9 * f.lambda + 9.9, 0.0, 0.99);
  const double keep = 1.0 - f.lambda_trans;
  rule.support *= keep;
  rule.class_support *= keep;
  f.support = rule.support;
  return f;
}

MergeCheck merge_check(const Rule& w, const Rule& o) {
  MergeCheck mc;
  const Matrix comb = 0.5 * (w.inv_cov + o.inv_cov);
  const Vector delta = w.centroid - o.centroid;
  mc.score = 0.125 * delta.dot(comb * delta) +
                  0.5 * (log_det_spd(comb) - log_det_spd(w.inv_cov) - log_det_spd(o.inv_cov));

  const double tot = w.support + o.support;
  const double pw = tot > 0.0 ? w.support / tot : 0.5;
  const double po = 1.0 - pw;
  const Matrix cov_w = w.inv_cov.llt().solve(Matrix::Identity(w.inv_cov.rows(), w.inv_cov.cols()));
  const Matrix cov_o = o.inv_cov.llt().solve(Matrix::Identity(o.inv_cov.rows(), o.inv_cov.cols()));
  const Matrix merged = pw * cov_w + po * cov_o + pw * po * (delta * delta.transpose());
  const int u = static_cast<int>(w.centroid.size());
  mc.merged_volume = std::exp(log_unit_ball(u) + 0.5 * log_det_spd(symmetrize(merged)));
  mc.volume_limit = static_cast<double>(u) * (rule_volume(w) + rule_volume(o));
  mc.overlap = -mc.score;
  mc.merge = mc.overlap > 0.0 && mc.merged_volume <= mc.volume_limit;
  return mc;
}

bool merge_admissible(const Rule& a, const Rule& b, double chi2_alpha) {
  if (a.dominant_class() != b.dominant_class()) return false;
  const Vector ones = Vector::Ones(a.centroid.size());
  const double gate = coverage_threshold(static_cast<int>(a.centroid.size()), chi2_alpha);
  return std::max(spatial_firing(a, b.centroid, ones), spatial_firing(b, a.centroid, ones)) >= gate;
}

double consequent_similarity(const Rule& a, const Rule& b) {
  const int u = static_cast<int>(a.centroid.size());
  const int C = static_cast<int>(a.out_weights.cols());
  double phi = 0.0;
  for (int o = 0; o < C; ++o) {
    Vector va(u + 1), vb(u + 1);
    va[0] = a.out_weights(0, o);
    vb[0] = b.out_weights(0, o);
    for (int j = 0; j < u; ++j) {
      va[j + 1] = a.out_weights(1 + 2 * j, o);
      vb[j + 1] = b.out_weights(1 + 2 * j, o);
    }
    const double na = va.norm(), nb = vb.norm();
    double angle = std::numbers::pi / 2.0;
    if (na > 0.0 && nb > 0.0) angle = std::acos(std::clamp(va.dot(vb) / (na * nb), -1.0, 1.0));
    phi = std::max(phi, angle);
  }
  // 1 at phi in {0, pi}, 0 at pi/2
  if (phi <= std::numbers::pi / 2.0) return 2.0 / std::numbers::pi * (std::numbers::pi / 2.0 - phi);
  return 2.0 / std::numbers::pi * (phi - std::numbers::pi / 2.0);
}

Rule merge_rules(const Rule& winner, const Rule& other, double overlap) {
  const bool winner_dominant = winner.support >= other.support;
  const Rule& one = winner_dominant ? winner : other;
  const Rule& two = winner_dominant ? other : winner;
  const double n1 = one.support, n2 = two.support;
  const double tot = n1 + n2;
  const double w1 = tot > 0.0 ? n1 / tot : 0.5;
  const double w2 = 1.0 - w1;

  Rule m = one;
  m.centroid = w1 * one.centroid + w2 * two.centroid;
  m.inv_cov = symmetrize(w1 * one.inv_cov + w2 * two.inv_cov);
  m.support = tot;
  m.class_support = one.class_support + two.class_support;
  const double s_out = consequent_similarity(one, two);
  const double delta = s_out >= overlap ? 1.0 : 0.0;
  m.out_weights = one.out_weights + w1 * delta * (one.out_weights - two.out_weights);
  m.ers = RunningStats{};
  return m;
}

}  // namespace rclass
