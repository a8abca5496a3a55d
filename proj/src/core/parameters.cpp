#include "rclass/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rclass {

namespace {

constexpr double kEigenFloor = 1e-12;
constexpr double kEtaFloor = 1e-8;

// Cheap upper bound on the spectral radius.
double gershgorin(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

void repair_psd(Matrix& psi) {
  psi = 0.5 * (psi + psi.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(psi);
  if (es.eigenvalues().minCoeff() >= kEigenFloor) return;
  const Vector ev = es.eigenvalues().cwiseMax(kEigenFloor);
  psi = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void fwgrls_update(Rule& rule, const Vector& x_e, double firing, const Vector& targets,
                   double lambda, double decay) {
  Matrix& psi = rule.out_cov;
  const Vector px = psi * x_e;
  const Vector k = px / (lambda / firing + x_e.dot(px));
  const Eigen::RowVectorXd err = targets.transpose() - x_e.transpose() * rule.out_weights;
  psi = (psi - k * px.transpose()) / lambda;
  repair_psd(psi);
  if (decay > 0.0) {
    const double c = 1.0 / std::max(1.0, decay * gershgorin(psi));
    rule.out_weights -= (firing * c * decay) * (psi * rule.out_weights);
  }
  rule.out_weights += k * err;
}

Vector zedm_gradient(const ForwardPass& pass, const ModelState& model, std::size_t rule,
                     const Vector& targets) {
  const int C = model.n_classes;
  const auto i = static_cast<Eigen::Index>(rule);
  const Rule& r = model.rules[rule];
  Vector grad = Vector::Zero(C);
  for (int o = 0; o < C; ++o) {
    if (pass.fallback[o]) continue;
    const double y = pass.outputs[o];
    grad[o] = (y - targets[o]) * (pass.spatial[i] - r.prev_temporal[o]) *
              (pass.local(i, o) - y) / pass.denom[o];
  }
  return grad;
}

double lyapunov_eta_bound(double n, double m, double A) {
  return 2.0 * n * std::sqrt(std::numbers::pi) * m * m / A;
}

double parzen_f0(const ZedmState& s, double h) {
  if (s.n == 0) return 0.0;
  return s.A / (static_cast<double>(s.n) * h * std::sqrt(2.0 * std::numbers::pi));
}

void adapt_eta(ZedmState& s, double f0_now, const HyperParams& config, double n_rules) {
  s.eta *= f0_now >= s.f0_prev ? config.lr_up : config.lr_down;
  if (s.A > 0.0 && s.n > 0) {
    const double bound = lyapunov_eta_bound(static_cast<double>(s.n), n_rules, s.A);
    s.eta = std::min(s.eta, bound * (1.0 - 1e-6));
  }
  s.eta = std::max(s.eta, kEtaFloor);
  s.f0_prev = f0_now;
}

void zedm_update(ModelState& model, const ForwardPass& pass, std::size_t rule,
                 const Vector& targets) {
  ZedmState& s = model.zedm;
  const double h = model.config.parzen_h;
  const Vector err = pass.outputs - targets;
  s.A += (-0.5 * err.array().square() / (h * h)).exp().mean();
  ++s.n;
  adapt_eta(s, parzen_f0(s, h), model.config, static_cast<double>(model.rules.size()));

  const Vector grad = zedm_gradient(pass, model, rule, targets);
  const double scale = s.eta * s.A / (static_cast<double>(s.n) * std::sqrt(2.0 * h));
  Rule& r = model.rules[rule];
  r.rec_weights =
      (r.rec_weights - scale * grad).cwiseMax(model.config.gamma_floor).cwiseMin(1.0);
}

}  // namespace rclass
