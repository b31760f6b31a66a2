#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pinnbound/network.hpp"
#include "pinnbound/reduce.hpp"

namespace pinnbound {

/// Huber threshold delta (also the Lipschitz constant of the loss), the
/// divergence and initial-condition weights, and kinematic viscosity.
/// Density is fixed at 1.
struct LossConfig {
  double delta = 1.0;
  double lambda0 = 1.0;
  double lambda1 = 0.3;
  double nu = 0.01;

  void validate() const {
    if (!(delta > 0)) throw std::invalid_argument("loss: delta must be > 0");
    if (!(nu > 0)) throw std::invalid_argument("loss: nu must be > 0");
    if (!(lambda0 >= 0) || !(lambda1 >= 0))
      throw std::invalid_argument("loss: lambda0 and lambda1 must be >= 0");
  }
};

template <typename Scalar>
struct CollocationSet {
  std::vector<SpaceTimePoint<Scalar>> interior;
  std::vector<Vec<Scalar>> initial;  // spatial points on the t = 0 slice
};

template <typename Scalar>
struct RiskBreakdown {
  Scalar momentum_term{0};
  Scalar divergence_term{0};
  Scalar initial_term{0};
  Scalar total{0};
};

template <typename Scalar>
using FieldEvaluator = std::function<FieldEval<Scalar>(const SpaceTimePoint<Scalar>&)>;
template <typename Scalar>
using InitialCondition = std::function<Vec<Scalar>(const Vec<Scalar>&)>;

template <typename Scalar>
Scalar huber(Scalar delta, Scalar x) {
  using std::abs;
  const Scalar ax = abs(x);
  return ax <= delta ? Scalar(0.5) * x * x : delta * (ax - Scalar(0.5) * delta);
}

/// d/dx huber; equals delta * sign(x) at |x| = delta from both branches.
template <typename Scalar>
Scalar huber_derivative(Scalar delta, Scalar x) {
  if (x > delta) return delta;
  if (x < -delta) return -delta;
  return x;
}

/// r_k = d_t u_k + sum_m u_m d_m u_k + d_k p - nu lap u_k.
template <typename Scalar>
Vec<Scalar> momentum_residual(const FieldEval<Scalar>& fe, Scalar nu) {
  return fe.du_dt + fe.jac_u * fe.u + fe.grad_p - nu * fe.lap_u;
}

template <typename Scalar>
struct InteriorLoss {
  Scalar momentum{0};
  Scalar divergence{0};
};

template <typename Scalar>
InteriorLoss<Scalar> loss_res_parts(const FieldEval<Scalar>& fe, const LossConfig& cfg) {
  const Scalar delta(cfg.delta);
  const Vec<Scalar> r = momentum_residual(fe, Scalar(cfg.nu));
  InteriorLoss<Scalar> out;
  for (Eigen::Index k = 0; k < r.size(); ++k) out.momentum += huber(delta, r(k));
  out.divergence = Scalar(cfg.lambda0) * huber(delta, fe.div_u);
  return out;
}

/// Interior point loss: sum_k huber(r_k) + lambda0 * huber(div u).
template <typename Scalar>
Scalar loss_res(const FieldEval<Scalar>& fe, const LossConfig& cfg) {
  const auto parts = loss_res_parts(fe, cfg);
  return parts.momentum + parts.divergence;
}

/// Initial-slice loss: lambda1 * sum_k huber(u_k - f0_k).
template <typename Scalar>
Scalar loss_init(const Vec<Scalar>& u_at_t0, const Vec<Scalar>& f0_val, const LossConfig& cfg) {
  if (u_at_t0.size() != f0_val.size())
    throw DimensionError("loss_init: velocity and initial condition lengths differ");
  const Scalar delta(cfg.delta);
  Scalar acc(0);
  for (Eigen::Index k = 0; k < u_at_t0.size(); ++k) acc += huber(delta, u_at_t0(k) - f0_val(k));
  return Scalar(cfg.lambda1) * acc;
}

template <typename Scalar>
std::vector<InteriorLoss<Scalar>> interior_losses(const FieldEvaluator<Scalar>& field,
                                                   const LossConfig& cfg,
                                                   const std::vector<SpaceTimePoint<Scalar>>& pts,
                                                   int threads = 1) {
  std::vector<InteriorLoss<Scalar>> out(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) { out[i] = loss_res_parts(field(pts[i]), cfg); });
  return out;
}

template <typename Scalar>
std::vector<Scalar> initial_losses(const FieldEvaluator<Scalar>& field, const LossConfig& cfg,
                                   const std::vector<Vec<Scalar>>& pts,
                                   const InitialCondition<Scalar>& f0, int threads = 1) {
  std::vector<Scalar> out(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t j) {
    const FieldEval<Scalar> fe = field(SpaceTimePoint<Scalar>{pts[j], Scalar(0)});
    out[j] = loss_init(fe.u, f0(pts[j]), cfg);
  });
  return out;
}

/// Mean interior loss plus mean initial loss; sums use the pairwise tree.
template <typename Scalar>
RiskBreakdown<Scalar> empirical_risk(const FieldEvaluator<Scalar>& field, const LossConfig& cfg,
                                     const CollocationSet<Scalar>& colloc,
                                     const InitialCondition<Scalar>& f0, int threads = 1) {
  cfg.validate();
  if (colloc.interior.empty() || colloc.initial.empty())
    throw std::invalid_argument("empirical_risk: collocation sets must be non-empty");
  const auto inner = interior_losses(field, cfg, colloc.interior, threads);
  const auto init = initial_losses(field, cfg, colloc.initial, f0, threads);
  std::vector<Scalar> mom(inner.size()), div(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    mom[i] = inner[i].momentum;
    div[i] = inner[i].divergence;
  }
  const Scalar nr(static_cast<double>(inner.size()));
  const Scalar n0(static_cast<double>(init.size()));
  RiskBreakdown<Scalar> rb;
  rb.momentum_term = pairwise_sum(mom) / nr;
  rb.divergence_term = pairwise_sum(div) / nr;
  rb.initial_term = pairwise_sum(init) / n0;
  rb.total = rb.momentum_term + rb.divergence_term + rb.initial_term;
  return rb;
}

/// Adapts a network to the evaluator interface. Copies the weights.
template <typename Scalar>
FieldEvaluator<Scalar> network_evaluator(PinnWeights<Scalar> w, Activation act) {
  return [w = std::move(w), act = std::move(act)](const SpaceTimePoint<Scalar>& z) {
    return field_eval(w, act, z);
  };
}

}  // namespace pinnbound
