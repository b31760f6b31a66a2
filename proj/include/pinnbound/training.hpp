#pragma once

#include <string>
#include <vector>

#include "pinnbound/residual.hpp"

namespace pinnbound {

struct TrainConfig {
  int epochs = 2000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  double weight_decay = 0.01;
  int log_every = 100;
  int threads = 1;

  void validate() const;
};

/// AdamW moment estimates; shapes follow W.
struct OptimState {
  long step = 0;
  Mat<double> m;
  Mat<double> v;

  static OptimState zeros(const PinnWeights<double>& w);
};

struct RiskAndGrad {
  RiskBreakdown<double> risk;
  Mat<double> grad;  // d risk / d W, p x (d+1)
};

/// Empirical risk and its exact gradient with respect to W (heads frozen).
/// `f0_targets[j]` is the initial condition evaluated at colloc.initial[j].
RiskAndGrad risk_and_grad(const PinnWeights<double>& w, const Activation& act,
                          const LossConfig& cfg, const CollocationSet<double>& colloc,
                          const std::vector<Vec<double>>& f0_targets, int threads = 1);

Mat<double> grad_risk(const PinnWeights<double>& w, const Activation& act, const LossConfig& cfg,
                      const CollocationSet<double>& colloc, const InitialCondition<double>& f0,
                      int threads = 1);

struct AdamWResult {
  PinnWeights<double> weights;
  OptimState state;
};

/// Decoupled weight decay W <- W (1 - lr wd), then the bias-corrected Adam step.
AdamWResult adamw_step(PinnWeights<double> w, const Mat<double>& grads, OptimState state,
                       const TrainConfig& tc);

struct HistoryEntry {
  int epoch;  // number of optimizer steps taken before this risk was measured
  RiskBreakdown<double> risk;
};

struct TrainResult {
  PinnWeights<double> weights;
  std::vector<HistoryEntry> history;
};

/// Full-batch AdamW for tc.epochs steps. History holds epoch 0, every
/// log_every-th epoch, and the final epoch. Throws NumericalError if the risk
/// or gradient stops being finite.
TrainResult train(const PinnWeights<double>& w0, const Activation& act, const LossConfig& cfg,
                  const CollocationSet<double>& colloc, const InitialCondition<double>& f0,
                  const TrainConfig& tc);

/// "epoch,momentum_term,divergence_term,initial_term,total" plus one row per entry.
std::string history_csv(const std::vector<HistoryEntry>& history);

}  // namespace pinnbound
