#include <gtest/gtest.h>

#include <random>

#include "pinnbound/experiment.hpp"
#include "pinnbound/training.hpp"
#include "test_support.hpp"

using namespace pinnbound;

namespace {

std::vector<Vec<double>> targets_for(const CollocationSet<double>& colloc, const InitialCondition<double>& f0) {
  std::vector<Vec<double>> out;
  for (const auto& x : colloc.initial) out.push_back(f0(x));
  return out;
}

CollocationSet<double> random_colloc(int d, int nr, int n0, std::mt19937_64& rng) {
  CollocationSet<double> c;
  for (int i = 0; i < nr; ++i) c.interior.push_back(pinnbound::testing::random_point(d, rng, 0, 1));
  for (int j = 0; j < n0; ++j) c.initial.push_back(pinnbound::testing::random_point(d, rng, 0, 1).x);
  return c;
}

}  // namespace

TEST(Training, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(99);
  for (const auto& spec : pinnbound::testing::all_families()) {
    const Activation act(spec);
    for (int inst = 0; inst < 4; ++inst) {
      const int d = 2;
      const auto w = pinnbound::testing::random_weights(d, 3, rng, 0.9);
      const auto colloc = random_colloc(d, 4, 3, rng);
      LossConfig cfg;
      cfg.delta = inst % 2 == 0 ? 0.3 : 5.0;  // exercise both Huber branches
      cfg.nu = 0.05;
      const InitialCondition<double> f0 = [](const Vec<double>& x) { return Vec<double>(x.array().sin()); };
      const auto targets = targets_for(colloc, f0);
      const Mat<double> g = grad_risk(w, act, cfg, colloc, f0);
      const Mat<long double> fd = pinnbound::testing::fd_risk_grad(w, act, cfg, colloc, targets);
      for (Eigen::Index i = 0; i < g.size(); ++i)
        EXPECT_TRUE(pinnbound::testing::close(g.data()[i], fd.data()[i], 1e-5L, 1e-7L))
            << spec.family_name() << "^" << spec.k << " entry " << i << ": " << g.data()[i] << " vs "
            << static_cast<double>(fd.data()[i]);
    }
  }
}

TEST(Training, RiskAndGradRiskAgreeWithEmpiricalRisk) {
  std::mt19937_64 rng(1);
  const auto w = pinnbound::testing::random_weights(2, 5, rng, 0.5);
  const Activation act({ActivationFamily::TanhPow, 3});
  const auto colloc = make_collocation(20, 15, Box::unit(2), 9);
  const InitialCondition<double> f0 = taylor_green_initial;
  const auto rg = risk_and_grad(w, act, LossConfig{}, colloc, targets_for(colloc, f0));
  const auto rb = empirical_risk(network_evaluator(w, act), LossConfig{}, colloc, f0);
  EXPECT_EQ(rg.risk.total, rb.total);
}

TEST(Training, ZeroWeightsTanhCubedGiveZeroGradient) {
  const auto w = init_weights(2, 4, 3, 0.0);
  const auto colloc = make_collocation(10, 10, Box::unit(2), 4);
  const InitialCondition<double> zero = [](const Vec<double>& x) { return Vec<double>::Zero(x.size()); };
  EXPECT_TRUE(grad_risk(w, Activation({ActivationFamily::TanhPow, 3}), LossConfig{}, colloc, zero).isZero(0));
}

TEST(Training, DuplicatingInteriorPointsKeepsGradient) {
  std::mt19937_64 rng(6);
  const auto w = pinnbound::testing::random_weights(2, 4, rng, 0.5);
  const Activation act({ActivationFamily::TanhPow, 1});
  auto colloc = make_collocation(8, 6, Box::unit(2), 2);
  const InitialCondition<double> f0 = taylor_green_initial;
  const Mat<double> g1 = grad_risk(w, act, LossConfig{}, colloc, f0);
  const auto copy = colloc.interior;
  colloc.interior.insert(colloc.interior.end(), copy.begin(), copy.end());
  EXPECT_TRUE(g1.isApprox(grad_risk(w, act, LossConfig{}, colloc, f0), 1e-13));
}

TEST(Training, AdamWStepProperties) {
  std::mt19937_64 rng(12);
  const auto w = pinnbound::testing::random_weights(2, 3, rng);
  TrainConfig tc;
  tc.weight_decay = 0;

  auto same = adamw_step(w, Mat<double>::Zero(3, 3), OptimState::zeros(w), tc);
  EXPECT_TRUE(same.weights == w);

  Mat<double> g(3, 3);
  for (int i = 0; i < g.size(); ++i) g.data()[i] = (i % 2 ? -1 : 1) * (0.5 + i);
  const auto a = adamw_step(w, g, OptimState::zeros(w), tc);
  const auto b = adamw_step(w, g, OptimState::zeros(w), tc);
  EXPECT_TRUE(a.weights == b.weights);
  const Mat<double> delta = a.weights.W() - w.W();
  for (int i = 0; i < g.size(); ++i) {
    // First bias-corrected step: -lr * g / (|g| + eps).
    EXPECT_NEAR(delta.data()[i], -tc.learning_rate * g.data()[i] / (std::abs(g.data()[i]) + tc.eps_adam), 1e-15);
  }
  EXPECT_EQ(a.state.step, 1);
  EXPECT_TRUE((a.state.v.array() >= 0).all());
  EXPECT_TRUE(a.weights.A1() == w.A1());

  // Decoupled decay: W <- W (1 - lr wd) when the gradient vanishes.
  tc.weight_decay = 0.5;
  const auto decayed = adamw_step(w, Mat<double>::Zero(3, 3), OptimState::zeros(w), tc);
  EXPECT_TRUE(decayed.weights.W().isApprox(w.W() * (1 - tc.learning_rate * 0.5), 1e-15));

  EXPECT_THROW(adamw_step(w, Mat<double>::Zero(2, 3), OptimState::zeros(w), tc), DimensionError);
}

TEST(Training, TrainContract) {
  const auto w0 = init_weights(2, 8, 5, default_w_scale(2));
  const Activation act({ActivationFamily::TanhPow, 3});
  const auto colloc = make_collocation(30, 30, Box::unit(2), 6);
  const InitialCondition<double> f0 = taylor_green_initial;
  TrainConfig tc;
  tc.epochs = 0;
  EXPECT_THROW(train(w0, act, LossConfig{}, colloc, f0, tc), std::invalid_argument);

  tc.epochs = 1;
  const auto one = train(w0, act, LossConfig{}, colloc, f0, tc);
  const auto grad = grad_risk(w0, act, LossConfig{}, colloc, f0);
  EXPECT_TRUE(one.weights == adamw_step(w0, grad, OptimState::zeros(w0), tc).weights);
  ASSERT_EQ(one.history.size(), 2u);
  EXPECT_EQ(one.history.front().epoch, 0);
  EXPECT_EQ(one.history.back().epoch, 1);

  tc.learning_rate = 0;
  tc.weight_decay = 0;
  tc.epochs = 5;
  EXPECT_TRUE(train(w0, act, LossConfig{}, colloc, f0, tc).weights == w0);
}

TEST(Training, DeskTrainingReducesRiskDeterministically) {
  const auto w0 = init_weights(2, 64, 77, default_w_scale(2));
  const Activation act({ActivationFamily::TanhPow, 3});
  const auto colloc = make_collocation(125, 500, Box::unit(2), 78);
  const InitialCondition<double> f0 = taylor_green_initial;
  TrainConfig tc;
  tc.epochs = 2000;
  const auto a = train(w0, act, LossConfig{}, colloc, f0, tc);
  EXPECT_LT(a.history.back().risk.total, a.history.front().risk.total);
  tc.threads = 3;
  const auto b = train(w0, act, LossConfig{}, colloc, f0, tc);
  EXPECT_TRUE(a.weights == b.weights);
  EXPECT_EQ(history_csv(a.history), history_csv(b.history));
  EXPECT_EQ(history_csv(a.history).substr(0, 55), "epoch,momentum_term,divergence_term,initial_term,total\n");
}
