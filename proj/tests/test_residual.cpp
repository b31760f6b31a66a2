#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pinnbound/experiment.hpp"
#include "pinnbound/residual.hpp"
#include "test_support.hpp"

using namespace pinnbound;

namespace {

// d = 1: u=2, jac=3, du_dt=1, grad_p=5, lap=4, div=2.
FieldEval<double> hand_case() {
  FieldEval<double> fe = FieldEval<double>::zero(1);
  fe.u(0) = 2;
  fe.jac_u(0, 0) = 3;
  fe.du_dt(0) = 1;
  fe.grad_p(0) = 5;
  fe.lap_u(0) = 4;
  fe.div_u = 2;
  return fe;
}

LossConfig wide_huber() {
  LossConfig cfg;
  cfg.delta = 1e6;
  cfg.nu = 0.5;
  cfg.lambda0 = 1;
  return cfg;
}

}  // namespace

TEST(Residual, HuberValues) {
  EXPECT_EQ(huber(1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(huber(1.0, 0.5), 0.125);
  EXPECT_DOUBLE_EQ(huber(1.0, 2.0), 1.5);
  EXPECT_DOUBLE_EQ(huber(1.0, -2.0), 1.5);
  EXPECT_DOUBLE_EQ(huber_derivative(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(huber_derivative(1.0, -7.0), -1.0);
}

TEST(Residual, HuberIsLipschitzEvenAndMonotone) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5000; ++i) {
    const double delta = 0.1 + 3 * pinnbound::testing::unit(rng);
    const double x = -10 + 20 * pinnbound::testing::unit(rng);
    const double y = -10 + 20 * pinnbound::testing::unit(rng);
    EXPECT_LE(std::abs(huber(delta, x) - huber(delta, y)), delta * std::abs(x - y) + 1e-12);
    EXPECT_EQ(huber(delta, x), huber(delta, -x));
    if (std::abs(x) <= std::abs(y)) EXPECT_LE(huber(delta, std::abs(x)), huber(delta, std::abs(y)));
  }
}

TEST(Residual, MomentumResidualHandCase) {
  EXPECT_TRUE(momentum_residual(FieldEval<double>::zero(3), 0.1).isZero(0));
  const Vec<double> r = momentum_residual(hand_case(), 0.5);
  ASSERT_EQ(r.size(), 1);
  EXPECT_DOUBLE_EQ(r(0), 10.0);  // 1 + 2*3 + 5 - 0.5*4
}

TEST(Residual, LossResHandCase) {
  EXPECT_EQ(loss_res(FieldEval<double>::zero(2), LossConfig{}), 0.0);
  EXPECT_DOUBLE_EQ(loss_res(hand_case(), wide_huber()), 52.0);  // 10^2/2 + 2^2/2
}

TEST(Residual, LossInit) {
  LossConfig cfg;
  cfg.delta = 10;
  cfg.lambda1 = 0.3;
  const Vec<double> u = (Vec<double>(2) << 1.5, -0.5).finished();
  const Vec<double> f0 = (Vec<double>(2) << 0.5, 0.5).finished();
  EXPECT_DOUBLE_EQ(loss_init(u, f0, cfg), 0.3);
  EXPECT_EQ(loss_init(u, u, cfg), 0.0);
  cfg.lambda1 = 0;
  EXPECT_EQ(loss_init(u, f0, cfg), 0.0);
  EXPECT_THROW(loss_init(u, Vec<double>(Vec<double>::Zero(3)), cfg), DimensionError);
}

TEST(Residual, EmpiricalRiskHandCaseAndBreakdown) {
  const FieldEvaluator<double> field = [](const SpaceTimePoint<double>&) { return hand_case(); };
  CollocationSet<double> colloc;
  colloc.interior.push_back({Vec<double>::Zero(1), 0.3});
  colloc.initial.push_back(Vec<double>::Constant(1, 0.1));
  const InitialCondition<double> f0 = [](const Vec<double>&) { return Vec<double>::Constant(1, 2.0); };
  const auto rb = empirical_risk(field, wide_huber(), colloc, f0);
  EXPECT_DOUBLE_EQ(rb.momentum_term + rb.divergence_term, 52.0);
  EXPECT_EQ(rb.initial_term, 0.0);
  EXPECT_NEAR(rb.total, rb.momentum_term + rb.divergence_term + rb.initial_term, 1e-12);
}

TEST(Residual, EmpiricalRiskEdgeCases) {
  const InitialCondition<double> zero_f0 = [](const Vec<double>& x) { return Vec<double>::Zero(x.size()); };
  const auto w = init_weights(2, 4, 1, 0.0);
  const auto colloc = make_collocation(5, 5, Box::unit(2), 3);
  EXPECT_EQ(empirical_risk(network_evaluator(w, Activation({ActivationFamily::TanhPow, 1})), LossConfig{}, colloc,
                           zero_f0)
                .total,
            0.0);
  CollocationSet<double> empty;
  EXPECT_THROW(empirical_risk(network_evaluator(w, Activation({ActivationFamily::TanhPow, 1})), LossConfig{},
                              empty, zero_f0),
               std::invalid_argument);
  LossConfig bad;
  bad.delta = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Residual, ExactSolutionHasZeroRiskForAnyWeights) {
  for (double delta : {0.1, 1.0, 5.0})
    for (double l0 : {0.0, 1.0, 3.0}) {
      LossConfig cfg;
      cfg.delta = delta;
      cfg.lambda0 = l0;
      cfg.lambda1 = 2.0;
      cfg.nu = 0.01;
      const auto colloc = make_collocation(200, 200, Box::unit(2), 17);
      const auto rb = empirical_risk(taylor_green_evaluator({cfg.nu}), cfg, colloc,
                                     InitialCondition<double>(taylor_green_initial));
      EXPECT_LT(rb.total, 1e-10);
    }
}

TEST(Residual, RiskNonnegativeAndPermutationInvariant) {
  std::mt19937_64 rng(4);
  const auto w = pinnbound::testing::random_weights(2, 6, rng, 0.7);
  const auto field = network_evaluator(w, Activation({ActivationFamily::TanhPow, 3}));
  auto colloc = make_collocation(64, 40, Box::unit(2), 5);
  const InitialCondition<double> f0 = taylor_green_initial;
  const double a = empirical_risk(field, LossConfig{}, colloc, f0).total;
  std::shuffle(colloc.interior.begin(), colloc.interior.end(), rng);
  std::shuffle(colloc.initial.begin(), colloc.initial.end(), rng);
  const double b = empirical_risk(field, LossConfig{}, colloc, f0).total;
  EXPECT_GE(a, 0);
  EXPECT_NEAR(a, b, 1e-12);
  EXPECT_EQ(b, empirical_risk(field, LossConfig{}, colloc, f0, 4).total);
}
