#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "pinnbound/json_io.hpp"
#include "pinnbound/network.hpp"
#include "test_support.hpp"

using namespace pinnbound;
namespace fs = std::filesystem;

namespace {

PinnWeights<double> scalar_net(double a1, double a2) {
  Mat<double> W(1, 2);
  W << 1, 0;
  return {W, Mat<double>::Constant(1, 1, a1), Vec<double>::Constant(1, a2)};
}

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pinnbound_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Network, ScalarForward) {
  const auto out = forward(scalar_net(2, 3), Activation({ActivationFamily::TanhPow, 1}),
                           SpaceTimePoint<double>{Vec<double>::Constant(1, 1.0), 0.0});
  EXPECT_DOUBLE_EQ(out.u(0), 2 * std::tanh(1.0));
  EXPECT_DOUBLE_EQ(out.p_val, 3 * std::tanh(1.0));
}

TEST(Network, ScalarFieldEval) {
  const auto fe = field_eval(scalar_net(1, 1), Activation({ActivationFamily::TanhPow, 1}),
                             SpaceTimePoint<double>{Vec<double>::Zero(1), 0.0});
  EXPECT_EQ(fe.jac_u(0, 0), 1);
  EXPECT_EQ(fe.du_dt(0), 0);
  EXPECT_EQ(fe.grad_p(0), 1);
  EXPECT_EQ(fe.lap_u(0), 0);
  EXPECT_EQ(fe.div_u, 1);
}

TEST(Network, ZeroWeightsGiveZeroFields) {
  std::mt19937_64 rng(3);
  const auto w = init_weights(2, 5, 9, 0.0);
  EXPECT_TRUE(w.W().isZero(0));
  for (ActivationFamily fam : {ActivationFamily::TanhPow}) {
    for (int k : {1, 3}) {
      const Activation act({fam, k});
      const auto z = pinnbound::testing::random_point(2, rng);
      const auto out = forward(w, act, z);
      EXPECT_TRUE(out.u.isZero(0));
      EXPECT_EQ(out.p_val, 0);
      if (k == 3) {
        const auto fe = field_eval(w, act, z);
        EXPECT_TRUE(fe.jac_u.isZero(0) && fe.du_dt.isZero(0) && fe.grad_p.isZero(0) && fe.lap_u.isZero(0));
      }
    }
  }
}

TEST(Network, FieldEvalMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (const auto& spec : pinnbound::testing::all_families()) {
    const Activation act(spec);
    int checked = 0;
    while (checked < 40) {
      const int d = 1 + static_cast<int>(rng() % 3);
      const int p = 1 + static_cast<int>(rng() % 6);
      const auto w = pinnbound::testing::random_weights(d, p, rng, 0.8);
      const auto z = pinnbound::testing::random_point(d, rng);
      if (spec.family == ActivationFamily::ExpNegReluPow && pinnbound::testing::min_abs_preactivation(w, z) < 1e-2)
        continue;
      const double worst = pinnbound::testing::field_eval_violation(
          field_eval(w, act, z), pinnbound::testing::fd_field_eval(w, act, z), 1e-6, 1e-8);
      EXPECT_LE(worst, 1.0) << spec.family_name() << "^" << spec.k;
      ++checked;
    }
  }
}

TEST(Network, ForwardAndFieldEvalAgreeBitwise) {
  std::mt19937_64 rng(5);
  for (const auto& spec : pinnbound::testing::all_families()) {
    const Activation act(spec);
    const auto w = pinnbound::testing::random_weights(3, 7, rng);
    const auto z = pinnbound::testing::random_point(3, rng);
    const auto out = forward(w, act, z);
    const auto fe = field_eval(w, act, z);
    EXPECT_EQ(out.u, fe.u);
    EXPECT_EQ(out.p_val, fe.p_val);
    EXPECT_EQ(fe.div_u, fe.jac_u.trace());
  }
}

TEST(Network, ShapeErrors) {
  EXPECT_THROW(PinnWeights<double>(Mat<double>::Zero(3, 2), Mat<double>::Zero(2, 3), Vec<double>::Zero(3)),
               DimensionError);
  EXPECT_THROW(PinnWeights<double>(Mat<double>::Zero(3, 3), Mat<double>::Zero(2, 4), Vec<double>::Zero(3)),
               DimensionError);
  Mat<double> bad = Mat<double>::Zero(3, 3);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(PinnWeights<double>(bad, Mat<double>::Zero(2, 3), Vec<double>::Zero(3)), NumericalError);
  const auto w = init_weights(2, 3, 1, 0.5);
  EXPECT_THROW(forward(w, Activation({ActivationFamily::TanhPow, 1}),
                       SpaceTimePoint<double>{Vec<double>::Zero(3), 0.0}),
               DimensionError);
}

TEST(Network, InitWeightsDeterministicAndCentered) {
  const auto a = init_weights(2, 64, 42, default_w_scale(2));
  const auto b = init_weights(2, 64, 42, default_w_scale(2));
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == init_weights(2, 64, 43, default_w_scale(2)));
  EXPECT_LE(std::abs(a.A1().mean()), 3.0 / std::sqrt(2.0 * 64));
  EXPECT_DOUBLE_EQ(default_w_scale(2), 1 / std::sqrt(3.0));
}

TEST(Network, CheckpointRoundTripIsBitExact) {
  std::mt19937_64 rng(8);
  const auto w = pinnbound::testing::random_weights(2, 6, rng);
  const ActivationSpec spec{ActivationFamily::SigmoidPow, 2};
  const auto path = temp_file("roundtrip.json");
  save_checkpoint(w, spec, path, nlohmann::json{{"note", "kept"}});
  const Checkpoint ck = load_checkpoint(path);
  EXPECT_TRUE(ck.weights == w);
  EXPECT_EQ(ck.activation, spec);
}

TEST(Network, CorruptCheckpointsAreRejected) {
  std::mt19937_64 rng(8);
  const auto w = pinnbound::testing::random_weights(2, 3, rng);
  const auto path = temp_file("good.json");
  save_checkpoint(w, {ActivationFamily::TanhPow, 1}, path);
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto truncated = temp_file("truncated.json");
  write_text_file(truncated, text.substr(0, text.size() / 2));
  EXPECT_THROW(load_checkpoint(truncated), FormatError);

  auto doc = read_json_file(path);
  doc["W"][0][0] = "NaN";
  const auto nan_path = temp_file("nan.json");
  write_json_file(nan_path, doc);
  EXPECT_THROW(load_checkpoint(nan_path), FormatError);

  doc = read_json_file(path);
  doc["a2"].erase(0);
  const auto shape_path = temp_file("shape.json");
  write_json_file(shape_path, doc);
  EXPECT_THROW(load_checkpoint(shape_path), DimensionError);

  EXPECT_THROW(load_checkpoint(temp_file("missing.json")), FormatError);
}
