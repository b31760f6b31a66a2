#include <gtest/gtest.h>

#include <filesystem>

#include "pinnbound/config.hpp"
#include "pinnbound/json_io.hpp"

using namespace pinnbound;
namespace fs = std::filesystem;

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  const auto j = to_json(c);
  EXPECT_EQ(to_json(run_config_from_json(j)).dump(), j.dump());
  EXPECT_EQ(to_json(preset("desk")).dump(), j.dump());
}

TEST(Config, NonDefaultRoundTrip) {
  RunConfig c;
  c.activation = {ActivationFamily::SigmoidPow, 2};
  c.loss.delta = 0.5;
  c.C_z = 1.25;
  c.sigma_override = SigmaConstants{1, 2, 3, 4, 5, 6};
  c.sweep_N_r = {10, 20, 30};
  c.cz_convention = MomentConvention::Literal;
  c.c1_variant = C1Variant::Proof;
  c.verify.seed = 99;
  const auto back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(back.activation, c.activation);
  EXPECT_EQ(*back.C_z, 1.25);
  EXPECT_FALSE(back.C_z0.has_value());
}

TEST(Config, StrictParsing) {
  EXPECT_THROW(run_config_from_json({{"bogus", 1}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"loss", {{"delta", 1}, {"gamma", 2}}}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"loss", {{"delta", "big"}}}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"training", {{"epochs", 0}}}}), std::invalid_argument);
  EXPECT_THROW(run_config_from_json({{"activation", {{"family", "relu"}}}}), std::invalid_argument);
  const auto partial = run_config_from_json({{"loss", {{"nu", 0.05}}}});
  EXPECT_EQ(partial.loss.nu, 0.05);
  EXPECT_EQ(partial.loss.delta, LossConfig{}.delta);
}

TEST(Config, Overrides) {
  auto doc = to_json(RunConfig{});
  apply_override(doc, "loss.delta=2.5");
  apply_override(doc, "sweep.N_r_values=[5,6,7]");
  apply_override(doc, "out_dir=results");
  apply_override(doc, "bound.C_z=0.5");
  const auto c = run_config_from_json(doc);
  EXPECT_EQ(c.loss.delta, 2.5);
  EXPECT_EQ(c.sweep_N_r, (std::vector<long>{5, 6, 7}));
  EXPECT_EQ(c.out_dir, "results");
  EXPECT_EQ(*c.C_z, 0.5);
  EXPECT_THROW(apply_override(doc, "no_equals_sign"), std::invalid_argument);
}

TEST(Config, PresetsAndResolution) {
  const auto sweep = preset("sweep");
  EXPECT_EQ(sweep.sweep_N_r.size(), 8u);
  EXPECT_EQ(sweep.N_0, 2500);
  const auto fig = preset("figure1");
  EXPECT_EQ(fig.box.hi(0), 2.0);
  EXPECT_EQ(fig.box.hi(2), 1.0);
  EXPECT_THROW(preset("huge"), std::invalid_argument);

  const fs::path dir = fs::temp_directory_path() / "pinnbound_tests";
  fs::create_directories(dir);
  const fs::path file = dir / "cfg.json";
  write_json_file(file, {{"network", {{"p", 16}}}, {"seed", 5}});
  const auto c = resolve_config("desk", file.string(), {"seed=7"});
  EXPECT_EQ(c.p, 16);
  EXPECT_EQ(c.seed, 7u);  // overrides beat the file
  EXPECT_EQ(c.N_r, RunConfig{}.N_r);

  const auto sc = sweep_config(c);
  EXPECT_EQ(sc.p, 16);
  EXPECT_EQ(sc.seed, 7u);
  EXPECT_EQ(gap_config(c, 3).seed, 3u);
}
