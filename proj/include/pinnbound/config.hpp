#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pinnbound/experiment.hpp"
#include "pinnbound/oracle.hpp"

namespace pinnbound {

/// Every knob of every command. All fields have defaults; the resolved
/// config is echoed into each output artifact.
struct RunConfig {
  ActivationSpec activation{ActivationFamily::TanhPow, 3};
  int p = 64;
  double w_scale = 0;  // 0 selects default_w_scale(d)
  LossConfig loss;
  TrainConfig train;
  Box box = Box::unit(2);
  long N_r = 216;
  long N_0 = 500;
  long population_points = 100000;
  MomentConvention cz_convention = MomentConvention::Sqrt;
  C1Variant c1_variant = C1Variant::Theorem;
  std::optional<SigmaConstants> sigma_override;
  std::optional<double> C_z;   // bound command: fixed moment constants instead of sampled ones
  std::optional<double> C_z0;
  std::vector<long> sweep_N_r{27, 64, 125, 216};
  int replicates = 1;
  VerifyConfig verify;
  std::uint64_t seed = 1234;
  int threads = 1;
  std::string out_dir = "out";

  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Strict: unknown keys and ill-typed values throw std::invalid_argument.
/// Missing keys keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& j);

/// "desk" (default), "sweep", or "figure1".
RunConfig preset(const std::string& name);

/// Applies "a.b.c=value" to a config document. The value is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Preset, then config file (merge patch), then overrides, then parse.
RunConfig resolve_config(const std::string& preset_name, const std::string& config_path,
                         const std::vector<std::string>& overrides);

SweepConfig sweep_config(const RunConfig& c);
GapConfig gap_config(const RunConfig& c, std::uint64_t population_seed);

}  // namespace pinnbound
