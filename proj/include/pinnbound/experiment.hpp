#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pinnbound/bound.hpp"
#include "pinnbound/sampling.hpp"
#include "pinnbound/training.hpp"

namespace pinnbound {

/// Decaying 2D Taylor-Green vortex at unit density.
struct TaylorGreenParams {
  double nu = 0.01;
  double rho = 1.0;
  Box domain = Box::unit(2);
};

/// Velocity, pressure and all derivatives in closed form. Throws
/// DimensionError unless z has two spatial coordinates.
FieldEval<double> taylor_green_field(const SpaceTimePoint<double>& z, const TaylorGreenParams& params);

/// Velocity at t = 0, the initial condition f0.
Vec<double> taylor_green_initial(const Vec<double>& x);

FieldEvaluator<double> taylor_green_evaluator(const TaylorGreenParams& params);

/// Training collocation set on `box`, deterministic in seed.
CollocationSet<double> make_collocation(long N_r, long N_0, const Box& box, std::uint64_t seed);

struct RiskEstimate {
  double risk = 0;
  double std_error = 0;
};

/// Empirical risk on a fresh uniform sample with population_points interior
/// and initial points, plus the standard error of that Monte-Carlo mean.
RiskEstimate population_risk(const FieldEvaluator<double>& field, const LossConfig& loss,
                             const InitialCondition<double>& f0, const Box& box,
                             long population_points, std::uint64_t seed, int threads = 1);

struct GapConfig {
  LossConfig loss;
  Box box = Box::unit(2);
  long population_points = 100000;
  std::uint64_t seed = 0;  // population sample
  MomentConvention convention = MomentConvention::Sqrt;
  C1Variant variant = C1Variant::Theorem;
  std::optional<SigmaConstants> sigma_override;
  int threads = 1;
};

struct GapReport {
  long N_r = 0, N_0 = 0;
  double train_risk = 0;
  double population_estimate = 0;
  double population_std_error = 0;
  long population_points = 0;
  double gap = 0;  // |train_risk - population_estimate|
  BoundReport bound;
  std::string activation;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string note;
};

/// Requires population_points >= 10 N_r. The bound uses moment constants of
/// the population sample.
GapReport measure_gap(const PinnWeights<double>& w, const ActivationSpec& spec,
                      const CollocationSet<double>& train_colloc, const InitialCondition<double>& f0,
                      const GapConfig& cfg);

/// Same measurement for an arbitrary field; the bound fields stay zero.
GapReport measure_gap_field(const FieldEvaluator<double>& field, const CollocationSet<double>& train_colloc,
                            const InitialCondition<double>& f0, const GapConfig& cfg);

nlohmann::json to_json(const GapReport& g);
GapReport gap_report_from_json(const nlohmann::json& j);

struct SweepConfig {
  ActivationSpec activation{ActivationFamily::TanhPow, 3};
  int p = 64;
  double w_scale = 0;  // 0 selects default_w_scale(d)
  LossConfig loss;
  TrainConfig train;
  Box box = Box::unit(2);
  std::vector<long> N_r_values{27, 64, 125, 216};
  long N_0 = 500;
  long population_points = 100000;  // raised to 10 N_r where needed
  int replicates = 1;
  std::uint64_t seed = 1234;
  MomentConvention convention = MomentConvention::Sqrt;
  C1Variant variant = C1Variant::Theorem;
  std::optional<SigmaConstants> sigma_override;
  int threads = 1;
  std::filesystem::path cache_dir;  // per-row JSON for resume; empty disables
  nlohmann::json fingerprint = nullptr;  // stored with cached rows; mismatches are recomputed

  void validate() const;
};

struct CorrelationReport {
  std::vector<GapReport> rows;  // every row, diverged ones flagged
  std::optional<double> pearson_r;  // over non-diverged rows; empty when undefined
  std::string note;
};

using SweepProgress = std::function<void(std::size_t row, const GapReport&, bool cached)>;

/// One trained net per (N_r, replicate). All rows of a replicate start from
/// the same initial weights; collocation and population samples use a
/// per-row seed.
CorrelationReport sweep_experiment(const SweepConfig& cfg, const SweepProgress& progress = {});

/// Sample Pearson correlation. Throws std::invalid_argument if the lengths
/// differ or are below 3; empty when either input is constant.
std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys);

std::string sweep_csv_header();
std::string sweep_csv(const CorrelationReport& report);
/// "bound_total gap" per line for non-diverged rows.
std::string sweep_plot_data(const CorrelationReport& report);
nlohmann::json to_json(const CorrelationReport& report);

}  // namespace pinnbound
