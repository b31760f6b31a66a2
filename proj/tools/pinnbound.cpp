// pinnbound: train PINNs for Navier-Stokes, evaluate their generalization
// bound, verify the underlying inequalities, and run the correlation sweep.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "pinnbound/config.hpp"
#include "pinnbound/json_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pinnbound;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

// Stream layout under the run seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kCollocStream = 1;
constexpr std::uint64_t kPopulationStream = 2;

struct CommonOptions {
  std::string preset = "desk";
  std::string config;
  std::vector<std::string> overrides;
  int threads = 0;
  std::string out;
};

RunConfig resolve(const CommonOptions& o) {
  std::vector<std::string> overrides = o.overrides;
  if (o.threads > 0) overrides.push_back("threads=" + std::to_string(o.threads));
  if (!o.out.empty()) overrides.push_back("out_dir=" + json(o.out).dump());
  return resolve_config(o.preset, o.config, overrides);
}

json envelope(const RunConfig& cfg, json body) {
  body["version"] = PINNBOUND_VERSION;
  body["config"] = to_json(cfg);
  return body;
}

std::uint64_t run_stream(const RunConfig& cfg, std::uint64_t index) { return stream_rng(cfg.seed, index)(); }

int cmd_train(const RunConfig& cfg) {
  const fs::path out = cfg.out_dir;
  const int d = cfg.box.d();
  if (d != 2) throw std::invalid_argument("train: the Taylor-Green benchmark needs a 2D spatial box");
  const double scale = cfg.w_scale > 0 ? cfg.w_scale : default_w_scale(d);
  const PinnWeights<double> w0 = init_weights(d, cfg.p, run_stream(cfg, kInitStream), scale);
  const auto colloc = make_collocation(cfg.N_r, cfg.N_0, cfg.box, run_stream(cfg, kCollocStream));
  TrainConfig tc = cfg.train;
  tc.threads = cfg.threads;
  const TrainResult tr = train(w0, Activation(cfg.activation), cfg.loss, colloc, taylor_green_initial, tc);

  GapConfig gc = gap_config(cfg, run_stream(cfg, kPopulationStream));
  gc.population_points = std::max(cfg.population_points, 10 * cfg.N_r);
  const GapReport gap = measure_gap(tr.weights, cfg.activation, colloc, taylor_green_initial, gc);

  save_checkpoint(tr.weights, cfg.activation, out / "checkpoint.json", envelope(cfg, json::object()));
  write_text_file(out / "history.csv", history_csv(tr.history));
  const auto& last = tr.history.back().risk;
  write_json_file(out / "train_report.json",
                  envelope(cfg, {{"final_risk", last.total}, {"gap", to_json(gap)}}));
  std::cout << "trained " << cfg.train.epochs << " epochs: risk " << format_double(last.total)
            << ", gap " << format_double(gap.gap) << ", bound " << format_double(gap.bound.total) << '\n'
            << "wrote " << (out / "checkpoint.json").string() << '\n';
  return kOk;
}

int cmd_bound(const RunConfig& cfg, const std::string& checkpoint_path) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  MomentConstants mc;
  if (!cfg.C_z || !cfg.C_z0) {
    if (cfg.box.d() != ck.weights.d())
      throw DimensionError("bound: checkpoint dimension does not match the configured box");
    const std::uint64_t seed = run_stream(cfg, kPopulationStream);
    mc = moment_constants(sample_interior(cfg.population_points, cfg.box, seed),
                          sample_initial(cfg.population_points, cfg.box, seed), cfg.cz_convention);
  }
  const double C_z = cfg.C_z ? *cfg.C_z : mc.C_z;
  const double C_z0 = cfg.C_z0 ? *cfg.C_z0 : mc.C_z0;
  const SigmaConstants sc = cfg.sigma_override ? *cfg.sigma_override : constants(ck.activation);
  const BoundReport r =
      generalization_bound(weight_stats(ck.weights), sc, cfg.loss, cfg.N_r, cfg.N_0, C_z, C_z0, cfg.c1_variant);

  const fs::path out = cfg.out_dir;
  write_json_file(out / "bound.json",
                  envelope(cfg, {{"checkpoint", checkpoint_path}, {"bound", to_json(r)}}));
  write_text_file(out / "bound.csv", bound_csv_header() + "\n" + bound_csv_row(r) + "\n");
  std::cout << "C1 = " << format_double(r.C1) << "  C2 = " << format_double(r.C2) << '\n'
            << "term_interior = " << format_double(r.term_interior) << '\n'
            << "term_initial  = " << format_double(r.term_initial) << '\n'
            << "total         = " << format_double(r.total) << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  VerifyConfig vc = cfg.verify;
  vc.threads = cfg.threads;
  const VerifySuiteResult res = run_verification_suite(vc);
  const fs::path out = fs::path(cfg.out_dir) / "verify";
  const std::pair<const char*, const std::vector<CheckReport>*> groups[] = {
      {"abs_removal", &res.abs_removal},
      {"contraction_single", &res.contraction_single},
      {"contraction_product", &res.contraction_product},
      {"rademacher_linear", &res.rademacher_linear},
      {"symmetrization", &res.symmetrization},
  };
  for (const auto& [name, reports] : groups) {
    json checks = json::array();
    int passed = 0;
    for (const auto& r : *reports) {
      checks.push_back(to_json(r));
      passed += r.passed ? 1 : 0;
    }
    const bool ok = passed == static_cast<int>(reports->size());
    write_json_file(out / (std::string(name) + ".json"),
                    envelope(cfg, {{"check", name}, {"verdict", ok ? "PASS" : "FAIL"}, {"checks", checks}}));
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << passed << "/" << reports->size() << '\n';
  }
  return res.all_passed() ? kOk : kVerification;
}

int cmd_sweep(const RunConfig& cfg) {
  const fs::path out = cfg.out_dir;
  SweepConfig sc = sweep_config(cfg);
  sc.cache_dir = out / "rows";
  json fp = to_json(cfg);
  fp.erase("threads");
  fp.erase("out_dir");
  fp.erase("verify");
  fp["version"] = PINNBOUND_VERSION;
  sc.fingerprint = fp;

  const CorrelationReport rep = sweep_experiment(sc, [](std::size_t row, const GapReport& g, bool cached) {
    std::cout << "row " << row << " N_r=" << g.N_r << (cached ? " (cached)" : "")
              << (g.diverged ? " diverged" : "") << ": gap " << format_double(g.gap) << ", bound "
              << format_double(g.bound.total) << std::endl;
  });
  write_text_file(out / "sweep.csv", sweep_csv(rep));
  write_text_file(out / "bound_vs_gap.dat", sweep_plot_data(rep));
  write_json_file(out / "sweep.json", envelope(cfg, to_json(rep)));
  std::cout << "pearson_r = " << (rep.pearson_r ? format_double(*rep.pearson_r) : "undefined") << '\n';
  return kOk;
}

int cmd_taylor_green(const RunConfig& cfg) {
  if (cfg.box.d() != 2) throw std::invalid_argument("taylor-green-report: needs a 2D spatial box");
  const TaylorGreenParams params{cfg.loss.nu, 1.0, cfg.box};
  const auto field = taylor_green_evaluator(params);
  const std::uint64_t seed = run_stream(cfg, kPopulationStream);
  const auto pts = sample_interior(cfg.population_points, cfg.box, seed);
  double max_res = 0, max_div = 0;
  for (const auto& z : pts) {
    const auto fe = field(z);
    max_res = std::max(max_res, momentum_residual(fe, cfg.loss.nu).lpNorm<Eigen::Infinity>());
    max_div = std::max(max_div, std::abs(fe.div_u));
  }
  const CollocationSet<double> colloc{pts, sample_initial(cfg.population_points, cfg.box, seed)};
  const double risk = empirical_risk(field, cfg.loss, colloc, InitialCondition<double>(taylor_green_initial), cfg.threads).total;
  const bool ok = max_res < 1e-10 && max_div < 1e-10 && risk < 1e-10;
  write_json_file(fs::path(cfg.out_dir) / "taylor_green_report.json",
                  envelope(cfg, {{"points", cfg.population_points},
                                 {"max_abs_momentum_residual", max_res},
                                 {"max_abs_divergence", max_div},
                                 {"empirical_risk", risk},
                                 {"verdict", ok ? "PASS" : "FAIL"}}));
  std::cout << "max |residual| " << format_double(max_res) << ", max |div| " << format_double(max_div)
            << ", risk " << format_double(risk) << (ok ? "  PASS" : "  FAIL") << '\n';
  return ok ? kOk : kNumerical;
}

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--preset", o.preset, "desk, sweep, or figure1")->check(CLI::IsMember({"desk", "sweep", "figure1"}));
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--set", o.overrides, "dot-path override, e.g. loss.nu=0.001")->allow_extra_args(false);
  sub->add_option("--threads", o.threads, "worker cap")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalization bounds for Navier-Stokes PINNs"};
  app.set_version_flag("--version", std::string(PINNBOUND_VERSION));
  app.require_subcommand(1);

  CommonOptions opts;
  std::string checkpoint;
  auto* train_cmd = app.add_subcommand("train", "train a network on the Taylor-Green benchmark");
  auto* bound_cmd = app.add_subcommand("bound", "evaluate the generalization bound of a checkpoint");
  auto* verify_cmd = app.add_subcommand("verify", "run the Rademacher inequality checks");
  auto* sweep_cmd = app.add_subcommand("sweep", "bound vs. gap correlation sweep over N_r");
  auto* tg_cmd = app.add_subcommand("taylor-green-report", "residual check of the exact solution");
  for (auto* sub : {train_cmd, bound_cmd, verify_cmd, sweep_cmd, tg_cmd}) add_common(sub, opts);
  bound_cmd->add_option("--checkpoint", checkpoint, "checkpoint JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const RunConfig cfg = resolve(opts);
    if (*train_cmd) return cmd_train(cfg);
    if (*bound_cmd) return cmd_bound(cfg, checkpoint);
    if (*verify_cmd) return cmd_verify(cfg);
    if (*sweep_cmd) return cmd_sweep(cfg);
    return cmd_taylor_green(cfg);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
