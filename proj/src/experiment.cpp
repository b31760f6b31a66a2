#include "pinnbound/experiment.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pinnbound/json_io.hpp"
#include "pinnbound/reduce.hpp"

namespace pinnbound {

using nlohmann::json;
using std::numbers::pi;

FieldEval<double> taylor_green_field(const SpaceTimePoint<double>& z, const TaylorGreenParams& params) {
  if (z.d() != 2) throw DimensionError("taylor_green_field: needs d = 2, got " + std::to_string(z.d()));
  const double x = z.x(0), y = z.x(1);
  const double decay = std::exp(-2 * pi * pi * params.nu * z.t);
  const double cx = std::cos(pi * x), sx = std::sin(pi * x);
  const double cy = std::cos(pi * y), sy = std::sin(pi * y);

  FieldEval<double> fe = FieldEval<double>::zero(2);
  fe.u << -cx * sy * decay, sx * cy * decay;
  fe.p_val = -0.25 * params.rho * (std::cos(2 * pi * x) + std::cos(2 * pi * y)) * decay * decay;
  fe.du_dt = -2 * pi * pi * params.nu * fe.u;
  fe.jac_u << pi * sx * sy * decay, -pi * cx * cy * decay,
              pi * cx * cy * decay, -pi * sx * sy * decay;
  fe.grad_p << 0.5 * pi * params.rho * std::sin(2 * pi * x) * decay * decay,
               0.5 * pi * params.rho * std::sin(2 * pi * y) * decay * decay;
  fe.lap_u = -2 * pi * pi * fe.u;
  fe.div_u = fe.jac_u.trace();
  return fe;
}

Vec<double> taylor_green_initial(const Vec<double>& x) {
  if (x.size() != 2) throw DimensionError("taylor_green_initial: needs d = 2");
  Vec<double> u(2);
  u << -std::cos(pi * x(0)) * std::sin(pi * x(1)), std::sin(pi * x(0)) * std::cos(pi * x(1));
  return u;
}

FieldEvaluator<double> taylor_green_evaluator(const TaylorGreenParams& params) {
  return [params](const SpaceTimePoint<double>& z) { return taylor_green_field(z, params); };
}

CollocationSet<double> make_collocation(long N_r, long N_0, const Box& box, std::uint64_t seed) {
  return {sample_interior(N_r, box, seed), sample_initial(N_0, box, seed)};
}

namespace {

struct MeanAndVar {
  double mean;
  double var;  // unbiased sample variance
};

MeanAndVar mean_var(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  if (v.size() < 2) return {mean, 0.0};
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return {mean, pairwise_sum(sq) / (n - 1)};
}

}  // namespace

RiskEstimate population_risk(const FieldEvaluator<double>& field, const LossConfig& loss,
                             const InitialCondition<double>& f0, const Box& box,
                             long population_points, std::uint64_t seed, int threads) {
  const auto interior = sample_interior(population_points, box, seed);
  const auto initial = sample_initial(population_points, box, seed);
  const auto parts = interior_losses(field, loss, interior, threads);
  std::vector<double> res(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) res[i] = parts[i].momentum + parts[i].divergence;
  const MeanAndVar r = mean_var(res);
  const MeanAndVar i0 = mean_var(initial_losses(field, loss, initial, f0, threads));
  const double n = static_cast<double>(population_points);
  return {r.mean + i0.mean, std::sqrt(r.var / n + i0.var / n)};
}

GapReport measure_gap_field(const FieldEvaluator<double>& field, const CollocationSet<double>& train_colloc,
                            const InitialCondition<double>& f0, const GapConfig& cfg) {
  cfg.loss.validate();
  const long N_r = static_cast<long>(train_colloc.interior.size());
  if (cfg.population_points < 10 * N_r)
    throw std::invalid_argument("measure_gap: population_points must be >= 10 N_r");
  GapReport g;
  g.N_r = N_r;
  g.N_0 = static_cast<long>(train_colloc.initial.size());
  g.train_risk = empirical_risk(field, cfg.loss, train_colloc, f0, cfg.threads).total;
  const RiskEstimate pop = population_risk(field, cfg.loss, f0, cfg.box, cfg.population_points, cfg.seed, cfg.threads);
  g.population_estimate = pop.risk;
  g.population_std_error = pop.std_error;
  g.population_points = cfg.population_points;
  g.gap = std::abs(g.train_risk - g.population_estimate);
  g.seed = cfg.seed;
  return g;
}

GapReport measure_gap(const PinnWeights<double>& w, const ActivationSpec& spec,
                      const CollocationSet<double>& train_colloc, const InitialCondition<double>& f0,
                      const GapConfig& cfg) {
  const Activation act(spec);
  GapReport g = measure_gap_field(network_evaluator(w, act), train_colloc, f0, cfg);
  const auto interior = sample_interior(cfg.population_points, cfg.box, cfg.seed);
  const auto initial = sample_initial(cfg.population_points, cfg.box, cfg.seed);
  const MomentConstants mc = moment_constants(interior, initial, cfg.convention);
  const SigmaConstants sc = cfg.sigma_override ? *cfg.sigma_override : constants(spec);
  g.bound = generalization_bound(weight_stats(w), sc, cfg.loss, g.N_r, g.N_0, mc.C_z, mc.C_z0, cfg.variant);
  g.activation = spec.family_name() + "^" + std::to_string(spec.k);
  return g;
}

namespace {

BoundReport bound_report_from_json(const json& j) {
  BoundReport r;
  r.C1 = j.at("C1").get<double>();
  r.C2 = j.at("C2").get<double>();
  r.C_z = j.at("C_z").get<double>();
  r.C_z0 = j.at("C_z0").get<double>();
  r.term_interior = j.at("term_interior").get<double>();
  r.term_initial = j.at("term_initial").get<double>();
  r.total = j.at("total").get<double>();
  const json& in = j.at("inputs");
  r.loss.delta = in.at("delta").get<double>();
  r.loss.nu = in.at("nu").get<double>();
  r.loss.lambda0 = in.at("lambda0").get<double>();
  r.loss.lambda1 = in.at("lambda1").get<double>();
  r.N_r = in.at("N_r").get<long>();
  r.N_0 = in.at("N_0").get<long>();
  r.variant = parse_c1_variant(in.at("c1_variant").get<std::string>());
  r.sigma = sigma_constants_from_json(in.at("sigma"));
  const json& s = in.at("weight_stats");
  r.stats = {s.at("B_f1").get<double>(), s.at("B_f2").get<double>(), s.at("B_f3").get<double>(),
             s.at("B_f4").get<double>(), s.at("B_f5").get<double>(), s.at("B_w").get<double>(),
             s.at("B_a").get<double>()};
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace

json to_json(const GapReport& g) {
  return {{"N_r", g.N_r},
          {"N_0", g.N_0},
          {"train_risk", g.train_risk},
          {"population_estimate", g.population_estimate},
          {"population_std_error", g.population_std_error},
          {"population_points", g.population_points},
          {"gap", g.gap},
          {"bound", to_json(g.bound)},
          {"activation", g.activation},
          {"seed", g.seed},
          {"diverged", g.diverged},
          {"note", g.note}};
}

GapReport gap_report_from_json(const json& j) {
  try {
    GapReport g;
    g.N_r = j.at("N_r").get<long>();
    g.N_0 = j.at("N_0").get<long>();
    g.train_risk = j.at("train_risk").get<double>();
    g.population_estimate = j.at("population_estimate").get<double>();
    g.population_std_error = j.at("population_std_error").get<double>();
    g.population_points = j.at("population_points").get<long>();
    g.gap = j.at("gap").get<double>();
    g.bound = bound_report_from_json(j.at("bound"));
    g.activation = j.at("activation").get<std::string>();
    g.seed = j.at("seed").get<std::uint64_t>();
    g.diverged = j.at("diverged").get<bool>();
    g.note = j.at("note").get<std::string>();
    return g;
  } catch (const json::exception& e) {
    throw FormatError(std::string("gap report: ") + e.what());
  }
}

void SweepConfig::validate() const {
  activation.validate();
  loss.validate();
  train.validate();
  box.validate();
  if (box.d() != 2) throw std::invalid_argument("sweep: the Taylor-Green benchmark needs d = 2");
  if (p < 1) throw std::invalid_argument("sweep: p must be >= 1");
  if (N_r_values.size() < 3) throw std::invalid_argument("sweep: at least 3 N_r values are required");
  for (long n : N_r_values)
    if (n < 1) throw std::invalid_argument("sweep: N_r values must be >= 1");
  if (N_0 < 1) throw std::invalid_argument("sweep: N_0 must be >= 1");
  if (replicates < 1) throw std::invalid_argument("sweep: replicates must be >= 1");
  if (population_points < 1) throw std::invalid_argument("sweep: population_points must be >= 1");
}

namespace {

// Stream layout under the sweep seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kRowStream = 1000;
constexpr std::uint64_t kPopulationStream = 2000000;

std::filesystem::path row_cache_path(const SweepConfig& cfg, std::size_t row) {
  return cfg.cache_dir / ("row_" + std::to_string(row) + ".json");
}

std::optional<GapReport> load_cached_row(const SweepConfig& cfg, std::size_t row) {
  if (cfg.cache_dir.empty()) return std::nullopt;
  const auto path = row_cache_path(cfg, row);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const json doc = read_json_file(path);
    if (doc.at("fingerprint") != cfg.fingerprint) return std::nullopt;
    return gap_report_from_json(doc.at("row"));
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable cache entries are recomputed
  }
}

GapReport run_row(const SweepConfig& cfg, long N_r, std::size_t row, int replicate) {
  const std::uint64_t init_seed = stream_rng(cfg.seed, kInitStream + replicate)();
  const std::uint64_t row_seed = stream_rng(cfg.seed, kRowStream + row)();
  const std::uint64_t pop_seed = stream_rng(cfg.seed, kPopulationStream + row)();
  const int d = cfg.box.d();
  const double scale = cfg.w_scale > 0 ? cfg.w_scale : default_w_scale(d);
  const PinnWeights<double> w0 = init_weights(d, cfg.p, init_seed, scale);
  const CollocationSet<double> colloc = make_collocation(N_r, cfg.N_0, cfg.box, row_seed);
  const InitialCondition<double> f0 = taylor_green_initial;
  const Activation act(cfg.activation);

  GapConfig gc;
  gc.loss = cfg.loss;
  gc.box = cfg.box;
  gc.population_points = std::max(cfg.population_points, 10 * N_r);
  gc.seed = pop_seed;
  gc.convention = cfg.convention;
  gc.variant = cfg.variant;
  gc.sigma_override = cfg.sigma_override;
  gc.threads = cfg.threads;

  TrainConfig tc = cfg.train;
  tc.threads = cfg.threads;
  GapReport g;
  try {
    const TrainResult tr = train(w0, act, cfg.loss, colloc, f0, tc);
    g = measure_gap(tr.weights, cfg.activation, colloc, f0, gc);
  } catch (const NumericalError& e) {
    g.N_r = N_r;
    g.N_0 = cfg.N_0;
    g.population_points = gc.population_points;
    g.activation = cfg.activation.family_name() + "^" + std::to_string(cfg.activation.k);
    g.diverged = true;
    g.note = e.what();
  }
  g.seed = row_seed;
  return g;
}

}  // namespace

CorrelationReport sweep_experiment(const SweepConfig& cfg, const SweepProgress& progress) {
  cfg.validate();
  CorrelationReport report;
  std::size_t row = 0;
  for (int rep = 0; rep < cfg.replicates; ++rep) {
    for (long N_r : cfg.N_r_values) {
      const auto cached = load_cached_row(cfg, row);
      GapReport g = cached ? *cached : run_row(cfg, N_r, row, rep);
      if (!cached && !cfg.cache_dir.empty())
        write_json_file(row_cache_path(cfg, row), {{"fingerprint", cfg.fingerprint}, {"row", to_json(g)}});
      if (progress) progress(row, g, cached.has_value());
      report.rows.push_back(std::move(g));
      ++row;
    }
  }
  std::vector<double> bounds, gaps;
  for (const auto& g : report.rows) {
    if (g.diverged) continue;
    bounds.push_back(g.bound.total);
    gaps.push_back(g.gap);
  }
  if (bounds.size() < 3) {
    report.note = "fewer than 3 converged rows; correlation undefined";
  } else {
    report.pearson_r = pearson(bounds, gaps);
    if (!report.pearson_r) report.note = "constant bound or gap column; correlation undefined";
  }
  return report;
}

std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: inputs differ in length");
  if (xs.size() < 3) throw std::invalid_argument("pearson: at least 3 pairs are required");
  const double n = static_cast<double>(xs.size());
  const double mx = pairwise_sum(xs) / n;
  const double my = pairwise_sum(ys) / n;
  std::vector<double> sxy(xs.size()), sxx(xs.size()), syy(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy[i] = (xs[i] - mx) * (ys[i] - my);
    sxx[i] = (xs[i] - mx) * (xs[i] - mx);
    syy[i] = (ys[i] - my) * (ys[i] - my);
  }
  const double vx = pairwise_sum(sxx), vy = pairwise_sum(syy);
  if (vx == 0 || vy == 0) return std::nullopt;
  return std::clamp(pairwise_sum(sxy) / std::sqrt(vx * vy), -1.0, 1.0);
}

std::string sweep_csv_header() {
  return "N_r,N_0,activation,nu,delta,lambda0,lambda1,train_risk,population_estimate,gap,C1,C2,C_z,"
         "C_z0,term_interior,term_initial,bound_total,seed";
}

std::string sweep_csv(const CorrelationReport& report) {
  std::ostringstream out;
  out << sweep_csv_header() << '\n';
  for (const auto& g : report.rows) {
    if (g.diverged) continue;
    const auto& b = g.bound;
    out << g.N_r << ',' << g.N_0 << ',' << g.activation;
    for (double v : {b.loss.nu, b.loss.delta, b.loss.lambda0, b.loss.lambda1, g.train_risk,
                     g.population_estimate, g.gap, b.C1, b.C2, b.C_z, b.C_z0, b.term_interior,
                     b.term_initial, b.total})
      out << ',' << format_double(v);
    out << ',' << g.seed << '\n';
  }
  return out.str();
}

std::string sweep_plot_data(const CorrelationReport& report) {
  std::ostringstream out;
  out << "# bound_total gap\n";
  for (const auto& g : report.rows)
    if (!g.diverged) out << format_double(g.bound.total) << ' ' << format_double(g.gap) << '\n';
  return out.str();
}

json to_json(const CorrelationReport& report) {
  json rows = json::array();
  for (const auto& g : report.rows) rows.push_back(to_json(g));
  return {{"rows", rows},
          {"pearson_r", report.pearson_r ? json(*report.pearson_r) : json(nullptr)},
          {"note", report.note}};
}

}  // namespace pinnbound
