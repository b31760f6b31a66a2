// Randomized desk-scale instances for every oracle check.

#include <cmath>
#include <random>

#include "pinnbound/experiment.hpp"
#include "pinnbound/oracle.hpp"

namespace pinnbound {

namespace {

using nlohmann::json;

// Stream offsets under cfg.seed, one block per lemma.
constexpr std::uint64_t kAbsStream = 100000;
constexpr std::uint64_t kSingleStream = 200000;
constexpr std::uint64_t kProductStream = 300000;
constexpr std::uint64_t kLinearStream = 400000;
constexpr std::uint64_t kSymStream = 500000;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<Vec<double>> random_points(std::mt19937_64& rng, int n, int dim) {
  std::vector<Vec<double>> pts(static_cast<std::size_t>(n), Vec<double>(dim));
  for (auto& z : pts)
    for (int j = 0; j < dim; ++j) z(j) = uniform(rng, 0.0, 1.0);
  return pts;
}

const std::vector<std::pair<ActivationSpec, int>>& map_catalogue() {
  static const std::vector<std::pair<ActivationSpec, int>> maps = {
      {{ActivationFamily::TanhPow, 1}, 0},    {{ActivationFamily::TanhPow, 1}, 1},
      {{ActivationFamily::TanhPow, 1}, 2},    {{ActivationFamily::TanhPow, 3}, 0},
      {{ActivationFamily::TanhPow, 3}, 1},    {{ActivationFamily::SigmoidPow, 1}, 0},
      {{ActivationFamily::SigmoidPow, 1}, 1}, {{ActivationFamily::TanhPow, 3}, 2},
  };
  return maps;
}

ScalarMapSpec pick_map(std::size_t i) {
  const auto& [spec, order] = map_catalogue()[i % map_catalogue().size()];
  return activation_map(spec, order);
}

// Even instances are small enough for exact enumeration; odd ones are sampled.
int instance_points(int i, std::mt19937_64& rng) {
  if (i % 2 == 0) return 6 + static_cast<int>(rng() % 7);  // 6..12
  return 16 + static_cast<int>(rng() % 9);                   // 16..24
}

Vec<double> random_l1(std::mt19937_64& rng, int len, double l1) {
  Vec<double> v(len);
  for (int j = 0; j < len; ++j) v(j) = uniform(rng, -1.0, 1.0);
  const double s = v.lpNorm<1>();
  return s > 0 ? Vec<double>(v * (l1 / s)) : v;
}

CheckReport tag(CheckReport r, int instance, const std::string& map_label) {
  r.details["instance"] = instance;
  if (!map_label.empty()) r.details["map"] = map_label;
  return r;
}

FieldEvaluator<double> constant_field(double u0, double u1) {
  return [u0, u1](const SpaceTimePoint<double>&) {
    FieldEval<double> fe = FieldEval<double>::zero(2);
    fe.u << u0, u1;
    return fe;
  };
}

std::vector<FieldEvaluator<double>> hypothesis_class(int cls, std::uint64_t seed, double nu) {
  std::vector<FieldEvaluator<double>> out;
  auto small_net = [&](int p, ActivationSpec spec, std::uint64_t s) {
    return network_evaluator(init_weights(2, p, s, default_w_scale(2)), Activation(spec));
  };
  switch (cls % 5) {
    case 0:  // a single hypothesis
      out.push_back(constant_field(0.3, -0.2));
      break;
    case 1:
      out.push_back(constant_field(0.0, 0.0));
      out.push_back(constant_field(0.5, -0.5));
      break;
    case 2:
      out.push_back(taylor_green_evaluator({nu, 1.0, Box::unit(2)}));
      out.push_back(constant_field(0.25, 0.25));
      break;
    case 3:
      for (int h = 0; h < 3; ++h)
        out.push_back(small_net(4, {ActivationFamily::TanhPow, 1}, stream_rng(seed, h)()));
      break;
    default:
      out.push_back(constant_field(0.0, 0.0));
      for (int h = 0; h < 4; ++h)
        out.push_back(small_net(3 + h, {ActivationFamily::TanhPow, 3}, stream_rng(seed, 10 + h)()));
      break;
  }
  return out;
}

}  // namespace

VerifySuiteResult run_verification_suite(const VerifyConfig& cfg) {
  if (cfg.instances < 1 || cfg.symmetrization_classes < 1)
    throw std::invalid_argument("verify: instances and symmetrization_classes must be >= 1");
  VerifySuiteResult res;

  for (int i = 0; i < cfg.instances; ++i) {
    auto rng = stream_rng(cfg.seed, kAbsStream + i);
    const int dim = 2 + i % 3;
    const int n = instance_points(i, rng);
    const auto pts = random_points(rng, n, dim);
    const auto grid = ConstraintGrid::random(dim, 20 + 10 * (i % 4), uniform(rng, 0.5, 3.0), rng());
    const ScalarMapSpec m = pick_map(i);
    res.abs_removal.push_back(
        tag(check_abs_removal(grid, pts, m.phi, m.at_zero, cfg.n_draws, rng()), i, m.label));
  }

  for (int i = 0; i < cfg.instances; ++i) {
    auto rng = stream_rng(cfg.seed, kSingleStream + i);
    const int dim = 2 + i % 3;
    const int n = instance_points(i, rng);
    const auto pts = random_points(rng, n, dim);
    const auto grid = ConstraintGrid::random(dim, 20 + 10 * (i % 3), uniform(rng, 0.5, 3.0), rng());
    const ScalarMapSpec m = pick_map(i + 3);
    HeadFamily heads;
    heads.B = uniform(rng, 0.5, 2.0);
    const int p = 3;
    for (int q = 0; q < p; ++q) {
      heads.heads.push_back(Vec<double>::Unit(p, q) * heads.B);
      heads.heads.push_back(-Vec<double>::Unit(p, q) * heads.B);
    }
    for (int h = 0; h < 3; ++h) heads.heads.push_back(random_l1(rng, p, heads.B));
    res.contraction_single.push_back(tag(
        check_contraction_single(grid, pts, m.phi, m.L, m.at_zero, heads, cfg.n_draws, rng()), i, m.label));
  }

  for (int i = 0; i < cfg.instances; ++i) {
    auto rng = stream_rng(cfg.seed, kProductStream + i);
    const int dim = 2 + i % 2;
    const int n = instance_points(i, rng);
    const auto pts = random_points(rng, n, dim);
    const auto grid = ConstraintGrid::random(dim, 14 + (i % 3) * 3, uniform(rng, 0.5, 2.5), rng());
    const ScalarMapSpec m1 = pick_map(i);
    const ScalarMapSpec m2 = pick_map(i * 5 + 2);
    const ProductConstants pc{m1.B, m2.B, m1.L, m2.L};
    const double k = m1.phi(0.0) * m2.phi(0.0);
    ProductHeads heads;
    heads.B = uniform(rng, 0.5, 2.0);
    const int d_out = 2, p = 2;
    for (int h = 0; h < 3; ++h) {
      Mat<double> F(d_out, p), A(d_out, p);
      for (int r = 0; r < d_out; ++r) {
        F.row(r) = random_l1(rng, p, 1.0).transpose();
        A.row(r) = random_l1(rng, p, 1.0).transpose();
      }
      // Each row pair has unit weighted norm; rescale so the sum equals B.
      F *= heads.B / d_out;
      heads.pairs.emplace_back(F, A);
    }
    res.contraction_product.push_back(tag(check_contraction_product(grid, pts, m1.phi, m2.phi, pc, k, heads,
                                                                     cfg.n_draws, rng()),
                                          i, m1.label + " x " + m2.label));
  }

  for (int i = 0; i < cfg.instances; ++i) {
    auto rng = stream_rng(cfg.seed, kLinearStream + i);
    const int dim = 2 + i % 3;
    const int n = i % 2 == 0 ? 2 + static_cast<int>(rng() % 19) : 24 + static_cast<int>(rng() % 17);
    const auto pts = random_points(rng, n, dim);
    const double B = uniform(rng, 0.5, 3.0);
    const std::uint64_t draw_seed = rng();
    const RademacherEstimate est = rademacher_linear(pts, B, cfg.n_draws, draw_seed);
    double sq = 0;
    for (const auto& z : pts) sq += z.squaredNorm();
    CheckReport r;
    r.name = "rademacher_linear";
    r.lhs = est.mean;
    r.rhs = B * std::sqrt(sq) / n;
    r.margin = r.rhs - r.lhs;
    r.std_error = est.std_error;
    r.exact = est.exact;
    r.n_draws = est.n_draws;
    r.passed = r.lhs <= r.rhs + kSigmaSlack * r.std_error + 1e-12 * (1 + r.rhs);
    r.details = {{"n_points", n}, {"B", B}, {"seed", draw_seed}, {"instance", i}};
    res.rademacher_linear.push_back(r);
  }

  const double nu = 0.01;
  for (int c = 0; c < cfg.symmetrization_classes; ++c) {
    const std::uint64_t class_seed = stream_rng(cfg.seed, kSymStream + c)();
    SymmetrizationSetup setup;
    setup.loss.nu = nu;
    setup.f0 = taylor_green_initial;
    setup.box = Box::unit(2);
    setup.n_points = 10;
    setup.n_trials = cfg.symmetrization_trials;
    setup.population_points = cfg.population_points;
    setup.seed = class_seed;
    CheckReport r = check_symmetrization(hypothesis_class(c, class_seed, nu), setup);
    r.details["class"] = c;
    res.symmetrization.push_back(std::move(r));
  }
  return res;
}

}  // namespace pinnbound
