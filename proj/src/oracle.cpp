#include "pinnbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pinnbound/reduce.hpp"

namespace pinnbound {

using nlohmann::json;

namespace {

struct DrawStats {
  double lhs = 0;
  double rhs = 0;
  double se_diff = 0;
  long count = 0;
  bool exact = false;
};

bool use_exact(int n, SignMode mode, int limit) {
  switch (mode) {
    case SignMode::Exact:
      if (n > 24) throw std::invalid_argument("exact sign enumeration limited to n <= 24");
      return true;
    case SignMode::Sampled:
      return false;
    case SignMode::Auto:
    default:
      return n <= limit;
  }
}

// Expectation over Rademacher sign vectors of a (lhs, rhs) pair.
template <typename Fn>
DrawStats sign_expectation(int n, long n_draws, std::uint64_t seed, SignMode mode, int exact_limit,
                           Fn&& per_draw) {
  DrawStats out;
  out.exact = use_exact(n, mode, exact_limit);
  std::vector<double> eps(static_cast<std::size_t>(n));
  std::vector<double> lhs, rhs, diff;
  if (out.exact) {
    const long total = 1L << n;
    lhs.reserve(total);
    rhs.reserve(total);
    for (long mask = 0; mask < total; ++mask) {
      for (int i = 0; i < n; ++i) eps[i] = ((mask >> i) & 1L) ? 1.0 : -1.0;
      const auto [l, r] = per_draw(eps);
      lhs.push_back(l);
      rhs.push_back(r);
    }
    out.count = total;
  } else {
    if (n_draws < 2) throw std::invalid_argument("Monte-Carlo sign expectation needs n_draws >= 2");
    lhs.reserve(n_draws);
    rhs.reserve(n_draws);
    for (long j = 0; j < n_draws; ++j) {
      auto rng = stream_rng(seed, static_cast<std::uint64_t>(j));
      for (int i = 0; i < n; ++i) eps[i] = (rng() >> 63) ? 1.0 : -1.0;
      const auto [l, r] = per_draw(eps);
      lhs.push_back(l);
      rhs.push_back(r);
    }
    out.count = n_draws;
  }
  const double cnt = static_cast<double>(out.count);
  out.lhs = pairwise_sum(lhs) / cnt;
  out.rhs = pairwise_sum(rhs) / cnt;
  if (!out.exact) {
    diff.resize(lhs.size());
    const double mean_diff = out.rhs - out.lhs;
    for (std::size_t j = 0; j < lhs.size(); ++j) {
      const double dv = (rhs[j] - lhs[j]) - mean_diff;
      diff[j] = dv * dv;
    }
    out.se_diff = std::sqrt(pairwise_sum(diff) / (cnt - 1.0) / cnt);
  }
  return out;
}

void check_points(const std::vector<Vec<double>>& points, int dim) {
  if (points.empty()) throw std::invalid_argument("oracle: empty point list");
  for (const auto& z : points)
    if (z.size() != dim) throw DimensionError("oracle: point dimension does not match the grid");
}

// values[g][i] = phi(<w_g, z_i>)
std::vector<std::vector<double>> map_table(const ConstraintGrid& grid,
                                           const std::vector<Vec<double>>& points,
                                           const ScalarMap& phi) {
  std::vector<std::vector<double>> out(grid.vectors.size(), std::vector<double>(points.size()));
  for (std::size_t g = 0; g < grid.vectors.size(); ++g)
    for (std::size_t i = 0; i < points.size(); ++i) out[g][i] = phi(grid.vectors[g].dot(points[i]));
  return out;
}

double signed_sum(const std::vector<double>& eps, const std::vector<double>& row) {
  double acc = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) acc += eps[i] * row[i];
  return acc;
}

double max_linear(const std::vector<double>& eps, const std::vector<std::vector<double>>& linear) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : linear) best = std::max(best, signed_sum(eps, row));
  return best;
}

CheckReport finish(std::string name, const DrawStats& st, json details = json::object()) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = st.lhs;
  r.rhs = st.rhs;
  r.margin = st.rhs - st.lhs;
  r.std_error = st.se_diff;
  r.exact = st.exact;
  r.n_draws = st.count;
  // Exact expectations still carry floating-point rounding.
  const double rounding = 1e-12 * (1.0 + std::abs(st.lhs) + std::abs(st.rhs));
  r.passed = st.lhs <= st.rhs + kSigmaSlack * st.se_diff + rounding;
  r.details = std::move(details);
  return r;
}

}  // namespace

void ConstraintGrid::validate() const {
  if (vectors.empty()) throw std::invalid_argument("grid: no vectors");
  const auto dim = vectors.front().size();
  bool has_zero = false;
  for (const auto& v : vectors) {
    if (v.size() != dim) throw std::invalid_argument("grid: vectors of different lengths");
    if (v.norm() > B * (1 + 1e-12)) throw std::invalid_argument("grid: vector exceeds the norm cap B");
    if (v.isZero(0)) has_zero = true;
  }
  if (!has_zero) throw std::invalid_argument("grid: the zero vector is required");
}

ConstraintGrid ConstraintGrid::random(int dim, int count, double B, std::uint64_t seed) {
  ConstraintGrid grid;
  grid.B = B;
  grid.vectors.push_back(Vec<double>::Zero(dim));
  auto rng = stream_rng(seed, 0);
  std::normal_distribution<double> normal;
  for (int c = 0; c < count; ++c) {
    Vec<double> v(dim);
    for (int j = 0; j < dim; ++j) v(j) = normal(rng);
    const double radius = B * std::pow(static_cast<double>(rng() >> 11) * 0x1.0p-53, 1.0 / dim);
    const double nv = v.norm();
    grid.vectors.push_back(nv > 0 ? Vec<double>(v * (radius / nv)) : Vec<double>::Zero(dim));
  }
  return grid;
}

void HeadFamily::validate() const {
  if (heads.empty()) throw std::invalid_argument("heads: empty family");
  for (const auto& f : heads)
    if (f.lpNorm<1>() > B * (1 + 1e-12)) throw std::invalid_argument("heads: l1 norm exceeds B");
}

void ProductHeads::validate() const {
  if (pairs.empty()) throw std::invalid_argument("product heads: empty family");
  for (const auto& [F, A] : pairs) {
    if (F.rows() != A.rows() || F.cols() != A.cols() || F.cols() != p())
      throw DimensionError("product heads: F and A must share one d x p shape");
    double s = 0;
    for (Eigen::Index m = 0; m < F.rows(); ++m) s += F.row(m).lpNorm<1>() * A.row(m).lpNorm<1>();
    if (s > B * (1 + 1e-12)) throw std::invalid_argument("product heads: weighted l1 norm exceeds B");
  }
}

json to_json(const CheckReport& r) {
  return {{"name", r.name},       {"lhs", r.lhs},         {"rhs", r.rhs},
          {"margin", r.margin},   {"std_error", r.std_error}, {"exact", r.exact},
          {"n_draws", r.n_draws}, {"verdict", r.passed ? "PASS" : "FAIL"}, {"details", r.details}};
}

RademacherEstimate rademacher_linear(const std::vector<Vec<double>>& points, double B, long n_draws,
                                     std::uint64_t seed, SignMode mode) {
  if (points.empty()) throw std::invalid_argument("rademacher_linear: empty point list");
  const int n = static_cast<int>(points.size());
  const auto dim = points.front().size();
  for (const auto& z : points)
    if (z.size() != dim) throw DimensionError("rademacher_linear: points of different lengths");
  const DrawStats st =
      sign_expectation(n, n_draws, seed, mode, kExactMaxPointsLinear, [&](const std::vector<double>& eps) {
        Vec<double> acc = Vec<double>::Zero(dim);
        for (int i = 0; i < n; ++i) acc += eps[i] * points[i];
        return std::pair<double, double>{B * acc.norm() / n, 0.0};
      });
  return {st.lhs, st.se_diff, st.count, seed, st.exact};
}

RademacherEstimate rademacher_linear_grid(const ConstraintGrid& grid,
                                          const std::vector<Vec<double>>& points, long n_draws,
                                          std::uint64_t seed, SignMode mode) {
  grid.validate();
  check_points(points, grid.dim());
  const int n = static_cast<int>(points.size());
  const auto linear = map_table(grid, points, [](double s) { return s; });
  const DrawStats st = sign_expectation(n, n_draws, seed, mode, kExactMaxPoints,
                                        [&](const std::vector<double>& eps) {
                                          return std::pair<double, double>{max_linear(eps, linear) / n, 0.0};
                                        });
  return {st.lhs, st.se_diff, st.count, seed, st.exact};
}

CheckReport check_abs_removal(const ConstraintGrid& grid, const std::vector<Vec<double>>& points,
                              const ScalarMap& phi, double c, long n_draws, std::uint64_t seed,
                              SignMode mode) {
  grid.validate();
  check_points(points, grid.dim());
  const int n = static_cast<int>(points.size());
  const auto table = map_table(grid, points, phi);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const DrawStats st =
      sign_expectation(n, n_draws, seed, mode, kExactMaxPoints, [&](const std::vector<double>& eps) {
        double eps_sum = 0;
        for (double e : eps) eps_sum += e;
        double sup_abs = 0;
        double sup_shifted = -std::numeric_limits<double>::infinity();
        for (const auto& row : table) {
          const double s = signed_sum(eps, row);
          sup_abs = std::max(sup_abs, std::abs(s));
          sup_shifted = std::max(sup_shifted, s - c * eps_sum);
        }
        return std::pair<double, double>{sup_abs, 2.0 * sup_shifted + std::abs(c) * sqrt_n};
      });
  return finish("abs_removal", st,
                {{"n_points", n}, {"grid_size", grid.vectors.size()}, {"c", c}, {"seed", seed}});
}

CheckReport check_contraction_single(const ConstraintGrid& grid, const std::vector<Vec<double>>& points,
                                     const ScalarMap& phi, double L_phi, double c,
                                     const HeadFamily& heads, long n_draws, std::uint64_t seed,
                                     SignMode mode) {
  grid.validate();
  heads.validate();
  check_points(points, grid.dim());
  const int n = static_cast<int>(points.size());
  const auto table = map_table(grid, points, phi);
  const auto linear = map_table(grid, points, [](double s) { return s; });
  const double B = heads.B;
  const double nd = static_cast<double>(n);
  const DrawStats st =
      sign_expectation(n, n_draws, seed, mode, kExactMaxPoints, [&](const std::vector<double>& eps) {
        double s_max = -std::numeric_limits<double>::infinity();
        double s_min = std::numeric_limits<double>::infinity();
        for (const auto& row : table) {
          const double s = signed_sum(eps, row);
          s_max = std::max(s_max, s);
          s_min = std::min(s_min, s);
        }
        // Rows are chosen independently, so each head entry picks its best row.
        double sup = -std::numeric_limits<double>::infinity();
        for (const auto& f : heads.heads) {
          double v = 0;
          for (Eigen::Index q = 0; q < f.size(); ++q) v += f(q) >= 0 ? f(q) * s_max : f(q) * s_min;
          sup = std::max(sup, v);
        }
        const double rhs = 2.0 * B * L_phi / nd * max_linear(eps, linear) + B * std::abs(c) / std::sqrt(nd);
        return std::pair<double, double>{sup / nd, rhs};
      });
  return finish("contraction_single", st,
                {{"n_points", n}, {"grid_size", grid.vectors.size()}, {"B", B}, {"L_phi", L_phi},
                 {"c", c}, {"seed", seed}});
}

CheckReport check_contraction_product(const ConstraintGrid& grid,
                                      const std::vector<Vec<double>>& points, const ScalarMap& phi1,
                                      const ScalarMap& phi2, const ProductConstants& consts, double k,
                                      const ProductHeads& heads, long n_draws, std::uint64_t seed,
                                      SignMode mode) {
  grid.validate();
  heads.validate();
  check_points(points, grid.dim());
  const int n = static_cast<int>(points.size());
  const int p = heads.p();
  if (p > 3) throw std::invalid_argument("check_contraction_product: p <= 3 required (grid^p enumeration)");
  const auto t1 = map_table(grid, points, phi1);
  const auto t2 = map_table(grid, points, phi2);
  const auto linear = map_table(grid, points, [](double s) { return s; });
  const std::size_t G = grid.vectors.size();
  std::vector<Mat<double>> couplings;  // M = F^T A, p x p
  for (const auto& [F, A] : heads.pairs) couplings.push_back(F.transpose() * A);

  const double B = heads.B;
  const double nd = static_cast<double>(n);
  const double phi1_0 = phi1(0.0);
  const double lin_coef = 4.0 * B * (consts.B_phi1 * consts.L_phi2 + consts.B_phi2 * consts.L_phi1) / nd;
  const double const_term = B * (2.0 * consts.B_phi2 * std::abs(phi1_0) + std::abs(k)) / std::sqrt(nd);

  Mat<double> T(G, G);
  std::vector<std::size_t> rows(static_cast<std::size_t>(p));
  const DrawStats st =
      sign_expectation(n, n_draws, seed, mode, kExactMaxPoints, [&](const std::vector<double>& eps) {
        for (std::size_t g1 = 0; g1 < G; ++g1)
          for (std::size_t g2 = 0; g2 < G; ++g2) {
            double acc = 0;
            for (int i = 0; i < n; ++i) acc += eps[i] * t1[g1][i] * t2[g2][i];
            T(g1, g2) = acc;
          }
        double sup = -std::numeric_limits<double>::infinity();
        std::fill(rows.begin(), rows.end(), 0);
        while (true) {
          for (const auto& M : couplings) {
            double v = 0;
            for (int q1 = 0; q1 < p; ++q1)
              for (int q2 = 0; q2 < p; ++q2) v += M(q1, q2) * T(rows[q1], rows[q2]);
            sup = std::max(sup, v);
          }
          int pos = 0;
          while (pos < p && ++rows[pos] == G) rows[pos++] = 0;
          if (pos == p) break;
        }
        return std::pair<double, double>{sup / nd, lin_coef * max_linear(eps, linear) + const_term};
      });
  return finish("contraction_product", st,
                {{"n_points", n}, {"grid_size", G}, {"p", p}, {"B", B}, {"k", k},
                 {"B_phi1", consts.B_phi1}, {"B_phi2", consts.B_phi2}, {"L_phi1", consts.L_phi1},
                 {"L_phi2", consts.L_phi2}, {"seed", seed}});
}

CheckReport check_symmetrization(const std::vector<FieldEvaluator<double>>& hypotheses,
                                 const SymmetrizationSetup& setup) {
  if (hypotheses.empty()) throw std::invalid_argument("check_symmetrization: empty hypothesis class");
  if (setup.n_points < 1 || setup.n_trials < 2 || setup.population_points < 1)
    throw std::invalid_argument("check_symmetrization: n_points >= 1, n_trials >= 2 required");
  setup.loss.validate();
  setup.box.validate();
  const std::size_t H = hypotheses.size();

  auto mean_of = [](const std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); };
  auto res_values = [&](const FieldEvaluator<double>& h, const std::vector<SpaceTimePoint<double>>& pts) {
    const auto parts = interior_losses(h, setup.loss, pts);
    std::vector<double> out(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) out[i] = parts[i].momentum + parts[i].divergence;
    return out;
  };

  // Population risks from one large fixed sample.
  const std::uint64_t pop_seed = stream_rng(setup.seed, 0)();
  const auto pop_int = sample_interior(setup.population_points, setup.box, pop_seed);
  const auto pop_init = sample_initial(setup.population_points, setup.box, pop_seed);
  std::vector<double> population(H);
  for (std::size_t h = 0; h < H; ++h) {
    population[h] = mean_of(res_values(hypotheses[h], pop_int)) +
                    mean_of(initial_losses(hypotheses[h], setup.loss, pop_init, setup.f0));
  }

  const long trials = setup.n_trials;
  const double n = static_cast<double>(setup.n_points);
  std::vector<double> lhs(trials), rhs(trials);
  std::vector<std::vector<double>> gaps(H, std::vector<double>(trials));
  std::vector<double> eps(static_cast<std::size_t>(setup.n_points));
  std::vector<double> eps0(static_cast<std::size_t>(setup.n_points));
  for (long t = 0; t < trials; ++t) {
    auto rng = stream_rng(setup.seed, static_cast<std::uint64_t>(t) + 1);
    const std::uint64_t sample_seed = rng();
    const auto S_int = sample_interior(setup.n_points, setup.box, sample_seed);
    const auto S_init = sample_initial(setup.n_points, setup.box, sample_seed);
    for (auto& e : eps) e = (rng() >> 63) ? 1.0 : -1.0;
    for (auto& e : eps0) e = (rng() >> 63) ? 1.0 : -1.0;
    double sup_gap = -std::numeric_limits<double>::infinity();
    double sup_res = -std::numeric_limits<double>::infinity();
    double sup_init = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < H; ++h) {
      const auto lr = res_values(hypotheses[h], S_int);
      const auto l0 = initial_losses(hypotheses[h], setup.loss, S_init, setup.f0);
      const double gap = mean_of(lr) + mean_of(l0) - population[h];
      gaps[h][t] = gap;
      sup_gap = std::max(sup_gap, gap);
      sup_res = std::max(sup_res, signed_sum(eps, lr) / n);
      sup_init = std::max(sup_init, signed_sum(eps0, l0) / n);
    }
    lhs[t] = sup_gap;
    rhs[t] = 2.0 * sup_res + 2.0 * sup_init;
  }

  DrawStats st;
  st.count = trials;
  st.lhs = mean_of(lhs);
  st.rhs = mean_of(rhs);
  std::vector<double> sq(trials);
  for (long t = 0; t < trials; ++t) {
    const double dv = (rhs[t] - lhs[t]) - (st.rhs - st.lhs);
    sq[t] = dv * dv;
  }
  st.se_diff = std::sqrt(pairwise_sum(sq) / (static_cast<double>(trials) - 1.0) / static_cast<double>(trials));

  json per_h = json::array();
  for (std::size_t h = 0; h < H; ++h)
    per_h.push_back({{"population_risk", population[h]}, {"mean_gap", mean_of(gaps[h])}});
  return finish("symmetrization", st,
                {{"hypotheses", H}, {"n_points", setup.n_points}, {"population_points", setup.population_points},
                 {"seed", setup.seed}, {"per_hypothesis", per_h}});
}

ScalarMapSpec activation_map(const ActivationSpec& spec, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("activation_map: order must be 0, 1, or 2");
  const SigmaConstants sc = constants(spec);
  const Activation act(spec);
  ScalarMapSpec out;
  out.phi = [act, order](double x) {
    const auto d = act(x);
    return order == 0 ? d.value : order == 1 ? d.d1 : d.d2;
  };
  const double Ls[] = {sc.L_sigma, sc.L_sigma1, sc.L_sigma2};
  // sup |sigma''| is bounded by the Lipschitz constant of sigma'.
  const double Bs[] = {sc.B_sigma, sc.B_sigma1, sc.L_sigma1};
  const double cs[] = {sc.c0, sc.c1, sc.c2};
  out.L = Ls[order];
  out.B = Bs[order];
  out.at_zero = cs[order];
  out.label = spec.family_name() + "^" + std::to_string(spec.k) + std::string(order, '\'');
  return out;
}

bool VerifySuiteResult::all_passed() const {
  for (const auto* group : {&abs_removal, &contraction_single, &contraction_product, &rademacher_linear,
                            &symmetrization})
    for (const auto& r : *group)
      if (!r.passed) return false;
  return true;
}

}  // namespace pinnbound
