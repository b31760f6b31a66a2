#include "pinnbound/bound.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pinnbound/json_io.hpp"

namespace pinnbound {

using nlohmann::json;

WeightStats weight_stats(const PinnWeights<double>& w) {
  const int d = w.d();
  const auto Wx = w.W().leftCols(d);
  const auto wt = w.W().col(d);
  const Vec<double> a1 = w.A1().colwise().sum().transpose();
  const Vec<double> wx = Wx.rowwise().sum();

  WeightStats s;
  s.B_f1 = a1.cwiseProduct(wt).lpNorm<1>();
  for (int m = 0; m < d; ++m) {
    s.B_f2 += a1.cwiseProduct(Wx.col(m)).lpNorm<1>() * w.A1().row(m).lpNorm<1>();
  }
  s.B_f3 = w.a2().cwiseProduct(wx).lpNorm<1>();
  Vec<double> f4 = Vec<double>::Zero(w.p());
  Vec<double> f5 = Vec<double>::Zero(w.p());
  for (int m = 0; m < d; ++m) {
    f4 += a1.cwiseProduct(Wx.col(m)).cwiseProduct(Wx.col(m));
    f5 += w.A1().row(m).transpose().cwiseProduct(Wx.col(m));
  }
  s.B_f4 = f4.lpNorm<1>();
  s.B_f5 = f5.lpNorm<1>();
  s.B_w = w.W().rowwise().norm().maxCoeff();
  s.B_a = a1.lpNorm<1>();
  return s;
}

TheoremConstants theorem_constants(const WeightStats& s, const SigmaConstants& sc, double nu,
                                   double lambda0, C1Variant variant) {
  if (!(nu > 0)) throw std::invalid_argument("theorem_constants: nu must be > 0");
  const double viscous_lipschitz =
      variant == C1Variant::Theorem ? sc.L_sigma2 : sc.L_sigma1 + sc.L_sigma;
  TheoremConstants c;
  c.C1 = 2 * s.B_f1 * sc.L_sigma1 + 4 * s.B_f2 * (sc.B_sigma * sc.L_sigma1 + sc.B_sigma1 * sc.L_sigma) +
         2 * s.B_f3 * sc.L_sigma1 + 2 * nu * s.B_f4 * viscous_lipschitz +
         2 * lambda0 * s.B_f5 * sc.L_sigma1;
  c.C2 = s.B_f1 * std::abs(sc.c1) + s.B_f2 * (2 * sc.B_sigma1 * std::abs(sc.c0) + std::abs(sc.c0 * sc.c1)) +
         s.B_f3 * std::abs(sc.c1) + nu * s.B_f4 * std::abs(sc.c2) + lambda0 * s.B_f5 * std::abs(sc.c1);
  return c;
}

namespace {

// Numerators of the two bound terms before division by sqrt(N).
struct TermNumerators {
  double interior;
  double initial;
};

TermNumerators numerators(const WeightStats& s, const SigmaConstants& sc, const LossConfig& loss,
                          double C_z, double C_z0, const TheoremConstants& tc) {
  return {2 * loss.delta * (s.B_w * C_z * tc.C1 + tc.C2),
          4 * loss.lambda1 * loss.delta * s.B_a * (s.B_w * C_z0 * sc.L_sigma + std::abs(sc.c0))};
}

long smallest_n(double numerator, double target) {
  if (numerator <= 0) return 1;
  const double x = numerator / target;
  long n = std::max(1L, static_cast<long>(std::ceil(x * x)));
  auto term = [numerator](long k) { return numerator / std::sqrt(static_cast<double>(k)); };
  while (term(n) > target) ++n;
  while (n > 1 && term(n - 1) <= target) --n;
  return n;
}

}  // namespace

BoundReport generalization_bound(const WeightStats& stats, const SigmaConstants& sc,
                                 const LossConfig& loss, long N_r, long N_0, double C_z,
                                 double C_z0, C1Variant variant) {
  loss.validate();
  if (N_r < 1 || N_0 < 1) throw std::invalid_argument("generalization_bound: N_r and N_0 must be >= 1");
  if (!(C_z >= 0) || !(C_z0 >= 0))
    throw std::invalid_argument("generalization_bound: C_z and C_z0 must be >= 0");
  const TheoremConstants tc = theorem_constants(stats, sc, loss.nu, loss.lambda0, variant);
  const TermNumerators num = numerators(stats, sc, loss, C_z, C_z0, tc);

  BoundReport r;
  r.C1 = tc.C1;
  r.C2 = tc.C2;
  r.C_z = C_z;
  r.C_z0 = C_z0;
  r.term_interior = num.interior / std::sqrt(static_cast<double>(N_r));
  r.term_initial = num.initial / std::sqrt(static_cast<double>(N_0));
  r.total = r.term_interior + r.term_initial;
  r.loss = loss;
  r.N_r = N_r;
  r.N_0 = N_0;
  r.sigma = sc;
  r.stats = stats;
  r.variant = variant;
  if (loss.lambda0 == 0) r.warnings.emplace_back("lambda0 = 0: divergence penalty disabled");
  if (loss.lambda1 == 0) r.warnings.emplace_back("lambda1 = 0: initial-condition penalty disabled");
  return r;
}

SamplePlan sample_planner(double eps, const WeightStats& stats, const SigmaConstants& sc,
                          const LossConfig& loss, double C_z, double C_z0, C1Variant variant) {
  if (!(eps > 0)) throw std::invalid_argument("sample_planner: eps must be > 0");
  loss.validate();
  const TheoremConstants tc = theorem_constants(stats, sc, loss.nu, loss.lambda0, variant);
  const TermNumerators num = numerators(stats, sc, loss, C_z, C_z0, tc);
  return {smallest_n(num.interior, eps / 2), smallest_n(num.initial, eps / 2)};
}

double point_ratio(const WeightStats& stats, const SigmaConstants& sc, const LossConfig& loss,
                   double C_z, double C_z0, C1Variant variant) {
  const TheoremConstants tc = theorem_constants(stats, sc, loss.nu, loss.lambda0, variant);
  const double top = stats.B_w * C_z * tc.C1 + tc.C2;
  const double bottom = loss.lambda1 * stats.B_a * (stats.B_w * C_z0 * sc.L_sigma + std::abs(sc.c0));
  if (bottom == 0) throw std::domain_error("point_ratio: initial term vanishes; ratio undefined");
  return (top * top) / (bottom * bottom);
}

std::string to_string(C1Variant v) { return v == C1Variant::Theorem ? "theorem" : "proof"; }

C1Variant parse_c1_variant(const std::string& s) {
  if (s == "theorem") return C1Variant::Theorem;
  if (s == "proof") return C1Variant::Proof;
  throw std::invalid_argument("c1_variant must be 'theorem' or 'proof', got '" + s + "'");
}

json to_json(const WeightStats& s) {
  return {{"B_f1", s.B_f1}, {"B_f2", s.B_f2}, {"B_f3", s.B_f3}, {"B_f4", s.B_f4},
          {"B_f5", s.B_f5}, {"B_w", s.B_w},   {"B_a", s.B_a}};
}

json to_json(const SigmaConstants& s) {
  return {{"L_sigma", s.L_sigma}, {"L_sigma1", s.L_sigma1}, {"L_sigma2", s.L_sigma2},
          {"B_sigma", s.B_sigma}, {"B_sigma1", s.B_sigma1}, {"c0", s.c0},
          {"c1", s.c1},           {"c2", s.c2}};
}

SigmaConstants sigma_constants_from_json(const json& j) {
  SigmaConstants s;
  s.L_sigma = j.at("L_sigma").get<double>();
  s.L_sigma1 = j.at("L_sigma1").get<double>();
  s.L_sigma2 = j.at("L_sigma2").get<double>();
  s.B_sigma = j.at("B_sigma").get<double>();
  s.B_sigma1 = j.at("B_sigma1").get<double>();
  s.c0 = j.at("c0").get<double>();
  s.c1 = j.at("c1").get<double>();
  s.c2 = j.at("c2").get<double>();
  return s;
}

json to_json(const BoundReport& r) {
  return {{"C1", r.C1},
          {"C2", r.C2},
          {"C_z", r.C_z},
          {"C_z0", r.C_z0},
          {"term_interior", r.term_interior},
          {"term_initial", r.term_initial},
          {"total", r.total},
          {"inputs",
           {{"delta", r.loss.delta},
            {"nu", r.loss.nu},
            {"lambda0", r.loss.lambda0},
            {"lambda1", r.loss.lambda1},
            {"N_r", r.N_r},
            {"N_0", r.N_0},
            {"c1_variant", to_string(r.variant)},
            {"sigma", to_json(r.sigma)},
            {"weight_stats", to_json(r.stats)}}},
          {"warnings", r.warnings}};
}

std::string bound_csv_header() {
  return "N_r,N_0,delta,nu,lambda0,lambda1,B_f1,B_f2,B_f3,B_f4,B_f5,B_w,B_a,C1,C2,C_z,C_z0,"
         "term_interior,term_initial,total";
}

std::string bound_csv_row(const BoundReport& r) {
  std::ostringstream out;
  out << r.N_r << ',' << r.N_0;
  for (double v : {r.loss.delta, r.loss.nu, r.loss.lambda0, r.loss.lambda1, r.stats.B_f1,
                   r.stats.B_f2, r.stats.B_f3, r.stats.B_f4, r.stats.B_f5, r.stats.B_w,
                   r.stats.B_a, r.C1, r.C2, r.C_z, r.C_z0, r.term_interior, r.term_initial,
                   r.total}) {
    out << ',' << format_double(v);
  }
  return out.str();
}

}  // namespace pinnbound
