#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "pinnbound/network.hpp"
#include "pinnbound/residual.hpp"

namespace pinnbound {

/// l1-type norms of the weight functionals
///   f1 = a1 . w_t,  f2m = a1 . w_xm,  f3 = a2 . (sum_m w_xm),
///   f4 = sum_m a1 . w_xm . w_xm,  f5 = sum_m a1m . w_xm
/// with a1 = sum_k a1k (rows of A1), plus B_w = max row 2-norm of W and
/// B_a = ||a1||_1. B_f2 = sum_m ||f2m||_1 ||a1m||_1.
struct WeightStats {
  double B_f1 = 0, B_f2 = 0, B_f3 = 0, B_f4 = 0, B_f5 = 0;
  double B_w = 0, B_a = 0;
};

WeightStats weight_stats(const PinnWeights<double>& w);

/// Which form of the viscous term in C1 to use. The theorem statement has
/// 2 nu B_f4 L_sigma''; the combination step of its proof has
/// 2 nu B_f4 (L_sigma' + L_sigma).
enum class C1Variant { Theorem, Proof };

struct TheoremConstants {
  double C1 = 0;
  double C2 = 0;
};

TheoremConstants theorem_constants(const WeightStats& stats, const SigmaConstants& sc, double nu,
                                   double lambda0, C1Variant variant = C1Variant::Theorem);

struct BoundReport {
  double C1 = 0, C2 = 0;
  double C_z = 0, C_z0 = 0;
  double term_interior = 0, term_initial = 0, total = 0;
  // echoed inputs
  LossConfig loss;
  long N_r = 0, N_0 = 0;
  SigmaConstants sigma;
  WeightStats stats;
  C1Variant variant = C1Variant::Theorem;
  std::vector<std::string> warnings;
};

/// term_interior = 2 delta (B_w C_z C1 + C2) / sqrt(N_r)
/// term_initial  = 4 lambda1 delta B_a (B_w C_z0 L_sigma + |c0|) / sqrt(N_0)
BoundReport generalization_bound(const WeightStats& stats, const SigmaConstants& sc,
                                 const LossConfig& loss, long N_r, long N_0, double C_z,
                                 double C_z0, C1Variant variant = C1Variant::Theorem);

struct SamplePlan {
  long N_r = 1;
  long N_0 = 1;
};

/// Smallest N_r and N_0 (each >= 1) that bring each bound term to at most eps / 2.
SamplePlan sample_planner(double eps, const WeightStats& stats, const SigmaConstants& sc,
                          const LossConfig& loss, double C_z, double C_z0,
                          C1Variant variant = C1Variant::Theorem);

/// (B_w C_z C1 + C2)^2 / (lambda1^2 B_a^2 (B_w C_z0 L_sigma + |c0|)^2).
/// Throws std::domain_error when the denominator vanishes.
double point_ratio(const WeightStats& stats, const SigmaConstants& sc, const LossConfig& loss,
                   double C_z, double C_z0, C1Variant variant = C1Variant::Theorem);

std::string to_string(C1Variant v);
C1Variant parse_c1_variant(const std::string& s);

nlohmann::json to_json(const WeightStats& s);
nlohmann::json to_json(const SigmaConstants& s);
nlohmann::json to_json(const BoundReport& r);
SigmaConstants sigma_constants_from_json(const nlohmann::json& j);

/// Header and row for sweep-style CSV output of bound evaluations.
std::string bound_csv_header();
std::string bound_csv_row(const BoundReport& r);

}  // namespace pinnbound
