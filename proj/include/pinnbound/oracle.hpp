#pragma once

// Brute-force verifiers for the Rademacher inequalities behind the
// generalization bound. Suprema over the weight class are taken over explicit
// finite grids of row vectors: the inequalities hold on every subset of the
// class, so a PASS on a grid is evidence and a FAIL is a counterexample.
//
// Expectations over sign vectors are exact (all 2^n vectors enumerated) when
// n <= kExactMaxPoints; otherwise they are Monte-Carlo means whose draws are
// seeded per draw index, so results do not depend on the worker count.

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "pinnbound/residual.hpp"
#include "pinnbound/sampling.hpp"

namespace pinnbound {

inline constexpr int kExactMaxPoints = 12;
inline constexpr int kExactMaxPointsLinear = 20;
inline constexpr double kSigmaSlack = 3.0;

using ScalarMap = std::function<double(double)>;

/// Finite stand-in for the admissible row vectors of the weight class.
struct ConstraintGrid {
  std::vector<Vec<double>> vectors;
  double B = 0;  // common 2-norm cap

  /// Throws std::invalid_argument if empty, ragged, over the cap, or missing 0.
  void validate() const;
  int dim() const { return vectors.empty() ? 0 : static_cast<int>(vectors.front().size()); }

  /// The zero vector plus `count` vectors uniform in the radius-B ball.
  static ConstraintGrid random(int dim, int count, double B, std::uint64_t seed);
};

enum class SignMode { Auto, Exact, Sampled };

struct RademacherEstimate {
  double mean = 0;
  double std_error = 0;
  long n_draws = 0;  // 2^n when exact
  std::uint64_t seed = 0;
  bool exact = false;
};

/// (1/n) E_eps sup_{||w|| <= B} sum_i eps_i <w, z_i> = (B/n) E ||sum_i eps_i z_i||.
RademacherEstimate rademacher_linear(const std::vector<Vec<double>>& points, double B, long n_draws,
                                     std::uint64_t seed, SignMode mode = SignMode::Auto);

/// (1/n) E_eps sup_{w in grid} sum_i eps_i <w, z_i> over a finite grid.
RademacherEstimate rademacher_linear_grid(const ConstraintGrid& grid,
                                          const std::vector<Vec<double>>& points, long n_draws,
                                          std::uint64_t seed, SignMode mode = SignMode::Auto);

struct CheckReport {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;     // rhs - lhs
  double std_error = 0;  // of the per-draw difference; 0 when exact
  bool exact = false;
  long n_draws = 0;
  bool passed = false;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const CheckReport& r);

/// E sup_w |<eps, f_w(Z)>|  <=  2 E sup_w <eps, f_w(Z) - c>  +  |c| sqrt(n),
/// with f_w(z) = phi(<w, z>). The grid must contain the zero vector.
CheckReport check_abs_removal(const ConstraintGrid& grid, const std::vector<Vec<double>>& points,
                              const ScalarMap& phi, double c, long n_draws, std::uint64_t seed,
                              SignMode mode = SignMode::Auto);

/// Head vectors f (length p) with sum_m |f_m| <= B.
struct HeadFamily {
  std::vector<Vec<double>> heads;
  double B = 0;
  void validate() const;
};

/// E sup_{f, W} (1/n) sum_i eps_i <f, phi(W z_i)>
///   <= (2 B L_phi / n) E sup_{w in grid} sum_i eps_i <w, z_i>  +  B |c| / sqrt(n).
/// Rows of W range independently over the grid; f over the head family.
CheckReport check_contraction_single(const ConstraintGrid& grid, const std::vector<Vec<double>>& points,
                                     const ScalarMap& phi, double L_phi, double c,
                                     const HeadFamily& heads, long n_draws, std::uint64_t seed,
                                     SignMode mode = SignMode::Auto);

struct ProductConstants {
  double B_phi1 = 0, B_phi2 = 0;
  double L_phi1 = 0, L_phi2 = 0;
};

/// Pairs of d x p head matrices (F, A): row m of F is f_m, row m of A is a_m.
/// Requires sum_m ||f_m||_1 ||a_m||_1 <= B for every pair.
struct ProductHeads {
  std::vector<std::pair<Mat<double>, Mat<double>>> pairs;
  double B = 0;
  void validate() const;
  int p() const { return pairs.empty() ? 0 : static_cast<int>(pairs.front().first.cols()); }
};

/// E sup_W (1/n) sum_i sum_m eps_i <f_m, phi1(W z_i)> <a_m, phi2(W z_i)>
///   <= (4 B (B1 L2 + B2 L1) / n) E sup_w sum_i eps_i <w, z_i>
///      + B (2 B2 |phi1(0)| + |k|) / sqrt(n),   k = phi1(0) phi2(0).
/// All p rows of W are enumerated over grid^p, so keep p small (<= 3).
CheckReport check_contraction_product(const ConstraintGrid& grid,
                                      const std::vector<Vec<double>>& points, const ScalarMap& phi1,
                                      const ScalarMap& phi2, const ProductConstants& consts, double k,
                                      const ProductHeads& heads, long n_draws, std::uint64_t seed,
                                      SignMode mode = SignMode::Auto);

struct SymmetrizationSetup {
  LossConfig loss;
  InitialCondition<double> f0;
  Box box;
  long n_points = 10;          // N_r = N_0 = n_points per trial
  long n_trials = 2000;
  long population_points = 20000;
  std::uint64_t seed = 0;
};

/// E_S sup_h (R_hat(h, S) - R(h))  <=  2 R_res + 2 R_0 over a finite class.
/// Population risks come from one large fixed sample.
CheckReport check_symmetrization(const std::vector<FieldEvaluator<double>>& hypotheses,
                                 const SymmetrizationSetup& setup);

/// phi = sigma^(order) of an activation, with its Lipschitz constant, sup
/// bound, and value at 0 taken from the activation's constants.
struct ScalarMapSpec {
  ScalarMap phi;
  double L = 0;
  double B = 0;
  double at_zero = 0;
  std::string label;
};

ScalarMapSpec activation_map(const ActivationSpec& spec, int order);

struct VerifyConfig {
  std::uint64_t seed = 20240601;
  int instances = 20;           // per lemma
  int symmetrization_classes = 5;
  long n_draws = 3000;          // Monte-Carlo draws when n > kExactMaxPoints
  long symmetrization_trials = 1500;
  long population_points = 20000;
  int threads = 1;
};

struct VerifySuiteResult {
  std::vector<CheckReport> abs_removal;
  std::vector<CheckReport> contraction_single;
  std::vector<CheckReport> contraction_product;
  std::vector<CheckReport> rademacher_linear;
  std::vector<CheckReport> symmetrization;

  bool all_passed() const;
};

/// Randomized desk-scale instances of every check; deterministic in cfg.seed.
VerifySuiteResult run_verification_suite(const VerifyConfig& cfg);

}  // namespace pinnbound
