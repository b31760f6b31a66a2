#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace pinnbound {

enum class ActivationFamily { TanhPow, SigmoidPow, ExpNegReluPow };

/// sigma(x) = tanh(x)^k, sigmoid(x)^k, or exp(-x) * relu(x)^k.
struct ActivationSpec {
  ActivationFamily family = ActivationFamily::TanhPow;
  int k = 1;

  /// Throws std::invalid_argument when k is out of range for the family
  /// (k >= 1, or k >= 3 for exp(-x) relu^k).
  void validate() const;

  /// Config spelling: "tanh", "sigmoid", "expnegrelu".
  std::string family_name() const;
  static ActivationSpec parse(const std::string& family, int k);

  friend bool operator==(const ActivationSpec&, const ActivationSpec&) = default;
};

/// Lipschitz constants of sigma, sigma', sigma'' (L_sigma*), sup bounds of
/// |sigma| and |sigma'| (B_sigma*), and the values at zero.
struct SigmaConstants {
  double L_sigma = 0, L_sigma1 = 0, L_sigma2 = 0;
  double B_sigma = 0, B_sigma1 = 0;
  double c0 = 0, c1 = 0, c2 = 0;

  friend bool operator==(const SigmaConstants&, const SigmaConstants&) = default;
};

template <typename Scalar>
struct Derivs {
  Scalar value, d1, d2, d3;
};

/// Evaluates an activation and its first three derivatives in closed form.
///
/// Each family is a polynomial in a "base" function whose derivative is
/// again polynomial in it: t = tanh(x) with t' = 1 - t^2, s = sigmoid(x) with
/// s' = s - s^2, and for exp(-x) x^k on x > 0 the product rule gives
/// d/dx [e^{-x} Q(x)] = e^{-x} (Q' - Q). The derivative polynomials are built
/// once at construction so evaluation is four Horner passes.
class Activation {
 public:
  explicit Activation(ActivationSpec spec);

  const ActivationSpec& spec() const { return spec_; }

  template <typename Scalar>
  Derivs<Scalar> operator()(Scalar x) const {
    using std::exp;
    using std::tanh;
    Scalar base;
    Scalar scale(1);
    switch (spec_.family) {
      case ActivationFamily::TanhPow:
        base = tanh(x);
        break;
      case ActivationFamily::SigmoidPow:
        base = x >= Scalar(0) ? Scalar(1) / (Scalar(1) + exp(-x))
                              : exp(x) / (Scalar(1) + exp(x));
        break;
      case ActivationFamily::ExpNegReluPow:
      default:
        // One-sided at the kink: everything is zero for x <= 0.
        if (!(x > Scalar(0))) return {Scalar(0), Scalar(0), Scalar(0), Scalar(0)};
        base = x;
        scale = exp(-x);
        break;
    }
    return {scale * horner(poly_[0], base), scale * horner(poly_[1], base),
            scale * horner(poly_[2], base), scale * horner(poly_[3], base)};
  }

 private:
  template <typename Scalar>
  static Scalar horner(const std::vector<double>& coeffs, Scalar x) {
    Scalar acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + Scalar(*it);
    return acc;
  }

  ActivationSpec spec_;
  std::vector<double> poly_[4];  // coefficients, lowest degree first
};

template <typename Scalar>
Derivs<Scalar> eval_derivs(const ActivationSpec& spec, Scalar x) {
  return Activation(spec)(x);
}

/// Tabulated constants for tanh and tanh^3; grid estimates for everything else.
SigmaConstants constants(const ActivationSpec& spec);

/// Grid estimate over [-half_width, half_width]. Lipschitz constants are the
/// grid sup of the next derivative times kLipschitzSafety; bounds are plain
/// grid sups; c0..c2 are evaluated exactly at 0.
SigmaConstants estimate_constants(const ActivationSpec& spec, double grid_half_width,
                                  double grid_step);

inline constexpr double kLipschitzSafety = 1.01;

}  // namespace pinnbound
