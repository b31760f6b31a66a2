#include "pinnbound/activation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinnbound/errors.hpp"

namespace pinnbound {

namespace {

using Poly = std::vector<double>;

Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = static_cast<double>(i) * p[i];
  return out;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly subtract(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

// One differentiation step in the base variable of each family.
Poly differentiate(ActivationFamily family, const Poly& p) {
  switch (family) {
    case ActivationFamily::TanhPow:
      return multiply(derivative(p), Poly{1.0, 0.0, -1.0});
    case ActivationFamily::SigmoidPow:
      return multiply(derivative(p), Poly{0.0, 1.0, -1.0});
    case ActivationFamily::ExpNegReluPow:
    default:
      return subtract(derivative(p), p);
  }
}

}  // namespace

void ActivationSpec::validate() const {
  const int min_k = family == ActivationFamily::ExpNegReluPow ? 3 : 1;
  if (k < min_k) {
    throw std::invalid_argument("activation '" + family_name() + "' requires k >= " +
                                std::to_string(min_k) + ", got " + std::to_string(k));
  }
}

std::string ActivationSpec::family_name() const {
  switch (family) {
    case ActivationFamily::TanhPow: return "tanh";
    case ActivationFamily::SigmoidPow: return "sigmoid";
    case ActivationFamily::ExpNegReluPow: return "expnegrelu";
  }
  return "unknown";
}

ActivationSpec ActivationSpec::parse(const std::string& family, int k) {
  ActivationSpec spec;
  if (family == "tanh") {
    spec.family = ActivationFamily::TanhPow;
  } else if (family == "sigmoid") {
    spec.family = ActivationFamily::SigmoidPow;
  } else if (family == "expnegrelu") {
    spec.family = ActivationFamily::ExpNegReluPow;
  } else {
    throw std::invalid_argument("unknown activation family '" + family + "'");
  }
  spec.k = k;
  spec.validate();
  return spec;
}

Activation::Activation(ActivationSpec spec) : spec_(spec) {
  spec_.validate();
  Poly p(static_cast<std::size_t>(spec_.k) + 1, 0.0);
  p.back() = 1.0;
  for (auto& slot : poly_) {
    slot = p;
    p = differentiate(spec_.family, p);
  }
}

SigmaConstants constants(const ActivationSpec& spec) {
  spec.validate();
  if (spec.family == ActivationFamily::TanhPow && spec.k == 1) {
    return {.L_sigma = 1, .L_sigma1 = 1, .L_sigma2 = 2, .B_sigma = 1, .B_sigma1 = 1,
            .c0 = 0, .c1 = 1, .c2 = 0};
  }
  if (spec.family == ActivationFamily::TanhPow && spec.k == 3) {
    return {.L_sigma = 0.75, .L_sigma1 = 1.4, .L_sigma2 = 6, .B_sigma = 1, .B_sigma1 = 0.75,
            .c0 = 0, .c1 = 0, .c2 = 0};
  }
  return estimate_constants(spec, 20.0, 1e-3);
}

SigmaConstants estimate_constants(const ActivationSpec& spec, double grid_half_width,
                                  double grid_step) {
  if (!(grid_half_width > 0) || !(grid_step > 0)) {
    throw std::invalid_argument("estimate_constants: grid_half_width and grid_step must be > 0");
  }
  const Activation act(spec);
  const auto n = static_cast<long>(std::floor(2.0 * grid_half_width / grid_step + 0.5));
  double sup0 = 0, sup1 = 0, sup2 = 0, sup3 = 0;
  for (long i = 0; i <= n; ++i) {
    const double x = -grid_half_width + static_cast<double>(i) * grid_step;
    const auto d = act(x);
    if (!std::isfinite(d.value) || !std::isfinite(d.d1) || !std::isfinite(d.d2) ||
        !std::isfinite(d.d3)) {
      throw NumericalError("estimate_constants: non-finite derivative at x=" + std::to_string(x));
    }
    sup0 = std::max(sup0, std::abs(d.value));
    sup1 = std::max(sup1, std::abs(d.d1));
    sup2 = std::max(sup2, std::abs(d.d2));
    sup3 = std::max(sup3, std::abs(d.d3));
  }
  // The kink of exp(-x) relu^k sits at 0; include its right limit for sigma'''.
  if (spec.family == ActivationFamily::ExpNegReluPow) {
    const auto right = act(1e-300);
    sup3 = std::max(sup3, std::abs(right.d3));
  }
  const auto at0 = act(0.0);
  SigmaConstants sc;
  sc.L_sigma = kLipschitzSafety * sup1;
  sc.L_sigma1 = kLipschitzSafety * sup2;
  sc.L_sigma2 = kLipschitzSafety * sup3;
  sc.B_sigma = sup0;
  sc.B_sigma1 = sup1;
  sc.c0 = at0.value;
  sc.c1 = at0.d1;
  sc.c2 = at0.d2;
  return sc;
}

}  // namespace pinnbound
