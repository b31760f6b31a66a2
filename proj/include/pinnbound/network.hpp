#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "pinnbound/activation.hpp"
#include "pinnbound/errors.hpp"

namespace pinnbound {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Depth-2 network u(z) = A1 sigma(W z), p(z) = <a2, sigma(W z)> with
/// z = (x_1, ..., x_d, t). W is p x (d+1) and trainable; the heads A1 (d x p)
/// and a2 (p) are fixed at construction and only readable afterwards.
template <typename Scalar>
class PinnWeights {
 public:
  PinnWeights() = default;
  PinnWeights(Mat<Scalar> W, Mat<Scalar> A1, Vec<Scalar> a2)
      : W_(std::move(W)), A1_(std::move(A1)), a2_(std::move(a2)) {
    validate();
  }

  int d() const { return static_cast<int>(A1_.rows()); }
  int p() const { return static_cast<int>(W_.rows()); }

  const Mat<Scalar>& W() const { return W_; }
  Mat<Scalar>& W() { return W_; }
  const Mat<Scalar>& A1() const { return A1_; }
  const Vec<Scalar>& a2() const { return a2_; }

  /// Throws DimensionError on inconsistent shapes, NumericalError on NaN/Inf.
  void validate() const {
    if (A1_.rows() < 1 || W_.rows() < 1) throw DimensionError("weights: d and p must be >= 1");
    if (W_.cols() != A1_.rows() + 1)
      throw DimensionError("weights: W must have d+1 columns");
    if (A1_.cols() != W_.rows() || a2_.size() != W_.rows())
      throw DimensionError("weights: A1 columns and a2 length must equal the width p");
    if (!W_.allFinite() || !A1_.allFinite() || !a2_.allFinite())
      throw NumericalError("weights: non-finite entry");
  }

  template <typename Other>
  PinnWeights<Other> cast() const {
    return PinnWeights<Other>(W_.template cast<Other>(), A1_.template cast<Other>(),
                              a2_.template cast<Other>());
  }

  friend bool operator==(const PinnWeights& a, const PinnWeights& b) {
    return a.W_.rows() == b.W_.rows() && a.W_.cols() == b.W_.cols() &&
           a.A1_.rows() == b.A1_.rows() && a.W_ == b.W_ && a.A1_ == b.A1_ && a.a2_ == b.a2_;
  }

 private:
  Mat<Scalar> W_;
  Mat<Scalar> A1_;
  Vec<Scalar> a2_;
};

template <typename Scalar>
struct SpaceTimePoint {
  Vec<Scalar> x;
  Scalar t{0};

  Vec<Scalar> z() const {
    Vec<Scalar> out(x.size() + 1);
    out << x, t;
    return out;
  }
  int d() const { return static_cast<int>(x.size()); }
};

/// Velocity, pressure, and every space-time derivative the residual needs,
/// evaluated at one point. jac_u(k, m) = d u_k / d x_m.
template <typename Scalar>
struct FieldEval {
  Vec<Scalar> u;
  Scalar p_val{0};
  Vec<Scalar> du_dt;
  Mat<Scalar> jac_u;
  Vec<Scalar> grad_p;
  Vec<Scalar> lap_u;
  Scalar div_u{0};

  static FieldEval zero(int d) {
    FieldEval fe;
    fe.u = Vec<Scalar>::Zero(d);
    fe.du_dt = Vec<Scalar>::Zero(d);
    fe.jac_u = Mat<Scalar>::Zero(d, d);
    fe.grad_p = Vec<Scalar>::Zero(d);
    fe.lap_u = Vec<Scalar>::Zero(d);
    return fe;
  }
};

namespace detail {

template <typename Scalar>
void check_point(const PinnWeights<Scalar>& w, const SpaceTimePoint<Scalar>& z) {
  if (z.d() != w.d()) {
    throw DimensionError("point has " + std::to_string(z.d()) + " spatial coordinates, net expects " +
                         std::to_string(w.d()));
  }
}

template <typename Scalar>
Vec<Scalar> preactivation(const PinnWeights<Scalar>& w, const SpaceTimePoint<Scalar>& z) {
  const int d = w.d();
  return w.W().leftCols(d) * z.x + w.W().col(d) * z.t;
}

// Shared by forward() and field_eval() so both produce identical u and p.
template <typename Scalar>
void heads(const PinnWeights<Scalar>& w, const Vec<Scalar>& sigma, Vec<Scalar>& u, Scalar& p_val) {
  u = w.A1() * sigma;
  p_val = w.a2().dot(sigma);
}

}  // namespace detail

template <typename Scalar>
struct NetOutput {
  Vec<Scalar> u;
  Scalar p_val;
};

template <typename Scalar>
NetOutput<Scalar> forward(const PinnWeights<Scalar>& w, const Activation& act,
                          const SpaceTimePoint<Scalar>& z) {
  detail::check_point(w, z);
  const Vec<Scalar> s = detail::preactivation(w, z);
  Vec<Scalar> sigma(s.size());
  for (Eigen::Index q = 0; q < s.size(); ++q) sigma(q) = act(s(q)).value;
  NetOutput<Scalar> out;
  detail::heads(w, sigma, out.u, out.p_val);
  return out;
}

/// Closed-form derivatives of the network:
///   (d_t u)_k      = <a1k . w_t,   sigma'(Wz)>
///   (d_{x_m} u)_k  = <a1k . w_xm,  sigma'(Wz)>
///   d_{x_k} p      = <a2 . w_xk,   sigma'(Wz)>
///   (lap u)_k      = sum_m <a1k . w_xm . w_xm, sigma''(Wz)>
///   div u          = trace of the Jacobian
template <typename Scalar>
FieldEval<Scalar> field_eval(const PinnWeights<Scalar>& w, const Activation& act,
                             const SpaceTimePoint<Scalar>& z) {
  detail::check_point(w, z);
  const int d = w.d();
  const int p = w.p();
  const Vec<Scalar> s = detail::preactivation(w, z);
  Vec<Scalar> sigma(p), sigma1(p), sigma2(p);
  for (int q = 0; q < p; ++q) {
    const auto ds = act(s(q));
    sigma(q) = ds.value;
    sigma1(q) = ds.d1;
    sigma2(q) = ds.d2;
  }
  const auto Wx = w.W().leftCols(d);
  const auto wt = w.W().col(d);

  FieldEval<Scalar> fe;
  detail::heads(w, sigma, fe.u, fe.p_val);
  const Mat<Scalar> A1s = w.A1() * sigma1.asDiagonal();  // a1k . sigma'
  fe.jac_u = A1s * Wx;
  fe.du_dt = A1s * wt;
  fe.grad_p = Wx.transpose() * w.a2().cwiseProduct(sigma1);
  fe.lap_u = w.A1() * sigma2.cwiseProduct(Wx.rowwise().squaredNorm());
  fe.div_u = fe.jac_u.trace();
  return fe;
}

/// A1, a2 ~ N(0, 1); W ~ N(0, w_scale^2). Deterministic in (seed, d, p, w_scale).
PinnWeights<double> init_weights(int d, int p, std::uint64_t seed, double w_scale);

/// Default W scale 1/sqrt(d+1).
inline double default_w_scale(int d) { return 1.0 / std::sqrt(static_cast<double>(d) + 1.0); }

/// Checkpoint: {d, p, activation:{family,k}, W, A1, a2} as JSON with
/// shortest round-trip floats. Load throws FormatError, DimensionError, or
/// NumericalError; it never returns partial weights. A non-null `meta` is
/// stored alongside and ignored on load.
void save_checkpoint(const PinnWeights<double>& w, const ActivationSpec& spec,
                     const std::filesystem::path& path, const nlohmann::json& meta = nullptr);

struct Checkpoint {
  PinnWeights<double> weights;
  ActivationSpec activation;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pinnbound
