#include "pinnbound/training.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pinnbound/json_io.hpp"

namespace pinnbound {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("training: epochs must be >= 1");
  if (!(learning_rate >= 0)) throw std::invalid_argument("training: learning_rate must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
    throw std::invalid_argument("training: betas must lie in [0, 1)");
  if (!(eps_adam > 0)) throw std::invalid_argument("training: eps_adam must be > 0");
  if (!(weight_decay >= 0)) throw std::invalid_argument("training: weight_decay must be >= 0");
  if (log_every < 1) throw std::invalid_argument("training: log_every must be >= 1");
}

OptimState OptimState::zeros(const PinnWeights<double>& w) {
  return {0, Mat<double>::Zero(w.p(), w.d() + 1), Mat<double>::Zero(w.p(), w.d() + 1)};
}

namespace {

struct ActivationStack {
  Vec<double> s1, s2, s3;
};

ActivationStack derivative_stack(const Activation& act, const Vec<double>& pre) {
  ActivationStack st{Vec<double>(pre.size()), Vec<double>(pre.size()), Vec<double>(pre.size())};
  for (Eigen::Index q = 0; q < pre.size(); ++q) {
    const auto d = act(pre(q));
    st.s1(q) = d.d1;
    st.s2(q) = d.d2;
    st.s3(q) = d.d3;
  }
  return st;
}

// Gradient of one interior point loss. The adjoints of the field entries are
//   u: J^T g,  J: g u^T + g_div I,  du_dt: g,  grad_p: g,  lap_u: -nu g
// with g_k = huber'(r_k) and g_div = lambda0 huber'(div u). Each field is a
// sum over rows q of a head coefficient times sigma^(n)(w_q . z) times
// products of W entries, so differentiating row q gives a multiple of z
// (through the argument of sigma) plus direct terms from the W factors.
Mat<double> interior_grad(const PinnWeights<double>& w, const Activation& act, const LossConfig& cfg,
                          const SpaceTimePoint<double>& pt, const FieldEval<double>& fe) {
  const int d = w.d();
  const Vec<double> z = pt.z();
  const Vec<double> pre = w.W() * z;
  const ActivationStack st = derivative_stack(act, pre);
  const auto Wx = w.W().leftCols(d);
  const auto wt = w.W().col(d);
  const Mat<double>& A1 = w.A1();
  const Vec<double>& a2 = w.a2();

  const Vec<double> r = momentum_residual(fe, cfg.nu);
  Vec<double> g(d);
  for (int k = 0; k < d; ++k) g(k) = huber_derivative(cfg.delta, r(k));
  const double g_div = cfg.lambda0 * huber_derivative(cfg.delta, fe.div_u);

  const Vec<double> u_bar = fe.jac_u.transpose() * g;
  Mat<double> J_bar = g * fe.u.transpose();
  J_bar.diagonal().array() += g_div;

  const Vec<double> gA = A1.transpose() * g;         // (g . a_q)
  const Vec<double> uA = A1.transpose() * u_bar;     // (u_bar . a_q)
  const Vec<double> lA = -cfg.nu * gA;               // (lap_bar . a_q)
  const Mat<double> VJ = A1.transpose() * J_bar;     // row q: J_bar^T a_q
  const Vec<double> cJ = VJ.cwiseProduct(Wx).rowwise().sum();
  const Vec<double> gW = Wx * g;
  const Vec<double> sx2 = Wx.rowwise().squaredNorm();

  const Vec<double> coef = st.s1.cwiseProduct(uA) +
                           st.s2.cwiseProduct(cJ + gA.cwiseProduct(wt) + a2.cwiseProduct(gW)) +
                           st.s3.cwiseProduct(lA).cwiseProduct(sx2);
  Mat<double> G = coef * z.transpose();
  G.leftCols(d) += st.s1.asDiagonal() * (VJ + a2 * g.transpose());
  G.leftCols(d) += 2.0 * st.s2.cwiseProduct(lA).asDiagonal() * Wx;
  G.col(d) += st.s1.cwiseProduct(gA);
  return G;
}

Mat<double> initial_grad(const PinnWeights<double>& w, const Activation& act, const LossConfig& cfg,
                         const Vec<double>& x0, const Vec<double>& u0, const Vec<double>& target) {
  const int d = w.d();
  Vec<double> z(d + 1);
  z << x0, 0.0;
  const Vec<double> pre = w.W() * z;
  Vec<double> s1(pre.size());
  for (Eigen::Index q = 0; q < pre.size(); ++q) s1(q) = act(pre(q)).d1;
  Vec<double> u_bar(d);
  for (int k = 0; k < d; ++k) u_bar(k) = cfg.lambda1 * huber_derivative(cfg.delta, u0(k) - target(k));
  return s1.cwiseProduct(w.A1().transpose() * u_bar) * z.transpose();
}

}  // namespace

RiskAndGrad risk_and_grad(const PinnWeights<double>& w, const Activation& act,
                          const LossConfig& cfg, const CollocationSet<double>& colloc,
                          const std::vector<Vec<double>>& f0_targets, int threads) {
  cfg.validate();
  if (colloc.interior.empty() || colloc.initial.empty())
    throw std::invalid_argument("risk_and_grad: collocation sets must be non-empty");
  if (f0_targets.size() != colloc.initial.size())
    throw DimensionError("risk_and_grad: one initial-condition target per initial point required");

  const std::size_t nr = colloc.interior.size();
  const std::size_t n0 = colloc.initial.size();
  std::vector<double> mom(nr), div(nr), init(n0);
  std::vector<Mat<double>> g_int(nr), g_init(n0);

  parallel_for(nr, threads, [&](std::size_t i) {
    const FieldEval<double> fe = field_eval(w, act, colloc.interior[i]);
    const auto parts = loss_res_parts(fe, cfg);
    mom[i] = parts.momentum;
    div[i] = parts.divergence;
    g_int[i] = interior_grad(w, act, cfg, colloc.interior[i], fe);
  });
  parallel_for(n0, threads, [&](std::size_t j) {
    const FieldEval<double> fe = field_eval(w, act, SpaceTimePoint<double>{colloc.initial[j], 0.0});
    init[j] = loss_init(fe.u, f0_targets[j], cfg);
    g_init[j] = initial_grad(w, act, cfg, colloc.initial[j], fe.u, f0_targets[j]);
  });

  RiskAndGrad out;
  out.risk.momentum_term = pairwise_sum(mom) / static_cast<double>(nr);
  out.risk.divergence_term = pairwise_sum(div) / static_cast<double>(nr);
  out.risk.initial_term = pairwise_sum(init) / static_cast<double>(n0);
  out.risk.total = out.risk.momentum_term + out.risk.divergence_term + out.risk.initial_term;
  out.grad = pairwise_sum(g_int) / static_cast<double>(nr) + pairwise_sum(g_init) / static_cast<double>(n0);
  return out;
}

Mat<double> grad_risk(const PinnWeights<double>& w, const Activation& act, const LossConfig& cfg,
                      const CollocationSet<double>& colloc, const InitialCondition<double>& f0,
                      int threads) {
  std::vector<Vec<double>> targets;
  targets.reserve(colloc.initial.size());
  for (const auto& x : colloc.initial) targets.push_back(f0(x));
  return risk_and_grad(w, act, cfg, colloc, targets, threads).grad;
}

AdamWResult adamw_step(PinnWeights<double> w, const Mat<double>& grads, OptimState state,
                       const TrainConfig& tc) {
  if (grads.rows() != w.W().rows() || grads.cols() != w.W().cols() ||
      state.m.rows() != grads.rows() || state.m.cols() != grads.cols() ||
      state.v.rows() != grads.rows() || state.v.cols() != grads.cols()) {
    throw DimensionError("adamw_step: gradient and moment shapes must match W");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  w.W() *= (1.0 - tc.learning_rate * tc.weight_decay);
  state.m = tc.beta1 * state.m + (1.0 - tc.beta1) * grads;
  state.v = tc.beta2 * state.v + (1.0 - tc.beta2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(tc.beta1, t);
  const double bc2 = 1.0 - std::pow(tc.beta2, t);
  const Mat<double> m_hat = state.m / bc1;
  const Mat<double> v_hat = state.v / bc2;
  w.W() -= tc.learning_rate * m_hat.cwiseQuotient((v_hat.array().sqrt() + tc.eps_adam).matrix());
  return {std::move(w), std::move(state)};
}

TrainResult train(const PinnWeights<double>& w0, const Activation& act, const LossConfig& cfg,
                  const CollocationSet<double>& colloc, const InitialCondition<double>& f0,
                  const TrainConfig& tc) {
  tc.validate();
  cfg.validate();
  std::vector<Vec<double>> targets;
  targets.reserve(colloc.initial.size());
  for (const auto& x : colloc.initial) targets.push_back(f0(x));

  TrainResult result{w0, {}};
  OptimState state = OptimState::zeros(w0);
  auto check_finite = [](const RiskAndGrad& rg, int epoch) {
    if (!std::isfinite(rg.risk.total) || !rg.grad.allFinite()) {
      throw NumericalError("training diverged: non-finite risk or gradient at epoch " +
                           std::to_string(epoch));
    }
  };
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    const RiskAndGrad rg = risk_and_grad(result.weights, act, cfg, colloc, targets, tc.threads);
    check_finite(rg, epoch);
    if (epoch % tc.log_every == 0) result.history.push_back({epoch, rg.risk});
    auto stepped = adamw_step(std::move(result.weights), rg.grad, std::move(state), tc);
    result.weights = std::move(stepped.weights);
    state = std::move(stepped.state);
  }
  const RiskAndGrad last = risk_and_grad(result.weights, act, cfg, colloc, targets, tc.threads);
  check_finite(last, tc.epochs);
  result.history.push_back({tc.epochs, last.risk});
  return result;
}

std::string history_csv(const std::vector<HistoryEntry>& history) {
  std::ostringstream out;
  out << "epoch,momentum_term,divergence_term,initial_term,total\n";
  for (const auto& h : history) {
    out << h.epoch << ',' << format_double(h.risk.momentum_term) << ','
        << format_double(h.risk.divergence_term) << ',' << format_double(h.risk.initial_term) << ','
        << format_double(h.risk.total) << '\n';
  }
  return out.str();
}

}  // namespace pinnbound
