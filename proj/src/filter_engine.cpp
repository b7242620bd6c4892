#include "evblur/filter_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evblur/numerics.hpp"

namespace evblur {

void InputSequence::validate() const {
  if (t.size() != u.size()) {
    throw std::invalid_argument("InputSequence: timestamp/value length mismatch");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw std::invalid_argument("InputSequence: timestamps must be strictly increasing");
    }
  }
}

DiscreteStep discretize(const PixelBandwidthParams& p, double u_next, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("discretize: dt must be positive");
  }
  const StateSpace ss = continuous_matrices(p, u_next);

  // FOH block matrix: exp of [[A dt, B dt, 0], [0, 0, 1], [0, 0, 0]] carries
  // [Phi, Gamma1, Gamma2] in its top block row.
  Matrix block = Matrix::Zero(6, 6);
  block.topLeftCorner<4, 4>() = ss.A * dt;
  block.block<4, 1>(0, 4) = ss.B * dt;
  block(4, 5) = 1.0;
  const Matrix e = mat_exp(block);

  DiscreteStep d;
  d.A_d = e.topLeftCorner<4, 4>();
  const Eigen::Vector4d gamma1 = e.block<4, 1>(0, 4);
  const Eigen::Vector4d gamma2 = e.block<4, 1>(0, 5);
  d.B_d = gamma1 - gamma2;
  d.B_tilde_d = gamma2;
  d.dt = dt;
  return d;
}

FilterState step(const FilterState& state, double u_k, double u_k1, const DiscreteStep& d) {
  FilterState next;
  next.x = d.A_d * state.x + d.B_d * u_k + d.B_tilde_d * u_k1;
  next.t = state.t + d.dt;
  return next;
}

std::vector<Eigen::Vector2d> transient_solution(const FilterState& x0,
                                                const InputSequence& inputs,
                                                const PixelBandwidthParams& p) {
  inputs.validate();
  if (inputs.size() < 1) {
    throw std::invalid_argument("transient_solution: empty input sequence");
  }
  if (std::abs(x0.t - inputs.t.front()) > 1e-12 * std::max(1.0, std::abs(x0.t))) {
    throw std::invalid_argument("transient_solution: x0 must sit on the first timestamp");
  }
  const std::size_t n = inputs.size();
  std::vector<DiscreteStep> steps;
  steps.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    steps.push_back(discretize(p, inputs.u[i + 1], inputs.t[i + 1] - inputs.t[i]));
  }

  Eigen::Matrix<double, 2, 4> c_out;
  c_out << 0, 0, 1, 0, 0, 0, 0, 1;

  std::vector<Eigen::Vector2d> outputs(n);
  outputs[0] = c_out * x0.x;
  // y[k] = C [phi(0, k) x0 + sum_i phi(i+1, k) (B_d[i] u[i] + Bt_d[i] u[i+1])],
  // with phi accumulated backwards from i = k-1.
  for (std::size_t k = 1; k < n; ++k) {
    Eigen::Matrix4d phi = Eigen::Matrix4d::Identity();
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (std::size_t i = k; i-- > 0;) {
      acc += phi * (steps[i].B_d * inputs.u[i] + steps[i].B_tilde_d * inputs.u[i + 1]);
      phi = phi * steps[i].A_d;
    }
    outputs[k] = c_out * (phi * x0.x + acc);
  }
  return outputs;
}

WeightSequence zero_state_weights(const InputSequence& inputs, const PixelBandwidthParams& p) {
  inputs.validate();
  if (inputs.size() < 2) {
    throw std::invalid_argument("zero_state_weights: need at least two samples");
  }
  const std::size_t n = inputs.size();
  std::vector<DiscreteStep> steps;
  steps.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    steps.push_back(discretize(p, inputs.u[i + 1], inputs.t[i + 1] - inputs.t[i]));
  }

  Eigen::Matrix<double, 2, 4> c_out;
  c_out << 0, 0, 1, 0, 0, 0, 0, 1;

  // phi(i, k) for the final index k = n-1, accumulated backwards. raw[i]
  // combines the B_d term propagated from i+1 and the B_tilde term from i-1.
  std::vector<Eigen::Vector2d> raw(n, Eigen::Vector2d::Zero());
  Eigen::Matrix4d phi = Eigen::Matrix4d::Identity();  // phi(k, k)
  raw[n - 1] = c_out * steps[n - 2].B_tilde_d;
  for (std::size_t i = n - 1; i-- > 0;) {
    // phi currently holds phi(i+1, k).
    raw[i] += c_out * (phi * steps[i].B_d);
    if (i > 0) {
      phi = phi * steps[i].A_d;  // now phi(i, k)
      raw[i] += c_out * (phi * steps[i - 1].B_tilde_d);
    }
  }

  WeightSequence ws;
  ws.t = inputs.t;
  ws.w = std::move(raw);
  for (const auto& w : ws.w) {
    ws.raw_sum += w;
  }
  for (auto& w : ws.w) {
    w = w.cwiseQuotient(ws.raw_sum);
  }
  return ws;
}

Eigen::Vector2d blurred_log_radiance(const WeightSequence& weights, const InputSequence& inputs) {
  if (weights.w.size() != inputs.size()) {
    throw std::invalid_argument("blurred_log_radiance: weight/input length mismatch");
  }
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out += weights.w[i] * inputs.u[i];
  }
  return out;
}

double apply_reset(double log_diff_t, double log_delta_ref, double omega_c_diff,
                   double t_minus_tref) {
  if (t_minus_tref < 0.0) {
    throw std::invalid_argument("apply_reset: elapsed time must be nonnegative");
  }
  return log_diff_t + log_delta_ref * std::exp(-omega_c_diff * t_minus_tref);
}

std::vector<double> sample_input_timestamps(double t_k, int n, double omega_min) {
  if (n < 2) {
    throw std::invalid_argument("sample_input_timestamps: need at least two samples");
  }
  if (!(omega_min > 0.0)) {
    throw std::invalid_argument("sample_input_timestamps: omega_min must be positive");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  // Quantiles i/(n-1) of the exponential proposal truncated at cumulative
  // probability 0.95, i.e. at offset log(20)/omega_min; i = n-1 lands exactly
  // on the truncation bound and i = 0 on t_k itself.
  for (int i = n - 1; i >= 1; --i) {
    const double quantile = static_cast<double>(i) / static_cast<double>(n - 1);
    const double offset = -std::log1p(-0.95 * quantile) / omega_min;
    out.push_back(t_k - offset);
  }
  out.push_back(t_k);
  // Samples whose offsets collapse below the timestamp resolution are merged.
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace evblur
