#pragma once

#include <vector>

#include <Eigen/Core>

#include "evblur/pixel_model.hpp"

namespace evblur {

struct FilterState {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  double t = 0.0;
};

/// One first-order-hold discretization interval of length dt, linearized at
/// the interval's end input:
///   x[k+1] = A_d x[k] + B_d u[k] + B_tilde_d u[k+1]
struct DiscreteStep {
  Eigen::Matrix4d A_d;
  Eigen::Vector4d B_d;
  Eigen::Vector4d B_tilde_d;
  double dt = 0.0;
};

/// Timestamped log-radiance samples; timestamps strictly increasing.
struct InputSequence {
  std::vector<double> t;
  std::vector<double> u;

  std::size_t size() const { return t.size(); }
  void validate() const;  // throws std::invalid_argument
};

/// Sum-normalized zero-state weights per output channel (logL_sf, logL_diff),
/// aligned with the input timestamps. raw_sum holds the unnormalized channel
/// sums, which approach 1 as the window grows.
struct WeightSequence {
  std::vector<double> t;
  std::vector<Eigen::Vector2d> w;
  Eigen::Vector2d raw_sum = Eigen::Vector2d::Zero();
};

/// FOH discretization over an interval of length dt with the continuous
/// matrices evaluated at u_next. Throws std::invalid_argument when dt <= 0.
DiscreteStep discretize(const PixelBandwidthParams& p, double u_next, double dt);

/// Advance one interval: x[k+1] = A_d x[k] + B_d u_k + B_tilde_d u_k1.
FilterState step(const FilterState& state, double u_k, double u_k1, const DiscreteStep& d);

/// Output samples y[k] = C x[k] for k = 0..n-1 via the state-transition-matrix
/// solution (products of per-interval A_d), starting from x0 at inputs.t[0].
std::vector<Eigen::Vector2d> transient_solution(const FilterState& x0,
                                                const InputSequence& inputs,
                                                const PixelBandwidthParams& p);

/// Zero-state weights of the final output sample over the input window.
/// Requires at least two samples.
WeightSequence zero_state_weights(const InputSequence& inputs, const PixelBandwidthParams& p);

/// Weighted estimate of (logL_sf, logL_diff) at the window end.
Eigen::Vector2d blurred_log_radiance(const WeightSequence& weights, const InputSequence& inputs);

/// Blurred log-radiance with the differencing-amplifier reset composed in:
///   logL_blur(t) = logL_diff(t) + logL_delta(t_ref) * exp(-omega_c_diff * (t - t_ref))
/// Throws std::invalid_argument when t_minus_tref < 0.
double apply_reset(double log_diff_t, double log_delta_ref, double omega_c_diff,
                   double t_minus_tref);

/// Default importance-sampling input count (k - k0 + 1).
inline constexpr int kDefaultInputSampleCount = 30;

/// Deterministic inverse-CDF samples of the truncated exponential proposal:
/// n timestamps ending exactly at t_k, with past offsets
///   delta_i = -log(1 - 0.95 * i / (n - 1)) / omega_min, i = 1..n-1,
/// so the window spans exactly log(20)/omega_min. Throws when n < 2.
std::vector<double> sample_input_timestamps(double t_k, int n, double omega_min);

}  // namespace evblur
