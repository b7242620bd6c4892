#pragma once

#include <cstdint>
#include <vector>

#include "evblur/numerics.hpp"

namespace evblur {

struct LossConfig {
  double lambda_diff = 1.0;
  double lambda_tv = 0.1;
  double lambda_grad = 0.0;
  double huber_delta = 1.0;
};

/// Translated-gamma correction parameters: corrected = b * L^a - c per
/// channel, with a shared scalar exponent.
struct CorrectionParams {
  double a = 1.0;
  std::vector<double> b;
  std::vector<double> c;
};

/// Mean contrast threshold, 0.5 * (C_neg + C_pos).
double mean_threshold(double c_neg, double c_pos);

/// Threshold-normalized difference loss, Huber form:
/// rho = (delta_log_blur_pred - p * c_p) / c_bar; 0.5 rho^2 inside delta,
/// linear outside.
double loss_diff_huber(double delta_log_blur_pred, int polarity, double c_p,
                       double c_bar, double delta = 1.0);

/// Target-normalized gradient loss: APE against p * c_p / (t_curr - t_ref).
double loss_grad(double pred_grad, int polarity, double c_p, double t_curr, double t_ref);

/// Threshold-normalized total variation over a subinterval.
double loss_tv(double log_blur_start, double log_blur_end, double c_bar);

/// Subinterval of (t_ref, t_curr]: length drawn from a triangular
/// distribution with mode 0, start uniform on the remaining slack. The
/// length is clamped below at 1e-9 of the interval.
std::pair<double, double> sample_tv_subinterval(double t_ref, double t_curr, std::uint64_t& rng_state);

struct LossTerms {
  double diff = 0.0;
  double tv = 0.0;
  double grad = 0.0;
};

/// Mean over the batch of lambda_diff * diff + lambda_tv * tv + lambda_grad * grad.
double total_loss(const std::vector<LossTerms>& batch, const LossConfig& cfg);

struct GammaFit {
  double a = 1.0;            // shared scalar
  std::vector<double> b;     // per-channel offsets in the log domain
};

/// Log-domain affine correction log(L_corr) = a * log(L_pred) + b_ch, with a
/// shared across channels, solved in closed form by least squares.
GammaFit fit_gamma_correction(const std::vector<std::vector<double>>& pred_log,
                              const std::vector<std::vector<double>>& ref_log);

/// Fit corrected = g_i * (b * L^a - c) to references by Levenberg-Marquardt
/// (analytic Jacobian, at most cfg.max_iterations iterations), initialized
/// from the gamma-correction solution with c = 0. gain_exposure holds one
/// factor per sample, aligned with pred/ref.
CorrectionParams fit_translated_gamma(const std::vector<std::vector<double>>& pred,
                                      const std::vector<std::vector<double>>& ref,
                                      const std::vector<std::vector<double>>& gain_exposure,
                                      const TrustRegionConfig& cfg = {});

/// Elementwise g * (b * L^a - c) for one channel.
std::vector<double> apply_translated_gamma(const std::vector<double>& pred,
                                           const CorrectionParams& params, int channel,
                                           double gain_exposure = 1.0);

}  // namespace evblur
