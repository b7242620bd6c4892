#include "evblur/recon.hpp"

#include <cmath>
#include <stdexcept>

#include "evblur/errors.hpp"

namespace evblur {

double mean_threshold(double c_neg, double c_pos) {
  if (!(c_neg > 0.0) || !(c_pos > 0.0)) {
    throw std::invalid_argument("mean_threshold: thresholds must be positive");
  }
  return 0.5 * (c_neg + c_pos);
}

double loss_diff_huber(double delta_log_blur_pred, int polarity, double c_p, double c_bar,
                       double delta) {
  if (!(c_bar > 0.0)) {
    throw std::invalid_argument("loss_diff_huber: c_bar must be positive");
  }
  const double rho = (delta_log_blur_pred - polarity * c_p) / c_bar;
  const double abs_rho = std::abs(rho);
  if (abs_rho <= delta) {
    return 0.5 * rho * rho;
  }
  return delta * (abs_rho - 0.5 * delta);
}

double loss_grad(double pred_grad, int polarity, double c_p, double t_curr, double t_ref) {
  if (!(t_curr > t_ref)) {
    throw std::invalid_argument("loss_grad: t_curr must exceed t_ref");
  }
  if (!(c_p > 0.0)) {
    throw std::invalid_argument("loss_grad: threshold must be positive");
  }
  const double target = polarity * c_p / (t_curr - t_ref);
  return std::abs((pred_grad - target) / target);
}

double loss_tv(double log_blur_start, double log_blur_end, double c_bar) {
  if (!(c_bar > 0.0)) {
    throw std::invalid_argument("loss_tv: c_bar must be positive");
  }
  return std::abs(log_blur_end - log_blur_start) / c_bar;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

}  // namespace

std::pair<double, double> sample_tv_subinterval(double t_ref, double t_curr,
                                                std::uint64_t& rng_state) {
  if (!(t_curr > t_ref)) {
    throw std::invalid_argument("sample_tv_subinterval: t_curr must exceed t_ref");
  }
  const double span = t_curr - t_ref;
  // Triangular length with mode 0 on [0, span) via inverse CDF, clamped to a
  // minimal relative length to guard degenerate intervals.
  double length = span * (1.0 - std::sqrt(1.0 - uniform01(rng_state)));
  length = std::max(length, 1e-9 * span);
  const double slack = span - length;
  const double start = t_ref + slack * uniform01(rng_state);
  return {start, start + length};
}

double total_loss(const std::vector<LossTerms>& batch, const LossConfig& cfg) {
  if (batch.empty()) {
    throw std::invalid_argument("total_loss: empty batch");
  }
  double sum = 0.0;
  for (const LossTerms& terms : batch) {
    sum += cfg.lambda_diff * terms.diff + cfg.lambda_tv * terms.tv + cfg.lambda_grad * terms.grad;
  }
  return sum / static_cast<double>(batch.size());
}

GammaFit fit_gamma_correction(const std::vector<std::vector<double>>& pred_log,
                              const std::vector<std::vector<double>>& ref_log) {
  if (pred_log.empty() || pred_log.size() != ref_log.size()) {
    throw std::invalid_argument("fit_gamma_correction: channel count mismatch");
  }
  // Shared slope across channels with per-channel intercepts: eliminating the
  // intercepts reduces to a = sum_ch cov(x, y) / sum_ch var(x).
  double cov_sum = 0.0;
  double var_sum = 0.0;
  std::vector<double> mean_x(pred_log.size());
  std::vector<double> mean_y(pred_log.size());
  for (std::size_t ch = 0; ch < pred_log.size(); ++ch) {
    const auto& xs = pred_log[ch];
    const auto& ys = ref_log[ch];
    if (xs.size() != ys.size() || xs.size() < 2) {
      throw std::invalid_argument("fit_gamma_correction: need two samples per channel");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    mean_x[ch] = mx;
    mean_y[ch] = my;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cov_sum += (xs[i] - mx) * (ys[i] - my);
      var_sum += (xs[i] - mx) * (xs[i] - mx);
    }
  }
  if (var_sum <= 0.0) {
    throw SingularFitError("fit_gamma_correction: zero predictor variance");
  }
  GammaFit fit;
  fit.a = cov_sum / var_sum;
  fit.b.resize(pred_log.size());
  for (std::size_t ch = 0; ch < pred_log.size(); ++ch) {
    fit.b[ch] = mean_y[ch] - fit.a * mean_x[ch];
  }
  return fit;
}

CorrectionParams fit_translated_gamma(const std::vector<std::vector<double>>& pred,
                                      const std::vector<std::vector<double>>& ref,
                                      const std::vector<std::vector<double>>& gain_exposure,
                                      const TrustRegionConfig& cfg) {
  const std::size_t channels = pred.size();
  if (channels == 0 || ref.size() != channels || gain_exposure.size() != channels) {
    throw std::invalid_argument("fit_translated_gamma: channel count mismatch");
  }
  std::size_t total = 0;
  for (std::size_t ch = 0; ch < channels; ++ch) {
    if (pred[ch].size() != ref[ch].size() || pred[ch].size() != gain_exposure[ch].size()) {
      throw std::invalid_argument("fit_translated_gamma: per-channel length mismatch");
    }
    for (std::size_t i = 0; i < pred[ch].size(); ++i) {
      if (!(pred[ch][i] > 0.0)) {
        throw std::invalid_argument("fit_translated_gamma: predictions must be positive");
      }
      if (!(gain_exposure[ch][i] > 0.0)) {
        throw std::invalid_argument("fit_translated_gamma: gain-exposure must be positive");
      }
    }
    total += pred[ch].size();
  }

  // Initialize from the log-domain gamma correction with c = 0; references are
  // first divided by their gain-exposure factor.
  std::vector<std::vector<double>> pred_log(channels), ref_log(channels);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    pred_log[ch].reserve(pred[ch].size());
    ref_log[ch].reserve(pred[ch].size());
    for (std::size_t i = 0; i < pred[ch].size(); ++i) {
      const double r = ref[ch][i] / gain_exposure[ch][i];
      if (r > 0.0) {
        pred_log[ch].push_back(std::log(pred[ch][i]));
        ref_log[ch].push_back(std::log(r));
      }
    }
  }
  const GammaFit init_fit = fit_gamma_correction(pred_log, ref_log);

  // Parameter vector: [a, b_0..b_C-1, c_0..c_C-1].
  Vector init(1 + 2 * channels);
  init[0] = init_fit.a;
  for (std::size_t ch = 0; ch < channels; ++ch) {
    init[1 + static_cast<Eigen::Index>(ch)] = std::exp(init_fit.b[ch]);
    init[1 + static_cast<Eigen::Index>(channels + ch)] = 0.0;
  }

  auto residual = [&](const Vector& params) {
    Vector r(static_cast<Eigen::Index>(total));
    Eigen::Index row = 0;
    const double a = params[0];
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const double b = params[1 + static_cast<Eigen::Index>(ch)];
      const double c = params[1 + static_cast<Eigen::Index>(channels + ch)];
      for (std::size_t i = 0; i < pred[ch].size(); ++i) {
        const double g = gain_exposure[ch][i];
        r[row++] = g * (b * std::pow(pred[ch][i], a) - c) - ref[ch][i];
      }
    }
    return r;
  };
  auto jacobian = [&](const Vector& params) {
    Matrix jac = Matrix::Zero(static_cast<Eigen::Index>(total), params.size());
    Eigen::Index row = 0;
    const double a = params[0];
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const double b = params[1 + static_cast<Eigen::Index>(ch)];
      for (std::size_t i = 0; i < pred[ch].size(); ++i) {
        const double g = gain_exposure[ch][i];
        const double la = std::pow(pred[ch][i], a);
        jac(row, 0) = g * b * la * std::log(pred[ch][i]);
        jac(row, 1 + static_cast<Eigen::Index>(ch)) = g * la;
        jac(row, 1 + static_cast<Eigen::Index>(channels + ch)) = -g;
        ++row;
      }
    }
    return jac;
  };

  const Vector fitted = lm_fit(residual, jacobian, init, cfg);

  CorrectionParams out;
  out.a = fitted[0];
  out.b.resize(channels);
  out.c.resize(channels);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    out.b[ch] = fitted[1 + static_cast<Eigen::Index>(ch)];
    out.c[ch] = fitted[1 + static_cast<Eigen::Index>(channels + ch)];
  }
  return out;
}

std::vector<double> apply_translated_gamma(const std::vector<double>& pred,
                                           const CorrectionParams& params, int channel,
                                           double gain_exposure) {
  if (channel < 0 || static_cast<std::size_t>(channel) >= params.b.size()) {
    throw std::invalid_argument("apply_translated_gamma: channel out of range");
  }
  std::vector<double> out;
  out.reserve(pred.size());
  const double b = params.b[static_cast<std::size_t>(channel)];
  const double c = params.c[static_cast<std::size_t>(channel)];
  for (const double v : pred) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("apply_translated_gamma: predictions must be positive");
    }
    out.push_back(gain_exposure * (b * std::pow(v, params.a) - c));
  }
  return out;
}

}  // namespace evblur
