#include "evblur/pixel_model.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace evblur {

void PixelBandwidthParams::validate(double radiance_floor) const {
  const bool positive = amp_gain > 0.0 && loop_gain > 0.0 && tau_out > 0.0 && c_in > 0.0 &&
                        c_mil > 0.0 && omega_c_sf > 0.0 && omega_c_diff > 0.0 &&
                        black_level > 0.0;
  if (!positive) {
    throw std::invalid_argument("PixelBandwidthParams: all parameters must be positive");
  }
  if (!(omega_c_diff > omega_c_sf)) {
    throw std::invalid_argument("PixelBandwidthParams: omega_c_diff must exceed omega_c_sf");
  }
  if (!(c_in > radiance_floor)) {
    throw std::invalid_argument("PixelBandwidthParams: c_in must exceed the radiance floor");
  }
}

double effective_log_radiance(const PixelBandwidthParams& p, double radiance_signal,
                              double floor) {
  const double effective = std::max(radiance_signal, 0.0) + p.black_level;
  return std::log(std::max(effective, floor));
}

double tau_in(const PixelBandwidthParams& p, double u) { return p.c_in * std::exp(-u); }

double tau_mil(const PixelBandwidthParams& p, double u) { return p.c_mil * std::exp(-u); }

double damping_ratio(const PixelBandwidthParams& p, double u) {
  const double ti = tau_in(p, u);
  const double tm = tau_mil(p, u);
  const double numer = p.tau_out + ti + (p.amp_gain + 1.0) * tm;
  const double denom = 2.0 * std::sqrt(p.tau_out * (ti + tm) * (p.loop_gain + 1.0));
  return numer / denom;
}

double natural_frequency(const PixelBandwidthParams& p, double u) {
  const double sum_tau = tau_in(p, u) + tau_mil(p, u);
  return std::sqrt((p.loop_gain + 1.0) / (p.tau_out * sum_tau));
}

double dominant_cutoff(const PixelBandwidthParams& p, double u) {
  return (p.loop_gain + 1.0) / (tau_in(p, u) + (p.amp_gain + 1.0) * tau_mil(p, u));
}

double omega_c_dom_min(const PixelBandwidthParams& p) {
  return dominant_cutoff(p, std::log(p.black_level));
}

StateSpace continuous_matrices(const PixelBandwidthParams& p, double u) {
  const double zeta = damping_ratio(p, u);
  const double omega_n = natural_frequency(p, u);
  StateSpace ss;
  ss.A << -2.0 * zeta * omega_n, -omega_n * omega_n, 0.0, 0.0,
          1.0, 0.0, 0.0, 0.0,
          0.0, p.omega_c_sf, -p.omega_c_sf, 0.0,
          0.0, 0.0, p.omega_c_diff, -p.omega_c_diff;
  ss.B << omega_n * omega_n, 0.0, 0.0, 0.0;
  ss.C << 0.0, 0.0, 1.0, 0.0,
          0.0, 0.0, 0.0, 1.0;
  return ss;
}

Eigen::Vector2d frequency_response(const PixelBandwidthParams& p, double u, double omega) {
  const StateSpace ss = continuous_matrices(p, u);
  Eigen::Matrix4cd resolvent = -ss.A.cast<std::complex<double>>();
  resolvent.diagonal().array() += std::complex<double>(0.0, omega);
  const Eigen::Vector4cd h = resolvent.partialPivLu().solve(ss.B.cast<std::complex<double>>());
  return {std::abs(h[2]), std::abs(h[3])};
}

double bandwidth_hz(const PixelBandwidthParams& p, double radiance_signal) {
  const double u = effective_log_radiance(p, radiance_signal);
  // Every pole scale bounds the -3 dB point from above, so two decades below
  // the smallest of them is a safe bracket start.
  const double pole_bound =
      std::min({dominant_cutoff(p, u), (p.loop_gain + 1.0) / p.tau_out, p.omega_c_sf,
                p.omega_c_diff});
  const double dc_gain = frequency_response(p, u, 0.0)[1];
  const double target = dc_gain / std::numbers::sqrt2;

  const double grid_step = std::pow(10.0, 1.0 / 64.0);
  double omega = pole_bound / 100.0;
  while (frequency_response(p, u, omega)[1] > target) {
    omega *= grid_step;
  }
  double lo = omega / grid_step;
  double hi = omega;
  while (hi / lo > 1.0 + 1e-6) {
    const double mid = std::sqrt(lo * hi);
    if (frequency_response(p, u, mid)[1] > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi) / (2.0 * std::numbers::pi);
}

}  // namespace evblur
