#pragma once

#include <Eigen/Core>

namespace evblur {

/// Lumped parameters of the pixel bandwidth model: a 2nd-order nonlinear
/// photoreceptor stage followed by two 1st-order stages (source follower,
/// differencing amplifier). Time constants of the photoreceptor input node
/// and Miller capacitance scale with the reciprocal of effective radiance,
/// via the lumped constants c_in and c_mil (radiance * seconds).
struct PixelBandwidthParams {
  double amp_gain = 100.0;              // A_amp
  double loop_gain = 34.0;              // A_loop
  double tau_out = 1.857e-3;            // s, photoreceptor output node
  double c_in = 0.0109;                 // radiance * s
  double c_mil = 0.0109;                // radiance * s
  double omega_c_sf = 50265.482457437;   // rad/s (2*pi*8 kHz)
  double omega_c_diff = 100530.964914874; // rad/s (2*pi*16 kHz)
  double black_level = 0.1;             // L_dark, radiance units

  // Throws std::invalid_argument when any constraint is violated:
  // all fields positive, omega_c_diff > omega_c_sf, c_in > radiance floor.
  void validate(double radiance_floor = 1e-3) const;
};

/// Radiance floor applied to effective radiance before taking logs.
inline constexpr double kRadianceFloor = 1e-3;

/// Effective log-radiance for a signal radiance, u = log(max(L + L_dark, floor)).
double effective_log_radiance(const PixelBandwidthParams& p, double radiance_signal,
                              double floor = kRadianceFloor);

double tau_in(const PixelBandwidthParams& p, double u);
double tau_mil(const PixelBandwidthParams& p, double u);
double damping_ratio(const PixelBandwidthParams& p, double u);
double natural_frequency(const PixelBandwidthParams& p, double u);

/// Cutoff of the low-light dominant-pole approximation; proportional to exp(u).
double dominant_cutoff(const PixelBandwidthParams& p, double u);

/// Minimum possible dominant cutoff, attained at the black level.
double omega_c_dom_min(const PixelBandwidthParams& p);

struct StateSpace {
  Eigen::Matrix4d A;
  Eigen::Vector4d B;
  Eigen::Matrix<double, 2, 4> C;
};

/// The 4th-order state-space matrices evaluated at operating input u.
/// State: [d logL_p/dt, logL_p, logL_sf, logL_diff]; outputs select the last
/// two states.
StateSpace continuous_matrices(const PixelBandwidthParams& p, double u);

/// Magnitude of the transfer function from u to (logL_sf, logL_diff) of the
/// model linearized at input u, at angular frequency omega.
Eigen::Vector2d frequency_response(const PixelBandwidthParams& p, double u, double omega);

/// -3 dB frequency (Hz) of the logL_diff output for the model linearized at
/// u = log(L + L_dark). Located by a 64-point-per-decade march plus bisection
/// to 1e-6 relative tolerance.
double bandwidth_hz(const PixelBandwidthParams& p, double radiance_signal);

}  // namespace evblur
