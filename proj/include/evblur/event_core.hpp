#pragma once

#include <cstdint>
#include <vector>

namespace evblur {

struct EventCameraConfig {
  double c_pos = 0.25;    // positive contrast threshold (log-radiance units)
  double c_neg = 0.25;    // negative contrast threshold
  double sigma_c = 0.0;   // pixel-to-pixel threshold std
  double tau = 0.0;       // refractory period, s
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t polarity = 0;  // -1 or +1
  double t_prev = 0.0;
  double t_curr = 0.0;
};

/// Per-pixel trace of the two filter outputs at strictly increasing times.
struct PixelTrace {
  std::vector<double> t;
  std::vector<double> log_sf;
  std::vector<double> log_diff;
};

/// Detection state of one pixel. The latch holds the data of the last reset:
/// the comparison reference logL_sf(t_ref) and the decaying offset
/// logL_delta(t_ref) of the blur composition.
struct PixelEventState {
  double t = 0.0;            // current trace time
  double t_ref = 0.0;        // last reset timestamp
  double ref_level = 0.0;    // logL_sf(t_ref)
  double delta_ref = 0.0;    // logL_sf(t_ref) - logL_diff(t_ref)
  double last_event_t = 0.0; // t_prev of the next event (stream start initially)
  double reset_at = 0.0;     // pending reset time when reset_pending
  bool reset_pending = false;
  double c_neg = 0.25;       // per-pixel thresholds
  double c_pos = 0.25;
};

/// Initial state at stream start: the start acts as the initial reset.
PixelEventState initial_pixel_state(double t0, double log_sf0, double log_diff0,
                                    double c_neg, double c_pos);

/// Per-pixel thresholds (C_neg, C_pos), normal around the configured values
/// with std sigma_c, clipped below at 1% of the mean, deterministic in
/// (seed, x, y). sigma_c == 0 returns the configured thresholds exactly.
std::pair<double, double> sample_pixel_thresholds(const EventCameraConfig& cfg,
                                                  std::uint16_t x, std::uint16_t y);

/// Threshold-crossing detection on one pixel's trace. The blurred
/// log-radiance is composed from the trace per the reset model and compared
/// against ref_level +/- C; crossings are located by linear interpolation.
/// After an event at t_e the pixel is deactivated until t_e + tau, where the
/// latch resets to the interpolated trace values. Returns events in time
/// order and advances `state` to the trace end.
/// Throws std::invalid_argument on non-increasing timestamps or when the
/// trace does not start at the state's current time.
std::vector<Event> detect_events(const PixelTrace& trace, PixelEventState& state,
                                 const EventCameraConfig& cfg, double omega_c_diff,
                                 std::uint16_t x, std::uint16_t y);

/// Merge per-pixel event lists into one stream ordered by
/// (t_curr, y, x, polarity); deterministic for any input sharding.
std::vector<Event> merge_streams(std::vector<std::vector<Event>> per_pixel);

}  // namespace evblur
