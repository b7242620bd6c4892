#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "evblur/event_core.hpp"
#include "evblur/filter_engine.hpp"
#include "evblur/pixel_model.hpp"

namespace evblur {

/// Analytic scene: a vertical bar of foreground intensity sweeping
/// horizontally over a background, in normalized intensity units.
struct MovingBarScene {
  double bar_width_px = 8.0;
  double speed_px_s = 256.0;   // leading-edge speed, +x direction
  double foreground = 1.0;
  double background = 0.05;
  double start_x = 0.0;        // leading-edge position at t = 0
};

/// Ordered frames with strictly increasing timestamps; intensities are
/// treated as linear radiance unless gamma_decode applies a 2.2 exponent.
struct FrameStack {
  std::vector<double> timestamps;
  std::vector<std::vector<float>> frames;  // row-major W*H each
  bool gamma_decode = false;
};

struct SceneSource {
  int width = 0;
  int height = 0;
  double duration = 0.0;
  std::variant<MovingBarScene, FrameStack> kind;

  void validate() const;  // throws std::invalid_argument
};

struct RadiometryConfig {
  double illuminance_scale = 1000.0;  // radiance units per normalized intensity
  double epsilon = kRadianceFloor;    // radiance floor before logs

  void validate() const;
};

struct SimOptions {
  double base_dt = 0.0;          // 0: auto (frame spacing, or duration/1000)
  double min_dt = 1e-7;          // lower bound of the adaptive interval
  int threads = 0;               // 0: hardware concurrency
  bool infinite_bandwidth = false;
};

struct EventStream {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  double duration = 0.0;
  std::uint64_t config_fingerprint = 0;
  std::vector<Event> events;
};

enum class EventFormat { kCsv, kBinary };

/// Effective log-radiance of a pixel at time t:
///   u = log(max(intensity * illuminance_scale + L_dark, epsilon)).
/// Frame stacks interpolate u linearly in time between bracketing frames and
/// clamp outside the covered range. Throws std::invalid_argument for
/// out-of-bounds pixels.
double interpolate_log_radiance(const SceneSource& source, const RadiometryConfig& radiometry,
                                double black_level, int x, int y, double t);

/// Steady state on the initial input: x = (0, u0, u0, u0).
FilterState initial_state(double u0, double t0 = 0.0);

/// Run the per-pixel filter + event detection over the scene and merge the
/// per-pixel streams. Output is identical for any thread count.
EventStream simulate(const SceneSource& source, const RadiometryConfig& radiometry,
                     const PixelBandwidthParams& pixel, const EventCameraConfig& camera,
                     const SimOptions& opts = {});

void write_events(const EventStream& stream, const std::string& path, EventFormat format);

/// Reads either format (binary detected by magic). Throws ParseError on
/// malformed content.
EventStream read_events(const std::string& path);

}  // namespace evblur
