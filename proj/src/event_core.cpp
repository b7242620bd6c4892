#include "evblur/event_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "evblur/filter_engine.hpp"

namespace evblur {

void EventCameraConfig::validate() const {
  if (!(c_pos > 0.0) || !(c_neg > 0.0)) {
    throw std::invalid_argument("EventCameraConfig: contrast thresholds must be positive");
  }
  if (sigma_c < 0.0 || tau < 0.0) {
    throw std::invalid_argument("EventCameraConfig: sigma_c and tau must be nonnegative");
  }
}

PixelEventState initial_pixel_state(double t0, double log_sf0, double log_diff0,
                                    double c_neg, double c_pos) {
  PixelEventState s;
  s.t = t0;
  s.t_ref = t0;
  s.ref_level = log_sf0;
  s.delta_ref = log_sf0 - log_diff0;
  s.last_event_t = t0;
  s.c_neg = c_neg;
  s.c_pos = c_pos;
  return s;
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

// Box-Muller; hand-rolled so draws are identical across standard libraries.
inline double normal_draw(std::uint64_t& state) {
  double u1 = uniform01(state);
  if (u1 <= 0.0) {
    u1 = 0x1.0p-53;
  }
  const double u2 = uniform01(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Segment {
  double t0, t1;
  double sf0, sf1;
  double diff0, diff1;

  double sf_at(double t) const {
    const double a = (t - t0) / (t1 - t0);
    return sf0 + a * (sf1 - sf0);
  }
  double diff_at(double t) const {
    const double a = (t - t0) / (t1 - t0);
    return diff0 + a * (diff1 - diff0);
  }
};

double blur_at(const Segment& seg, double t, const PixelEventState& s, double omega_c_diff) {
  return apply_reset(seg.diff_at(t), s.delta_ref, omega_c_diff, t - s.t_ref);
}

// Latch the reference to the trace values at time tr.
void reset_latch(PixelEventState& s, const Segment& seg, double tr) {
  const double sf = seg.sf_at(tr);
  s.t_ref = tr;
  s.ref_level = sf;
  s.delta_ref = sf - seg.diff_at(tr);
  s.reset_pending = false;
}

}  // namespace

std::pair<double, double> sample_pixel_thresholds(const EventCameraConfig& cfg,
                                                  std::uint16_t x, std::uint16_t y) {
  cfg.validate();
  if (cfg.sigma_c == 0.0) {
    return {cfg.c_neg, cfg.c_pos};
  }
  std::uint64_t state =
      splitmix64(cfg.rng_seed ^ (static_cast<std::uint64_t>(y) << 16 | static_cast<std::uint64_t>(x)));
  const double neg = std::max(cfg.c_neg + cfg.sigma_c * normal_draw(state), 0.01 * cfg.c_neg);
  const double pos = std::max(cfg.c_pos + cfg.sigma_c * normal_draw(state), 0.01 * cfg.c_pos);
  return {neg, pos};
}

std::vector<Event> detect_events(const PixelTrace& trace, PixelEventState& state,
                                 const EventCameraConfig& cfg, double omega_c_diff,
                                 std::uint16_t x, std::uint16_t y) {
  if (trace.t.size() != trace.log_sf.size() || trace.t.size() != trace.log_diff.size()) {
    throw std::invalid_argument("detect_events: trace column lengths differ");
  }
  if (trace.t.empty()) {
    return {};
  }
  if (std::abs(trace.t.front() - state.t) > 1e-9 * std::max(1.0, std::abs(state.t))) {
    throw std::invalid_argument("detect_events: trace must start at the state's current time");
  }
  for (std::size_t i = 1; i < trace.t.size(); ++i) {
    if (!(trace.t[i] > trace.t[i - 1])) {
      throw std::invalid_argument("detect_events: timestamps must be strictly increasing");
    }
  }

  std::vector<Event> events;
  for (std::size_t i = 0; i + 1 < trace.t.size(); ++i) {
    const Segment seg{trace.t[i],          trace.t[i + 1],    trace.log_sf[i],
                      trace.log_sf[i + 1], trace.log_diff[i], trace.log_diff[i + 1]};
    double cursor = seg.t0;

    // Refractory window: detection is suspended until the pending reset.
    if (state.reset_pending) {
      if (state.reset_at > seg.t1) {
        state.t = seg.t1;
        continue;
      }
      cursor = std::max(state.reset_at, seg.t0);
      reset_latch(state, seg, cursor);
    }

    while (cursor < seg.t1) {
      // Blurred log-radiance at the sub-segment endpoints, linear in between.
      const double b0 = blur_at(seg, cursor, state, omega_c_diff);
      const double b1 = blur_at(seg, seg.t1, state, omega_c_diff);
      const double up = state.ref_level + state.c_pos;
      const double down = state.ref_level - state.c_neg;

      double t_event;
      int polarity;
      if (b1 > b0 && b1 >= up) {
        t_event = cursor + (up - b0) / (b1 - b0) * (seg.t1 - cursor);
        polarity = +1;
      } else if (b1 < b0 && b1 <= down) {
        t_event = cursor + (down - b0) / (b1 - b0) * (seg.t1 - cursor);
        polarity = -1;
      } else {
        break;
      }
      t_event = std::clamp(t_event, cursor, seg.t1);
      if (!(t_event > cursor)) {
        // Rounding collapsed the crossing onto the cursor; force progress.
        t_event = std::nextafter(cursor, seg.t1);
        if (!(t_event > cursor) || t_event > seg.t1) {
          break;
        }
      }

      events.push_back(
          Event{x, y, static_cast<std::int8_t>(polarity), state.last_event_t, t_event});
      state.last_event_t = t_event;

      const double tr = t_event + cfg.tau;
      if (tr <= seg.t1) {
        reset_latch(state, seg, tr);
        cursor = tr;
      } else {
        state.reset_pending = true;
        state.reset_at = tr;
        break;
      }
    }
    state.t = seg.t1;
  }
  return events;
}

std::vector<Event> merge_streams(std::vector<std::vector<Event>> per_pixel) {
  std::vector<Event> all;
  std::size_t total = 0;
  for (const auto& v : per_pixel) {
    total += v.size();
  }
  all.reserve(total);
  for (auto& v : per_pixel) {
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end(), [](const Event& a, const Event& b) {
    if (a.t_curr != b.t_curr) return a.t_curr < b.t_curr;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.polarity < b.polarity;
  });
  return all;
}

}  // namespace evblur
