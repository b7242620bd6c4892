#pragma once

#include <cstdint>
#include <string>

#include "evblur/event_core.hpp"
#include "evblur/pixel_model.hpp"
#include "evblur/simulator.hpp"

namespace evblur {

struct SimConfig {
  PixelBandwidthParams pixel;
  EventCameraConfig camera;
  RadiometryConfig radiometry;
  SimOptions sim;
};

/// Sectioned key=value text:
///   [pixel]      a_amp, a_loop, tau_out, c_in, c_mil, omega_c_sf,
///                omega_c_diff, l_dark
///   [camera]     c_pos, c_neg, sigma_c, tau, seed
///   [radiometry] illuminance_scale, epsilon
///   [sim]        base_dt, min_dt, threads, infinite_bandwidth
/// Missing keys keep defaults; unknown keys or malformed lines raise
/// ParseError with the line number.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& text);

std::string format_config(const SimConfig& cfg);
void save_config(const SimConfig& cfg, const std::string& path);

/// FNV-1a hash of the canonical config text; stored in stream headers.
std::uint64_t config_fingerprint(const SimConfig& cfg);

}  // namespace evblur
