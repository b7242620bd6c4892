#include "evblur/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "evblur/errors.hpp"

namespace evblur {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
      throw ParseError("trailing characters in numeric value", line_no);
    }
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad numeric value '" + value + "'", line_no);
  }
}

bool parse_bool(const std::string& value, std::size_t line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("bad boolean value '" + value + "'", line_no);
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("unterminated section header", line_no);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "pixel" && section != "camera" && section != "radiometry" &&
          section != "sim") {
        throw ParseError("unknown section [" + section + "]", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key = value", line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ParseError("key outside any section", line_no);
    }

    if (section == "pixel") {
      if (key == "a_amp") cfg.pixel.amp_gain = parse_double(value, line_no);
      else if (key == "a_loop") cfg.pixel.loop_gain = parse_double(value, line_no);
      else if (key == "tau_out") cfg.pixel.tau_out = parse_double(value, line_no);
      else if (key == "c_in") cfg.pixel.c_in = parse_double(value, line_no);
      else if (key == "c_mil") cfg.pixel.c_mil = parse_double(value, line_no);
      else if (key == "omega_c_sf") cfg.pixel.omega_c_sf = parse_double(value, line_no);
      else if (key == "omega_c_diff") cfg.pixel.omega_c_diff = parse_double(value, line_no);
      else if (key == "l_dark") cfg.pixel.black_level = parse_double(value, line_no);
      else throw ParseError("unknown [pixel] key '" + key + "'", line_no);
    } else if (section == "camera") {
      if (key == "c_pos") cfg.camera.c_pos = parse_double(value, line_no);
      else if (key == "c_neg") cfg.camera.c_neg = parse_double(value, line_no);
      else if (key == "sigma_c") cfg.camera.sigma_c = parse_double(value, line_no);
      else if (key == "tau") cfg.camera.tau = parse_double(value, line_no);
      else if (key == "seed") cfg.camera.rng_seed = static_cast<std::uint64_t>(parse_double(value, line_no));
      else throw ParseError("unknown [camera] key '" + key + "'", line_no);
    } else if (section == "radiometry") {
      if (key == "illuminance_scale") cfg.radiometry.illuminance_scale = parse_double(value, line_no);
      else if (key == "epsilon") cfg.radiometry.epsilon = parse_double(value, line_no);
      else throw ParseError("unknown [radiometry] key '" + key + "'", line_no);
    } else {  // sim
      if (key == "base_dt") cfg.sim.base_dt = parse_double(value, line_no);
      else if (key == "min_dt") cfg.sim.min_dt = parse_double(value, line_no);
      else if (key == "threads") cfg.sim.threads = static_cast<int>(parse_double(value, line_no));
      else if (key == "infinite_bandwidth") cfg.sim.infinite_bandwidth = parse_bool(value, line_no);
      else throw ParseError("unknown [sim] key '" + key + "'", line_no);
    }
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_config: cannot open " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string format_config(const SimConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "[pixel]\n"
      << "a_amp = " << cfg.pixel.amp_gain << "\n"
      << "a_loop = " << cfg.pixel.loop_gain << "\n"
      << "tau_out = " << cfg.pixel.tau_out << "\n"
      << "c_in = " << cfg.pixel.c_in << "\n"
      << "c_mil = " << cfg.pixel.c_mil << "\n"
      << "omega_c_sf = " << cfg.pixel.omega_c_sf << "\n"
      << "omega_c_diff = " << cfg.pixel.omega_c_diff << "\n"
      << "l_dark = " << cfg.pixel.black_level << "\n"
      << "\n[camera]\n"
      << "c_pos = " << cfg.camera.c_pos << "\n"
      << "c_neg = " << cfg.camera.c_neg << "\n"
      << "sigma_c = " << cfg.camera.sigma_c << "\n"
      << "tau = " << cfg.camera.tau << "\n"
      << "seed = " << cfg.camera.rng_seed << "\n"
      << "\n[radiometry]\n"
      << "illuminance_scale = " << cfg.radiometry.illuminance_scale << "\n"
      << "epsilon = " << cfg.radiometry.epsilon << "\n"
      << "\n[sim]\n"
      << "base_dt = " << cfg.sim.base_dt << "\n"
      << "min_dt = " << cfg.sim.min_dt << "\n"
      << "threads = " << cfg.sim.threads << "\n"
      << "infinite_bandwidth = " << (cfg.sim.infinite_bandwidth ? "true" : "false") << "\n";
  return out.str();
}

void save_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_config: cannot open " + path);
  }
  out << format_config(cfg);
}

std::uint64_t config_fingerprint(const SimConfig& cfg) {
  const std::string text = format_config(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace evblur
