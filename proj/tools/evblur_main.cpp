#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "evblur/config.hpp"
#include "evblur/errors.hpp"
#include "evblur/recon.hpp"
#include "evblur/simulator.hpp"

namespace {

using namespace evblur;

std::map<std::string, std::string> parse_kv(const std::string& spec) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("expected key=value in '" + item + "'");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

std::vector<float> load_pgm(const std::string& path, int& width, int& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open frame " + path);
  }
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") {
    throw std::runtime_error(path + ": only P2/P5 PGM frames are supported");
  }
  auto next_token = [&in, &path]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw std::runtime_error(path + ": truncated PGM header");
  };
  width = std::stoi(next_token());
  height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw std::runtime_error(path + ": bad PGM header");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<float> data(n);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      int v;
      if (!(in >> v)) {
        throw std::runtime_error(path + ": truncated PGM data");
      }
      data[i] = static_cast<float>(v) / maxval;
    }
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
      throw std::runtime_error(path + ": truncated PGM data");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8 | raw[2 * i + 1]);
      data[i] = static_cast<float>(v) / maxval;
    }
  }
  return data;
}

SceneSource parse_scene(const std::string& spec, bool gamma_decode) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  SceneSource scene;
  if (kind == "bar") {
    const auto kv = parse_kv(rest);
    MovingBarScene bar;
    bar.bar_width_px = kv_num(kv, "width", bar.bar_width_px);
    bar.speed_px_s = kv_num(kv, "speed", bar.speed_px_s);
    bar.foreground = kv_num(kv, "fg", bar.foreground);
    bar.background = kv_num(kv, "bg", bar.background);
    bar.start_x = kv_num(kv, "x0", bar.start_x);
    scene.width = static_cast<int>(kv_num(kv, "w", 64));
    scene.height = static_cast<int>(kv_num(kv, "h", 64));
    scene.duration = kv_num(kv, "duration", 0.25);
    scene.kind = bar;
    return scene;
  }
  if (kind == "frames") {
    // Manifest: one "<timestamp> <pgm path>" pair per line.
    std::ifstream in(rest);
    if (!in) {
      throw std::runtime_error("cannot open manifest " + rest);
    }
    FrameStack stack;
    stack.gamma_decode = gamma_decode;
    std::string line;
    int width = 0, height = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') {
        continue;
      }
      std::istringstream ls(line);
      double t;
      std::string path;
      if (!(ls >> t >> path)) {
        throw std::runtime_error("bad manifest line: " + line);
      }
      int w = 0, h = 0;
      stack.frames.push_back(load_pgm(path, w, h));
      stack.timestamps.push_back(t);
      if (width == 0) {
        width = w;
        height = h;
      } else if (w != width || h != height) {
        throw std::runtime_error("frame size mismatch at " + path);
      }
    }
    if (stack.frames.empty()) {
      throw std::runtime_error("manifest lists no frames");
    }
    scene.width = width;
    scene.height = height;
    scene.duration = stack.timestamps.back();
    scene.kind = std::move(stack);
    return scene;
  }
  throw std::invalid_argument("unknown scene kind '" + kind + "' (use bar: or frames:)");
}

int run_simulate(const std::string& config_path, const std::string& scene_spec,
                 const std::string& out_path, const std::string& format, bool infinite_bandwidth,
                 long long seed, bool gamma_decode) {
  SimConfig cfg = config_path.empty() ? SimConfig{} : load_config(config_path);
  if (infinite_bandwidth) {
    cfg.sim.infinite_bandwidth = true;
  }
  if (seed >= 0) {
    cfg.camera.rng_seed = static_cast<std::uint64_t>(seed);
  }
  const SceneSource scene = parse_scene(scene_spec, gamma_decode);
  EventStream stream = simulate(scene, cfg.radiometry, cfg.pixel, cfg.camera, cfg.sim);
  stream.config_fingerprint = config_fingerprint(cfg);
  write_events(stream, out_path, format == "bin" ? EventFormat::kBinary : EventFormat::kCsv);
  std::cout << stream.events.size() << " events -> " << out_path << "\n";
  return 0;
}

int run_response(const std::string& config_path, const std::string& input_spec,
                 const std::string& out_path) {
  const SimConfig cfg = config_path.empty() ? SimConfig{} : load_config(config_path);
  cfg.pixel.validate(cfg.radiometry.epsilon);
  const auto colon = input_spec.find(':');
  const std::string kind = input_spec.substr(0, colon);
  const auto kv = parse_kv(colon == std::string::npos ? "" : input_spec.substr(colon + 1));
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot open " + out_path);
  }
  out.precision(12);

  if (kind == "sweep") {
    const double lo = kv_num(kv, "Lmin", 0.01);
    const double hi = kv_num(kv, "Lmax", 1e6);
    const int points = static_cast<int>(kv_num(kv, "points", 120));
    out << "L,bandwidth_hz\n";
    for (int i = 0; i < points; ++i) {
      const double L = lo * std::pow(hi / lo, i / double(points - 1));
      out << L << "," << bandwidth_hz(cfg.pixel, L) << "\n";
    }
    return 0;
  }
  if (kind == "bode") {
    const double L = kv_num(kv, "L", 100.0);
    const double fmin = kv_num(kv, "fmin", 1.0);
    const double fmax = kv_num(kv, "fmax", 1e5);
    const int points = static_cast<int>(kv_num(kv, "points", 200));
    const double u = effective_log_radiance(cfg.pixel, L, cfg.radiometry.epsilon);
    out << "f_hz,mag_sf,mag_diff\n";
    for (int i = 0; i < points; ++i) {
      const double f = fmin * std::pow(fmax / fmin, i / double(points - 1));
      const Eigen::Vector2d mag = frequency_response(cfg.pixel, u, 2.0 * M_PI * f);
      out << f << "," << mag[0] << "," << mag[1] << "\n";
    }
    return 0;
  }
  if (kind == "step") {
    const double l0 = kv_num(kv, "L0", 10.0);
    const double l1 = kv_num(kv, "L1", 1000.0);
    const double horizon = kv_num(kv, "T", 0.02);
    const double dt = kv_num(kv, "dt", 1e-6);
    const double u0 = effective_log_radiance(cfg.pixel, l0, cfg.radiometry.epsilon);
    const double u1 = effective_log_radiance(cfg.pixel, l1, cfg.radiometry.epsilon);
    FilterState state = initial_state(u0);
    const DiscreteStep d = discretize(cfg.pixel, u1, dt);
    out << "t,u,log_sf,log_diff\n";
    out << 0.0 << "," << u0 << "," << state.x[2] << "," << state.x[3] << "\n";
    for (double t = dt; t <= horizon + dt * 0.5; t += dt) {
      state = step(state, u1, u1, d);
      out << t << "," << u1 << "," << state.x[2] << "," << state.x[3] << "\n";
    }
    return 0;
  }
  throw std::invalid_argument("unknown input kind '" + kind + "' (use step:, bode: or sweep:)");
}

std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t columns,
                                              std::vector<std::vector<double>>* extra = nullptr) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::vector<std::vector<double>> data(columns);
  if (extra) {
    extra->resize(columns);
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '.')) {
      continue;  // header or comment
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (row.size() < columns) {
      throw ParseError("expected at least " + std::to_string(columns) + " columns", line_no);
    }
    for (std::size_t c = 0; c < columns; ++c) {
      data[c].push_back(row[c]);
    }
    if (extra) {
      const double g = row.size() > columns ? row[columns] : 1.0;
      for (std::size_t c = 0; c < columns; ++c) {
        (*extra)[c].push_back(g);
      }
    }
  }
  return data;
}

int run_correct(const std::string& renders_path, const std::string& refs_path,
                const std::string& out_path, int channels) {
  const auto pred = read_columns(renders_path, static_cast<std::size_t>(channels));
  std::vector<std::vector<double>> gains;
  const auto refs = read_columns(refs_path, static_cast<std::size_t>(channels), &gains);
  if (pred[0].size() != refs[0].size()) {
    throw std::runtime_error("renders and references disagree on sample count");
  }
  const CorrectionParams params = fit_translated_gamma(pred, refs, gains);
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot open " + out_path);
  }
  out.precision(17);
  out << "[correction]\n";
  out << "a = " << params.a << "\n";
  out << "b =";
  for (const double v : params.b) out << " " << v;
  out << "\nc =";
  for (const double v : params.c) out << " " << v;
  out << "\n";
  std::cout << "fitted a=" << params.a << " -> " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-camera pixel bandwidth simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, scene_spec, out_path, format = "csv", input_spec;
  std::string renders_path, refs_path;
  bool infinite_bandwidth = false;
  bool gamma_decode = false;
  long long seed = -1;
  int channels = 3;

  auto* sim = app.add_subcommand("simulate", "Synthesize an event stream from a scene");
  sim->add_option("--config", config_path, "Config file (defaults when omitted)");
  sim->add_option("--scene", scene_spec, "bar:k=v,... or frames:<manifest>")->required();
  sim->add_option("--out", out_path, "Output event file")->required();
  sim->add_option("--format", format, "csv|bin")->check(CLI::IsMember({"csv", "bin"}));
  sim->add_flag("--infinite-bandwidth", infinite_bandwidth, "Bypass the pixel filter");
  sim->add_option("--seed", seed, "Override the camera RNG seed");
  sim->add_flag("--gamma-decode", gamma_decode, "Apply inverse gamma (2.2) to frame intensities");

  auto* rsp = app.add_subcommand("response", "Dump filter responses and bandwidth sweeps");
  rsp->add_option("--config", config_path, "Config file (defaults when omitted)");
  rsp->add_option("--input", input_spec, "step:... | bode:... | sweep:...")->required();
  rsp->add_option("--out", out_path, "Output CSV")->required();

  auto* cor = app.add_subcommand("correct", "Fit the translated-gamma correction");
  cor->add_option("--renders", renders_path, "CSV of predicted radiance per channel")->required();
  cor->add_option("--refs", refs_path, "CSV of reference radiance (+ optional gain column)")
      ->required();
  cor->add_option("--out", out_path, "Output parameter file")->required();
  cor->add_option("--channels", channels, "Number of color channels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return run_simulate(config_path, scene_spec, out_path, format, infinite_bandwidth, seed,
                          gamma_decode);
    }
    if (rsp->parsed()) {
      return run_response(config_path, input_spec, out_path);
    }
    return run_correct(renders_path, refs_path, out_path, channels);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
