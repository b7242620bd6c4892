#include "evblur/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "evblur/errors.hpp"

namespace evblur {

void SceneSource::validate() const {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("SceneSource: resolution must be positive");
  }
  if (!(duration > 0.0)) {
    throw std::invalid_argument("SceneSource: duration must be positive");
  }
  if (const auto* stack = std::get_if<FrameStack>(&kind)) {
    if (stack->frames.empty()) {
      throw std::invalid_argument("SceneSource: empty frame stack");
    }
    if (stack->frames.size() != stack->timestamps.size()) {
      throw std::invalid_argument("SceneSource: frame/timestamp count mismatch");
    }
    const std::size_t expected = static_cast<std::size_t>(width) * height;
    for (std::size_t i = 0; i < stack->frames.size(); ++i) {
      if (stack->frames[i].size() != expected) {
        throw std::invalid_argument("SceneSource: frame size does not match resolution");
      }
      if (i > 0 && !(stack->timestamps[i] > stack->timestamps[i - 1])) {
        throw std::invalid_argument("SceneSource: frame timestamps must be strictly increasing");
      }
    }
  }
}

void RadiometryConfig::validate() const {
  if (!(illuminance_scale > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("RadiometryConfig: scale and epsilon must be positive");
  }
}

namespace {

double bar_intensity(const MovingBarScene& bar, int x, double t) {
  const double lead = bar.start_x + bar.speed_px_s * t;
  const double center = x + 0.5;
  const bool inside = center >= lead - bar.bar_width_px && center < lead;
  return inside ? bar.foreground : bar.background;
}

double frame_intensity(const FrameStack& stack, int width, std::size_t frame, int x, int y) {
  double v = stack.frames[frame][static_cast<std::size_t>(y) * width + x];
  if (v < 0.0) {
    v = 0.0;
  }
  return stack.gamma_decode ? std::pow(v, 2.2) : v;
}

double log_radiance_of_intensity(const RadiometryConfig& radiometry, double black_level,
                                 double intensity) {
  const double effective = std::max(intensity, 0.0) * radiometry.illuminance_scale + black_level;
  return std::log(std::max(effective, radiometry.epsilon));
}

}  // namespace

double interpolate_log_radiance(const SceneSource& source, const RadiometryConfig& radiometry,
                                double black_level, int x, int y, double t) {
  if (x < 0 || x >= source.width || y < 0 || y >= source.height) {
    throw std::invalid_argument("interpolate_log_radiance: pixel out of bounds");
  }
  if (const auto* bar = std::get_if<MovingBarScene>(&source.kind)) {
    return log_radiance_of_intensity(radiometry, black_level, bar_intensity(*bar, x, t));
  }
  const auto& stack = std::get<FrameStack>(source.kind);
  const auto& ts = stack.timestamps;
  if (t <= ts.front()) {
    return log_radiance_of_intensity(radiometry, black_level,
                                     frame_intensity(stack, source.width, 0, x, y));
  }
  if (t >= ts.back()) {
    return log_radiance_of_intensity(radiometry, black_level,
                                     frame_intensity(stack, source.width, ts.size() - 1, x, y));
  }
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double u_lo = log_radiance_of_intensity(radiometry, black_level,
                                                frame_intensity(stack, source.width, lo, x, y));
  const double u_hi = log_radiance_of_intensity(radiometry, black_level,
                                                frame_intensity(stack, source.width, hi, x, y));
  const double a = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return u_lo + a * (u_hi - u_lo);
}

FilterState initial_state(double u0, double t0) {
  if (!std::isfinite(u0)) {
    throw std::invalid_argument("initial_state: non-finite input");
  }
  FilterState s;
  s.x << 0.0, u0, u0, u0;
  s.t = t0;
  return s;
}

namespace {

struct StepKey {
  double u;
  double dt;
  bool operator==(const StepKey& o) const { return u == o.u && dt == o.dt; }
};

struct StepKeyHash {
  std::size_t operator()(const StepKey& k) const {
    std::uint64_t a, b;
    std::memcpy(&a, &k.u, sizeof(a));
    std::memcpy(&b, &k.dt, sizeof(b));
    a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
    return static_cast<std::size_t>(a);
  }
};

using StepCache = std::unordered_map<StepKey, DiscreteStep, StepKeyHash>;

const DiscreteStep& cached_discretize(StepCache& cache, const PixelBandwidthParams& p,
                                      double u_next, double dt) {
  const StepKey key{u_next, dt};
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, discretize(p, u_next, dt)).first;
  }
  return it->second;
}

// Next frame-stack breakpoint strictly after t, or +inf for analytic scenes.
double next_breakpoint(const SceneSource& source, double t) {
  const auto* stack = std::get_if<FrameStack>(&source.kind);
  if (stack == nullptr) {
    return std::numeric_limits<double>::infinity();
  }
  const auto& ts = stack->timestamps;
  const auto it = std::upper_bound(ts.begin(), ts.end(), t + 1e-15);
  return it == ts.end() ? std::numeric_limits<double>::infinity() : *it;
}

std::vector<Event> simulate_pixel(const SceneSource& source, const RadiometryConfig& radiometry,
                                  const PixelBandwidthParams& pixel,
                                  const EventCameraConfig& camera, const SimOptions& opts,
                                  double base_dt, StepCache& cache, int x, int y) {
  const double duration = source.duration;
  const double u0 = interpolate_log_radiance(source, radiometry, pixel.black_level, x, y, 0.0);
  FilterState fs = initial_state(u0, 0.0);
  const auto [c_neg, c_pos] =
      sample_pixel_thresholds(camera, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y));
  PixelEventState es = initial_pixel_state(0.0, u0, u0, c_neg, c_pos);

  PixelTrace trace;
  trace.t.push_back(0.0);
  trace.log_sf.push_back(u0);
  trace.log_diff.push_back(u0);

  double t = 0.0;
  double u_now = u0;
  while (t < duration) {
    double dt = base_dt;
    if (!opts.infinite_bandwidth) {
      dt = std::min(dt, 0.1 / dominant_cutoff(pixel, u_now));
    }
    dt = std::max(dt, opts.min_dt);
    double t_next = std::min(t + dt, duration);
    t_next = std::min(t_next, next_breakpoint(source, t));
    if (t_next <= t) {
      t_next = std::min(t + opts.min_dt, duration);
      if (t_next <= t) {
        break;
      }
    }
    const double u_next =
        interpolate_log_radiance(source, radiometry, pixel.black_level, x, y, t_next);
    if (opts.infinite_bandwidth) {
      trace.log_sf.push_back(u_next);
      trace.log_diff.push_back(u_next);
    } else {
      fs = step(fs, u_now, u_next, cached_discretize(cache, pixel, u_next, t_next - t));
      trace.log_sf.push_back(fs.x[2]);
      trace.log_diff.push_back(fs.x[3]);
    }
    trace.t.push_back(t_next);
    t = t_next;
    u_now = u_next;
  }

  return detect_events(trace, es, camera, pixel.omega_c_diff, static_cast<std::uint16_t>(x),
                       static_cast<std::uint16_t>(y));
}

}  // namespace

EventStream simulate(const SceneSource& source, const RadiometryConfig& radiometry,
                     const PixelBandwidthParams& pixel, const EventCameraConfig& camera,
                     const SimOptions& opts) {
  source.validate();
  radiometry.validate();
  pixel.validate(radiometry.epsilon);
  camera.validate();
  if (opts.min_dt <= 0.0) {
    throw std::invalid_argument("simulate: min_dt must be positive");
  }

  double base_dt = opts.base_dt;
  if (base_dt <= 0.0) {
    if (const auto* stack = std::get_if<FrameStack>(&source.kind);
        stack != nullptr && stack->timestamps.size() > 1) {
      base_dt = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < stack->timestamps.size(); ++i) {
        base_dt = std::min(base_dt, stack->timestamps[i] - stack->timestamps[i - 1]);
      }
    } else {
      base_dt = source.duration / 1000.0;
    }
  }

  const int total = source.width * source.height;
  int thread_count = opts.threads > 0 ? opts.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::clamp(thread_count, 1, std::max(1, total));

  std::vector<std::vector<Event>> per_pixel(static_cast<std::size_t>(total));
  auto worker = [&](int begin, int end) {
    StepCache cache;
    for (int idx = begin; idx < end; ++idx) {
      const int x = idx % source.width;
      const int y = idx / source.width;
      per_pixel[static_cast<std::size_t>(idx)] =
          simulate_pixel(source, radiometry, pixel, camera, opts, base_dt, cache, x, y);
    }
  };

  if (thread_count == 1) {
    worker(0, total);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    const int chunk = (total + thread_count - 1) / thread_count;
    for (int i = 0; i < thread_count; ++i) {
      const int begin = i * chunk;
      const int end = std::min(total, begin + chunk);
      if (begin < end) {
        pool.emplace_back(worker, begin, end);
      }
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  EventStream stream;
  stream.width = static_cast<std::uint16_t>(source.width);
  stream.height = static_cast<std::uint16_t>(source.height);
  stream.duration = source.duration;
  stream.events = merge_streams(std::move(per_pixel));
  return stream;
}

namespace {

constexpr char kMagic[6] = {'E', 'V', 'B', 'L', 'U', 'R'};
constexpr std::uint8_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

class ByteReader {
 public:
  ByteReader(const std::string& data) : data_(data) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(byte() | byte() << 8); }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::int8_t i8() { return static_cast<std::int8_t>(byte()); }
  double f64() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(byte()) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::size_t offset() const { return pos_; }

 private:
  std::uint8_t byte() {
    if (pos_ >= data_.size()) {
      throw ParseError("event file truncated", 0, pos_);
    }
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  const std::string& data_;
  std::size_t pos_ = 0;
};

void validate_stream(const EventStream& stream) {
  for (const Event& e : stream.events) {
    if (e.polarity != 1 && e.polarity != -1) {
      throw std::invalid_argument("EventStream: polarity must be +1 or -1");
    }
    if (stream.width > 0 && (e.x >= stream.width || e.y >= stream.height)) {
      throw std::invalid_argument("EventStream: event outside the header resolution");
    }
  }
}

}  // namespace

void write_events(const EventStream& stream, const std::string& path, EventFormat format) {
  validate_stream(stream);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_events: cannot open " + path);
  }
  if (format == EventFormat::kCsv) {
    out << "t,x,y,p,t_prev\n";
    char line[128];
    for (const Event& e : stream.events) {
      std::snprintf(line, sizeof(line), "%.9f,%u,%u,%d,%.9f\n", e.t_curr, unsigned(e.x),
                    unsigned(e.y), int(e.polarity), e.t_prev);
      out << line;
    }
    return;
  }
  std::string buf;
  buf.reserve(16 + stream.events.size() * 21);
  buf.append(kMagic, sizeof(kMagic));
  buf.push_back(static_cast<char>(kVersion));
  buf.push_back(0);  // flags
  put_u16(buf, stream.width);
  put_u16(buf, stream.height);
  put_u32(buf, static_cast<std::uint32_t>(stream.events.size()));
  for (const Event& e : stream.events) {
    put_f64(buf, e.t_curr);
    put_u16(buf, e.x);
    put_u16(buf, e.y);
    buf.push_back(static_cast<char>(e.polarity));
    put_f64(buf, e.t_prev);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace {

EventStream read_events_csv(const std::string& text) {
  EventStream stream;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::uint16_t max_x = 0, max_y = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      eol = text.size();
    }
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != "t,x,y,p,t_prev") {
        throw ParseError("bad CSV header, expected t,x,y,p,t_prev", 1);
      }
      continue;
    }
    if (line.empty()) {
      continue;
    }
    Event e;
    double t = 0.0, t_prev = 0.0;
    unsigned ex = 0, ey = 0;
    int p = 0;
    if (std::sscanf(line.c_str(), "%lf,%u,%u,%d,%lf", &t, &ex, &ey, &p, &t_prev) != 5) {
      throw ParseError("bad CSV record", line_no);
    }
    if ((p != 1 && p != -1) || ex > 0xffff || ey > 0xffff) {
      throw ParseError("CSV field out of range", line_no);
    }
    e.t_curr = t;
    e.t_prev = t_prev;
    e.x = static_cast<std::uint16_t>(ex);
    e.y = static_cast<std::uint16_t>(ey);
    e.polarity = static_cast<std::int8_t>(p);
    max_x = std::max(max_x, e.x);
    max_y = std::max(max_y, e.y);
    stream.events.push_back(e);
  }
  if (!stream.events.empty()) {
    stream.width = static_cast<std::uint16_t>(max_x + 1);
    stream.height = static_cast<std::uint16_t>(max_y + 1);
    stream.duration = stream.events.back().t_curr;
  }
  return stream;
}

}  // namespace

EventStream read_events(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_events: cannot open " + path);
  }
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() >= sizeof(kMagic) && std::memcmp(data.data(), kMagic, sizeof(kMagic)) == 0) {
    ByteReader reader(data);
    for (std::size_t i = 0; i < sizeof(kMagic); ++i) {
      reader.i8();
    }
    const auto version = static_cast<std::uint8_t>(reader.i8());
    if (version != kVersion) {
      throw ParseError("unsupported event file version", 0, reader.offset());
    }
    reader.i8();  // flags
    EventStream stream;
    stream.width = reader.u16();
    stream.height = reader.u16();
    const std::uint32_t count = reader.u32();
    stream.events.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      Event e;
      e.t_curr = reader.f64();
      e.x = reader.u16();
      e.y = reader.u16();
      e.polarity = reader.i8();
      e.t_prev = reader.f64();
      if (e.polarity != 1 && e.polarity != -1) {
        throw ParseError("bad polarity in event record", 0, reader.offset());
      }
      stream.events.push_back(e);
    }
    if (!stream.events.empty()) {
      stream.duration = stream.events.back().t_curr;
    }
    return stream;
  }
  return read_events_csv(data);
}

}  // namespace evblur
