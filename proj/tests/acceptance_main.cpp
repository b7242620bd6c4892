// Acceptance suite: one criterion per function, one pass/fail line each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "evblur/config.hpp"
#include "evblur/event_core.hpp"
#include "evblur/filter_engine.hpp"
#include "evblur/numerics.hpp"
#include "evblur/pixel_model.hpp"
#include "evblur/recon.hpp"
#include "evblur/simulator.hpp"
#include "oracles.hpp"

using namespace evblur;

namespace {

struct CheckFailure {
  std::string detail;
};

void expect(bool ok, const std::string& detail) {
  if (!ok) {
    throw CheckFailure{detail};
  }
}

PixelBandwidthParams random_params(oracles::TestRng& rng) {
  PixelBandwidthParams p;
  p.amp_gain = rng.log_uniform(2.0, 50.0);
  p.loop_gain = rng.log_uniform(2.0, 50.0);
  p.tau_out = rng.log_uniform(1e-3, 5e-2);
  p.c_in = rng.log_uniform(0.05, 1.0);
  p.c_mil = rng.log_uniform(0.05, 1.0);
  p.omega_c_sf = rng.log_uniform(50.0, 500.0);
  p.omega_c_diff = p.omega_c_sf * rng.uniform(1.5, 3.0);
  p.black_level = rng.log_uniform(0.05, 0.5);
  return p;
}

// ---------------------------------------------------------------- criterion 1

void criterion_discretization_fidelity() {
  oracles::TestRng rng(101);

  // Iterated step() against the per-interval-linearized RK oracle.
  double worst = 0.0;
  for (int seq = 0; seq < 100; ++seq) {
    const PixelBandwidthParams p = random_params(rng);
    const double u_lo = std::log(p.black_level);
    InputSequence in;
    double t = 0.0;
    in.t.push_back(t);
    in.u.push_back(rng.uniform(u_lo, u_lo + 4.0));
    for (int i = 0; i < 60; ++i) {
      t += rng.log_uniform(1e-4, 1.5e-3);
      in.t.push_back(t);
      in.u.push_back(rng.uniform(u_lo, u_lo + 4.0));
    }

    FilterState state;
    state.x << 0.0, in.u[0], in.u[0], in.u[0];
    state.t = 0.0;
    Eigen::Vector4d reference = state.x;
    double scale = 1.0;
    for (std::size_t k = 0; k + 1 < in.size(); ++k) {
      const double dt = in.t[k + 1] - in.t[k];
      state = step(state, in.u[k], in.u[k + 1], discretize(p, in.u[k + 1], dt));
      const StateSpace ss = continuous_matrices(p, in.u[k + 1]);
      const double rate = ss.A.cwiseAbs().rowwise().sum().maxCoeff();
      const int substeps = std::max(64, static_cast<int>(std::ceil(rate * dt / 0.0125)));
      reference = oracles::rk4_frozen_foh(ss.A, ss.B, reference, in.t[k], in.t[k + 1],
                                          in.u[k], in.u[k + 1], substeps);
      scale = std::max(scale, reference.lpNorm<Eigen::Infinity>());
      worst = std::max(worst, (state.x - reference).lpNorm<Eigen::Infinity>() / scale);
    }
  }
  expect(worst <= 1e-8, "linear-oracle relative error " + std::to_string(worst));

  // Observed convergence order against the full nonlinear oracle, measured in
  // the FOH-dominated regime (small-amplitude smooth inputs).
  double worst_order = 10.0;
  for (int trial = 0; trial < 5; ++trial) {
    PixelBandwidthParams p;  // defaults, perturbed
    p.loop_gain *= rng.uniform(0.8, 1.2);
    p.c_in *= rng.uniform(0.7, 1.4);
    p.c_mil = p.c_in;
    const double u0 = std::log(rng.uniform(80.0, 200.0));
    const double amp = rng.uniform(1.5e-3, 3e-3);
    const double freq = rng.uniform(250.0, 350.0);
    auto u_fn = [&](double tt) {
      return u0 + amp * std::sin(2.0 * std::numbers::pi * freq * tt);
    };
    const double horizon = 0.02;

    std::vector<double> errors;
    for (const double dt : {4e-4, 2e-4, 1e-4}) {
      const int n = static_cast<int>(std::round(horizon / dt));
      FilterState state;
      state.x << 0.0, u_fn(0.0), u_fn(0.0), u_fn(0.0);
      Eigen::Vector4d reference = state.x;
      double err = 0.0;
      for (int k = 0; k < n; ++k) {
        const double t0 = k * dt;
        const double t1 = (k + 1) * dt;
        state = step(state, u_fn(t0), u_fn(t1), discretize(p, u_fn(t1), dt));
        const int substeps =
            std::max(64, static_cast<int>(std::ceil(p.omega_c_diff * dt / 0.02)));
        reference = oracles::rk4_nonlinear(p, u_fn, reference, t0, t1, substeps);
        err = std::max(err, std::abs(state.x[3] - reference[3]));
      }
      errors.push_back(err);
    }
    const double order = std::log2(errors[0] / errors[2]) / 2.0;
    worst_order = std::min(worst_order, order);
  }
  expect(worst_order >= 1.9,
         "observed convergence order " + std::to_string(worst_order) + " below 2nd-order band");
}

// ---------------------------------------------------------------- criterion 2

void criterion_unity_gain_stability() {
  oracles::TestRng rng(202);
  for (int trial = 0; trial < 10; ++trial) {
    const PixelBandwidthParams p = random_params(rng);
    const double u = rng.uniform(std::log(p.black_level), 4.0);
    FilterState state;
    state.x << 0.0, u, u, u;
    const int horizon = 1000 + static_cast<int>(rng.uniform(0.0, 4000.0));
    for (int k = 0; k < horizon; ++k) {
      const DiscreteStep d = discretize(p, u, rng.log_uniform(1e-4, 1e-2));
      expect(is_schur_stable(d.A_d), "A_d not Schur stable");
      state = step(state, u, u, d);
    }
    const double err = std::max(std::abs(state.x[2] - u), std::abs(state.x[3] - u));
    expect(err <= 1e-12 * std::max(1.0, std::abs(u)),
           "constant-input error " + std::to_string(err));
  }
}

// ---------------------------------------------------------------- criterion 3

void criterion_zero_state_weights() {
  oracles::TestRng rng(303);
  const PixelBandwidthParams p;  // shipped defaults
  const double omega_min = omega_c_dom_min(p);

  // Normalized sums exactly one; raw sums within 1e-3 beyond 3/omega_min.
  for (int trial = 0; trial < 5; ++trial) {
    InputSequence in;
    const double window = 3.0 / omega_min;
    const int n = 250;
    for (int i = 0; i <= n; ++i) {
      in.t.push_back(window * i / n);
      in.u.push_back(std::log(p.black_level * rng.log_uniform(20.0, 200.0)));
    }
    const WeightSequence ws = zero_state_weights(in, p);
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (const auto& w : ws.w) {
      sum += w;
    }
    expect(std::abs(sum[0] - 1.0) <= 1e-12 && std::abs(sum[1] - 1.0) <= 1e-12,
           "normalized channel sums deviate from 1");
    expect(std::abs(ws.raw_sum[0] - 1.0) <= 1e-3 && std::abs(ws.raw_sum[1] - 1.0) <= 1e-3,
           "raw channel sums deviate by " +
               std::to_string(std::max(std::abs(ws.raw_sum[0] - 1.0),
                                       std::abs(ws.raw_sum[1] - 1.0))));
  }

  // Weighted estimates against the transient solution on long windows.
  for (int trial = 0; trial < 3; ++trial) {
    InputSequence in;
    const double window = 16.0 / omega_min;
    const int n = 400;
    const double phase = rng.uniform(0.0, 6.28);
    for (int i = 0; i <= n; ++i) {
      const double t = window * i / n;
      in.t.push_back(t);
      in.u.push_back(std::log(40.0 * p.black_level) +
                     0.4 * std::sin(2.0 * std::numbers::pi * omega_min * t + phase));
    }
    const Eigen::Vector2d est = blurred_log_radiance(zero_state_weights(in, p), in);
    FilterState zero;
    const auto outputs = transient_solution(zero, in, p);
    const double err = std::max(std::abs(est[0] - outputs.back()[0]),
                                std::abs(est[1] - outputs.back()[1]));
    expect(err <= 1e-6, "weighted estimate vs transient solution differs by " +
                            std::to_string(err));
  }
}

// ---------------------------------------------------------------- criterion 4

void criterion_importance_sampling() {
  expect(kDefaultInputSampleCount == 30, "default sample count is not 30");
  oracles::TestRng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const double t_k = rng.uniform(-5.0, 5.0);
    const double omega = rng.log_uniform(0.05, 1e4);
    const int n = (trial == 0) ? kDefaultInputSampleCount
                               : 2 + static_cast<int>(rng.uniform(0.0, 50.0));
    const auto ts = sample_input_timestamps(t_k, n, omega);
    expect(static_cast<int>(ts.size()) == n, "sample count mismatch");
    expect(ts.back() == t_k, "window does not end at t_k");
    for (int i = 1; i <= n - 1; ++i) {
      // Hand-computed inverse CDF of the truncated exponential.
      const double quantile = static_cast<double>(i) / (n - 1);
      const double offset = -std::log(1.0 - 0.95 * quantile) / omega;
      const double got = t_k - ts[static_cast<std::size_t>(n - 1 - i)];
      expect(std::abs(got - offset) <= 1e-12 * std::max(1.0, std::abs(offset)),
             "inverse-CDF offset mismatch at i=" + std::to_string(i));
    }
    const double span = t_k - ts.front();
    expect(std::abs(span - std::log(20.0) / omega) <= 1e-12 * std::max(1.0, span),
           "window span is not log(20)/omega");
  }
}

// ---------------------------------------------------------------- criterion 5

void criterion_event_timing() {
  RadiometryConfig radiometry;
  radiometry.illuminance_scale = 1.0;
  PixelBandwidthParams pixel;
  pixel.black_level = 1e-9;
  SimOptions opts;
  opts.infinite_bandwidth = true;
  opts.base_dt = 1e-3;

  const double horizon = 1.0;
  const double l0 = 10.0;
  const double l1 = 10.0 * std::exp(3.0);
  SceneSource scene;
  scene.width = 1;
  scene.height = 1;
  scene.duration = horizon;
  FrameStack stack;
  stack.timestamps = {0.0, horizon};
  stack.frames = {{static_cast<float>(l0)}, {static_cast<float>(l1)}};
  scene.kind = stack;

  const double u0 = std::log(static_cast<double>(static_cast<float>(l0)) + pixel.black_level);
  const double u1 = std::log(static_cast<double>(static_cast<float>(l1)) + pixel.black_level);
  const double slope = (u1 - u0) / horizon;
  auto signal = [&](double t) { return u0 + slope * t; };

  for (const double tau : {0.0, 0.031}) {
    EventCameraConfig camera;
    camera.c_pos = 0.25;
    camera.c_neg = 0.25;
    camera.tau = tau;
    const EventStream stream = simulate(scene, radiometry, pixel, camera, opts);
    const auto brute = oracles::brute_force_events(signal, 0.0, horizon, opts.base_dt / 1000.0,
                                                   camera.c_neg, camera.c_pos, tau);
    expect(stream.events.size() == brute.size(),
           "event count mismatch vs brute force at tau=" + std::to_string(tau));
    expect(!stream.events.empty(), "ramp produced no events");
    for (std::size_t j = 0; j < stream.events.size(); ++j) {
      expect(std::abs(stream.events[j].t_curr - brute[j].t) <= 1e-9,
             "event time deviates from the brute-force oracle");
      const double analytic = (tau == 0.0)
                                  ? (static_cast<double>(j) + 1.0) * camera.c_pos / slope
                                  : (camera.c_pos / slope) * (static_cast<double>(j) + 1.0) +
                                        tau * static_cast<double>(j);
      expect(std::abs(stream.events[j].t_curr - analytic) <= 1e-9,
             "event time deviates from the analytic times");
    }
  }
}

// ---------------------------------------------------------------- criterion 6

struct SpreadStats {
  double pos_spread = 0.0;
  double neg_spread = 0.0;
  std::size_t count = 0;
};

SpreadStats bar_spreads(const EventStream& stream, const MovingBarScene& bar) {
  std::vector<double> pos_offsets, neg_offsets;
  for (const Event& e : stream.events) {
    const double lead = bar.start_x + bar.speed_px_s * e.t_curr;
    const double trail = lead - bar.bar_width_px;
    const double center = e.x + 0.5;
    if (e.polarity > 0) {
      pos_offsets.push_back(center - lead);
    } else {
      neg_offsets.push_back(center - trail);
    }
  }
  auto std_dev = [](const std::vector<double>& v) {
    if (v.size() < 2) {
      return 0.0;
    }
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (const double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
  };
  return {std_dev(pos_offsets), std_dev(neg_offsets), stream.events.size()};
}

void criterion_blur_asymmetry() {
  SceneSource scene;
  scene.width = 64;
  scene.height = 64;
  scene.duration = 0.3;
  MovingBarScene bar;
  bar.bar_width_px = 8.0;
  bar.speed_px_s = 256.0;
  bar.foreground = 1.0;
  bar.background = 0.02;
  bar.start_x = 0.0;
  scene.kind = bar;

  EventCameraConfig camera;
  SimOptions opts;
  opts.base_dt = 1e-3;

  opts.infinite_bandwidth = true;
  RadiometryConfig radiometry;
  radiometry.illuminance_scale = 1.0;
  const EventStream ideal = simulate(scene, radiometry, {}, camera, opts);
  expect(ideal.events.size() > 1000, "infinite-bandwidth run produced too few events");

  opts.infinite_bandwidth = false;
  std::vector<std::size_t> counts;
  for (const double scale : {1.0, 10.0, 100.0}) {
    radiometry.illuminance_scale = scale;
    const EventStream blurred = simulate(scene, radiometry, {}, camera, opts);
    counts.push_back(blurred.events.size());
    if (scale <= 10.0) {
      const SpreadStats stats = bar_spreads(blurred, bar);
      expect(stats.neg_spread > stats.pos_spread,
             "negative spread " + std::to_string(stats.neg_spread) +
                 " does not exceed positive spread " + std::to_string(stats.pos_spread) +
                 " at scale " + std::to_string(scale));
    }
  }
  expect(counts[0] < ideal.events.size() / 2,
         "lowest-decade event count " + std::to_string(counts[0]) +
             " is not below half of " + std::to_string(ideal.events.size()));
}

// ---------------------------------------------------------------- criterion 7

void criterion_bandwidth_curve() {
  const PixelBandwidthParams p;  // shipped defaults
  std::vector<double> radiances, bandwidths;
  double prev = 0.0;
  for (int i = 0; i <= 45; ++i) {
    const double radiance = 0.01 * std::pow(10.0, i / 5.0);
    const double bw = bandwidth_hz(p, radiance);
    expect(bw >= prev, "bandwidth not monotone at L=" + std::to_string(radiance));
    prev = bw;
    radiances.push_back(radiance);
    bandwidths.push_back(bw);
  }

  // Low-light log-log slope against effective radiance.
  for (std::size_t i = 0; i + 1 < radiances.size(); ++i) {
    const double l_eff_a = radiances[i] + p.black_level;
    const double l_eff_b = radiances[i + 1] + p.black_level;
    if (l_eff_a > 5.0 * p.black_level && l_eff_b < 30.0) {
      const double slope = std::log(bandwidths[i + 1] / bandwidths[i]) /
                           std::log(l_eff_b / l_eff_a);
      expect(slope >= 0.95 && slope <= 1.05,
             "low-light slope " + std::to_string(slope) + " outside [0.95, 1.05]");
    }
  }

  // High-radiance saturation slope.
  const std::size_t n = radiances.size();
  const double hi_slope = std::log(bandwidths[n - 1] / bandwidths[n - 6]) /
                          std::log(radiances[n - 1] / radiances[n - 6]);
  expect(hi_slope < 0.2, "high-radiance slope " + std::to_string(hi_slope));

  // At the default 1000-lux mapping the span brackets [50, 2500] Hz within 2x.
  const double bw_low = bandwidth_hz(p, 10.0);     // 1% scene intensity
  const double bw_high = bandwidth_hz(p, 1000.0);  // full-scale intensity
  expect(bw_low >= 25.0 && bw_low <= 100.0,
         "span floor " + std::to_string(bw_low) + " Hz outside [25, 100]");
  expect(bw_high >= 1250.0 && bw_high <= 5000.0,
         "span ceiling " + std::to_string(bw_high) + " Hz outside [1250, 5000]");
}

// ---------------------------------------------------------------- criterion 8

void criterion_correction_recovery() {
  oracles::TestRng rng(808);

  // Translated-gamma recovery with nontrivial gain-exposure factors.
  const double true_a = 0.8;
  const std::vector<double> true_b{1.2, 0.9, 1.1};
  const std::vector<double> true_c{0.05, 0.02, 0.08};
  const std::vector<double> image_gains{0.5, 1.0, 2.0};
  std::vector<std::vector<double>> pred(3), ref(3), gains(3);
  for (int ch = 0; ch < 3; ++ch) {
    for (int i = 0; i < 60; ++i) {
      const double v = rng.log_uniform(0.05, 8.0);
      const double g = image_gains[static_cast<std::size_t>(i % 3)];
      pred[static_cast<std::size_t>(ch)].push_back(v);
      gains[static_cast<std::size_t>(ch)].push_back(g);
      ref[static_cast<std::size_t>(ch)].push_back(
          g * (true_b[static_cast<std::size_t>(ch)] * std::pow(v, true_a) -
               true_c[static_cast<std::size_t>(ch)]));
    }
  }
  TrustRegionConfig cfg;
  cfg.max_iterations = 20;
  const CorrectionParams params = fit_translated_gamma(pred, ref, gains, cfg);
  double worst = std::abs(params.a - true_a);
  for (int ch = 0; ch < 3; ++ch) {
    worst = std::max(worst, std::abs(params.b[static_cast<std::size_t>(ch)] -
                                     true_b[static_cast<std::size_t>(ch)]));
    worst = std::max(worst, std::abs(params.c[static_cast<std::size_t>(ch)] -
                                     true_c[static_cast<std::size_t>(ch)]));
  }
  expect(worst <= 1e-4,
         "translated-gamma recovery error " + std::to_string(worst) + " in 20 iterations");

  // Gamma correction against the stacked normal-equations oracle.
  std::vector<std::vector<double>> pl(3), rl(3);
  for (int ch = 0; ch < 3; ++ch) {
    for (int i = 0; i < 30; ++i) {
      pl[static_cast<std::size_t>(ch)].push_back(rng.uniform(-2.0, 2.0));
      rl[static_cast<std::size_t>(ch)].push_back(rng.uniform(-2.0, 2.0));
    }
  }
  const GammaFit fit = fit_gamma_correction(pl, rl);
  const int dim = 4;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(dim);
  for (int ch = 0; ch < 3; ++ch) {
    for (int i = 0; i < 30; ++i) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
      row[0] = pl[static_cast<std::size_t>(ch)][static_cast<std::size_t>(i)];
      row[1 + ch] = 1.0;
      ata += row * row.transpose();
      atb += row * rl[static_cast<std::size_t>(ch)][static_cast<std::size_t>(i)];
    }
  }
  const Eigen::VectorXd oracle = ata.ldlt().solve(atb);
  double gamma_err = std::abs(fit.a - oracle[0]);
  for (int ch = 0; ch < 3; ++ch) {
    gamma_err = std::max(gamma_err,
                         std::abs(fit.b[static_cast<std::size_t>(ch)] - oracle[1 + ch]));
  }
  expect(gamma_err <= 1e-10, "gamma fit differs from the normal-equations oracle by " +
                                 std::to_string(gamma_err));
}

// ---------------------------------------------------------------- criterion 9

void criterion_loss_suite() {
  // Branch continuity and differentiability at |rho| = delta = 1.
  const double c_bar = 0.25;
  auto loss_of_rho = [&](double rho) {
    return loss_diff_huber(0.25 + rho * c_bar, +1, 0.25, c_bar, 1.0);
  };
  const double h = 1e-7;
  expect(std::abs(loss_of_rho(1.0 - h) - loss_of_rho(1.0 + h)) < 1e-6,
         "Huber loss discontinuous at the branch point");
  const double slope_in = (loss_of_rho(1.0) - loss_of_rho(1.0 - h)) / h;
  const double slope_out = (loss_of_rho(1.0 + h) - loss_of_rho(1.0)) / h;
  expect(std::abs(slope_in - 1.0) < 1e-5 && std::abs(slope_out - 1.0) < 1e-5,
         "Huber loss slope mismatch at the branch point");

  // Zero exactly at the targets.
  expect(loss_diff_huber(0.25, +1, 0.25, c_bar) == 0.0, "diff loss not zero at target");
  expect(loss_grad(0.5, +1, 0.25, 1.0, 0.5) == 0.0, "grad loss not zero at target");
  expect(loss_tv(1.0, 1.0, c_bar) == 0.0, "tv loss not zero at target");

  // Threshold-scale invariance.
  oracles::TestRng rng(909);
  for (int i = 0; i < 50; ++i) {
    const double c_neg = rng.log_uniform(0.05, 0.5);
    const double c_pos = rng.log_uniform(0.05, 0.5);
    const double cb = mean_threshold(c_neg, c_pos);
    const double d = rng.uniform(-1.0, 1.0);
    const double s = rng.log_uniform(0.1, 10.0);
    const double base = loss_diff_huber(d, -1, c_neg, cb);
    const double scaled = loss_diff_huber(d * s, -1, c_neg * s,
                                          mean_threshold(c_neg * s, c_pos * s));
    expect(std::abs(base - scaled) <= 1e-12 * std::max(1.0, base),
           "diff loss not scale invariant");
    const double tv_base = loss_tv(0.0, d, cb);
    expect(std::abs(tv_base - loss_tv(0.0, d * s, cb * s)) <= 1e-12 * std::max(1.0, tv_base),
           "tv loss not scale invariant");
  }

  // Triangular subinterval lengths at KS < 0.01 over 1e5 draws.
  std::uint64_t state = 4242;
  const double span = 2.0;
  std::vector<double> lengths;
  lengths.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    const auto [start, end] = sample_tv_subinterval(0.0, span, state);
    expect(start >= 0.0 && end <= span && end > start, "subinterval out of bounds");
    lengths.push_back(end - start);
  }
  const double ks = oracles::ks_statistic(
      lengths, [&](double x) { return 1.0 - (1.0 - x / span) * (1.0 - x / span); });
  expect(ks < 0.01, "triangular KS statistic " + std::to_string(ks));
}

// --------------------------------------------------------------- criterion 10

void criterion_determinism() {
  SceneSource scene;
  scene.width = 48;
  scene.height = 48;
  scene.duration = 0.25;
  MovingBarScene bar;
  bar.bar_width_px = 6.0;
  bar.speed_px_s = 220.0;
  bar.foreground = 1.0;
  bar.background = 0.04;
  scene.kind = bar;

  RadiometryConfig radiometry;
  radiometry.illuminance_scale = 40.0;
  EventCameraConfig camera;
  camera.sigma_c = 0.02;
  camera.tau = 1e-3;
  camera.rng_seed = 20240613;
  SimOptions opts;
  opts.base_dt = 1e-3;

  std::string reference_bytes;
  for (const int threads : {1, 4, 16}) {
    opts.threads = threads;
    const EventStream stream = simulate(scene, radiometry, {}, camera, opts);
    const std::string path = "/tmp/evblur_acceptance_t" + std::to_string(threads) + ".bin";
    write_events(stream, path, EventFormat::kBinary);
    std::ifstream in(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    expect(!stream.events.empty(), "determinism scene produced no events");
    if (threads == 1) {
      reference_bytes = bytes;
    } else {
      expect(bytes == reference_bytes,
             "stream bytes differ between 1 and " + std::to_string(threads) + " threads");
    }
  }
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "discretization fidelity", 30.0, criterion_discretization_fidelity},
      {2, "unity gain & stability", 5.0, criterion_unity_gain_stability},
      {3, "zero-state weights", 10.0, criterion_zero_state_weights},
      {4, "importance sampling", 1.0, criterion_importance_sampling},
      {5, "event timing oracle", 30.0, criterion_event_timing},
      {6, "blur asymmetry & low-light event loss", 60.0, criterion_blur_asymmetry},
      {7, "bandwidth curve shape", 10.0, criterion_bandwidth_curve},
      {8, "correction recovery", 5.0, criterion_correction_recovery},
      {9, "loss suite", 10.0, criterion_loss_suite},
      {10, "parallel determinism", 60.0, criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.run();
    } catch (const CheckFailure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > c.budget_s) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("runtime ") +
                std::to_string(elapsed) + "s exceeds " + std::to_string(c.budget_s) + "s";
    }
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                elapsed, detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    if (!ok) {
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
