#pragma once

// Test-only reference implementations, independent of the library's
// computation paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "evblur/pixel_model.hpp"

namespace oracles {

// Truncated power series for exp(M); adequate for spectral norms around 1.
inline Eigen::MatrixXd taylor_exp(const Eigen::MatrixXd& m, int terms = 50) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = (term * m) / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

// Coefficients of det(xI - M) for a 4x4 via Faddeev-LeVerrier.
inline std::array<double, 5> char_poly_4x4(const Eigen::Matrix4d& m) {
  std::array<double, 5> c{};  // c[0] x^4 + ... + c[4]
  c[0] = 1.0;
  Eigen::Matrix4d mk = m;
  for (int k = 1; k <= 4; ++k) {
    c[static_cast<std::size_t>(k)] = -mk.trace() / k;
    if (k < 4) {
      mk = m * (mk + c[static_cast<std::size_t>(k)] * Eigen::Matrix4d::Identity());
    }
  }
  return c;
}

// Durand-Kerner root finder for a monic polynomial with real coefficients.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& coeffs) {
  const std::size_t degree = coeffs.size() - 1;
  std::vector<std::complex<double>> roots(degree);
  std::complex<double> seed(0.4, 0.9);
  std::complex<double> power(1.0, 0.0);
  for (std::size_t i = 0; i < degree; ++i) {
    power *= seed;
    roots[i] = power;
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> acc(coeffs[0], 0.0);
    for (std::size_t i = 1; i < coeffs.size(); ++i) {
      acc = acc * x + coeffs[i];
    }
    return acc;
  };
  for (int iter = 0; iter < 200; ++iter) {
    double worst = 0.0;
    for (std::size_t i = 0; i < degree; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (std::size_t j = 0; j < degree; ++j) {
        if (j != i) {
          denom *= roots[i] - roots[j];
        }
      }
      const std::complex<double> delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      worst = std::max(worst, std::abs(delta));
    }
    if (worst < 1e-14) {
      break;
    }
  }
  return roots;
}

inline double spectral_radius_4x4(const Eigen::Matrix4d& m) {
  const auto c = char_poly_4x4(m);
  const auto roots = poly_roots({c[0], c[1], c[2], c[3], c[4]});
  double r = 0.0;
  for (const auto& root : roots) {
    r = std::max(r, std::abs(root));
  }
  return r;
}

// RK4 on x' = A x + B u(t) with the coefficients frozen (the per-interval
// linearized model) and u linear over [t0, t1].
inline Eigen::Vector4d rk4_frozen_foh(const Eigen::Matrix4d& a, const Eigen::Vector4d& b,
                                      Eigen::Vector4d x, double t0, double t1, double u0,
                                      double u1, int substeps) {
  const double h = (t1 - t0) / substeps;
  auto u_at = [&](double t) { return u0 + (u1 - u0) * (t - t0) / (t1 - t0); };
  auto f = [&](double t, const Eigen::Vector4d& x_now) -> Eigen::Vector4d {
    return a * x_now + b * u_at(t);
  };
  double t = t0;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::Vector4d k1 = f(t, x);
    const Eigen::Vector4d k2 = f(t + h / 2, x + (h / 2) * k1);
    const Eigen::Vector4d k3 = f(t + h / 2, x + (h / 2) * k2);
    const Eigen::Vector4d k4 = f(t + h, x + h * k3);
    x += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return x;
}

// RK4 on the nonlinear model with coefficients re-evaluated continuously
// along u(t).
inline Eigen::Vector4d rk4_nonlinear(const evblur::PixelBandwidthParams& p,
                                     const std::function<double(double)>& u_fn,
                                     Eigen::Vector4d x, double t0, double t1, int substeps) {
  const double h = (t1 - t0) / substeps;
  auto f = [&](double t, const Eigen::Vector4d& x_now) -> Eigen::Vector4d {
    const evblur::StateSpace ss = evblur::continuous_matrices(p, u_fn(t));
    return ss.A * x_now + ss.B * u_fn(t);
  };
  double t = t0;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::Vector4d k1 = f(t, x);
    const Eigen::Vector4d k2 = f(t + h / 2, x + (h / 2) * k1);
    const Eigen::Vector4d k3 = f(t + h / 2, x + (h / 2) * k2);
    const Eigen::Vector4d k4 = f(t + h, x + h * k3);
    x += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return x;
}

// Brute-force event detector: walk a densely oversampled signal against the
// ideal generation rule with refractory handling, locating crossings by
// linear interpolation within the fine grid.
struct BruteEvent {
  double t;
  int polarity;
};

inline std::vector<BruteEvent> brute_force_events(const std::function<double(double)>& signal,
                                                  double t0, double t1, double fine_dt,
                                                  double c_neg, double c_pos, double tau) {
  std::vector<BruteEvent> events;
  double ref = signal(t0);
  double t_prev_sample = t0;
  double v_prev = signal(t0);
  double blocked_until = t0;
  bool blocked = false;
  for (double t = t0 + fine_dt; t <= t1 + fine_dt * 0.5; t += fine_dt) {
    double v = signal(t);
    double seg_start = t_prev_sample;
    double v_start = v_prev;
    if (blocked) {
      if (blocked_until > t) {
        t_prev_sample = t;
        v_prev = v;
        continue;
      }
      seg_start = blocked_until;
      const double a = (seg_start - t_prev_sample) / (t - t_prev_sample);
      v_start = v_prev + a * (v - v_prev);
      ref = v_start;
      blocked = false;
    }
    while (true) {
      double target = 0.0;
      int polarity = 0;
      if (v > v_start && v >= ref + c_pos) {
        target = ref + c_pos;
        polarity = +1;
      } else if (v < v_start && v <= ref - c_neg) {
        target = ref - c_neg;
        polarity = -1;
      } else {
        break;
      }
      const double tc = seg_start + (target - v_start) / (v - v_start) * (t - seg_start);
      events.push_back({tc, polarity});
      const double tr = tc + tau;
      if (tr > t) {
        blocked = true;
        blocked_until = tr;
        break;
      }
      const double a = (tr - seg_start) / (t - seg_start);
      v_start = v_start + a * (v - v_start);
      seg_start = tr;
      ref = v_start;
    }
    t_prev_sample = t;
    v_prev = v;
  }
  return events;
}

// Small deterministic generator for test data.
struct TestRng {
  std::uint64_t state;

  explicit TestRng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
  double log_uniform(double lo, double hi) { return lo * std::pow(hi / lo, uniform()); }
};

// Kolmogorov-Smirnov statistic of samples against a CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

}  // namespace oracles
