#include "evblur/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "evblur/errors.hpp"

namespace evblur {

Matrix mat_exp(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("mat_exp: matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("mat_exp: matrix has non-finite entries");
  }
  return m.exp();
}

bool is_schur_stable(const Matrix& m, double margin) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("is_schur_stable: matrix must be square");
  }
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - margin;
}

AffineFit ols_affine(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("ols_affine: need two equally sized samples at least");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ys[i] - my);
  }
  if (sxx <= 0.0) {
    throw SingularFitError("ols_affine: zero variance in xs");
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

namespace {

Matrix finite_difference_jacobian(const ResidualFn& residual, const Vector& p,
                                  Eigen::Index m_rows) {
  constexpr double kRelStep = 1e-6;
  Matrix jac(m_rows, p.size());
  Vector probe = p;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = kRelStep * std::max(std::abs(p[j]), 1.0);
    probe[j] = p[j] + h;
    const Vector fwd = residual(probe);
    probe[j] = p[j] - h;
    const Vector bwd = residual(probe);
    probe[j] = p[j];
    jac.col(j) = (fwd - bwd) / (2.0 * h);
  }
  return jac;
}

}  // namespace

Vector lm_fit(const ResidualFn& residual, const JacobianFn& jacobian,
              const Vector& init, const TrustRegionConfig& cfg) {
  if (cfg.max_iterations < 1 || cfg.tolerance <= 0.0 || cfg.initial_damping <= 0.0) {
    throw std::invalid_argument("lm_fit: invalid trust-region config");
  }
  Vector p = init;
  Vector r = residual(p);
  if (!r.allFinite()) {
    throw std::invalid_argument("lm_fit: non-finite residual at initial parameters");
  }
  if (r.size() < p.size()) {
    throw std::invalid_argument("lm_fit: fewer residuals than parameters");
  }
  double ssr = r.squaredNorm();
  double mu = -1.0;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const Matrix jac = jacobian ? jacobian(p) : finite_difference_jacobian(residual, p, r.size());
    const Vector grad = jac.transpose() * r;
    const Matrix hessian = jac.transpose() * jac;
    if (mu < 0.0) {
      mu = cfg.initial_damping * std::max(hessian.diagonal().maxCoeff(), 1e-300);
    }
    if (grad.lpNorm<Eigen::Infinity>() < 1e-15 * std::max(1.0, ssr)) {
      break;
    }

    bool accepted = false;
    bool converged = false;
    while (!accepted) {
      Matrix damped = hessian;
      damped.diagonal().array() += mu;
      const Vector delta = damped.ldlt().solve(-grad);
      // Singular or indefinite systems surface as non-finite or non-descent
      // steps; increasing the damping restores solvability.
      const double predicted = 0.5 * delta.dot(mu * delta - grad);
      if (!delta.allFinite() || predicted <= 0.0) {
        mu *= 10.0;
        if (mu > 1e300) {
          converged = true;
          break;
        }
        continue;
      }
      if (delta.norm() <= 1e-15 * (1.0 + p.norm())) {
        converged = true;
        break;
      }
      const Vector p_new = p + delta;
      const Vector r_new = residual(p_new);
      const double ssr_new = r_new.allFinite() ? r_new.squaredNorm()
                                               : std::numeric_limits<double>::infinity();
      const double rho = (0.5 * (ssr - ssr_new)) / predicted;
      if (std::isfinite(ssr_new) && ssr_new <= ssr && rho > 0.0) {
        accepted = true;
        const double drop = ssr - ssr_new;
        p = p_new;
        r = r_new;
        ssr = ssr_new;
        mu /= 10.0;
        if (drop <= cfg.tolerance * std::max(1.0, ssr)) {
          converged = true;
        }
      } else {
        mu *= 10.0;
        if (mu > 1e300) {
          converged = true;
          break;
        }
      }
    }
    if (converged) {
      break;
    }
  }
  return p;
}

}  // namespace evblur
