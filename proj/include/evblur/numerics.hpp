#pragma once

#include <Eigen/Core>
#include <functional>

namespace evblur {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix exponential of a small square matrix (scaling-and-squaring with a
/// Pade core). Throws std::invalid_argument on non-square or non-finite input.
Matrix mat_exp(const Matrix& m);

/// True iff the spectral radius of `m` is below 1 - margin.
bool is_schur_stable(const Matrix& m, double margin = 0.0);

struct AffineFit {
  double slope;
  double intercept;
};

/// Least-squares fit of y ~ slope * x + intercept.
/// Throws SingularFitError when the xs have zero variance.
AffineFit ols_affine(const std::vector<double>& xs, const std::vector<double>& ys);

struct TrustRegionConfig {
  int max_iterations = 20;
  double tolerance = 1e-12;       // convergence tolerance on the SSR decrease
  double initial_damping = 1e-3;  // relative to max diag(J^T J)
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Levenberg-Marquardt with trust-region (gain ratio) step acceptance.
/// Damping is divided by 10 on accepted steps and multiplied by 10 on
/// rejected ones. When `jacobian` is empty, a central finite-difference
/// Jacobian with relative step 1e-6 is used. Accepted steps never increase
/// the sum of squared residuals. Throws std::invalid_argument when the
/// residual at `init` is non-finite or shorter than the parameter vector.
Vector lm_fit(const ResidualFn& residual, const JacobianFn& jacobian,
              const Vector& init, const TrustRegionConfig& cfg = {});

}  // namespace evblur
