#pragma once

// Matrix-free symmetric solvers: conjugate gradients and a generalized
// power iteration built on them.

#include <functional>

#include <Eigen/Core>

namespace fracharm {

using Vector = Eigen::VectorXd;
// y = A x for a symmetric operator on R^size
struct LinearOperator {
  Eigen::Index size = 0;
  std::function<void(const Vector& x, Vector& y)> apply;
};

struct CGResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;  // |b - A x| / |b|
  bool converged = false;
};

// Conjugate gradients for a symmetric positive (semi)definite operator.
CGResult conjugate_gradient(const LinearOperator& a, const Vector& b,
                            double tolerance = 1e-12, int max_iterations = 1000,
                            const Vector* guess = nullptr);

struct EigenEstimate {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  int inner_iterations = 0;
};

// Largest eigenvalue of B^{-1} A for symmetric A >= 0 and B > 0 by power
// iteration; B is inverted with conjugate gradients.  Converged when two
// successive Rayleigh quotients <x, A x> / <x, B x> differ by less than
// `tolerance` relative.  Throws ConvergenceError at the iteration cap.
EigenEstimate generalized_power_iteration(const LinearOperator& a, const LinearOperator& b,
                                          const Vector& start, double tolerance = 1e-8,
                                          int max_iterations = 1000,
                                          double inner_tolerance = 1e-12);

}  // namespace fracharm
