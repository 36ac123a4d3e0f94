#include "fracharm/krylov.hpp"

#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>

#include "fracharm/errors.hpp"

namespace fracharm {
class OperatorMatrix;
}

namespace Eigen::internal {
template <>
struct traits<fracharm::OperatorMatrix> : public traits<SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace fracharm {

// Adapter presenting a LinearOperator to Eigen's iterative solvers.
class OperatorMatrix : public Eigen::EigenBase<OperatorMatrix> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  explicit OperatorMatrix(const LinearOperator& op) : op_(&op) {}
  Eigen::Index rows() const { return op_->size; }
  Eigen::Index cols() const { return op_->size; }

  template <typename Rhs>
  Eigen::Product<OperatorMatrix, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<OperatorMatrix, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  const LinearOperator& op() const { return *op_; }

 private:
  const LinearOperator* op_;
};

}  // namespace fracharm

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<fracharm::OperatorMatrix, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<fracharm::OperatorMatrix, Rhs,
                                generic_product_impl<fracharm::OperatorMatrix, Rhs>> {
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const fracharm::OperatorMatrix& lhs, const Rhs& rhs,
                            const double& alpha) {
    fracharm::Vector x = rhs;
    fracharm::Vector y(x.size());
    lhs.op().apply(x, y);
    dst.noalias() += alpha * y;
  }
};
}  // namespace Eigen::internal

namespace fracharm {

CGResult conjugate_gradient(const LinearOperator& a, const Vector& b, double tolerance,
                            int max_iterations, const Vector* guess) {
  if (b.size() != a.size) throw PreconditionError("conjugate_gradient: right-hand side size mismatch");
  CGResult res;
  if (b.norm() == 0.0) {
    res.x = Vector::Zero(b.size());
    res.converged = true;
    return res;
  }
  const OperatorMatrix m(a);
  Eigen::ConjugateGradient<OperatorMatrix, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner> cg;
  cg.setTolerance(tolerance);
  cg.setMaxIterations(max_iterations);
  cg.compute(m);
  if (guess) {
    res.x = cg.solveWithGuess(b, *guess);
  } else {
    res.x = cg.solve(b);
  }
  res.iterations = static_cast<int>(cg.iterations());
  Vector ax(b.size());
  a.apply(res.x, ax);
  res.relative_residual = (b - ax).norm() / b.norm();
  res.converged = cg.info() == Eigen::Success;
  return res;
}

EigenEstimate generalized_power_iteration(const LinearOperator& a, const LinearOperator& b,
                                          const Vector& start, double tolerance,
                                          int max_iterations, double inner_tolerance) {
  if (a.size != b.size || start.size() != a.size) {
    throw PreconditionError("generalized_power_iteration: operator sizes differ");
  }
  if (start.norm() == 0.0) throw PreconditionError("generalized_power_iteration: zero start vector");
  EigenEstimate est;
  Vector x = start / start.norm();
  Vector ax(x.size()), bx(x.size());
  double previous = NAN;
  for (int it = 1; it <= max_iterations; ++it) {
    a.apply(x, ax);
    const CGResult solve = conjugate_gradient(b, ax, inner_tolerance, 20 * static_cast<int>(x.size()) + 100, &x);
    est.inner_iterations += solve.iterations;
    if (!solve.converged) {
      throw ConvergenceError("generalized_power_iteration: inner solve stalled at residual " +
                             std::to_string(solve.relative_residual));
    }
    x = solve.x / solve.x.norm();
    a.apply(x, ax);
    b.apply(x, bx);
    const double q = x.dot(ax) / x.dot(bx);
    est.iterations = it;
    if (std::isfinite(previous) && std::fabs(q - previous) < tolerance * std::fabs(q)) {
      est.value = q;
      est.vector = x;
      return est;
    }
    previous = q;
  }
  throw ConvergenceError("generalized_power_iteration: no convergence within " +
                         std::to_string(max_iterations) + " iterations");
}

}  // namespace fracharm
