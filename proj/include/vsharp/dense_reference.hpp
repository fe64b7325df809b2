#pragma once

#include <Eigen/Dense>

#include "vsharp/mri.hpp"

namespace vsharp {

// Dense realizations of the measurement operator for small problems. These
// back the exact solves the iterative paths are verified against; they are
// only meant for n up to a few hundred pixels.

template <typename T>
Eigen::VectorXcd to_eigen(const Tensor<T>& img) {
  const std::int64_t n = img.size() / 2;
  Eigen::VectorXcd v(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = std::complex<double>(img[2 * i], img[2 * i + 1]);
  return v;
}

template <typename T>
Tensor<T> from_eigen(const Eigen::VectorXcd& v, Shape shape) {
  Tensor<T> t(std::move(shape));
  if (t.size() != 2 * v.size()) throw std::invalid_argument("from_eigen: size mismatch");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    t[2 * i] = static_cast<T>(v[i].real());
    t[2 * i + 1] = static_cast<T>(v[i].imag());
  }
  return t;
}

template <typename T>
struct DenseOperator {
  int H = 0, W = 0, nc = 0;
  Eigen::MatrixXcd A;  // (nc*H*W) x (H*W), columns are forward images of unit pixels

  static DenseOperator assemble(const Tensor<T>& sens, const Tensor<T>& mask) {
    DenseOperator d;
    d.nc = sens.dim(0);
    d.H = sens.dim(1);
    d.W = sens.dim(2);
    const std::int64_t n = std::int64_t(d.H) * d.W;
    d.A.resize(d.nc * n, n);
    Tensor<T> basis({d.H, d.W, 2});
    for (std::int64_t j = 0; j < n; ++j) {
      basis.fill(T(0));
      basis[2 * j] = T(1);
      d.A.col(j) = to_eigen(forward_op(basis, sens, mask));
    }
    return d;
  }

  Eigen::MatrixXcd normal() const { return A.adjoint() * A; }

  /// lambda_max(A^H A) + rho, the gradient Lipschitz constant of the
  /// penalized data-fidelity objective.
  double lipschitz(double rho) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(normal(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() + rho;
  }
};

/// Exact minimizer of the penalized data-fidelity subproblem:
///   (A^H A + rho I)^{-1} (A^H y + rho z - u).
template <typename T>
Tensor<T> closed_form_x(const Tensor<T>& z_next, const Tensor<T>& u, T rho, const DenseOperator<T>& dense,
                        const Tensor<T>& y_tilde) {
  if (rho <= T(0)) throw std::invalid_argument("closed_form_x: rho must be positive");
  const std::int64_t n = std::int64_t(dense.H) * dense.W;
  Eigen::MatrixXcd M = dense.normal();
  for (std::int64_t i = 0; i < n; ++i) M(i, i) += double(rho);
  Eigen::VectorXcd rhs =
      dense.A.adjoint() * to_eigen(y_tilde) + double(rho) * to_eigen(z_next) - to_eigen(u);
  Eigen::VectorXcd x = M.llt().solve(rhs);
  return from_eigen<T>(x, {dense.H, dense.W, 2});
}

/// Global optimum of the quadratic-regularized problem
///   argmin 0.5*||A x - y||^2 + lambda*||x||^2  =  (A^H A + 2 lambda I)^{-1} A^H y.
template <typename T>
Tensor<T> dense_regularized_solution(const DenseOperator<T>& dense, const Tensor<T>& y_tilde, double lambda) {
  const std::int64_t n = std::int64_t(dense.H) * dense.W;
  Eigen::MatrixXcd M = dense.normal();
  for (std::int64_t i = 0; i < n; ++i) M(i, i) += 2.0 * lambda;
  Eigen::VectorXcd x = M.llt().solve(dense.A.adjoint() * to_eigen(y_tilde));
  return from_eigen<T>(x, {dense.H, dense.W, 2});
}

}  // namespace vsharp
