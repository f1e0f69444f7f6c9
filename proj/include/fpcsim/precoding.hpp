// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace fpcsim {

enum class Criterion { mrt, zf };

/// Downlink beamformers of one sector on one RB. Columns are per-user and
/// carry equal power: ||w_k||^2 = p_rb / K for every k, so the BS power
/// constraint is met with equality.
template <typename Scalar>
struct PrecodingMatrix {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> w;  // ports x K
  int zero_rows = 0;       // users whose channel row was zero
  int loading_events = 0;  // Gram matrices that needed diagonal loading
};

namespace detail {

template <typename Matrix>
void rescale_columns(Matrix& w, double p_rb, int* zero_rows) {
  const double target = std::sqrt(p_rb / static_cast<double>(w.cols()));
  for (int k = 0; k < w.cols(); ++k) {
    const double norm = w.col(k).norm();
    if (norm > 0.0) {
      w.col(k) *= target / norm;
    } else if (zero_rows) {
      ++*zero_rows;
    }
  }
}

}  // namespace detail

/// Maximum ratio transmission: column k parallel to the conjugate of the
/// k-th channel row. A zero row yields a zero column and is flagged.
template <typename Derived>
PrecodingMatrix<typename Derived::Scalar> mrt(const Eigen::MatrixBase<Derived>& h,
                                              double p_rb) {
  PrecodingMatrix<typename Derived::Scalar> out;
  out.w = h.adjoint();
  detail::rescale_columns(out.w, p_rb, &out.zero_rows);
  return out;
}

/// Zero forcing: H^H (H H^H)^{-1}, columns rescaled to equal power (the
/// per-column rescale preserves the zero cross terms). A Gram matrix with
/// condition number above cond_threshold gets diagonal loading
/// eps = 1e-6 trace(G)/K, and the event is counted.
template <typename Derived>
PrecodingMatrix<typename Derived::Scalar> zf(const Eigen::MatrixBase<Derived>& h,
                                             double p_rb,
                                             double cond_threshold = 1e10) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PrecodingMatrix<Scalar> out;
  const int k_users = static_cast<int>(h.rows());
  Matrix gram = h * h.adjoint();

  Eigen::SelfAdjointEigenSolver<Matrix> eigs(gram);
  const double lambda_max = eigs.eigenvalues().maxCoeff();
  const double lambda_min = eigs.eigenvalues().minCoeff();
  if (!(lambda_min > 0.0) || lambda_max > cond_threshold * lambda_min) {
    const double eps = 1e-6 * gram.real().trace() / k_users;
    gram += eps * Matrix::Identity(k_users, k_users);
    ++out.loading_events;
  }
  out.w = h.adjoint() * gram.ldlt().solve(Matrix::Identity(k_users, k_users));
  detail::rescale_columns(out.w, p_rb, &out.zero_rows);
  return out;
}

template <typename Derived>
PrecodingMatrix<typename Derived::Scalar> precode(
    Criterion criterion, const Eigen::MatrixBase<Derived>& h, double p_rb,
    double cond_threshold = 1e10) {
  return criterion == Criterion::mrt ? mrt(h, p_rb)
                                     : zf(h, p_rb, cond_threshold);
}

}  // namespace fpcsim
