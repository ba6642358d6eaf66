#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace frd {

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  const Plain m = a.eval();
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return Eigen::JacobiSVD<Plain>(m).singularValues()(0);
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

inline double lambda_min(const Eigen::MatrixXcd& h) { return hermitian_eigenvalues(h)(0); }

inline double lambda_max(const Eigen::MatrixXcd& h) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(h);
  return ev(ev.size() - 1);
}

inline double frobenius_sq(const Eigen::MatrixXcd& a) { return a.squaredNorm(); }

}  // namespace frd
