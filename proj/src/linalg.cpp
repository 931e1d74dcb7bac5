#include "bayesimp/linalg.hpp"

#include <array>
#include <cmath>

#include "bayesimp/errors.hpp"

namespace bayesimp {

namespace {
constexpr std::array<double, 4> kJitterLevels = {0.0, 1e-10, 1e-8, 1e-6};
}

SpdFactor::SpdFactor(const MatrixXd& matrix, double ridge, std::string label) {
  if (matrix.rows() != matrix.cols()) {
    throw DimensionError("solve_spd: " + label + " is not square");
  }
  const double mean_diag = matrix.diagonal().mean();
  MatrixXd base = matrix;
  base.diagonal().array() += ridge;
  for (double level : kJitterLevels) {
    jitter_ = level * std::abs(mean_diag);
    MatrixXd attempt = base;
    attempt.diagonal().array() += jitter_;
    llt_.compute(attempt);
    if (llt_.info() == Eigen::Success) return;
  }
  throw SingularMatrixError("solve_spd: " + label +
                            " not positive definite at max jitter (1e-6 * mean diagonal)");
}

MatrixXd SpdFactor::solve(const MatrixXd& rhs) const {
  if (rhs.rows() != llt_.rows()) {
    throw DimensionError("solve_spd: rhs row count does not match matrix");
  }
  return llt_.solve(rhs);
}

VectorXd SpdFactor::solve(const VectorXd& rhs) const {
  if (rhs.size() != llt_.rows()) {
    throw DimensionError("solve_spd: rhs size does not match matrix");
  }
  return llt_.solve(rhs);
}

double SpdFactor::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

SpdSolveResult solve_spd(const MatrixXd& matrix, const MatrixXd& rhs, double ridge,
                         const std::string& label) {
  SpdFactor factor(matrix, ridge, label);
  return {factor.solve(rhs), factor.jitter_used()};
}

PsdSolver::PsdSolver(const MatrixXd& matrix, double ridge, std::string label) {
  if (matrix.rows() != matrix.cols()) {
    throw DimensionError("psd_solve: " + label + " is not square");
  }
  MatrixXld m = matrix.cast<long double>();
  if (ridge != 0.0) m.diagonal().array() += static_cast<long double>(ridge);
  ldlt_.compute(m);
  if (ldlt_.info() != Eigen::Success) {
    throw SingularMatrixError("psd_solve: LDLT of " + label + " failed");
  }
  pivot_floor_ = 1e-30 * std::abs(matrix.diagonal().mean());
}

MatrixXd PsdSolver::solve(const MatrixXd& rhs) const {
  if (rhs.rows() != ldlt_.rows()) {
    throw DimensionError("psd_solve: rhs row count does not match matrix");
  }
  return ldlt_.solve(rhs.cast<long double>()).cast<double>();
}

VectorXd PsdSolver::solve(const VectorXd& rhs) const {
  return solve(MatrixXd(rhs)).col(0);
}

double PsdSolver::log_det() const {
  long double sum = 0.0L;
  const auto& d = ldlt_.vectorD();
  const long double floor = static_cast<long double>(pivot_floor_);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    sum += std::log(std::max(d[i], floor));
  }
  return static_cast<double>(sum);
}

double min_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

MatrixXd project_psd(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd sqrt_psd(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace bayesimp
