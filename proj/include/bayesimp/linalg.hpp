#pragma once

#include <Eigen/Dense>
#include <string>

namespace bayesimp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Cached symmetric positive (semi-)definite factorization with the library-wide
// jitter policy: try ridge alone, then escalate jitter through
// {1e-10, 1e-8, 1e-6} * mean(diag) until the Cholesky succeeds.
// Throws SingularMatrixError naming `label` if all levels fail.
class SpdFactor {
 public:
  SpdFactor() = default;
  SpdFactor(const MatrixXd& matrix, double ridge, std::string label = "matrix");

  MatrixXd solve(const MatrixXd& rhs) const;
  VectorXd solve(const VectorXd& rhs) const;
  double log_det() const;  // log|matrix + ridge I + jitter I|
  double jitter_used() const { return jitter_; }
  Eigen::Index size() const { return llt_.rows(); }

 private:
  Eigen::LLT<MatrixXd> llt_;
  double jitter_ = 0.0;
};

struct SpdSolveResult {
  MatrixXd solution;
  double jitter_used = 0.0;
};

// One-shot (matrix + ridge I [+ jitter I]) x = rhs.
SpdSolveResult solve_spd(const MatrixXd& matrix, const MatrixXd& rhs, double ridge,
                         const std::string& label = "matrix");

// Symmetric solver for severely ill-conditioned PSD Grams (the nuclear-kernel
// R_yy and landmark K_yy blocks, cond ~ 1e18). Factorizes in long double so
// identities like R^{-1}(R e_j) = e_j survive to ~1e-11; a plain double
// factorization only reaches ~1e-8, which is not enough for the
// training-mediator collapse contract. Ridge defaults to 0 here.
class PsdSolver {
 public:
  PsdSolver() = default;
  explicit PsdSolver(const MatrixXd& matrix, double ridge = 0.0,
                     std::string label = "matrix");

  MatrixXd solve(const MatrixXd& rhs) const;
  VectorXd solve(const VectorXd& rhs) const;
  // log|matrix| with pivots floored at 1e-30 * mean(diag); finite for the
  // likelihood even when the Gram is numerically rank-deficient.
  double log_det() const;
  Eigen::Index size() const { return ldlt_.rows(); }

 private:
  using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::LDLT<MatrixXld> ldlt_;
  double pivot_floor_ = 0.0;
};

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const MatrixXd& m);

// Symmetrize and clip negative eigenvalues at zero.
MatrixXd project_psd(const MatrixXd& m);

// Symmetric PSD square root (eigendecomposition, negative eigenvalues clipped).
MatrixXd sqrt_psd(const MatrixXd& m);

}  // namespace bayesimp
