#pragma once

#include "bayesimp/embeddings.hpp"

namespace bayesimp {

// Bayesian conditional mean embedding: a vector-valued GP over the embedding
// mu(x, .) with prior k_x (x) times nuclear-dominant r_y (.), observed through
// the Gram K_yy. The causal variant swaps the stage-1 features k_{x.} for the
// Omega construction; both are represented by OmegaFeatures here.
class BayesCmeModel {
 public:
  BayesCmeModel() = default;

  // Plain CME over raw (x, y) pairs.
  static BayesCmeModel fit(const MatrixXd& x, const MatrixXd& y, const RbfKernel& kernel_x,
                           const RbfKernel& kernel_y, const NuclearDominantKernel& kernel_r,
                           double ridge, double r_ridge = 0.0);
  // Causal CME over a prepared Omega feature set.
  static BayesCmeModel fit_causal(OmegaFeatures omega, const MatrixXd& y,
                                  const RbfKernel& kernel_y,
                                  const NuclearDominantKernel& kernel_r, double r_ridge = 0.0);

  // Posterior mean of mu(x, y):
  //   phi(x)'(K_Omega + lambda I)^{-1} K_yy R_yy^{-1} r(Y, y)
  double mean(const Eigen::Ref<const VectorXd>& x,
              const Eigen::Ref<const VectorXd>& y) const;

  // Posterior covariance between mu(x, y) and mu(x', y'):
  //   prior_dot(x,x') r(y,y')
  //   - phi(x)'(K+lI)^{-1}phi(x') * r(y,Y) R^{-1} r(Y,y')
  double cov(const Eigen::Ref<const VectorXd>& x, const Eigen::Ref<const VectorXd>& y,
             const Eigen::Ref<const VectorXd>& xprime,
             const Eigen::Ref<const VectorXd>& yprime) const;

  // Marginal likelihood exactly as printed (no 2*pi constant):
  //   -N/2 (log|K_Omega + lambda I| + log|R|)
  //   - 1/2 tr((K_Omega + lambda I)^{-1} K_yy R^{-1} K_yy)
  double log_likelihood() const;

  const OmegaFeatures& omega() const { return omega_; }
  const MatrixXd& y_train() const { return y_train_; }
  const MatrixXd& k_yy() const { return k_yy_; }
  const PsdSolver& r_solver() const { return r_solver_; }
  const RbfKernel& kernel_y() const { return kernel_y_; }
  const NuclearDominantKernel& kernel_r() const { return kernel_r_; }
  Eigen::Index size() const { return y_train_.rows(); }

 private:
  OmegaFeatures omega_;
  MatrixXd y_train_;
  RbfKernel kernel_y_;
  NuclearDominantKernel kernel_r_;
  MatrixXd k_yy_;
  MatrixXd r_yy_;
  PsdSolver r_solver_;
};

// The likelihood as a pure function of the matrices; the model method and the
// hyper-fitting objectives both route through this.
double bayescme_likelihood(double stage1_log_det, const SpdFactor& stage1_solver,
                           const MatrixXd& k_yy, const PsdSolver& r_solver,
                           double r_log_det, Eigen::Index n);

}  // namespace bayesimp
