#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bayesimp/dataset.hpp"
#include "bayesimp/gp.hpp"
#include "bayesimp/kernels.hpp"
#include "bayesimp/linalg.hpp"

namespace bayesimp {

enum class AdjustmentKind { Backdoor, Frontdoor };

// Which columns of D1 play which causal role. An empty adjustment list is the
// degenerate backdoor (k_Z == 1): the interventional embedding collapses to the
// plain conditional mean embedding.
struct AdjustmentSpec {
  AdjustmentKind kind = AdjustmentKind::Backdoor;
  std::string treatment;
  std::vector<std::string> adjustment;
  std::string mediator;
  // Ridge of the inner CME (front-door only); < 0 means "use the outer ridge".
  double inner_cme_ridge = -1.0;

  void validate(const DataTable& d1) const;
};

// The Omega feature construction shared by every stage-1 estimator.
//
// Two distinct products of the feature map are exposed:
//   phi(x): the length-N evaluation vector that enters every
//           (K_Omega + lambda I)^{-1} sandwich;
//   prior_dot(x, x'): the RKHS inner product <phi_Omega(x), phi_Omega(x')> that
//           plays the prior-covariance role in the Bayesian constructions
//           (backdoor: k_x(x,x') * mean(K_ZZ); front-door:
//           mean(K_XX) * beta(x)' K_ZZ beta(x')). The evaluation-vector dot
//           product is NOT that quantity and is not used for it.
class OmegaFeatures {
 public:
  OmegaFeatures() = default;

  static OmegaFeatures build(const DataTable& d1, const AdjustmentSpec& spec,
                             const RbfKernel& kernel_x, const RbfKernel& kernel_z,
                             double ridge);
  // Degenerate adjustment over raw treatment points (plain CME).
  static OmegaFeatures plain(const MatrixXd& treatment, const RbfKernel& kernel_x,
                             double ridge);

  VectorXd phi(const Eigen::Ref<const VectorXd>& x) const;
  double prior_dot(const Eigen::Ref<const VectorXd>& x,
                   const Eigen::Ref<const VectorXd>& xprime) const;
  // (K_Omega + ridge I)^{-1} phi(x)
  VectorXd weights(const Eigen::Ref<const VectorXd>& x) const;
  VectorXd weights_from_phi(const VectorXd& phi_vec) const { return solver_.solve(phi_vec); }

  const MatrixXd& k_omega() const { return k_omega_; }
  double ridge() const { return ridge_; }
  const SpdFactor& solver() const { return solver_; }
  Eigen::Index size() const { return k_omega_.rows(); }
  double solve_log_det() const { return solver_.log_det(); }

 private:
  AdjustmentKind kind_ = AdjustmentKind::Backdoor;
  RbfKernel kernel_x_;
  MatrixXd x_train_;
  MatrixXd k_omega_;
  double ridge_ = 0.0;
  SpdFactor solver_;  // K_Omega + ridge I

  // Backdoor: per-row mean-embedding factors (1/N) sum_j k_Z(z_i, z_j) and
  // their grand mean for the prior inner product.
  VectorXd z_factors_;
  double z_prior_scale_ = 1.0;
  // Front-door: K_ZZ, the inner CME solver over (K_XX + lambda_z I), and the
  // X mean-embedding factors.
  MatrixXd k_zz_;
  std::optional<SpdFactor> inner_solver_;
  VectorXd x_mean_factors_;
  double x_prior_scale_ = 1.0;
};

// (K_xx + lambda I)^{-1} k_x(train, x_query): classical CME weights.
VectorXd cme_weights(const MatrixXd& x_train, const RbfKernel& kernel, double ridge,
                     const Eigen::Ref<const VectorXd>& x_query);

// Empirical interventional mean embedding evaluated pointwise:
// k(y_query, Y) (K_Omega + lambda I)^{-1} phi(x).
VectorXd ime_evaluate(const OmegaFeatures& omega, const MatrixXd& y_train,
                      const Kernel& kernel_y, const Eigen::Ref<const VectorXd>& x,
                      const MatrixXd& y_query);

}  // namespace bayesimp
