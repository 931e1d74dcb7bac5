#include "bayesimp/embeddings.hpp"

#include <algorithm>

namespace bayesimp {

void AdjustmentSpec::validate(const DataTable& d1) const {
  std::vector<std::string> seen;
  auto check = [&](const std::string& name, const char* role) {
    if (!d1.has_column(name)) {
      throw ParameterError(std::string("adjustment spec: missing ") + role + " column '" +
                           name + "'");
    }
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) {
      throw ParameterError("adjustment spec: column '" + name + "' used twice");
    }
    seen.push_back(name);
  };
  check(treatment, "treatment");
  for (const auto& z : adjustment) check(z, "adjustment");
  check(mediator, "mediator");
  if (kind == AdjustmentKind::Frontdoor && adjustment.empty()) {
    throw ParameterError("adjustment spec: front-door needs adjustment columns");
  }
}

OmegaFeatures OmegaFeatures::build(const DataTable& d1, const AdjustmentSpec& spec,
                                   const RbfKernel& kernel_x, const RbfKernel& kernel_z,
                                   double ridge) {
  spec.validate(d1);
  if (d1.rows() < 2) throw ParameterError("build_omega: need at least two rows");
  if (ridge <= 0.0) throw ParameterError("build_omega: ridge must be positive");

  OmegaFeatures f;
  f.kind_ = spec.kind;
  f.kernel_x_ = kernel_x;
  f.ridge_ = ridge;
  f.x_train_ = as_points(d1.col(spec.treatment));
  const MatrixXd k_xx = gram(Kernel(kernel_x), f.x_train_).matrix;

  if (spec.adjustment.empty()) {
    // Constant-Z backdoor: K_Omega = K_XX, phi = k_x(train, x).
    f.k_omega_ = k_xx;
    f.z_factors_ = VectorXd::Ones(d1.rows());
    f.z_prior_scale_ = 1.0;
  } else {
    const MatrixXd z = d1.cols(spec.adjustment);
    const MatrixXd k_zz = gram(Kernel(kernel_z), z).matrix;
    f.k_omega_ = k_xx.cwiseProduct(k_zz);
    if (spec.kind == AdjustmentKind::Backdoor) {
      f.z_factors_ = k_zz.rowwise().mean();
      f.z_prior_scale_ = k_zz.mean();
    } else {
      f.k_zz_ = k_zz;
      const double lambda_z = spec.inner_cme_ridge > 0.0 ? spec.inner_cme_ridge : ridge;
      f.inner_solver_.emplace(k_xx, lambda_z, "K_xx (inner front-door CME)");
      f.x_mean_factors_ = k_xx.rowwise().mean();
      f.x_prior_scale_ = k_xx.mean();
    }
  }
  f.solver_ = SpdFactor(f.k_omega_, ridge, "K_Omega");
  return f;
}

OmegaFeatures OmegaFeatures::plain(const MatrixXd& treatment, const RbfKernel& kernel_x,
                                   double ridge) {
  OmegaFeatures f;
  f.kind_ = AdjustmentKind::Backdoor;
  f.kernel_x_ = kernel_x;
  f.ridge_ = ridge;
  f.x_train_ = treatment;
  f.k_omega_ = gram(Kernel(kernel_x), treatment).matrix;
  f.z_factors_ = VectorXd::Ones(treatment.rows());
  f.z_prior_scale_ = 1.0;
  f.solver_ = SpdFactor(f.k_omega_, ridge, "K_Omega");
  return f;
}

VectorXd OmegaFeatures::phi(const Eigen::Ref<const VectorXd>& x) const {
  const VectorXd kx = cross_gram(Kernel(kernel_x_), x_train_, MatrixXd(x.transpose())).col(0);
  if (kind_ == AdjustmentKind::Backdoor) {
    return kx.cwiseProduct(z_factors_);
  }
  const VectorXd beta = inner_solver_->solve(kx);
  return x_mean_factors_.cwiseProduct(k_zz_ * beta);
}

double OmegaFeatures::prior_dot(const Eigen::Ref<const VectorXd>& x,
                                const Eigen::Ref<const VectorXd>& xprime) const {
  if (kind_ == AdjustmentKind::Backdoor) {
    return kernel_x_(x, xprime) * z_prior_scale_;
  }
  const VectorXd beta_a = inner_solver_->solve(
      cross_gram(Kernel(kernel_x_), x_train_, MatrixXd(x.transpose())).col(0));
  const VectorXd beta_b = inner_solver_->solve(
      cross_gram(Kernel(kernel_x_), x_train_, MatrixXd(xprime.transpose())).col(0));
  return x_prior_scale_ * beta_a.dot(k_zz_ * beta_b);
}

VectorXd OmegaFeatures::weights(const Eigen::Ref<const VectorXd>& x) const {
  return solver_.solve(phi(x));
}

VectorXd cme_weights(const MatrixXd& x_train, const RbfKernel& kernel, double ridge,
                     const Eigen::Ref<const VectorXd>& x_query) {
  if (x_train.rows() == 0) throw ParameterError("cme_weights: empty training set");
  if (ridge <= 0.0) throw ParameterError("cme_weights: ridge must be positive");
  const MatrixXd k_xx = gram(Kernel(kernel), x_train).matrix;
  const VectorXd kx =
      cross_gram(Kernel(kernel), x_train, MatrixXd(x_query.transpose())).col(0);
  return SpdFactor(k_xx, ridge, "K_xx (cme)").solve(kx);
}

VectorXd ime_evaluate(const OmegaFeatures& omega, const MatrixXd& y_train,
                      const Kernel& kernel_y, const Eigen::Ref<const VectorXd>& x,
                      const MatrixXd& y_query) {
  if (y_query.rows() == 0) return VectorXd();
  const VectorXd w = omega.weights(x);
  return cross_gram(kernel_y, y_query, y_train) * w;
}

}  // namespace bayesimp
