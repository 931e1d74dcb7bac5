#include "bayesimp/bayescme.hpp"

namespace bayesimp {

namespace {
PsdSolver make_r_solver(const MatrixXd& r_yy, double r_ridge) {
  try {
    return PsdSolver(r_yy, r_ridge, "R_yy");
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string(e.what()) +
                              " (measure width eta likely too small or too large)");
  }
}
}  // namespace

BayesCmeModel BayesCmeModel::fit(const MatrixXd& x, const MatrixXd& y,
                                 const RbfKernel& kernel_x, const RbfKernel& kernel_y,
                                 const NuclearDominantKernel& kernel_r, double ridge,
                                 double r_ridge) {
  if (x.rows() == 0) throw ParameterError("bayescme_fit: empty data");
  if (x.rows() != y.rows()) throw DimensionError("bayescme_fit: x/y length mismatch");
  return fit_causal(OmegaFeatures::plain(x, kernel_x, ridge), y, kernel_y, kernel_r,
                    r_ridge);
}

BayesCmeModel BayesCmeModel::fit_causal(OmegaFeatures omega, const MatrixXd& y,
                                        const RbfKernel& kernel_y,
                                        const NuclearDominantKernel& kernel_r,
                                        double r_ridge) {
  if (y.rows() != omega.size()) {
    throw DimensionError("bayescme_fit: mediator rows do not match stage-1 features");
  }
  BayesCmeModel m;
  m.omega_ = std::move(omega);
  m.y_train_ = y;
  m.kernel_y_ = kernel_y;
  m.kernel_r_ = kernel_r;
  m.k_yy_ = gram(Kernel(kernel_y), y).matrix;
  m.r_yy_ = gram(Kernel(kernel_r), y).matrix;
  m.r_solver_ = make_r_solver(m.r_yy_, r_ridge);
  return m;
}

double BayesCmeModel::mean(const Eigen::Ref<const VectorXd>& x,
                           const Eigen::Ref<const VectorXd>& y) const {
  const VectorXd w = omega_.weights(x);
  const VectorXd r_col =
      cross_gram(Kernel(kernel_r_), y_train_, MatrixXd(y.transpose())).col(0);
  return w.dot(k_yy_ * r_solver_.solve(r_col));
}

double BayesCmeModel::cov(const Eigen::Ref<const VectorXd>& x,
                          const Eigen::Ref<const VectorXd>& y,
                          const Eigen::Ref<const VectorXd>& xprime,
                          const Eigen::Ref<const VectorXd>& yprime) const {
  const VectorXd phi_a = omega_.phi(x);
  const VectorXd phi_b = omega_.phi(xprime);
  const VectorXd r_a =
      cross_gram(Kernel(kernel_r_), y_train_, MatrixXd(y.transpose())).col(0);
  const VectorXd r_b =
      cross_gram(Kernel(kernel_r_), y_train_, MatrixXd(yprime.transpose())).col(0);
  const double prior = omega_.prior_dot(x, xprime) * kernel_r_(y, yprime);
  const double x_part = phi_a.dot(omega_.weights_from_phi(phi_b));
  const double y_part = r_a.dot(r_solver_.solve(r_b));
  return prior - x_part * y_part;
}

double bayescme_likelihood(double stage1_log_det, const SpdFactor& stage1_solver,
                           const MatrixXd& k_yy, const PsdSolver& r_solver,
                           double r_log_det, Eigen::Index n) {
  const MatrixXd a = stage1_solver.solve(k_yy);   // (K + lambda I)^{-1} K_yy
  const MatrixXd b = r_solver.solve(k_yy);        // R^{-1} K_yy
  const double trace = a.cwiseProduct(b.transpose()).sum();
  return -0.5 * static_cast<double>(n) * (stage1_log_det + r_log_det) - 0.5 * trace;
}

double BayesCmeModel::log_likelihood() const {
  return bayescme_likelihood(omega_.solve_log_det(), omega_.solver(), k_yy_, r_solver_,
                             r_solver_.log_det(), size());
}

}  // namespace bayesimp
