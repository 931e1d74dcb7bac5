#pragma once

#include <Eigen/Dense>
#include <variant>

#include "bayesimp/errors.hpp"

namespace bayesimp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Points are rows of a MatrixXd (N x D). Scalar data uses D = 1.

// k(a,b) = signal_variance * exp(-sum_d (a_d-b_d)^2 / (2 l_d^2))
class RbfKernel {
 public:
  RbfKernel() : lengthscales_(VectorXd::Ones(1)) {}
  explicit RbfKernel(double lengthscale, double signal_variance = 1.0, int dim = 1);
  explicit RbfKernel(VectorXd lengthscales, double signal_variance = 1.0);

  double operator()(const Eigen::Ref<const VectorXd>& a,
                    const Eigen::Ref<const VectorXd>& b) const;

  int dim() const { return static_cast<int>(lengthscales_.size()); }
  const VectorXd& lengthscales() const { return lengthscales_; }
  double signal_variance() const { return signal_variance_; }

  RbfKernel with_lengthscales(const VectorXd& ls) const {
    return RbfKernel(ls, signal_variance_);
  }
  RbfKernel with_signal_variance(double sv) const {
    return RbfKernel(lengthscales_, sv);
  }

 private:
  VectorXd lengthscales_;
  double signal_variance_ = 1.0;
};

// Nuclear dominant companion of an RBF base kernel:
//   r(y,y') = integral k(y,u) k(u,y') nu(du),  nu(du) = exp(-|u|^2/(2 eta^2)) du.
// Closed form per dimension d (base lengthscale l, signal variance s):
//   r = s^2 * sqrt(2*pi) * (2/l^2 + 1/eta^2)^{-1/2}
//       * exp(-(y_d-y'_d)^2/(4 l^2)) * exp(-(y_d+y'_d)^2/(8 eta^2 + 4 l^2))
// GP(0, r) samples land in the RKHS of k almost surely, which is what makes
// <f, mu> well defined downstream.
class NuclearDominantKernel {
 public:
  NuclearDominantKernel() = default;
  NuclearDominantKernel(RbfKernel base, double measure_width);

  double operator()(const Eigen::Ref<const VectorXd>& a,
                    const Eigen::Ref<const VectorXd>& b) const;

  int dim() const { return base_.dim(); }
  const RbfKernel& base() const { return base_; }
  double measure_width() const { return measure_width_; }

 private:
  RbfKernel base_;
  double measure_width_ = 1.0;
};

using Kernel = std::variant<RbfKernel, NuclearDominantKernel>;

double kernel_eval(const Kernel& k, const Eigen::Ref<const VectorXd>& a,
                   const Eigen::Ref<const VectorXd>& b);
int kernel_dim(const Kernel& k);

struct GramBundle {
  MatrixXd matrix;
  double jitter_used = 0.0;  // always 0; jitter is added at solve time
};

GramBundle gram(const Kernel& k, const MatrixXd& points);
MatrixXd cross_gram(const Kernel& k, const MatrixXd& a, const MatrixXd& b);

// Test-side oracle for NuclearDominantKernel: adaptive Gauss-Kronrod quadrature
// of the defining integral (D <= 2, absolute tolerance ~1e-9). Kept independent
// of the closed form above on purpose.
double quadrature_oracle(const RbfKernel& base, double measure_width,
                         const Eigen::Ref<const VectorXd>& y,
                         const Eigen::Ref<const VectorXd>& yprime);

// Median pairwise Euclidean distance; the usual lengthscale heuristic.
// Throws ParameterError when fewer than two distinct points exist.
double median_heuristic(const MatrixXd& points);

// Column vector -> N x 1 point matrix.
inline MatrixXd as_points(const VectorXd& v) {
  MatrixXd m(v.size(), 1);
  m.col(0) = v;
  return m;
}

}  // namespace bayesimp
