#include "bayesimp/gp.hpp"

#include <algorithm>
#include <cmath>

namespace bayesimp {

KrrModel krr_fit(const MatrixXd& inputs, const VectorXd& targets, const Kernel& kernel,
                 double ridge) {
  if (inputs.rows() == 0) throw ParameterError("krr_fit: empty training set");
  if (inputs.rows() != targets.size()) {
    throw DimensionError("krr_fit: inputs/targets length mismatch");
  }
  if (ridge <= 0.0) throw ParameterError("krr_fit: ridge must be positive");
  const MatrixXd k = gram(kernel, inputs).matrix;
  KrrModel model{inputs, SpdFactor(k, ridge, "K_train (krr)").solve(targets), ridge, kernel};
  return model;
}

double krr_predict(const KrrModel& model, const Eigen::Ref<const VectorXd>& point) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < model.train_inputs.rows(); ++i) {
    acc += model.coefficients[i] *
           kernel_eval(model.kernel, model.train_inputs.row(i).transpose(), point);
  }
  return acc;
}

VectorXd krr_predict(const KrrModel& model, const MatrixXd& points) {
  return cross_gram(model.kernel, points, model.train_inputs) * model.coefficients;
}

GpModel::GpModel(MatrixXd inputs, VectorXd targets, Kernel kernel, double noise)
    : inputs_(std::move(inputs)),
      targets_(std::move(targets)),
      kernel_(std::move(kernel)),
      noise_(noise) {
  if (inputs_.rows() != targets_.size()) {
    throw DimensionError("gp_fit: inputs/targets length mismatch");
  }
  if (noise_ <= 0.0 && inputs_.rows() > 0) {
    throw ParameterError("gp_fit: noise must be positive");
  }
  if (inputs_.rows() > 0) {
    factor_ = SpdFactor(gram(kernel_, inputs_).matrix, noise_, "K_train (gp)");
    alpha_ = factor_.solve(targets_);
  }
}

VectorXd GpModel::posterior_mean(const MatrixXd& query) const {
  if (size() == 0) return VectorXd::Zero(query.rows());
  return cross_gram(kernel_, query, inputs_) * alpha_;
}

MatrixXd GpModel::posterior_cov(const MatrixXd& query_a, const MatrixXd& query_b) const {
  const MatrixXd prior = cross_gram(kernel_, query_a, query_b);
  if (size() == 0) return prior;
  const MatrixXd ka = cross_gram(kernel_, query_a, inputs_);
  const MatrixXd kb = cross_gram(kernel_, query_b, inputs_);
  return prior - ka * factor_.solve(MatrixXd(kb.transpose()));
}

GpModel::Posterior GpModel::posterior(const MatrixXd& query) const {
  return {posterior_mean(query), posterior_cov(query, query)};
}

double GpModel::log_marginal() const {
  if (size() == 0) return 0.0;
  const double m = static_cast<double>(size());
  return -0.5 * targets_.dot(alpha_) - 0.5 * factor_.log_det() -
         0.5 * m * std::log(2.0 * M_PI);
}

MatrixXd GpModel::solve_train(const MatrixXd& rhs) const { return factor_.solve(rhs); }

double HyperState::value(const std::string& name) const {
  return std::exp(log_values[index(name)]);
}

void HyperState::set_value(const std::string& name, double v) {
  if (v <= 0.0) throw ParameterError("hyperparameter '" + name + "' must be positive");
  log_values[index(name)] = std::log(v);
}

void HyperState::freeze(const std::string& name, bool on) {
  frozen[static_cast<std::size_t>(index(name))] = on;
}

Eigen::Index HyperState::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Eigen::Index>(i);
  }
  throw ParameterError("unknown hyperparameter '" + name + "'");
}

HyperState rbf_hyper_state(const RbfKernel& kernel, double noise) {
  HyperState state;
  const int d = kernel.dim();
  state.log_values.resize(d + 2);
  for (int i = 0; i < d; ++i) {
    state.names.push_back(d == 1 ? "log_lengthscale"
                                 : "log_lengthscale_" + std::to_string(i));
    state.log_values[i] = std::log(kernel.lengthscales()[i]);
  }
  state.names.push_back("log_signal_variance");
  state.log_values[d] = std::log(kernel.signal_variance());
  state.names.push_back("log_noise");
  state.log_values[d + 1] = std::log(noise);
  state.frozen.assign(state.names.size(), false);
  return state;
}

RbfEvidence rbf_evidence_with_gradient(const MatrixXd& inputs, const VectorXd& targets,
                                       const VectorXd& log_hypers) {
  const Eigen::Index m = inputs.rows();
  const int d = static_cast<int>(inputs.cols());
  if (log_hypers.size() != d + 2) {
    throw DimensionError("rbf_evidence: hyper vector must be [lengthscales.., sv, noise]");
  }
  const VectorXd ls = log_hypers.head(d).array().exp();
  const double sv = std::exp(log_hypers[d]);
  const double noise = std::exp(log_hypers[d + 1]);

  const RbfKernel kernel(ls, sv);
  const MatrixXd k = gram(Kernel(kernel), inputs).matrix;
  SpdFactor factor(k, noise, "K_train (evidence)");
  const VectorXd alpha = factor.solve(targets);
  const MatrixXd kinv = factor.solve(MatrixXd::Identity(m, m));

  RbfEvidence out;
  out.value = -0.5 * targets.dot(alpha) - 0.5 * factor.log_det() -
              0.5 * static_cast<double>(m) * std::log(2.0 * M_PI);
  out.gradient.resize(d + 2);

  // dL/dtheta = 1/2 a'(dK)a - 1/2 tr(Kinv dK), with dK in log-parameter form.
  const MatrixXd aa = alpha * alpha.transpose();
  for (int p = 0; p < d; ++p) {
    MatrixXd dk(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double diff = inputs(i, p) - inputs(j, p);
        dk(i, j) = k(i, j) * diff * diff / (ls[p] * ls[p]);
      }
    }
    out.gradient[p] = 0.5 * (aa.cwiseProduct(dk).sum() - kinv.cwiseProduct(dk).sum());
  }
  // d/dlog sv: dK = K; d/dlog noise: dK = noise I.
  out.gradient[d] = 0.5 * (aa.cwiseProduct(k).sum() - kinv.cwiseProduct(k).sum());
  out.gradient[d + 1] = 0.5 * noise * (alpha.squaredNorm() - kinv.trace());
  return out;
}

VectorXd finite_difference_gradient(const Objective& objective, const VectorXd& log_values,
                                    const std::vector<bool>& frozen, double step) {
  VectorXd grad = VectorXd::Zero(log_values.size());
  for (Eigen::Index i = 0; i < log_values.size(); ++i) {
    if (i < static_cast<Eigen::Index>(frozen.size()) && frozen[i]) continue;
    VectorXd up = log_values, down = log_values;
    up[i] += step;
    down[i] -= step;
    grad[i] = (objective(up) - objective(down)) / (2.0 * step);
  }
  return grad;
}

HyperState optimize_hypers(const Objective& objective, HyperState state,
                           const OptimizeConfig& config, const ObjectiveGradient& gradient) {
  if (state.frozen.size() != state.names.size()) {
    state.frozen.assign(state.names.size(), false);
  }
  double current = objective(state.log_values);
  if (!std::isfinite(current)) {
    throw ParameterError("optimize_hypers: objective not finite at the initial point");
  }
  state.objective_trace.push_back(current);

  double step = config.initial_step;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    VectorXd grad = gradient
                        ? gradient(state.log_values)
                        : finite_difference_gradient(objective, state.log_values,
                                                     state.frozen, config.fd_step);
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
      if (state.frozen[static_cast<std::size_t>(i)]) grad[i] = 0.0;
    }
    const double gnorm = grad.norm();
    if (!std::isfinite(gnorm)) break;  // keep the last valid state
    if (gnorm < config.tolerance) break;

    // Backtracking: halve until the objective improves.
    double trial_step = step;
    bool improved = false;
    while (trial_step >= config.min_step) {
      const VectorXd candidate = state.log_values + (trial_step / gnorm) * grad;
      const double value = objective(candidate);
      if (std::isfinite(value) && value > current) {
        state.log_values = candidate;
        current = value;
        improved = true;
        break;
      }
      trial_step *= 0.5;
    }
    if (!improved) break;
    state.objective_trace.push_back(current);
    // Gentle step adaptation: reuse the accepted scale, grow it slightly.
    step = std::min(config.initial_step, trial_step * 2.0);
    if (state.objective_trace.size() >= 2) {
      const std::size_t n = state.objective_trace.size();
      if (std::abs(state.objective_trace[n - 1] - state.objective_trace[n - 2]) <
          config.tolerance * (1.0 + std::abs(current))) {
        break;
      }
    }
  }
  return state;
}

}  // namespace bayesimp
