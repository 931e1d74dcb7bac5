#include "bayesimp/bo.hpp"

#include <chrono>
#include <cmath>
#include <memory>

namespace bayesimp {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double normal_central_quantile(double mass) {
  if (mass <= 0.0 || mass >= 1.0) {
    throw ParameterError("normal_central_quantile: mass must lie in (0,1)");
  }
  // Bisection on the CDF; plenty fast for our grids, no special functions.
  const double target = 0.5 * (1.0 + mass);
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double expected_improvement(double mean, double std, double best, Direction direction) {
  if (std < 0.0) throw ParameterError("expected_improvement: std must be nonnegative");
  const double delta = direction == Direction::Maximize ? mean - best : best - mean;
  if (std == 0.0) return std::max(delta, 0.0);
  const double z = delta / std;
  return std * (z * normal_cdf(z) + normal_pdf(z));
}

Surrogate::Surrogate(GridGp prior, double obs_noise)
    : prior_(std::move(prior)), obs_noise_(obs_noise) {
  if (obs_noise <= 0.0) throw ParameterError("surrogate: observation noise must be positive");
}

void Surrogate::observe(Eigen::Index grid_index, double value) {
  if (grid_index < 0 || grid_index >= prior_.grid.rows()) {
    throw ParameterError("surrogate: observation index off the grid");
  }
  observations_.emplace_back(grid_index, value);
}

Surrogate::Posterior Surrogate::condition() const {
  if (observations_.empty()) return {prior_.mean, prior_.cov};
  const Eigen::Index k = static_cast<Eigen::Index>(observations_.size());
  const Eigen::Index g = prior_.grid.rows();
  MatrixXd k_oo(k, k);
  MatrixXd k_go(g, k);
  VectorXd resid(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto [ia, va] = observations_[static_cast<std::size_t>(a)];
    resid[a] = va - prior_.mean[ia];
    k_go.col(a) = prior_.cov.col(ia);
    for (Eigen::Index b = 0; b < k; ++b) {
      k_oo(a, b) = prior_.cov(observations_[static_cast<std::size_t>(a)].first,
                              observations_[static_cast<std::size_t>(b)].first);
    }
  }
  const SpdFactor factor(k_oo, obs_noise_, "K_obs (surrogate)");
  Posterior post;
  post.mean = prior_.mean + k_go * factor.solve(resid);
  post.cov = prior_.cov - k_go * factor.solve(MatrixXd(k_go.transpose()));
  post.cov = 0.5 * (post.cov + post.cov.transpose());
  return post;
}

BoTrace bo_run(const InterventionQuery& oracle, const GridGp& prior, const BoConfig& config,
               RngStream rng) {
  if (config.budget < 0) throw ParameterError("bo_run: budget must be nonnegative");
  Surrogate surrogate(prior, config.obs_noise);
  BoTrace trace;
  const bool maximize = config.direction == Direction::Maximize;

  for (int iter = 0; iter < config.budget; ++iter) {
    const auto start = std::chrono::steady_clock::now();
    const auto post = surrogate.condition();

    // Best posterior mean among queried points; before any query, the prior
    // mean optimum plays that role for the acquisition.
    double best;
    if (surrogate.observations().empty()) {
      best = maximize ? post.mean.maxCoeff() : post.mean.minCoeff();
    } else {
      best = maximize ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity();
      for (const auto& [idx, unused] : surrogate.observations()) {
        best = maximize ? std::max(best, post.mean[idx]) : std::min(best, post.mean[idx]);
      }
    }

    Eigen::Index arg = 0;
    double best_ei = -1.0;
    for (Eigen::Index i = 0; i < prior.grid.rows(); ++i) {
      const double std = std::sqrt(std::max(post.cov(i, i), 0.0));
      const double ei = expected_improvement(post.mean[i], std, best, config.direction);
      if (ei > best_ei) {  // strict: ties break to the lowest index
        best_ei = ei;
        arg = i;
      }
    }

    double observed;
    try {
      observed = oracle(prior.grid(arg, 0), rng);
    } catch (const Error&) {
      break;  // truncated trace; callers see fewer rows than budget
    }
    surrogate.observe(arg, observed);

    const auto post2 = surrogate.condition();
    double inc_value = maximize ? -std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::infinity();
    Eigen::Index inc_idx = arg;
    for (const auto& [idx, unused] : surrogate.observations()) {
      const double m = post2.mean[idx];
      if (maximize ? m > inc_value : m < inc_value) {
        inc_value = m;
        inc_idx = idx;
      }
    }

    BoIteration it;
    it.iter = iter;
    it.x = prior.grid(arg, 0);
    it.observed = observed;
    it.incumbent_x = prior.grid(inc_idx, 0);
    it.incumbent_value = inc_value;
    it.ei = best_ei;
    it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.push_back(it);
  }
  return trace;
}

TreatmentEffectModel sampling_baseline(const SamplingBaselineInputs& in, RngStream rng) {
  if (in.l_samples < 2 || in.r_samples < 2) {
    throw ParameterError("sampling_baseline: L and R must be at least 2");
  }
  const Eigen::Index g = in.x_grid.rows();
  struct State {
    MatrixXd grid;
    VectorXd means;
    VectorXd vars;
  };
  auto s = std::make_shared<State>();
  s->grid = in.x_grid;
  s->means.resize(g);
  s->vars.resize(g);

  const VectorXd m1 = in.stage1.posterior_mean(in.x_grid);
  const MatrixXd c1 = in.stage1.posterior_cov(in.x_grid, in.x_grid);

  for (Eigen::Index gi = 0; gi < g; ++gi) {
    // L mediator draws from the stage-1 predictive (epistemic + noise).
    const double spread = std::sqrt(std::max(c1(gi, gi), 0.0) + in.stage1.noise());
    MatrixXd y_samples(in.l_samples, 1);
    for (int l = 0; l < in.l_samples; ++l) y_samples(l, 0) = m1[gi] + spread * rng.normal();

    const VectorXd f_mean = in.stage2.posterior_mean(y_samples);
    const MatrixXd f_cov = in.stage2.posterior_cov(y_samples, y_samples);
    const MatrixXd sqrt_cov = sqrt_psd(f_cov);

    double sum = 0.0, sum_sq = 0.0;
    VectorXd z(in.l_samples);
    for (int r = 0; r < in.r_samples; ++r) {
      for (int l = 0; l < in.l_samples; ++l) z[l] = rng.normal();
      const VectorXd values = f_mean + sqrt_cov * z;
      sum += values.sum();
      sum_sq += values.squaredNorm();
    }
    const double n = static_cast<double>(in.l_samples) * in.r_samples;
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0);
    if (var <= 0.0 && in.stage2.size() == 0) {
      throw Error("sampling_baseline: degenerate posterior (no spread in samples)");
    }
    s->means[gi] = mean;
    s->vars[gi] = var;
  }

  auto nearest = [s](const VectorXd& x) {
    Eigen::Index best = 0;
    (s->grid.rowwise() - x.transpose()).rowwise().norm().minCoeff(&best);
    return best;
  };

  TreatmentEffectModel model;
  model.kind = FusionKind::Sampling;
  model.mean = [s, nearest](const VectorXd& x) { return s->means[nearest(x)]; };
  model.cov = [s, nearest](const VectorXd& x, const VectorXd& xp) {
    const Eigen::Index a = nearest(x), b = nearest(xp);
    return a == b ? s->vars[a] : 0.0;  // independent-x uncertainty
  };
  return model;
}

}  // namespace bayesimp
