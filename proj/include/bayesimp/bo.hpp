#pragma once

#include <functional>
#include <vector>

#include "bayesimp/fusion.hpp"
#include "bayesimp/rng.hpp"

namespace bayesimp {

enum class Direction { Maximize, Minimize };

double normal_cdf(double z);
double normal_pdf(double z);
// Central interval half-width multiplier for a given two-sided mass p.
double normal_central_quantile(double mass);

// Expected improvement of N(mean, std^2) over `best`. std == 0 degenerates to
// max(improvement, 0).
double expected_improvement(double mean, double std, double best, Direction direction);

// Warm-started grid surrogate: a GridGp prior conditioned on interventional
// observations (x_k, T_k) with observation noise obs_noise.
class Surrogate {
 public:
  Surrogate(GridGp prior, double obs_noise);

  // Observation at a grid index (bo_run always queries grid points).
  void observe(Eigen::Index grid_index, double value);

  struct Posterior {
    VectorXd mean;
    MatrixXd cov;
  };
  // Exact Gaussian conditioning; zero observations returns the prior.
  Posterior condition() const;

  const GridGp& prior() const { return prior_; }
  double obs_noise() const { return obs_noise_; }
  const std::vector<std::pair<Eigen::Index, double>>& observations() const {
    return observations_;
  }

 private:
  GridGp prior_;
  double obs_noise_ = 0.0;
  std::vector<std::pair<Eigen::Index, double>> observations_;
};

struct BoIteration {
  int iter = 0;
  double x = 0.0;
  double observed = 0.0;
  double incumbent_x = 0.0;
  double incumbent_value = 0.0;  // best posterior mean among queried points
  double ei = 0.0;
  double seconds = 0.0;  // wall clock; never serialized into result CSVs
};
using BoTrace = std::vector<BoIteration>;

// One intervention experiment: returns a (noisy) estimate of E[T|do(X)=x].
using InterventionQuery = std::function<double(double x, RngStream& rng)>;

struct BoConfig {
  int budget = 30;
  Direction direction = Direction::Maximize;
  double obs_noise = 1e-4;
};

// EI loop on the surrogate grid. Ties in the acquisition argmax break toward
// the lowest grid index; queries repeat grid points only if EI says so.
// Deterministic given (prior, config, rng state).
BoTrace bo_run(const InterventionQuery& oracle, const GridGp& prior, const BoConfig& config,
               RngStream rng);

// CBO-style sampling estimator of E[T|do(X)=x] and its uncertainty: L mediator
// samples from the stage-1 GP's predictive at x (noise included), R function
// draws from the stage-2 GP evaluated there; empirical mean/stddev of the L*R
// values. Returned as a TreatmentEffectModel with diagonal covariance on the
// grid (nearest-grid-point semantics off the grid).
struct SamplingBaselineInputs {
  GpModel stage1;      // treatment -> mediator
  GpModel stage2;      // mediator -> target (f)
  MatrixXd x_grid;     // G x 1
  int l_samples = 100;
  int r_samples = 100;
};
TreatmentEffectModel sampling_baseline(const SamplingBaselineInputs& in, RngStream rng);

}  // namespace bayesimp
