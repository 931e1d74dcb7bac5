#pragma once

#include <functional>
#include <map>
#include <string>

#include "bayesimp/bayescme.hpp"
#include "bayesimp/embeddings.hpp"
#include "bayesimp/gp.hpp"
#include "bayesimp/rng.hpp"

namespace bayesimp {

enum class FusionKind { Imp, BayesIme, BayesImp, Sampling };
const char* fusion_kind_name(FusionKind kind);

// A treatment-effect surrogate: mean m(x) and covariance kappa(x, x') over the
// treatment variable. Evaluation is pure; models are safe to share across
// threads once built.
struct TreatmentEffectModel {
  FusionKind kind = FusionKind::Imp;
  std::function<double(const VectorXd&)> mean;
  std::function<double(const VectorXd&, const VectorXd&)> cov;
  // BayesIMP exposes its three covariance pieces ("d1", "d2", "interaction").
  std::map<std::string, std::function<double(const VectorXd&, const VectorXd&)>> cov_terms;

  double variance(const VectorXd& x) const { return cov(x, x); }
  double stddev(const VectorXd& x) const;
  VectorXd mean_on_grid(const MatrixXd& grid) const;
  MatrixXd cov_on_grid(const MatrixXd& grid) const;
};

// First two moments of the inner product of independent Gaussian vectors:
//   E[X'Y]   = mx'my
//   Var[X'Y] = mx' Sy mx + my' Sx my + tr(Sy Sx)
struct GaussianMoments {
  double mean = 0.0;
  double variance = 0.0;
};
GaussianMoments inner_product_moments(const VectorXd& mx, const MatrixXd& sx,
                                      const VectorXd& my, const MatrixXd& sy);
// cov(X'Y1, X'Y2) = mx' S_{y1y2} mx + my1' Sx my2 + tr(Sx S_{y1y2})
double inner_product_cross_covariance(const VectorXd& mx, const MatrixXd& sx,
                                      const VectorXd& my1, const VectorXd& my2,
                                      const MatrixXd& sy1y2);

// Finite-dimensional surrogate f~ = sum_j a_j k(., xi_j) whose evaluations at
// the landmarks reproduce the source GP's mean and covariance there:
//   a ~ N(K^{-1} m(xi), K^{-1} Kappa(xi,xi) K^{-1}).
struct FiniteGp {
  MatrixXd landmarks;
  VectorXd coef_mean;
  MatrixXd coef_cov;
  MatrixXd k_landmarks;
};

MatrixXd dedup_landmarks(const MatrixXd& points, double tol = 1e-9);
// Deterministic farthest-point subsample down to `cap` rows (keeps row 0).
MatrixXd farthest_point_subsample(const MatrixXd& points, int cap);

FiniteGp finite_approx(const GpModel& source, const Kernel& expansion_kernel,
                       const MatrixXd& landmarks);
// Draw one coefficient vector a ~ N(coef_mean, coef_cov).
VectorXd sample_coefficients(const FiniteGp& f, const MatrixXd& coef_cov_sqrt,
                             RngStream& rng);

// Shared ingredients of the three fusion surrogates. kernel_y / kernel_r carry
// unit signal variance (they define the one H_{k_y} geometry both stages
// share); the f-side prior may be scaled by f_signal_variance.
struct FusionInputs {
  OmegaFeatures omega;             // fitted stage-1 features over D1
  MatrixXd y;                      // D1 mediator values (N x 1)
  MatrixXd y_tilde;                // D2 mediator values (M x 1)
  VectorXd t;                      // D2 targets (M)
  RbfKernel kernel_y;
  NuclearDominantKernel kernel_r;
  double lambda_f = 0.1;
  double f_signal_variance = 1.0;
  double r_ridge = 0.0;            // ridge for R_yy solves (default none)
};

// f as GP(0, sigma_f^2 k_y) on D2; stage-1 uncertainty ignored.
//   m1(x) = w(x)' m_f(y),  kappa1(x,x') = w(x)' Kbar_yy w(x')
TreatmentEffectModel imp_build(const FusionInputs& in);

// f as KRR on D2, embedding as causal BayesCME on D1.
TreatmentEffectModel bayesime_build(const FusionInputs& in);
// Same covariance structure with an externally fixed RKHS function
// f = sum_j coeffs_j k_y(., points_j). Used by the BayesIMP collapse check.
TreatmentEffectModel bayesime_build_with_f(const FusionInputs& in, const MatrixXd& f_points,
                                           const VectorXd& f_coeffs);

struct BayesImpOptions {
  int landmark_cap = 300;
  double dedup_tol = 1e-9;
  // Evaluate the closed forms as printed instead of the self-consistent
  // finite-dimensional recipe (comparison/diagnostic only).
  bool printed_form = false;
};

// Both stages Bayesian: f ~ GP(0, sigma_f^2 r_y) on D2, embedding ~ causal
// BayesCME on D1; first two moments of <f~, mu~> via the finite-dimensional
// approximation at landmarks dedup(concat(y, y_tilde)).
TreatmentEffectModel bayesimp_build(const FusionInputs& in, const BayesImpOptions& opts = {});

// Internals exposed for the Monte-Carlo validation of kappa3: the two finite
// GPs whose inner product BayesIMP summarizes, at a fixed treatment x.
struct BayesImpFiniteParts {
  FiniteGp f;                 // landmark surrogate of f
  VectorXd mu_coef_mean;      // landmark surrogate of mu(x, .)
  MatrixXd mu_coef_cov;
  MatrixXd k_landmarks;
};
BayesImpFiniteParts bayesimp_finite_parts(const FusionInputs& in, const VectorXd& x,
                                          const BayesImpOptions& opts = {});

// Moment-matched GP prior on a fixed treatment grid (negative eigenvalues of
// the evaluated covariance clipped at zero).
struct GridGp {
  MatrixXd grid;   // G x d treatment points
  VectorXd mean;   // length G
  MatrixXd cov;    // G x G, PSD
};
GridGp moment_match_to_gp(const TreatmentEffectModel& model, const MatrixXd& grid);

}  // namespace bayesimp
