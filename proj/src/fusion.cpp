#include "bayesimp/fusion.hpp"

#include <cmath>
#include <iostream>
#include <memory>
#include <vector>

namespace bayesimp {

const char* fusion_kind_name(FusionKind kind) {
  switch (kind) {
    case FusionKind::Imp: return "imp";
    case FusionKind::BayesIme: return "bayesime";
    case FusionKind::BayesImp: return "bayesimp";
    case FusionKind::Sampling: return "sampling";
  }
  return "unknown";
}

double TreatmentEffectModel::stddev(const VectorXd& x) const {
  return std::sqrt(std::max(cov(x, x), 0.0));
}

VectorXd TreatmentEffectModel::mean_on_grid(const MatrixXd& grid) const {
  VectorXd out(grid.rows());
  for (Eigen::Index i = 0; i < grid.rows(); ++i) out[i] = mean(grid.row(i).transpose());
  return out;
}

MatrixXd TreatmentEffectModel::cov_on_grid(const MatrixXd& grid) const {
  const Eigen::Index g = grid.rows();
  MatrixXd out(g, g);
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = cov(grid.row(i).transpose(), grid.row(j).transpose());
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

GaussianMoments inner_product_moments(const VectorXd& mx, const MatrixXd& sx,
                                      const VectorXd& my, const MatrixXd& sy) {
  const Eigen::Index n = mx.size();
  if (my.size() != n || sx.rows() != n || sx.cols() != n || sy.rows() != n ||
      sy.cols() != n) {
    throw DimensionError("inner_product_moments: dimension mismatch");
  }
  GaussianMoments out;
  out.mean = mx.dot(my);
  out.variance = mx.dot(sy * mx) + my.dot(sx * my) + sx.cwiseProduct(sy.transpose()).sum();
  return out;
}

double inner_product_cross_covariance(const VectorXd& mx, const MatrixXd& sx,
                                      const VectorXd& my1, const VectorXd& my2,
                                      const MatrixXd& sy1y2) {
  const Eigen::Index n = mx.size();
  if (my1.size() != n || my2.size() != n || sx.rows() != n || sy1y2.rows() != n) {
    throw DimensionError("inner_product_cross_covariance: dimension mismatch");
  }
  return mx.dot(sy1y2 * mx) + my1.dot(sx * my2) + sx.cwiseProduct(sy1y2.transpose()).sum();
}

MatrixXd dedup_landmarks(const MatrixXd& points, double tol) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    bool duplicate = false;
    for (Eigen::Index k : keep) {
      if ((points.row(i) - points.row(k)).norm() <= tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) keep.push_back(i);
  }
  if (keep.empty()) throw ParameterError("dedup_landmarks: empty landmark set");
  MatrixXd out(static_cast<Eigen::Index>(keep.size()), points.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = points.row(keep[r]);
  return out;
}

MatrixXd farthest_point_subsample(const MatrixXd& points, int cap) {
  const Eigen::Index n = points.rows();
  if (cap <= 0 || n <= cap) return points;
  std::vector<Eigen::Index> chosen = {0};
  VectorXd dist = (points.rowwise() - points.row(0)).rowwise().norm();
  while (static_cast<int>(chosen.size()) < cap) {
    Eigen::Index best = 0;
    dist.maxCoeff(&best);
    chosen.push_back(best);
    const VectorXd d = (points.rowwise() - points.row(best)).rowwise().norm();
    dist = dist.cwiseMin(d);
  }
  std::sort(chosen.begin(), chosen.end());
  MatrixXd out(static_cast<Eigen::Index>(chosen.size()), points.cols());
  for (std::size_t r = 0; r < chosen.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = points.row(chosen[r]);
  return out;
}

FiniteGp finite_approx(const GpModel& source, const Kernel& expansion_kernel,
                       const MatrixXd& landmarks) {
  const MatrixXd xi = dedup_landmarks(landmarks);
  FiniteGp out;
  out.landmarks = xi;
  out.k_landmarks = gram(expansion_kernel, xi).matrix;
  const PsdSolver solver(out.k_landmarks, 0.0, "K_landmarks");
  out.coef_mean = solver.solve(source.posterior_mean(xi));
  const MatrixXd cov = source.posterior_cov(xi, xi);
  out.coef_cov = solver.solve(MatrixXd(solver.solve(cov).transpose()));
  out.coef_cov = 0.5 * (out.coef_cov + out.coef_cov.transpose());
  return out;
}

VectorXd sample_coefficients(const FiniteGp& f, const MatrixXd& coef_cov_sqrt,
                             RngStream& rng) {
  VectorXd z(f.coef_mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return f.coef_mean + coef_cov_sqrt * z;
}

// ---------------------------------------------------------------------------
// IMP
// ---------------------------------------------------------------------------

TreatmentEffectModel imp_build(const FusionInputs& in) {
  const RbfKernel f_kernel =
      in.kernel_y.with_signal_variance(in.kernel_y.signal_variance() * in.f_signal_variance);
  const GpModel f(in.y_tilde, in.t, Kernel(f_kernel), in.lambda_f);

  struct State {
    OmegaFeatures omega;
    VectorXd mean_at_y;   // m_f evaluated at the D1 mediators
    MatrixXd kbar_yy;     // f posterior covariance at the D1 mediators
  };
  auto s = std::make_shared<State>();
  s->omega = in.omega;
  s->mean_at_y = f.posterior_mean(in.y);
  s->kbar_yy = f.posterior_cov(in.y, in.y);

  TreatmentEffectModel model;
  model.kind = FusionKind::Imp;
  model.mean = [s](const VectorXd& x) { return s->omega.weights(x).dot(s->mean_at_y); };
  model.cov = [s](const VectorXd& x, const VectorXd& xp) {
    return s->omega.weights(x).dot(s->kbar_yy * s->omega.weights(xp));
  };
  return model;
}

// ---------------------------------------------------------------------------
// BayesIME
// ---------------------------------------------------------------------------

namespace {

TreatmentEffectModel bayesime_from_coeffs(const FusionInputs& in, const MatrixXd& f_points,
                                          const VectorXd& f_coeffs) {
  struct State {
    OmegaFeatures omega;
    VectorXd mean_core;  // K_yy R_yy^{-1} R_{y,f} coeffs
    double b = 0.0;      // coeffs' R_ff coeffs
    double c = 0.0;      // coeffs' R_fy R_yy^{-1} R_yf coeffs
  };
  auto s = std::make_shared<State>();
  s->omega = in.omega;

  const Kernel r(in.kernel_r);
  const MatrixXd r_yy = gram(r, in.y).matrix;
  const MatrixXd r_yf = cross_gram(r, in.y, f_points);
  const MatrixXd r_ff = gram(r, f_points).matrix;
  const PsdSolver r_solver(r_yy, in.r_ridge, "R_yy");
  const MatrixXd k_yy = gram(Kernel(in.kernel_y), in.y).matrix;

  s->mean_core = k_yy * r_solver.solve(MatrixXd(r_yf * f_coeffs)).col(0);
  s->b = f_coeffs.dot(r_ff * f_coeffs);
  // c computed through the Schur complement so b - c >= 0 survives the
  // ill-conditioned R_yy solve.
  const MatrixXd schur = r_ff - r_yf.transpose() * r_solver.solve(r_yf);
  const double b_minus_c = std::max(f_coeffs.dot(0.5 * (schur + schur.transpose()) * f_coeffs), 0.0);
  s->c = s->b - b_minus_c;
  if (s->c < -1e-8 * std::abs(s->b) || s->c > s->b * (1.0 + 1e-8)) {
    std::cerr << "bayesime: diagnostic B >= C >= 0 violated (B=" << s->b << ", C=" << s->c
              << ")\n";
  }

  TreatmentEffectModel model;
  model.kind = FusionKind::BayesIme;
  model.mean = [s](const VectorXd& x) { return s->omega.weights(x).dot(s->mean_core); };
  model.cov = [s](const VectorXd& x, const VectorXd& xp) {
    const double f_dot = s->omega.prior_dot(x, xp);
    const double g_dot = s->omega.phi(x).dot(s->omega.weights(xp));
    return s->b * f_dot - s->c * g_dot;
  };
  return model;
}

}  // namespace

TreatmentEffectModel bayesime_build(const FusionInputs& in) {
  const MatrixXd k_tt = gram(Kernel(in.kernel_y), in.y_tilde).matrix;
  const VectorXd coeffs = SpdFactor(k_tt, in.lambda_f, "K_tilde (bayesime KRR)").solve(in.t);
  return bayesime_from_coeffs(in, in.y_tilde, coeffs);
}

TreatmentEffectModel bayesime_build_with_f(const FusionInputs& in, const MatrixXd& f_points,
                                           const VectorXd& f_coeffs) {
  return bayesime_from_coeffs(in, f_points, f_coeffs);
}

// ---------------------------------------------------------------------------
// BayesIMP
// ---------------------------------------------------------------------------

namespace {

struct BayesImpCore {
  OmegaFeatures omega;
  MatrixXd landmarks;
  // D2 term: w(x)' T w(x') with T = Theta1' Rbar Theta1.
  MatrixXd t_core;
  // Mean: m3(x) = mean_core . w(x).
  VectorXd mean_core;
  // D1 and interaction terms: theta * prior_dot - theta_b * phi' W phi'.
  double th2a = 0.0, th2b = 0.0, th3a = 0.0, th3b = 0.0;
};

std::shared_ptr<BayesImpCore> bayesimp_core(const FusionInputs& in,
                                            const BayesImpOptions& opts) {
  auto core = std::make_shared<BayesImpCore>();
  core->omega = in.omega;

  MatrixXd landmarks(in.y.rows() + in.y_tilde.rows(), in.y.cols());
  landmarks << in.y, in.y_tilde;
  landmarks = dedup_landmarks(landmarks, opts.dedup_tol);
  landmarks = farthest_point_subsample(landmarks, opts.landmark_cap);
  core->landmarks = landmarks;

  const Kernel ky(in.kernel_y);
  const Kernel r(in.kernel_r);
  const double s2f = in.f_signal_variance;

  const MatrixXd k_hat = gram(ky, landmarks).matrix;
  const PsdSolver k_solver(k_hat, 0.0, "K_landmarks");
  const MatrixXd k_yy = gram(ky, in.y).matrix;
  const MatrixXd r_yy = gram(r, in.y).matrix;
  const PsdSolver r_solver(r_yy, in.r_ridge, "R_yy");

  const MatrixXd r_hh = gram(r, landmarks).matrix;           // unit scale
  const MatrixXd r_ht = cross_gram(r, landmarks, in.y_tilde);
  const MatrixXd r_hy = cross_gram(r, landmarks, in.y);
  const MatrixXd r_tt = gram(r, in.y_tilde).matrix;

  // f-side: prior s2f * r, noise lambda_f.
  MatrixXd r_tt_l = s2f * r_tt;
  r_tt_l.diagonal().array() += in.lambda_f;
  const SpdFactor f_solver(MatrixXd(r_tt_l), 0.0, "R_tilde + lambda_f (bayesimp f)");
  const VectorXd f_coef = k_solver.solve(VectorXd(s2f * (r_ht * f_solver.solve(in.t))));
  MatrixXd r_bar = s2f * r_hh - (s2f * r_ht) * f_solver.solve(MatrixXd(s2f * r_ht.transpose()));
  r_bar = 0.5 * (r_bar + r_bar.transpose());

  // Embedding side (unit scale).
  const MatrixXd r_yy_inv_r_yh = r_solver.solve(MatrixXd(r_hy.transpose()));
  const MatrixXd theta1 = k_solver.solve(MatrixXd(r_yy_inv_r_yh.transpose() * k_yy));
  core->t_core = theta1.transpose() * r_bar * theta1;
  core->t_core = 0.5 * (core->t_core + core->t_core.transpose());

  if (!opts.printed_form) {
    core->mean_core = k_yy * (r_yy_inv_r_yh * f_coef);
  } else {
    // As printed: E_x K_{y,hat} K_hat^{-1} R_{hat,tilde} (R_tilde + lambda_f)^{-1} t.
    const MatrixXd k_yh = cross_gram(ky, in.y, landmarks);
    core->mean_core = k_yh * k_solver.solve(VectorXd(s2f * (r_ht * f_solver.solve(in.t))));
  }

  const MatrixXd q = r_hy * r_yy_inv_r_yh;  // R_hy R_yy^{-1} R_yh, unit scale
  VectorXd th_coef = f_coef;
  if (opts.printed_form) {
    // Theta4 as printed: K_hat^{-1} R_{hat,tilde} (K_tilde + lambda_f)^{-1} t.
    const MatrixXd k_tt = gram(ky, in.y_tilde).matrix;
    th_coef = k_solver.solve(
        VectorXd(s2f * (r_ht * SpdFactor(k_tt, in.lambda_f, "K_tilde").solve(in.t))));
  }
  core->th2a = th_coef.dot(r_hh * th_coef);
  {
    // Schur-stable th2b so th2a - th2b >= 0 is preserved numerically.
    const MatrixXd schur = r_hh - q;
    const double gap =
        std::max(th_coef.dot(0.5 * (schur + schur.transpose()) * th_coef), 0.0);
    core->th2b = core->th2a - gap;
  }
  const MatrixXd kinv_rbar_kinv =
      k_solver.solve(MatrixXd(k_solver.solve(r_bar).transpose()));
  core->th3a = kinv_rbar_kinv.cwiseProduct(r_hh).sum();
  core->th3b = std::max(core->th3a - kinv_rbar_kinv.cwiseProduct(r_hh - q).sum(), 0.0);
  // Mild negative traces only reflect roundoff in the rank-deficient solves.
  core->th3a = std::max(core->th3a, 0.0);
  core->th3b = std::min(core->th3b, core->th3a);
  return core;
}

}  // namespace

TreatmentEffectModel bayesimp_build(const FusionInputs& in, const BayesImpOptions& opts) {
  auto core = bayesimp_core(in, opts);

  auto d2_term = [core](const VectorXd& x, const VectorXd& xp) {
    return core->omega.weights(x).dot(core->t_core * core->omega.weights(xp));
  };
  auto d1_term = [core](const VectorXd& x, const VectorXd& xp) {
    return core->th2a * core->omega.prior_dot(x, xp) -
           core->th2b * core->omega.phi(x).dot(core->omega.weights(xp));
  };
  auto interaction_term = [core](const VectorXd& x, const VectorXd& xp) {
    return core->th3a * core->omega.prior_dot(x, xp) -
           core->th3b * core->omega.phi(x).dot(core->omega.weights(xp));
  };

  TreatmentEffectModel model;
  model.kind = FusionKind::BayesImp;
  model.mean = [core](const VectorXd& x) {
    return core->mean_core.dot(core->omega.weights(x));
  };
  model.cov = [d1_term, d2_term, interaction_term](const VectorXd& x, const VectorXd& xp) {
    return d1_term(x, xp) + d2_term(x, xp) + interaction_term(x, xp);
  };
  model.cov_terms["d1"] = d1_term;
  model.cov_terms["d2"] = d2_term;
  model.cov_terms["interaction"] = interaction_term;
  return model;
}

BayesImpFiniteParts bayesimp_finite_parts(const FusionInputs& in, const VectorXd& x,
                                          const BayesImpOptions& opts) {
  MatrixXd landmarks(in.y.rows() + in.y_tilde.rows(), in.y.cols());
  landmarks << in.y, in.y_tilde;
  landmarks = dedup_landmarks(landmarks, opts.dedup_tol);
  landmarks = farthest_point_subsample(landmarks, opts.landmark_cap);

  const RbfKernel f_kernel = in.kernel_y;  // expansion kernel: unit k_y
  BayesImpFiniteParts parts;
  parts.k_landmarks = gram(Kernel(f_kernel), landmarks).matrix;
  const PsdSolver k_solver(parts.k_landmarks, 0.0, "K_landmarks");

  // f ~ GP(0, s2f r) posterior, collapsed onto the landmarks.
  {
    NuclearDominantKernel prior(
        in.kernel_r.base().with_signal_variance(in.kernel_r.base().signal_variance() *
                                                std::sqrt(in.f_signal_variance)),
        in.kernel_r.measure_width());
    const GpModel f(in.y_tilde, in.t, Kernel(prior), in.lambda_f);
    parts.f.landmarks = landmarks;
    parts.f.k_landmarks = parts.k_landmarks;
    parts.f.coef_mean = k_solver.solve(f.posterior_mean(landmarks));
    MatrixXd cov = f.posterior_cov(landmarks, landmarks);
    parts.f.coef_cov = k_solver.solve(MatrixXd(k_solver.solve(cov).transpose()));
    parts.f.coef_cov = 0.5 * (parts.f.coef_cov + parts.f.coef_cov.transpose());
  }

  // mu(x, .) posterior, collapsed onto the landmarks.
  {
    const Kernel r(in.kernel_r);
    const MatrixXd r_yy = gram(r, in.y).matrix;
    const PsdSolver r_solver(r_yy, in.r_ridge, "R_yy");
    const MatrixXd r_hy = cross_gram(r, landmarks, in.y);
    const MatrixXd r_hh = gram(r, landmarks).matrix;
    const MatrixXd k_yy = gram(Kernel(in.kernel_y), in.y).matrix;

    const VectorXd w = in.omega.weights(x);
    const VectorXd mu_at_landmarks = r_hy * r_solver.solve(VectorXd(k_yy * w));
    parts.mu_coef_mean = k_solver.solve(mu_at_landmarks);

    const double f_dot = in.omega.prior_dot(x, x);
    const double g_dot = in.omega.phi(x).dot(w);
    MatrixXd k_mu = f_dot * r_hh - g_dot * (r_hy * r_solver.solve(MatrixXd(r_hy.transpose())));
    k_mu = 0.5 * (k_mu + k_mu.transpose());
    parts.mu_coef_cov = k_solver.solve(MatrixXd(k_solver.solve(k_mu).transpose()));
    parts.mu_coef_cov = 0.5 * (parts.mu_coef_cov + parts.mu_coef_cov.transpose());
  }
  return parts;
}

GridGp moment_match_to_gp(const TreatmentEffectModel& model, const MatrixXd& grid) {
  if (grid.rows() == 0) throw ParameterError("moment_match_to_gp: empty grid");
  GridGp out;
  out.grid = grid;
  out.mean = model.mean_on_grid(grid);
  out.cov = project_psd(model.cov_on_grid(grid));
  return out;
}

}  // namespace bayesimp
