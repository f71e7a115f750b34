#pragma once

#include <optional>

#include "tpn/angles.hpp"
#include "tpn/gaussian.hpp"

namespace tpn {

/// Parameters of the toroidal projected normal: per-coordinate mean
/// directions mu, concentrations kappa >= 0, and a correlation matrix sigma
/// whose entrywise absolute value must also be positive definite (the
/// cosine-part latents use that transform as their covariance).
struct TpnParams {
  TpnParams(Vector mu_in, Vector kappa_in, Matrix sigma_in);

  [[nodiscard]] int dim() const { return static_cast<int>(mu.size()); }

  Vector mu;       // wrapped to [-pi, pi)
  Vector kappa;    // >= 0
  Matrix sigma;    // correlation matrix, in D*
  Matrix sigma_c;  // abs_transform(sigma)
};

struct TpnDraws {
  Matrix angles;  // n x d, wrapped
  Matrix radii;   // n x d, positive
};

/// Exact sampling by projecting X_c ~ N(kappa, sigma_c), X_s ~ N(0, sigma):
/// Theta_j = wrap(mu_j + mod_atan(X_sj, X_cj)), R_j = hypot(X_cj, X_sj).
TpnDraws tpn_sample(const TpnParams& params, int n, Rng& rng);

/// Closed-form univariate marginal density. Requires kappa >= 0.
double univariate_pdf(Angle theta, Angle mu, double kappa);

/// The angle-dependent coupling -|rho| cos(tb_j - sign(rho) tb_k) with
/// tb = theta - mu wrapped and sign(0) := +1. Requires |rho| < 1.
double bivariate_tau(Angle theta_j, Angle theta_k, Angle mu_j, Angle mu_k,
                     double rho);

/// Conditional-Gaussian pieces of the density at theta: V is the inverse of
/// T_c sigma_c^{-1} T_c + T_s sigma^{-1} T_s, eta = V T_c sigma_c^{-1} kappa,
/// and const_term the exponential constant -1/2 k'(I - sigma_c^{-1} T_c V T_c)
/// sigma_c^{-1} k. Returns nullopt when the T-combination is numerically
/// singular (condition number above 1e12); MCMC callers treat that as a
/// rejected proposal point.
struct VParts {
  Matrix V;
  Vector eta;
  double const_term;
  double log_det_V;
};
std::optional<VParts> build_V(const Vector& theta, const TpnParams& params);

/// Joint log-density of (R, Theta) = Gaussian log-densities of x_c(r, theta)
/// and x_s(r, theta) plus sum log r_j. Throws on non-positive radii.
double joint_latent_logpdf(const Vector& r, const Vector& theta,
                           const TpnParams& params);

/// Marginal log-density of Theta. Deterministic at d <= 2; Monte Carlo with
/// the stated budget at d >= 3 (the rng makes evaluations reproducible).
/// nullopt signals an unevaluable point (V singular or orthant underflow).
std::optional<double> tpn_logpdf(const Vector& theta, const TpnParams& params,
                                 long budget, Rng& rng);

}  // namespace tpn
