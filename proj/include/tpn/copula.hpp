#pragma once

#include <optional>

#include "tpn/angles.hpp"
#include "tpn/gaussian.hpp"
#include "tpn/projected_normal.hpp"

namespace tpn {

/// Wrapped Cauchy location/concentration. lambda = 0 is the circular
/// uniform; lambda -> 1 concentrates at mu_star.
struct WrappedCauchyParams {
  WrappedCauchyParams(Angle mu_star_in, double lambda_in);
  Angle mu_star;
  double lambda;  // in [0, 1)
};

double wc_pdf(Angle theta, const WrappedCauchyParams& p);

/// CDF measured from mu_star along the circle: F(mu_star) = 0, F -> 1 just
/// before completing the loop.
double wc_cdf(Angle theta, const WrappedCauchyParams& p);

/// Inverse of wc_cdf on [0, 1); wc_quantile(0) = mu_star, wc_quantile(0.5)
/// is the antipode (sign(0) := +1 picks the positive arc).
Angle wc_quantile(double u, const WrappedCauchyParams& p);

/// Copula density on the hypertorus: the TPN with mu = 0, kappa = 0, whose
/// univariate margins are all circular-uniform.
std::optional<double> copula_logpdf(const Vector& theta, const Matrix& sigma,
                                    long budget, Rng& rng);

/// Closed-form bivariate copula density; continuous through tau = 0 via the
/// arcsin form of the angular integral. Requires |rho| < 1.
double copula_pdf_bivariate(Angle theta_j, Angle theta_k, Angle mu_j,
                            Angle mu_k, double rho);

/// Copula-based extension: uniform TPN margins pushed through wrapped
/// Cauchy quantiles. Marginal modes sit at 0 by construction (location is
/// absorbed into mu), so coordinate j has mode mu_j.
struct CtpnParams {
  CtpnParams(Vector mu_in, Vector lambda_in, Matrix sigma_in);

  [[nodiscard]] int dim() const { return static_cast<int>(mu.size()); }
  [[nodiscard]] WrappedCauchyParams marginal(int j) const;

  Vector mu;      // wrapped
  Vector lambda;  // each in [0, 1)
  Matrix sigma;   // correlation matrix, in D*
};

/// Draws U ~ TPN(0, 0, sigma), shifts into [0, 2pi), and maps coordinate j
/// through the wrapped Cauchy quantile: Theta_j = wrap(mu_j + Q_j(U_j/2pi)).
Matrix ctpn_sample(const CtpnParams& params, int n, Rng& rng);

/// d log(2pi) + copula_logpdf(2pi F_m(theta - mu)) + sum_j log f_mj.
std::optional<double> ctpn_logpdf(const Vector& theta, const CtpnParams& params,
                                  long budget, Rng& rng);

}  // namespace tpn
