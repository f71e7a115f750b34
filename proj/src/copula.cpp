#include "tpn/copula.hpp"

#include <cmath>
#include <stdexcept>

namespace tpn {

namespace {

double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

}  // namespace

WrappedCauchyParams::WrappedCauchyParams(Angle mu_star_in, double lambda_in)
    : mu_star(mu_star_in), lambda(lambda_in) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("WrappedCauchyParams: lambda must lie in [0, 1)");
  }
}

double wc_pdf(Angle theta, const WrappedCauchyParams& p) {
  const double a = wrap(theta.rad() - p.mu_star.rad()).rad();
  const double l = p.lambda;
  return (1.0 - l * l) /
         (kTwoPi * (1.0 + l * l - 2.0 * l * std::cos(a)));
}

double wc_cdf(Angle theta, const WrappedCauchyParams& p) {
  const double a = wrap(theta.rad() - p.mu_star.rad()).rad();
  const double l = p.lambda;
  const double ca = std::cos(a);
  const double g =
      clamp_unit(((1.0 + l * l) * ca - 2.0 * l) / (1.0 + l * l - 2.0 * l * ca));
  // a in [0, pi) covers the first half-loop from the mode, a in [-pi, 0) the
  // return half; together F spans [0, 1).
  if (a >= 0.0) return std::acos(g) / kTwoPi;
  return 1.0 - std::acos(g) / kTwoPi;
}

Angle wc_quantile(double u, const WrappedCauchyParams& p) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::invalid_argument("wc_quantile: u must lie in [0, 1)");
  }
  const double l = p.lambda;
  const double c2u = std::cos(kTwoPi * u);
  const double g = clamp_unit((2.0 * l + (1.0 + l * l) * c2u) /
                              (1.0 + l * l + 2.0 * l * c2u));
  const double sgn = (0.5 - u) >= 0.0 ? 1.0 : -1.0;
  return wrap(p.mu_star.rad() + sgn * std::acos(g));
}

std::optional<double> copula_logpdf(const Vector& theta, const Matrix& sigma,
                                    long budget, Rng& rng) {
  const Eigen::Index d = sigma.rows();
  const TpnParams params(Vector::Zero(d), Vector::Zero(d), sigma);
  return tpn_logpdf(theta, params, budget, rng);
}

double copula_pdf_bivariate(Angle theta_j, Angle theta_k, Angle mu_j,
                            Angle mu_k, double rho) {
  const double tau = bivariate_tau(theta_j, theta_k, mu_j, mu_k, rho);
  const double q2 = 1.0 - tau * tau;
  const double q = std::sqrt(q2);
  // Angular integral in its arcsin form, exact for every tau in (-1, 1):
  // q + tau*(asin(tau) - pi/2); equals 1 at tau = 0.
  const double braces = q + tau * (std::asin(tau) - 0.5 * kPi);
  constexpr double inv_4pi2 = 1.0 / (4.0 * kPi * kPi);
  return inv_4pi2 * (1.0 - rho * rho) / (q2 * q) * braces;
}

CtpnParams::CtpnParams(Vector mu_in, Vector lambda_in, Matrix sigma_in)
    : mu(std::move(mu_in)), lambda(std::move(lambda_in)), sigma(std::move(sigma_in)) {
  const Eigen::Index d = mu.size();
  if (d < 1 || lambda.size() != d || sigma.rows() != d || sigma.cols() != d) {
    throw std::invalid_argument("CtpnParams: dimension mismatch");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(lambda[j] >= 0.0 && lambda[j] < 1.0)) {
      throw std::invalid_argument("CtpnParams: lambda must lie in [0, 1)");
    }
    mu[j] = wrap(mu[j]).rad();
  }
  check_correlation(sigma);
  if (!is_positive_definite(abs_transform(sigma))) {
    throw std::invalid_argument(
        "CtpnParams: abs transform of sigma is not positive definite");
  }
}

WrappedCauchyParams CtpnParams::marginal(int j) const {
  return WrappedCauchyParams(Angle{}, lambda[j]);
}

Matrix ctpn_sample(const CtpnParams& params, int n, Rng& rng) {
  const int d = params.dim();
  const TpnParams uniform(Vector::Zero(d), Vector::Zero(d), params.sigma);
  const Matrix u = tpn_sample(uniform, n, rng).angles;
  Matrix out(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      double shifted = u(i, j);
      if (shifted < 0.0) shifted += kTwoPi;
      const Angle q = wc_quantile(shifted / kTwoPi, params.marginal(j));
      out(i, j) = wrap(params.mu[j] + q.rad()).rad();
    }
  }
  return out;
}

std::optional<double> ctpn_logpdf(const Vector& theta, const CtpnParams& params,
                                  long budget, Rng& rng) {
  const int d = params.dim();
  if (theta.size() != d) {
    throw std::invalid_argument("ctpn_logpdf: dimension mismatch");
  }
  Vector star(d);
  double marg = 0.0;
  for (int j = 0; j < d; ++j) {
    const Angle tb = wrap(theta[j] - params.mu[j]);
    const auto m = params.marginal(j);
    star[j] = wrap(kTwoPi * wc_cdf(tb, m)).rad();
    marg += std::log(wc_pdf(tb, m));
  }
  const auto cop = copula_logpdf(star, params.sigma, budget, rng);
  if (!cop) return std::nullopt;
  return d * std::log(kTwoPi) + *cop + marg;
}

}  // namespace tpn
