#include "tpn/projected_normal.hpp"

#include <cmath>
#include <stdexcept>

#include "tpn/normal.hpp"

namespace tpn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kMaxCondition = 1e12;

Vector centered(const Vector& theta, const Vector& mu) {
  Vector tb(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    tb[j] = wrap(theta[j] - mu[j]).rad();
  }
  return tb;
}

Matrix spd_inverse(const Matrix& m) {
  return m.llt().solve(Matrix::Identity(m.rows(), m.cols()));
}

}  // namespace

TpnParams::TpnParams(Vector mu_in, Vector kappa_in, Matrix sigma_in)
    : mu(std::move(mu_in)), kappa(std::move(kappa_in)), sigma(std::move(sigma_in)) {
  const Eigen::Index d = mu.size();
  if (d < 1 || kappa.size() != d || sigma.rows() != d || sigma.cols() != d) {
    throw std::invalid_argument("TpnParams: dimension mismatch");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(kappa[j] >= 0.0)) {
      throw std::invalid_argument("TpnParams: kappa must be non-negative");
    }
    mu[j] = wrap(mu[j]).rad();
  }
  check_correlation(sigma);
  sigma_c = abs_transform(sigma);
  if (!is_positive_definite(sigma_c)) {
    throw std::invalid_argument(
        "TpnParams: abs transform of sigma is not positive definite");
  }
}

TpnDraws tpn_sample(const TpnParams& params, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("tpn_sample: n must be positive");
  const int d = params.dim();
  const Matrix Lc = params.sigma_c.llt().matrixL();
  const Matrix Ls = params.sigma.llt().matrixL();
  TpnDraws out;
  out.angles.resize(n, d);
  out.radii.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const Vector xc = mvn_sample_chol(params.kappa, Lc, rng);
    const Vector xs = mvn_sample_chol(Vector::Zero(d), Ls, rng);
    for (int j = 0; j < d; ++j) {
      out.angles(i, j) =
          wrap(params.mu[j] + mod_atan(xs[j], xc[j]).rad()).rad();
      out.radii(i, j) = std::hypot(xc[j], xs[j]);
    }
  }
  return out;
}

double univariate_pdf(Angle theta, Angle mu, double kappa) {
  if (!(kappa >= 0.0)) {
    throw std::invalid_argument("univariate_pdf: kappa must be non-negative");
  }
  const double tb = wrap(theta.rad() - mu.rad()).rad();
  const double c = std::cos(tb);
  const double s = std::sin(tb);
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return norm_pdf(kappa) * inv_sqrt_2pi +
         kappa * c * norm_pdf(kappa * s) * norm_cdf(kappa * c);
}

double bivariate_tau(Angle theta_j, Angle theta_k, Angle mu_j, Angle mu_k,
                     double rho) {
  if (!(std::fabs(rho) < 1.0)) {
    throw std::invalid_argument("bivariate_tau: |rho| must be below 1");
  }
  const double sgn = rho >= 0.0 ? 1.0 : -1.0;
  const double tbj = wrap(theta_j.rad() - mu_j.rad()).rad();
  const double tbk = wrap(theta_k.rad() - mu_k.rad()).rad();
  return -std::fabs(rho) * std::cos(tbj - sgn * tbk);
}

std::optional<VParts> build_V(const Vector& theta, const TpnParams& params) {
  const Eigen::Index d = params.mu.size();
  if (theta.size() != d) {
    throw std::invalid_argument("build_V: dimension mismatch");
  }
  const Vector tb = centered(theta, params.mu);
  const Matrix prec_c = spd_inverse(params.sigma_c);
  const Matrix prec_s = spd_inverse(params.sigma);
  const Vector tc = tb.array().cos();
  const Vector ts = tb.array().sin();

  // W = T_c prec_c T_c + T_s prec_s T_s; V = W^{-1}.
  Matrix W(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      W(a, b) = tc[a] * prec_c(a, b) * tc[b] + ts[a] * prec_s(a, b) * ts[b];
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(W);
  const Vector& ev = eig.eigenvalues();
  if (!(ev[0] > 0.0) || ev[d - 1] / ev[0] > kMaxCondition) {
    return std::nullopt;
  }
  VParts parts;
  parts.V = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
            eig.eigenvectors().transpose();
  parts.log_det_V = -ev.array().log().sum();

  const Vector a = prec_c * params.kappa;
  const Vector tca = tc.cwiseProduct(a);
  parts.eta = parts.V * tca;
  parts.const_term =
      -0.5 * (params.kappa.dot(a) - tca.dot(parts.V * tca));
  return parts;
}

double joint_latent_logpdf(const Vector& r, const Vector& theta,
                           const TpnParams& params) {
  const Eigen::Index d = params.mu.size();
  if (r.size() != d || theta.size() != d) {
    throw std::invalid_argument("joint_latent_logpdf: dimension mismatch");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(r[j] > 0.0)) {
      throw std::invalid_argument("joint_latent_logpdf: radii must be positive");
    }
  }
  const Vector tb = centered(theta, params.mu);
  const Vector xc = r.cwiseProduct(tb.array().cos().matrix());
  const Vector xs = r.cwiseProduct(tb.array().sin().matrix());
  return mvn_logpdf(xc, params.kappa, params.sigma_c) +
         mvn_logpdf(xs, Vector::Zero(d), params.sigma) +
         r.array().log().sum();
}

std::optional<double> tpn_logpdf(const Vector& theta, const TpnParams& params,
                                 long budget, Rng& rng) {
  const auto parts = build_V(theta, params);
  if (!parts) return std::nullopt;
  const auto orthant = orthant_tmvn_stats(parts->eta, parts->V, budget, rng);
  if (!orthant) return std::nullopt;

  const int d = params.dim();
  const double log_det_c = std::log(params.sigma_c.llt().matrixL().determinant()) * 2.0;
  const double log_det_s = std::log(params.sigma.llt().matrixL().determinant()) * 2.0;
  return -d * kLog2Pi - 0.5 * log_det_c - 0.5 * log_det_s + parts->const_term +
         std::log(orthant->prod_moment) + 0.5 * d * kLog2Pi +
         0.5 * parts->log_det_V + std::log(orthant->orthant_prob);
}

}  // namespace tpn
