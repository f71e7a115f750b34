#include "tpn/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpn/angles.hpp"
#include "tpn/normal.hpp"
#include "tpn/quadrature.hpp"

namespace tpn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kUnderflowFloor = 1e-300;

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
}

void require_symmetric(const Matrix& m, const char* who) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double scale = std::max({1.0, std::fabs(m(i, j)), std::fabs(m(j, i))});
      if (std::fabs(m(i, j) - m(j, i)) > 1e-12 * scale) {
        throw std::invalid_argument(std::string(who) + ": matrix not symmetric");
      }
    }
  }
}

// Lower Cholesky with an explicit pivot floor; empty result when any pivot
// falls at or below tol.
std::optional<Matrix> chol_with_tol(const Matrix& m, double tol) {
  const Eigen::Index d = m.rows();
  Matrix L = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double diag = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
    if (!(diag > tol * tol)) return std::nullopt;
    L(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double v = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / L(j, j);
    }
  }
  return L;
}

double log_det_from_chol(const Matrix& L) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
  return 2.0 * s;
}

// log multivariate gamma.
double lmvgamma(int d, double a) {
  double s = 0.25 * d * (d - 1) * std::log(kPi);
  for (int i = 1; i <= d; ++i) s += std::lgamma(a + 0.5 * (1.0 - i));
  return s;
}

double uniform_pos(Rng& rng) {
  // Open-interval uniform; the distribution can emit exactly 0, which would
  // poison downstream logs.
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::max(u, 1e-300);
}

// Standard normal truncated to (a, inf).
double trunc_std_normal(double a, Rng& rng) {
  if (a < 5.0) {
    const double lo = norm_cdf(a);
    double u = lo + (1.0 - lo) * uniform_pos(rng);
    u = std::min(u, 1.0 - 1e-16);
    return norm_quantile(u);
  }
  // Exponential rejection in the far tail (Robert's algorithm).
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double e = -std::log(uniform_pos(rng)) / lambda;
    const double x = a + e;
    const double d = x - lambda;
    if (std::log(uniform_pos(rng)) <= -0.5 * d * d) return x;
  }
}

std::optional<OrthantStats> orthant_d1(double eta, double v) {
  const double sd = std::sqrt(v);
  const double alpha = eta / sd;
  const double p = norm_cdf(alpha);
  if (p < kUnderflowFloor) return std::nullopt;
  return OrthantStats{eta + sd * norm_hazard(alpha), p};
}

std::optional<OrthantStats> orthant_d2(const Vector& eta, const Matrix& V) {
  const double s1 = std::sqrt(V(0, 0));
  const double slope = V(0, 1) / V(0, 0);
  const double s2c = std::sqrt(V(1, 1) - V(0, 1) * V(0, 1) / V(0, 0));
  const double ub = std::max(eta[0] + 13.0 * s1, 13.0 * s1);

  auto p_integrand = [&](double x) {
    const double m2 = eta[1] + slope * (x - eta[0]);
    return norm_pdf((x - eta[0]) / s1) / s1 * norm_cdf(m2 / s2c);
  };
  const double p = integrate_adaptive(p_integrand, 0.0, ub, 1e-11);
  if (p < kUnderflowFloor) return std::nullopt;

  // E[X2 1(X2>0) | X1=x] = m2 Phi(m2/s) + s phi(m2/s).
  auto m_integrand = [&](double x) {
    const double m2 = eta[1] + slope * (x - eta[0]);
    const double z = m2 / s2c;
    return norm_pdf((x - eta[0]) / s1) / s1 * x *
           (m2 * norm_cdf(z) + s2c * norm_pdf(z));
  };
  const double scale = (std::fabs(eta[0]) + 2.0 * s1) *
                       (std::fabs(eta[1]) + 2.0 * std::sqrt(V(1, 1)));
  const double m = integrate_adaptive(m_integrand, 0.0, ub,
                                      1e-11 * std::max(1.0, scale));
  return OrthantStats{m / p, p};
}

std::optional<OrthantStats> orthant_mc(const Vector& eta, const Matrix& V,
                                       long budget, Rng& rng) {
  const Eigen::Index d = eta.size();
  const auto cholV = chol_with_tol(V, 0.0);
  if (!cholV) throw std::invalid_argument("orthant_tmvn_stats: V not positive definite");
  const Matrix& L = *cholV;
  const Matrix Q = L.transpose()
                       .triangularView<Eigen::Upper>()
                       .solve(L.triangularView<Eigen::Lower>().solve(
                           Matrix::Identity(d, d)));

  // Coordinate Gibbs for the truncated-normal product moment: each full
  // conditional is univariate truncated normal with precision Q(j,j).
  Vector t(d);
  for (Eigen::Index j = 0; j < d; ++j)
    t[j] = std::max(eta[j], 0.5 * std::sqrt(V(j, j)));
  const long burn = 100;
  double moment_sum = 0.0;
  for (long sweep = 0; sweep < burn + budget; ++sweep) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double cross = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        if (k != j) cross += Q(j, k) * (t[k] - eta[k]);
      }
      const double cm = eta[j] - cross / Q(j, j);
      t[j] = trunc_normal_sample(cm, 1.0 / std::sqrt(Q(j, j)), 0.0, rng);
    }
    if (sweep >= burn) moment_sum += t.prod();
  }
  const double prod_moment = moment_sum / static_cast<double>(budget);

  // Sequential-conditioning estimate of P(X > 0): condition each z_j of
  // X = eta + L z to keep the coordinate positive, accumulating the
  // conditional probabilities in log space.
  std::vector<double> logw(static_cast<size_t>(budget));
  Vector z(d);
  for (long s = 0; s < budget; ++s) {
    double lw = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      double c = eta[j];
      for (Eigen::Index k = 0; k < j; ++k) c += L(j, k) * z[k];
      const double tbound = -c / L(j, j);
      lw += norm_logcdf(-tbound);
      z[j] = trunc_std_normal(tbound, rng);
    }
    logw[static_cast<size_t>(s)] = lw;
  }
  double mx = logw[0];
  for (double w : logw) mx = std::max(mx, w);
  if (!std::isfinite(mx)) return std::nullopt;
  double acc = 0.0;
  for (double w : logw) acc += std::exp(w - mx);
  const double logp = mx + std::log(acc / static_cast<double>(budget));
  if (logp < std::log(kUnderflowFloor)) return std::nullopt;
  return OrthantStats{prod_moment, std::exp(logp)};
}

}  // namespace

bool is_positive_definite(const Matrix& m, double tol) {
  require_square(m, "is_positive_definite");
  return chol_with_tol(m, tol).has_value();
}

void check_covariance(const Matrix& m, double tol) {
  require_square(m, "covariance");
  require_symmetric(m, "covariance");
  if (!is_positive_definite(m, tol)) {
    throw std::invalid_argument("covariance: matrix not positive definite");
  }
}

void check_correlation(const Matrix& m, double tol) {
  check_covariance(m, tol);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::fabs(m(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("correlation: diagonal entry differs from 1");
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && std::fabs(m(i, j)) >= 1.0) {
        throw std::invalid_argument("correlation: off-diagonal outside (-1, 1)");
      }
    }
  }
}

Matrix abs_transform(const Matrix& sigma) {
  return sigma.array().abs().matrix();
}

bool in_dstar(const Matrix& sigma, double tol) {
  return is_positive_definite(sigma, tol) &&
         is_positive_definite(abs_transform(sigma), tol);
}

double mvn_logpdf(const Vector& x, const Vector& mean, const Matrix& cov) {
  const Eigen::Index d = cov.rows();
  if (x.size() != d || mean.size() != d) {
    throw std::invalid_argument("mvn_logpdf: dimension mismatch");
  }
  const auto L = chol_with_tol(cov, 0.0);
  if (!L) throw std::invalid_argument("mvn_logpdf: covariance not positive definite");
  const Vector half = L->triangularView<Eigen::Lower>().solve(x - mean);
  return -0.5 * (d * kLog2Pi + log_det_from_chol(*L) + half.squaredNorm());
}

Vector mvn_sample_chol(const Vector& mean, const Matrix& chol_lower, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(rng);
  return mean + chol_lower.triangularView<Eigen::Lower>() * z;
}

Vector mvn_sample(const Vector& mean, const Matrix& cov, Rng& rng) {
  const auto L = chol_with_tol(cov, 0.0);
  if (!L) throw std::invalid_argument("mvn_sample: covariance not positive definite");
  return mvn_sample_chol(mean, *L, rng);
}

double trunc_normal_sample(double mean, double sd, double lower, Rng& rng) {
  return mean + sd * trunc_std_normal((lower - mean) / sd, rng);
}

std::optional<OrthantStats> orthant_tmvn_stats(const Vector& eta,
                                               const Matrix& V, long budget,
                                               Rng& rng) {
  const Eigen::Index d = eta.size();
  if (V.rows() != d || V.cols() != d) {
    throw std::invalid_argument("orthant_tmvn_stats: dimension mismatch");
  }
  if (budget < 1) throw std::invalid_argument("orthant_tmvn_stats: budget < 1");
  if (d == 1) return orthant_d1(eta[0], V(0, 0));
  if (d == 2) return orthant_d2(eta, V);
  return orthant_mc(eta, V, budget, rng);
}

double iw_logpdf(const Matrix& sigma, double df, const Matrix& scale) {
  require_square(sigma, "iw_logpdf");
  const int d = static_cast<int>(sigma.rows());
  if (!(df > d - 1)) throw std::invalid_argument("iw_logpdf: df out of range");
  const auto Ls = chol_with_tol(sigma, 0.0);
  const auto Lp = chol_with_tol(scale, 0.0);
  if (!Ls || !Lp) throw std::invalid_argument("iw_logpdf: matrix not positive definite");
  // tr(scale sigma^{-1}) through triangular solves against the Cholesky of sigma.
  const Matrix si_scale = Ls->transpose().triangularView<Eigen::Upper>().solve(
      Ls->triangularView<Eigen::Lower>().solve(scale));
  return 0.5 * df * log_det_from_chol(*Lp) - 0.5 * df * d * std::log(2.0) -
         lmvgamma(d, 0.5 * df) -
         0.5 * (df + d + 1) * log_det_from_chol(*Ls) - 0.5 * si_scale.trace();
}

Matrix iw_sample(double df, const Matrix& scale, Rng& rng) {
  require_square(scale, "iw_sample");
  const int d = static_cast<int>(scale.rows());
  if (!(df > d + 1)) throw std::invalid_argument("iw_sample: df must exceed d + 1");
  const auto C = chol_with_tol(scale, 0.0);
  if (!C) throw std::invalid_argument("iw_sample: scale not positive definite");

  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix A = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) A(i, j) = gauss(rng);
    std::gamma_distribution<double> chi2(0.5 * (df - i), 2.0);
    A(i, i) = std::sqrt(chi2(rng));
  }
  // With W = (F A)(F A)^T ~ Wishart(df, scale^{-1}) for any F F^T = scale^{-1},
  // the inverse is (A^{-1} C^T)^T (A^{-1} C^T).
  const Matrix M = A.triangularView<Eigen::Lower>().solve(Matrix(C->transpose()));
  Matrix out = M.transpose() * M;
  return 0.5 * (out + out.transpose());
}

TiwPrior::TiwPrior(double df_in, Matrix scale_in)
    : df(df_in), scale(std::move(scale_in)) {
  check_covariance(scale);
  const double d = static_cast<double>(scale.rows());
  if (!(df > d + 1.0)) {
    throw std::invalid_argument("TiwPrior: df must exceed d + 1");
  }
}

std::optional<double> tiw_unnorm_logpdf(const Matrix& sigma,
                                        const TiwPrior& prior, double tol) {
  if (!in_dstar(sigma, tol)) return std::nullopt;
  return iw_logpdf(sigma, prior.df, prior.scale);
}

}  // namespace tpn
