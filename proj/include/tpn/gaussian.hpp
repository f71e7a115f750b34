#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tpn/rng.hpp"

namespace tpn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cholesky pivot floor separating genuine indefiniteness from roundoff.
inline constexpr double kPdTol = 1e-10;

/// True iff the Cholesky factorization of m succeeds with every pivot > tol.
bool is_positive_definite(const Matrix& m, double tol = kPdTol);

/// Validates symmetry (1e-12) and positive definiteness; throws
/// std::invalid_argument naming the failed property.
void check_covariance(const Matrix& m, double tol = kPdTol);

/// check_covariance plus unit diagonal (1e-12) and off-diagonals in (-1, 1).
void check_correlation(const Matrix& m, double tol = kPdTol);

/// Entrywise absolute value. Positive definiteness of the result is NOT
/// guaranteed (and genuinely fails for some valid inputs once d >= 4).
Matrix abs_transform(const Matrix& sigma);

/// True iff both sigma and abs_transform(sigma) are positive definite.
bool in_dstar(const Matrix& sigma, double tol = kPdTol);

double mvn_logpdf(const Vector& x, const Vector& mean, const Matrix& cov);

Vector mvn_sample(const Vector& mean, const Matrix& cov, Rng& rng);

/// As mvn_sample but with the lower Cholesky factor precomputed.
Vector mvn_sample_chol(const Vector& mean, const Matrix& chol_lower, Rng& rng);

/// Draw from N(mean, sd^2) conditioned on exceeding `lower`. Inverse-CDF
/// for moderate truncation; switches to an exponential-rejection tail
/// algorithm when the standardized bound exceeds 5.
double trunc_normal_sample(double mean, double sd, double lower, Rng& rng);

/// Moments of N(eta, V) restricted to the positive orthant:
/// prod_moment = E[X_1 ... X_d | X > 0], orthant_prob = P(X > 0).
/// Closed form at d = 1; deterministic adaptive quadrature at d = 2;
/// coordinate-Gibbs moment estimate plus a sequential-conditioning
/// probability estimate over `budget` draws at d >= 3 (deterministic given
/// rng). Returns nullopt when the orthant probability underflows below
/// 1e-300 (unevaluable, distinct from zero).
struct OrthantStats {
  double prod_moment;
  double orthant_prob;
};
std::optional<OrthantStats> orthant_tmvn_stats(const Vector& eta,
                                               const Matrix& V, long budget,
                                               Rng& rng);

/// Exact Inverse Wishart log-density, normalizing constant included.
/// Requires df > d - 1.
double iw_logpdf(const Matrix& sigma, double df, const Matrix& scale);

/// Bartlett-decomposition Inverse Wishart draw; E[draw] = scale/(df - d - 1).
/// Requires df > d + 1 so that the mean exists.
Matrix iw_sample(double df, const Matrix& scale, Rng& rng);

/// Inverse Wishart prior restricted to positive definite matrices whose
/// entrywise absolute value stays positive definite. The normalizing
/// constant of the restriction is unknown and never needed: it cancels in
/// every Metropolis-Hastings ratio.
struct TiwPrior {
  TiwPrior(double df_in, Matrix scale_in);
  double df;
  Matrix scale;
};

/// iw_logpdf when sigma lies in the restricted support; nullopt (rejection
/// marker) otherwise.
std::optional<double> tiw_unnorm_logpdf(const Matrix& sigma,
                                        const TiwPrior& prior,
                                        double tol = kPdTol);

}  // namespace tpn
