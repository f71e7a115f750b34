#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "tpn/angles.hpp"
#include "tpn/gaussian.hpp"
#include "tpn/normal.hpp"
#include "tpn/quadrature.hpp"
#include "tpn/rng.hpp"

using namespace tpn;
using Catch::Approx;

namespace {

// A 4x4 correlation matrix that is positive definite while its entrywise
// absolute value is not (smallest eigenvalue of the latter ~ -0.04). At
// d <= 3 no such correlation matrix exists.
Matrix abs_broken_correlation() {
  Matrix m(4, 4);
  m << 1.00, 0.14, 0.09, 0.71,
       0.14, 1.00, -0.94, -0.09,
       0.09, -0.94, 1.00, 0.38,
       0.71, -0.09, 0.38, 1.00;
  return m;
}

}  // namespace

TEST_CASE("standard normal primitives") {
  CHECK(norm_pdf(0.0) == Approx(1.0 / std::sqrt(kTwoPi)).epsilon(1e-14));
  CHECK(norm_cdf(0.0) == Approx(0.5).epsilon(1e-14));
  CHECK(norm_cdf(1.0) == Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(norm_cdf(-37.0) > 0.0);  // ~1e-299, still representable

  // Reference quantiles (scipy.stats.norm.ppf).
  CHECK(norm_quantile(1e-300) == Approx(-37.0470962994).epsilon(1e-9));
  CHECK(norm_quantile(1e-16) == Approx(-8.22208221613).epsilon(1e-10));
  CHECK(norm_quantile(1e-10) == Approx(-6.3613409024).epsilon(1e-10));
  CHECK(norm_quantile(0.001) == Approx(-3.09023230617).epsilon(1e-10));
  CHECK(norm_quantile(0.3) == Approx(-0.524400512708).epsilon(1e-10));
  CHECK(norm_quantile(0.5) == Approx(0.0).margin(1e-12));
  CHECK(norm_quantile(0.975) == Approx(1.95996398454).epsilon(1e-10));
  CHECK(norm_quantile(1.0 - 1e-10) == Approx(6.3613408897).epsilon(1e-9));
  CHECK_THROWS(norm_quantile(0.0));
  CHECK_THROWS(norm_quantile(1.0));

  for (double u = 0.02; u < 1.0; u += 0.02) {
    CHECK(norm_cdf(norm_quantile(u)) == Approx(u).epsilon(1e-11));
  }

  // Deep lower tail of the log CDF against the Mills asymptotic
  // -x^2/2 - log(x) - log(2*pi)/2 + log(1 - 1/x^2 + 3/x^4 - ...).
  const double x = 40.0;
  const double asymptotic = -0.5 * x * x - std::log(x) - 0.5 * std::log(kTwoPi) +
                            std::log(1.0 - 1.0 / (x * x) + 3.0 / (x * x * x * x));
  CHECK(norm_logcdf(-40.0) == Approx(asymptotic).margin(1e-5));
  CHECK(norm_logcdf(0.0) == Approx(std::log(0.5)).epsilon(1e-13));

  CHECK(norm_hazard(0.0) == Approx(2.0 * norm_pdf(0.0)).epsilon(1e-13));
  // phi(x)/Phi(x) ~ -x + 1/(-x) as x -> -inf.
  CHECK(norm_hazard(-50.0) == Approx(50.02).margin(1e-3));
}

TEST_CASE("matrix predicates and the absolute-value transform") {
  const Matrix eye = Matrix::Identity(3, 3);
  CHECK(is_positive_definite(eye));

  Matrix singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK_FALSE(is_positive_definite(singular));

  CHECK(abs_transform(eye) == eye);
  Matrix neg(2, 2);
  neg << 1.0, -0.6, -0.6, 1.0;
  Matrix pos(2, 2);
  pos << 1.0, 0.6, 0.6, 1.0;
  CHECK(abs_transform(neg) == pos);

  // Any positive definite 3x3 correlation matrix keeps a positive definite
  // absolute value (the triple-product determinant term can only grow), so
  // membership in the restricted support is automatic at d = 3.
  Matrix three(3, 3);
  three << 1.0, 0.9, -0.9,
           0.9, 1.0, -0.7,
           -0.9, -0.7, 1.0;
  CHECK(is_positive_definite(three));
  CHECK(in_dstar(three));

  // At d = 4 the transform genuinely breaks definiteness.
  const Matrix broken = abs_broken_correlation();
  CHECK(is_positive_definite(broken));
  CHECK_FALSE(is_positive_definite(abs_transform(broken)));
  CHECK_FALSE(in_dstar(broken));

  CHECK_THROWS_AS(check_correlation(singular), std::invalid_argument);
  Matrix not_unit = eye;
  not_unit(1, 1) = 2.0;
  CHECK_THROWS_AS(check_correlation(not_unit), std::invalid_argument);
  CHECK_NOTHROW(check_covariance(not_unit));
  Matrix asym(2, 2);
  asym << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(check_covariance(asym), std::invalid_argument);
}

TEST_CASE("mvn log-density") {
  const Vector zero1 = Vector::Zero(1);
  CHECK(mvn_logpdf(zero1, zero1, Matrix::Identity(1, 1)) ==
        Approx(-0.9189385332046727).epsilon(1e-12));

  for (int d : {2, 3, 5}) {
    const Vector z = Vector::Zero(d);
    CHECK(mvn_logpdf(z, z, Matrix::Identity(d, d)) ==
          Approx(-0.5 * d * std::log(kTwoPi)).epsilon(1e-12));
  }

  // Dense-formula oracle with the explicit 2x2 inverse.
  const double rho = 0.5;
  Matrix cov2(2, 2);
  cov2 << 1.0, rho, rho, 1.0;
  Vector x2(2);
  x2 << 1.0, 1.0;
  const double quad = (x2[0] * x2[0] - 2.0 * rho * x2[0] * x2[1] + x2[1] * x2[1]) /
                      (1.0 - rho * rho);
  const double expected2 =
      -std::log(kTwoPi) - 0.5 * std::log(1.0 - rho * rho) - 0.5 * quad;
  CHECK(mvn_logpdf(x2, Vector::Zero(2), cov2) == Approx(expected2).epsilon(1e-12));

  // Frozen scipy.stats.multivariate_normal oracle.
  Vector x3(3), m3(3);
  x3 << 0.3, -0.6, 1.1;
  m3 << 0.0, 0.5, -0.2;
  Matrix c3(3, 3);
  c3 << 1.2, 0.3, -0.1,
        0.3, 0.9, 0.2,
        -0.1, 0.2, 1.4;
  CHECK(mvn_logpdf(x3, m3, c3) == Approx(-4.786369285558).epsilon(1e-10));
}

TEST_CASE("mvn sampling moments and determinism") {
  Rng rng = make_rng(42);
  Vector mean(2);
  mean << 3.0, -1.0;
  Matrix cov(2, 2);
  cov << 1.0, 0.4, 0.4, 1.5;

  const int n = 100000;
  Vector sum = Vector::Zero(2);
  Matrix outer = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vector x = mvn_sample(mean, cov, rng);
    sum += x;
    outer += x * x.transpose();
  }
  const Vector mhat = sum / n;
  const Matrix chat = outer / n - mhat * mhat.transpose();
  CHECK((mhat - mean).cwiseAbs().maxCoeff() < 0.02);
  CHECK((chat - cov).cwiseAbs().maxCoeff() < 0.03);

  Rng r1 = make_rng(99), r2 = make_rng(99);
  CHECK(mvn_sample(mean, cov, r1) == mvn_sample(mean, cov, r2));
}

TEST_CASE("orthant stats: closed form at d = 1") {
  Rng rng = make_rng(1);
  const Vector eta = Vector::Zero(1);
  const Matrix v = Matrix::Identity(1, 1);
  const auto stats = orthant_tmvn_stats(eta, v, 1000, rng);
  REQUIRE(stats.has_value());
  CHECK(stats->orthant_prob == Approx(0.5).epsilon(1e-12));
  CHECK(stats->prod_moment == Approx(std::sqrt(2.0 / kPi)).epsilon(1e-12));

  // Independent quadrature oracle at a generic point.
  Vector eta2(1);
  eta2 << 0.7;
  Matrix v2(1, 1);
  v2 << 1.3;
  const auto s2 = orthant_tmvn_stats(eta2, v2, 1000, rng);
  REQUIRE(s2.has_value());
  const double sd = std::sqrt(1.3);
  const auto dens = [&](double x) { return norm_pdf((x - 0.7) / sd) / sd; };
  const double p_quad = integrate_adaptive(dens, 0.0, 0.7 + 12.0 * sd, 1e-13);
  const double m_quad =
      integrate_adaptive([&](double x) { return x * dens(x); }, 0.0, 0.7 + 12.0 * sd, 1e-13);
  CHECK(s2->orthant_prob == Approx(p_quad).epsilon(1e-10));
  CHECK(s2->prod_moment == Approx(m_quad / p_quad).epsilon(1e-10));

  // Underflow reported as unevaluable, not zero.
  Vector far(1);
  far << -40.0;
  CHECK_FALSE(orthant_tmvn_stats(far, Matrix::Identity(1, 1), 1000, rng).has_value());
}

TEST_CASE("orthant stats: frozen oracles at d = 2") {
  Rng rng = make_rng(2);
  struct Case {
    double e0, e1, v00, v01, v11, prob, moment;
  };
  // scipy mvn cdf + high-precision quadrature, cross-checked two ways.
  const Case cases[] = {
      {0.5, -0.3, 1.0, 0.6, 2.0, 0.345740962839, 1.410956231651},
      {2.0, 1.0, 0.5, -0.2, 0.8, 0.865916484579, 2.247041474048},
      {-1.0, -0.5, 1.0, 0.0, 1.0, 0.048951101554, 0.336652551983},
      {0.0, 0.0, 1.0, 0.5, 1.0, 1.0 / 3.0, 0.913496671566},
  };
  for (const auto& c : cases) {
    Vector eta(2);
    eta << c.e0, c.e1;
    Matrix v(2, 2);
    v << c.v00, c.v01, c.v01, c.v11;
    const auto stats = orthant_tmvn_stats(eta, v, 1000, rng);
    REQUIRE(stats.has_value());
    CHECK(stats->orthant_prob == Approx(c.prob).epsilon(1e-8));
    CHECK(stats->prod_moment == Approx(c.moment).epsilon(1e-7));
  }

  // Independent identity: eta = 0, V = I factorizes into half-normals.
  Vector z2 = Vector::Zero(2);
  const auto iid = orthant_tmvn_stats(z2, Matrix::Identity(2, 2), 1000, rng);
  REQUIRE(iid.has_value());
  CHECK(iid->orthant_prob == Approx(0.25).epsilon(1e-9));
  CHECK(iid->prod_moment == Approx(2.0 / kPi).epsilon(1e-9));

  Vector deep(2);
  deep << -40.0, -40.0;
  CHECK_FALSE(orthant_tmvn_stats(deep, Matrix::Identity(2, 2), 1000, rng).has_value());
}

TEST_CASE("orthant stats: Monte Carlo at d = 3") {
  Rng rng = make_rng(3);
  {
    const Vector eta = Vector::Zero(3);
    const auto stats = orthant_tmvn_stats(eta, Matrix::Identity(3, 3), 400000, rng);
    REQUIRE(stats.has_value());
    CHECK(stats->orthant_prob == Approx(0.125).margin(0.002));
    CHECK(stats->prod_moment ==
          Approx(std::pow(2.0 / kPi, 1.5)).margin(0.006));
  }
  {
    // Frozen scipy oracle: correlated, shifted case.
    Vector eta(3);
    eta << 0.8, -0.2, 0.5;
    Matrix v(3, 3);
    v << 1.0, 0.3, -0.2,
         0.3, 1.5, 0.4,
         -0.2, 0.4, 0.9;
    const auto stats = orthant_tmvn_stats(eta, v, 400000, rng);
    REQUIRE(stats.has_value());
    CHECK(stats->orthant_prob == Approx(0.2927811266).margin(0.004));
    CHECK(stats->prod_moment == Approx(1.3820107150).margin(0.02));
  }
  {
    // Determinism given identical rng state.
    Rng ra = make_rng(77), rb = make_rng(77);
    Vector eta(3);
    eta << 0.1, 0.2, -0.1;
    Matrix v = Matrix::Identity(3, 3);
    v(0, 1) = v(1, 0) = 0.4;
    const auto a = orthant_tmvn_stats(eta, v, 5000, ra);
    const auto b = orthant_tmvn_stats(eta, v, 5000, rb);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->prod_moment == b->prod_moment);
    CHECK(a->orthant_prob == b->orthant_prob);
  }
}

TEST_CASE("truncated normal sampling") {
  Rng rng = make_rng(5);
  {
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = trunc_normal_sample(0.0, 1.0, 0.0, rng);
      REQUIRE(x >= 0.0);
      sum += x;
    }
    CHECK(sum / n == Approx(std::sqrt(2.0 / kPi)).margin(0.006));
  }
  {
    // Deep truncation exercises the tail algorithm.
    double sum = 0.0;
    double min_draw = 1e100;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = trunc_normal_sample(0.0, 1.0, 6.0, rng);
      min_draw = std::min(min_draw, x);
      sum += x;
    }
    CHECK(min_draw >= 6.0);
    const double expected = norm_pdf(6.0) / norm_cdf(-6.0);
    CHECK(sum / n == Approx(expected).margin(0.005));
  }
  {
    Rng r1 = make_rng(8), r2 = make_rng(8);
    CHECK(trunc_normal_sample(1.0, 2.0, 0.5, r1) ==
          trunc_normal_sample(1.0, 2.0, 0.5, r2));
  }
}

TEST_CASE("inverse Wishart density") {
  // Frozen scipy.stats.invwishart oracles.
  Matrix s2(2, 2);
  s2 << 2.0, 0.3, 0.3, 1.5;
  Matrix psi2(2, 2);
  psi2 << 1.0, 0.2, 0.2, 1.0;
  CHECK(iw_logpdf(s2, 5.0, psi2) == Approx(-9.278207040977).epsilon(1e-10));

  Matrix s1(1, 1), psi1(1, 1);
  s1 << 0.8;
  psi1 << 1.5;
  CHECK(iw_logpdf(s1, 3.0, psi1) == Approx(-0.690381992757).epsilon(1e-10));

  // d = 1 reduces to inverse-gamma(shape df/2, rate scale/2).
  const double x = 0.8, df = 3.0, scale = 1.5;
  const double a = 0.5 * df, b = 0.5 * scale;
  const double ig = a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
  CHECK(iw_logpdf(s1, df, psi1) == Approx(ig).epsilon(1e-12));

  // Relabeling invariance: joint coordinate permutation.
  Matrix s3(3, 3);
  s3 << 2.0, 0.3, -0.1,
        0.3, 1.5, 0.2,
        -0.1, 0.2, 1.8;
  Matrix psi3(3, 3);
  psi3 << 1.0, 0.1, 0.0,
          0.1, 1.2, -0.2,
          0.0, -0.2, 0.9;
  Eigen::PermutationMatrix<3> perm;
  perm.indices() << 2, 0, 1;
  const Matrix sp = perm.transpose() * s3 * perm;
  const Matrix pp = perm.transpose() * psi3 * perm;
  CHECK(iw_logpdf(s3, 6.0, psi3) == Approx(iw_logpdf(sp, 6.0, pp)).epsilon(1e-12));
}

TEST_CASE("inverse Wishart sampling moments") {
  {
    Rng rng = make_rng(21);
    Matrix scale(1, 1);
    scale << 2.0;
    const double df = 6.0;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += iw_sample(df, scale, rng)(0, 0);
    CHECK(sum / n == Approx(2.0 / (df - 2.0)).margin(0.01));
  }
  {
    Rng rng = make_rng(22);
    const Matrix scale = 7.0 * Matrix::Identity(3, 3);
    const double df = 10.0;
    Matrix sum = Matrix::Zero(3, 3);
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += iw_sample(df, scale, rng);
    const Matrix mean = sum / n;
    CHECK((mean - (7.0 / 6.0) * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.05);
  }
  {
    Rng r1 = make_rng(23), r2 = make_rng(23);
    const Matrix scale = Matrix::Identity(2, 2);
    CHECK(iw_sample(5.0, scale, r1) == iw_sample(5.0, scale, r2));
  }
}

TEST_CASE("truncated inverse Wishart prior") {
  CHECK_THROWS_AS(TiwPrior(3.0, Matrix::Identity(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(TiwPrior(4.0, Matrix::Identity(3, 3)), std::invalid_argument);

  const TiwPrior prior(6.0, Matrix::Identity(4, 4));
  const Matrix eye = Matrix::Identity(4, 4);
  const auto at_identity = tiw_unnorm_logpdf(eye, prior);
  REQUIRE(at_identity.has_value());
  CHECK(*at_identity == Approx(iw_logpdf(eye, 6.0, Matrix::Identity(4, 4))).epsilon(1e-12));

  // The restricted support excludes matrices whose absolute value loses
  // definiteness; the density reports a rejection marker there.
  CHECK_FALSE(tiw_unnorm_logpdf(abs_broken_correlation(), prior).has_value());

  // Proportionality: differences equal unrestricted IW differences.
  Matrix other = eye;
  other(0, 1) = other(1, 0) = 0.3;
  const auto at_other = tiw_unnorm_logpdf(other, prior);
  REQUIRE(at_other.has_value());
  CHECK(*at_other - *at_identity ==
        Approx(iw_logpdf(other, 6.0, Matrix::Identity(4, 4)) -
               iw_logpdf(eye, 6.0, Matrix::Identity(4, 4)))
            .epsilon(1e-12));
}
