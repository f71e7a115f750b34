#pragma once

// Shared statistical helpers for the test suites: chi-square and KS
// p-values, an energy-distance permutation test, and small utilities.
// Everything here is test-side code, independent of the library's
// implementation paths wherever a test uses it as an oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace test_support {

// Regularized upper incomplete gamma Q(a, x) via the series / continued
// fraction pair (Numerical Recipes style), good to ~1e-12.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad args");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a, x) series, return 1 - P.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q directly.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

// Survival function of the chi-square distribution with k dof.
inline double chi2_sf(double x, double k) { return gamma_q(0.5 * k, 0.5 * x); }

// Asymptotic Kolmogorov distribution tail (the standard small-sample
// corrected form): P(D > observed).
inline double ks_pvalue(double d_stat, double n_eff) {
  const double lambda = (std::sqrt(n_eff) + 0.12 + 0.11 / std::sqrt(n_eff)) * d_stat;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// One-sample KS test of values against uniform(0,1): the values should be
// the CDF-transformed sample.
inline double ks_uniform_pvalue(std::vector<double> u) {
  if (u.size() < 2) throw std::invalid_argument("ks: sample too small");
  std::sort(u.begin(), u.end());
  const auto n = static_cast<double>(u.size());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    const double lo = u[i] - static_cast<double>(i) / n;
    d_stat = std::max({d_stat, hi, lo});
  }
  return ks_pvalue(d_stat, n);
}

template <class Cdf>
double ks_test_pvalue(const std::vector<double>& sample, Cdf&& cdf) {
  std::vector<double> u;
  u.reserve(sample.size());
  for (double x : sample) u.push_back(cdf(x));
  return ks_uniform_pvalue(std::move(u));
}

// Two-sample KS test.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  double d_stat = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    const double fa = static_cast<double>(i) / na;
    const double fb = static_cast<double>(j) / nb;
    d_stat = std::max(d_stat, std::fabs(fa - fb));
  }
  return ks_pvalue(d_stat, na * nb / (na + nb));
}

// Chi-square goodness-of-fit p-value for observed counts against expected
// cell probabilities (no fitted parameters: dof = cells - 1).
inline double chi2_gof_pvalue(const std::vector<long>& counts,
                              const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.size() < 2) {
    throw std::invalid_argument("chi2_gof: shape mismatch");
  }
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L));
  double stat = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double expected = n * probs[c];
    if (expected <= 0.0) throw std::invalid_argument("chi2_gof: empty expected cell");
    const double diff = static_cast<double>(counts[c]) - expected;
    stat += diff * diff / expected;
  }
  return chi2_sf(stat, static_cast<double>(counts.size() - 1));
}

// Energy-distance two-sample permutation test on point clouds in R^k.
// Returns the permutation p-value (fraction of permuted statistics >= the
// observed one, with the +1 correction).
inline double energy_perm_pvalue(const std::vector<std::vector<double>>& x,
                                 const std::vector<std::vector<double>>& y,
                                 int num_perms, std::uint64_t seed) {
  const std::size_t n = x.size(), m = y.size();
  if (n < 2 || m < 2) throw std::invalid_argument("energy: samples too small");
  std::vector<std::vector<double>> all;
  all.reserve(n + m);
  for (const auto& p : x) all.push_back(p);
  for (const auto& p : y) all.push_back(p);
  const std::size_t total = n + m;
  std::vector<double> dist(total * total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = i + 1; j < total; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < all[i].size(); ++k) {
        const double diff = all[i][k] - all[j][k];
        s += diff * diff;
      }
      dist[i * total + j] = dist[j * total + i] = std::sqrt(s);
    }
  }
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  const auto statistic = [&](const std::vector<std::size_t>& order) {
    double dxy = 0.0, dxx = 0.0, dyy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dxx += dist[order[i] * total + order[j]];
      for (std::size_t j = 0; j < m; ++j) dxy += dist[order[i] * total + order[n + j]];
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) dyy += dist[order[n + i] * total + order[n + j]];
    }
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return 2.0 * dxy / (nn * mm) - dxx / (nn * nn) - dyy / (mm * mm);
  };
  const double observed = statistic(idx);
  std::mt19937_64 rng(seed);
  int ge = 0;
  for (int p = 0; p < num_perms; ++p) {
    std::shuffle(idx.begin(), idx.end(), rng);
    if (statistic(idx) >= observed) ++ge;
  }
  return (ge + 1.0) / (num_perms + 1.0);
}

}  // namespace test_support
