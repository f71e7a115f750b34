#include "tpn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace tpn {

namespace {

// Linear-interpolation sample quantile (the common "type 7" definition).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, n - 1);
  const double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

// Sum of arc distances over unordered pairs. Sorting makes each gap either
// the direct difference or its 2*pi complement, split by a moving pointer.
double pairwise_arc_sum(std::vector<double> wrapped) {
  std::sort(wrapped.begin(), wrapped.end());
  const std::size_t n = wrapped.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + wrapped[i];

  double total = 0.0;
  std::size_t m = 0;  // last index with wrapped[m] <= wrapped[i] + pi
  for (std::size_t i = 0; i < n; ++i) {
    if (m < i) m = i;
    while (m + 1 < n && wrapped[m + 1] - wrapped[i] <= kPi) ++m;
    const double ai = wrapped[i];
    const auto near_count = static_cast<double>(m - i);
    const auto far_count = static_cast<double>(n - 1 - m);
    total += (prefix[m + 1] - prefix[i + 1]) - near_count * ai;
    total += far_count * (kTwoPi + ai) - (prefix[n] - prefix[m + 1]);
  }
  return total;
}

double mean_sq_sine_about(std::span<const double> theta, Angle mu) {
  double acc = 0.0;
  for (double t : theta) {
    const double s = std::sin(t - mu.rad());
    acc += s * s;
  }
  return acc / static_cast<double>(theta.size());
}

SummaryRow real_row(std::string name, std::vector<double> values,
                    std::optional<double> truth) {
  SummaryRow row;
  row.name = std::move(name);
  row.is_angle = false;
  double acc = 0.0;
  for (double v : values) acc += v;
  row.mean = acc / static_cast<double>(values.size());
  if (truth) {
    std::vector<double> diff(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) diff[i] = values[i] - *truth;
    std::sort(diff.begin(), diff.end());
    row.diff_q025 = quantile_sorted(diff, 0.025);
    row.diff_q975 = quantile_sorted(diff, 0.975);
  }
  std::sort(values.begin(), values.end());
  row.q025 = quantile_sorted(values, 0.025);
  row.q975 = quantile_sorted(values, 0.975);
  return row;
}

SummaryRow angle_row(std::string name, const std::vector<double>& values,
                     std::optional<double> truth) {
  SummaryRow row;
  row.name = std::move(name);
  row.is_angle = true;
  const auto [mean, mrl] =
      circ_mean_and_mrl(std::span<const double>(values.data(), values.size()));
  (void)mrl;
  row.mean = mean.rad();
  // Quantiles of the deviation from the circular mean, shifted back, keep
  // the interval meaningful when the draws straddle the -pi/pi cut.
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    dev[i] = wrap(values[i] - mean.rad()).rad();
  }
  std::sort(dev.begin(), dev.end());
  row.q025 = wrap(mean.rad() + quantile_sorted(dev, 0.025)).rad();
  row.q975 = wrap(mean.rad() + quantile_sorted(dev, 0.975)).rad();
  if (truth) {
    std::vector<double> diff(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      diff[i] = wrap(values[i] - *truth).rad();
    }
    std::sort(diff.begin(), diff.end());
    row.diff_q025 = quantile_sorted(diff, 0.025);
    row.diff_q975 = quantile_sorted(diff, 0.975);
  }
  return row;
}

std::vector<double> column(const Matrix& m, int j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
  return out;
}

}  // namespace

double rivest_correlation(std::span<const double> theta_j,
                          std::span<const double> theta_k, Angle mu_j,
                          Angle mu_k) {
  if (theta_j.empty()) throw std::invalid_argument("rivest_correlation: empty input");
  if (theta_j.size() != theta_k.size()) {
    throw std::invalid_argument("rivest_correlation: length mismatch");
  }
  const auto n = static_cast<double>(theta_j.size());
  std::complex<double> diff_sum(0.0, 0.0);
  std::complex<double> plus_sum(0.0, 0.0);
  for (std::size_t i = 0; i < theta_j.size(); ++i) {
    diff_sum += std::polar(1.0, theta_j[i] - theta_k[i]);
    plus_sum += std::polar(1.0, theta_j[i] + theta_k[i]);
  }
  const double r_diff = std::abs(diff_sum) / n;
  const double r_plus = std::abs(plus_sum) / n;
  const double xi = 0.5 * (r_diff - r_plus);

  double est;
  if (r_diff < 1e-10 || r_plus < 1e-10) {
    est = 2.0 * xi;
  } else {
    const double denom =
        std::max(mean_sq_sine_about(theta_j, mu_j), mean_sq_sine_about(theta_k, mu_k));
    est = xi / denom;
  }
  return std::clamp(est, -1.0, 1.0);
}

double crps_circular(std::span<const double> predictive_draws, Angle observed) {
  const std::size_t s = predictive_draws.size();
  if (s < 2) {
    throw std::invalid_argument("crps_circular: need at least 2 predictive draws");
  }
  std::vector<double> wrapped(s);
  double to_obs = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const Angle a = wrap(predictive_draws[i]);
    wrapped[i] = a.rad();
    to_obs += circ_distance(a, observed);
  }
  const auto sd = static_cast<double>(s);
  const double pair_sum = pairwise_arc_sum(std::move(wrapped));
  return to_obs / sd - pair_sum / (sd * sd);
}

std::vector<SummaryRow> summarize(const PosteriorDraws& draws,
                                  const std::optional<ReferenceParams>& reference) {
  const int retained = draws.num_retained();
  const int d = draws.dim();
  if (retained < 1 || d < 1) throw std::invalid_argument("summarize: empty draws");
  if (draws.concentration.rows() != retained ||
      static_cast<int>(draws.sigma.size()) != retained ||
      (draws.imputed.cols() > 0 && draws.imputed.rows() != retained)) {
    throw std::invalid_argument("summarize: draw counts disagree across blocks");
  }
  if (draws.imputed.cols() !=
      static_cast<Eigen::Index>(draws.imputed_names.size())) {
    throw std::invalid_argument("summarize: imputed names do not match columns");
  }
  if (reference &&
      (reference->mu.size() != d || reference->concentration.size() != d ||
       reference->sigma.rows() != d || reference->sigma.cols() != d)) {
    throw std::invalid_argument("summarize: reference dimension mismatch");
  }

  std::vector<SummaryRow> rows;
  for (int j = 0; j < d; ++j) {
    std::optional<double> truth;
    if (reference) truth = wrap(reference->mu[j]).rad();
    rows.push_back(
        angle_row("mu[" + std::to_string(j + 1) + "]", column(draws.mu, j), truth));
  }
  for (int j = 0; j < d; ++j) {
    std::optional<double> truth;
    if (reference) truth = reference->concentration[j];
    rows.push_back(real_row(draws.concentration_name + "[" + std::to_string(j + 1) + "]",
                            column(draws.concentration, j), truth));
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      std::vector<double> values(static_cast<std::size_t>(retained));
      for (int t = 0; t < retained; ++t) {
        values[static_cast<std::size_t>(t)] = draws.sigma[static_cast<std::size_t>(t)](j, k);
      }
      std::optional<double> truth;
      if (reference) truth = reference->sigma(j, k);
      rows.push_back(real_row("sigma[" + std::to_string(j + 1) + "," +
                                  std::to_string(k + 1) + "]",
                              std::move(values), truth));
    }
  }
  for (Eigen::Index c = 0; c < draws.imputed.cols(); ++c) {
    rows.push_back(angle_row(draws.imputed_names[static_cast<std::size_t>(c)],
                             column(draws.imputed, static_cast<int>(c)), std::nullopt));
  }
  return rows;
}

}  // namespace tpn
