#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpn/angles.hpp"
#include "tpn/gaussian.hpp"

namespace tpn {

/// Retained MCMC output. Rows index retained iterations; `concentration`
/// holds kappa (projected-normal model) or lambda (copula model), named by
/// `concentration_name`. `imputed` may have zero columns.
struct PosteriorDraws {
  Matrix mu;                      // retained x d, wrapped angles
  Matrix concentration;           // retained x d
  std::string concentration_name;  // "kappa" or "lambda"
  std::vector<Matrix> sigma;      // retained correlation matrices
  Matrix imputed;                 // retained x (number of missing cells)
  std::vector<std::string> imputed_names;

  [[nodiscard]] int num_retained() const { return static_cast<int>(mu.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(mu.cols()); }
};

/// True parameter values for recovery checks.
struct ReferenceParams {
  Vector mu;
  Vector concentration;
  Matrix sigma;
};

/// One row of the posterior summary table. Angular rows use the circular
/// mean and quantiles taken about it; difference columns are filled only
/// when a reference was supplied (and never for imputed cells).
struct SummaryRow {
  std::string name;
  bool is_angle = false;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::optional<double> diff_q025;
  std::optional<double> diff_q975;
};

/// Signed circular correlation estimate in [-1, 1]. The numerator is
/// (|mean e^{i(tj-tk)}| - |mean e^{i(tj+tk)}|)/2; the denominator is the
/// larger of the two mean squared sines about the supplied mean directions.
/// When either resultant magnitude falls below 1e-10 the ratio is undefined
/// and the estimate degenerates to twice the numerator.
double rivest_correlation(std::span<const double> theta_j,
                          std::span<const double> theta_k, Angle mu_j,
                          Angle mu_k);

/// Continuous ranked probability score under arc-length distance:
/// mean_s d(x_s, obs) - (1/2) mean_{s,s'} d(x_s, x_s'). Lower is better;
/// zero iff every draw equals the observation; at most pi. Needs >= 2
/// draws. Runs in O(S log S) via a sorted prefix-sum pass.
double crps_circular(std::span<const double> predictive_draws, Angle observed);

/// Posterior mean and central 95% interval per scalar parameter, plus the
/// 95% interval of (draw - truth) when a reference is given (wrapped
/// differences for angles, so an interval straddling the cut centers at 0).
std::vector<SummaryRow> summarize(const PosteriorDraws& draws,
                                  const std::optional<ReferenceParams>& reference);

}  // namespace tpn
