#pragma once

namespace tpn {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, accurate into the deep lower tail (~1e-308).
double norm_cdf(double x);

/// log of the standard normal CDF; switches to the Mills-ratio asymptotic
/// expansion below the erfc underflow point.
double norm_logcdf(double x);

/// Inverse standard normal CDF on (0, 1). Requires 0 < u < 1.
double norm_quantile(double u);

/// Hazard ratio phi(x)/Phi(x), stable for arbitrarily negative x.
double norm_hazard(double x);

}  // namespace tpn
