#pragma once

#include <cstdint>

namespace essf {

// P(Z > z) for standard normal
double normal_sf(double z);
double normal_two_sided_p(double z);

// regularized upper incomplete gamma Q(a, x)
double regularized_gamma_q(double a, double x);

// P(chi2_dof > x)
double chi_square_sf(double x, double dof);

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2)
double kolmogorov_sf(double lambda);

// asymptotic KS p-value for statistic d with effective sample size n_eff
// (one sample: n; two samples: n*m/(n+m)), with the Stephens correction
double ks_p_value(double d, double n_eff);

}  // namespace essf
