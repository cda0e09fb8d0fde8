#pragma once

// Thin wrappers over Boost.Math so the rest of the library sees one error policy.

namespace cmsum::special {

double normal_cdf(double z);         //!< Phi(z)
double normal_sf(double z);          //!< 1 - Phi(z), accurate in the upper tail
double normal_pdf(double z);
double normal_quantile(double p);    //!< Phi^{-1}(p), p in (0,1)

double gamma_p(double shape, double x); //!< regularized lower incomplete gamma
double gamma_q(double shape, double x); //!< regularized upper incomplete gamma
double gamma_p_inv(double shape, double p);
double gamma_q_inv(double shape, double q);

} // namespace cmsum::special
