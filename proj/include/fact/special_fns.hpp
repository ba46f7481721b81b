#ifndef FACT_SPECIAL_FNS_HPP
#define FACT_SPECIAL_FNS_HPP

#include <cstddef>

namespace fact::special {

// Log of the gamma function for x > 0 (Lanczos approximation).
double log_gamma(double x);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// a > 0, x >= 0. Series expansion below the a+1 crossover, continued
// fraction (modified Lentz) above it.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double erf(double x);
double erfc(double x);

// Standard normal CDF, absolute error below 1e-12 on finite inputs.
double normal_cdf(double x);

// Inverse of normal_cdf on (0,1) by bracketed bisection.
// Throws std::domain_error outside (0,1), std::runtime_error if the
// 200-iteration cap is hit before convergence.
double normal_quantile(double q);

// Upper tail P(X >= x) for X ~ chi-squared with df degrees of freedom.
double chisq_sf(double x, unsigned df);

// Inverse of the chi-squared CDF: x with P(X <= x) = q, by bisection.
double chisq_quantile(double q, unsigned df);

// P(X >= k) for X ~ Binomial(m, prob), summed term by term.
double binom_sf(unsigned k, unsigned m, double prob);

double log_choose(unsigned n, unsigned k);

}  // namespace fact::special

#endif
