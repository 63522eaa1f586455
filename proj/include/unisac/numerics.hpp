#pragma once

#include <cstdint>

#include "unisac/types.hpp"

namespace unisac {

/// Upper-tail probability Q(x) of the standard normal distribution.
double gaussian_tail(double x);

/// Inverse of gaussian_tail; input must lie in (0,1).
double gaussian_tail_inverse(double p);

/// CDF of the chi-squared distribution with t degrees of freedom.
double chi_squared_cdf(int t, double x);

/// Inverse chi-squared CDF; p in [0,1).
double chi_squared_inverse(int t, double p);

/// Poisson pmf a^i e^{-a} / i!, evaluated in the log domain.
Probability poisson_pmf(std::uint64_t i, double a);

/// Natural log of C(a1, a2) via the running-ratio identity
/// log C(A1,A2) = sum_i log((A1-i)/(A2-i)). Returns -inf when a2 > a1.
double log_binomial(double a1, std::uint64_t a2);

/// Same, with the population given as log2(A1) (for populations like 2^100).
double log_binomial_log2pop(double log2_a1, std::uint64_t a2);

/// Least-squares coefficients B = Y A^H (A A^H)^{-1}. Throws SingularGramError
/// when cond(A A^H) exceeds 1e12.
ComplexMatrix ls_fit(const ComplexMatrix& y, const ComplexMatrix& a);

/// Residual Y f_p(A) = Y - ls_fit(Y,A) A, orthogonal to every row of A.
ComplexMatrix project_residual(const ComplexMatrix& y, const ComplexMatrix& a);

}  // namespace unisac
