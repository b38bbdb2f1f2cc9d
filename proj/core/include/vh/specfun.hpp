#pragma once
// Bessel functions of the first kind and their positive zeros.

#include <cstddef>

namespace vh::specfun {

// J_l(x) for integer l (negative allowed) and x >= 0.
double bessel_j(int l, double x);

// dJ_l/dx via (J_{l-1} - J_{l+1}) / 2.
double bessel_j_prime(int l, double x);

// The (p+1)-th positive root of J_l. Memoized, safe to call concurrently.
// Throws std::invalid_argument for l < 0 or p < 0 and std::runtime_error
// when the root finder fails to converge.
double bessel_zero(int l, int p);

// Number of cached zeros (diagnostics and tests).
std::size_t zero_cache_size();

} // namespace vh::specfun
