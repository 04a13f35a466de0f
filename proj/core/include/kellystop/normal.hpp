#pragma once

namespace kellystop::normal {

/// Standard normal density.
double pdf(double x) noexcept;

/// Standard normal distribution function, via erfc (full double accuracy
/// in both tails).
double cdf(double x) noexcept;

/// Inverse of cdf on (0, 1); returns -inf at 0 and +inf at 1, NaN outside.
/// Acklam's rational approximation (relative error ~1e-9) followed by one
/// Halley step against cdf(), which brings it to ~1e-15.
double quantile(double p) noexcept;

}  // namespace kellystop::normal
