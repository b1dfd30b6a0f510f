#pragma once

namespace itolab {

// Standard normal quantile, Wichura's AS 241 (PPND16). Relative accuracy is
// about 1e-16 over (0,1); the evaluation is a fixed sequence of rational
// polynomials plus log/sqrt, so results do not depend on call order.
// p must lie in the open interval (0,1); p <= 0 or p >= 1 returns -inf/+inf.
double inverse_normal_cdf(double p) noexcept;

// Standard normal CDF via erfc.
double normal_cdf(double x) noexcept;

} // namespace itolab
