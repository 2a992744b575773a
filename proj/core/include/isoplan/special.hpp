#pragma once

namespace isoplan {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341145182;

/// Scaled complementary error function exp(x^2) * erfc(x).
///
/// Finite for every x >= 0 (it decays like 1/(x sqrt(pi))); the naive
/// product overflows/underflows once x^2 exceeds ~700.
double erfcx(double x);

/// Standard normal density.
double normal_pdf(double z);

}  // namespace isoplan
