#include "isoplan/special.hpp"

#include <cmath>

namespace isoplan {

namespace {

// Below this the direct product keeps full relative precision.
constexpr double kDirectLimit = 4.0;
constexpr int kFractionTerms = 96;

}  // namespace

double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
    if (x < kDirectLimit) return std::exp(x * x) * std::erfc(x);

    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    double tail = x;
    for (int n = kFractionTerms; n >= 1; --n) tail = x + 0.5 * n / tail;
    return 1.0 / (tail * kSqrtPi);
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / (kSqrt2 * kSqrtPi);
}

}  // namespace isoplan
