#include "isoplan/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "isoplan/errors.hpp"

namespace isoplan {

double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    if (sorted.empty()) throw ContractError("ks_distance: empty sample");
    const double n = static_cast<double>(sorted.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double below = static_cast<double>(i) / n;
        const double above = static_cast<double>(i + 1) / n;
        worst = std::max({worst, std::abs(f - below), std::abs(above - f)});
    }
    return worst;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ContractError("ks_two_sample: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double worst = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return worst;
}

double relative_error(double value, double reference) {
    const double diff = std::abs(value - reference);
    return reference == 0.0 ? diff : diff / std::abs(reference);
}

}  // namespace isoplan
