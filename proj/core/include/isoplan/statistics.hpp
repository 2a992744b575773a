#pragma once

#include <functional>
#include <span>

namespace isoplan {

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `sorted` (ascending)
/// against a continuous reference CDF. Both sides of every jump are checked.
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic; inputs must be sorted ascending.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// |value - reference| / |reference|, or |value| when the reference is zero.
double relative_error(double value, double reference);

}  // namespace isoplan
