#include "isoplan/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isoplan/errors.hpp"
#include "isoplan/special.hpp"

namespace isoplan {

namespace {

using Complex = std::complex<double>;

constexpr int kMaxNewton = 80;
constexpr int kMaxHalvings = 40;
constexpr double kTargetResidual = 1e-15;
constexpr double kStartRatio = 0.5;

// skip^{2L} G = (zG - 1) exp(kappa (1 - 2zG)), kappa = c / skip^2.
//
// Newton runs on w = zG - 1, where the equation reads
//   w exp(-kappa (1 + 2w)) = skip^{2L} (1 + w) / z.
// Far from the support w ~ m1/z is small and forming it from G would cancel.
struct GreenEquation {
    double kappa;
    double prefactor;

    GreenEquation(double c, double skip, std::size_t depth)
        : kappa(c / (skip * skip)), prefactor(std::pow(skip, 2.0 * static_cast<double>(depth))) {}

    double residual_w(Complex z, Complex w) const {
        const Complex lhs = w * std::exp(-kappa * (1.0 + 2.0 * w));
        const Complex rhs = prefactor * (1.0 + w) / z;
        const double scale = std::abs(lhs) + std::abs(rhs);
        if (!std::isfinite(scale)) return std::numeric_limits<double>::infinity();
        return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
    }

    double residual(Complex z, Complex g) const {
        const Complex w = z * g - 1.0;
        const Complex rhs = w * std::exp(kappa * (1.0 - 2.0 * z * g));
        const Complex lhs = prefactor * g;
        const double scale = std::abs(lhs) + std::abs(rhs);
        if (!std::isfinite(scale)) return std::numeric_limits<double>::infinity();
        return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
    }

    template <typename Residual, typename Step>
    static double damped_newton(Complex& u, Residual residual, Step step) {
        double res = residual(u);
        for (int it = 0; it < kMaxNewton && res > kTargetResidual; ++it) {
            const Complex delta = step(u);
            if (!std::isfinite(std::abs(delta))) break;
            double t = 1.0;
            bool improved = false;
            for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
                const Complex trial = u - t * delta;
                const double r = residual(trial);
                if (r < res) {
                    u = trial;
                    res = r;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        return res;
    }

    // Polishes G at z; returns the scaled residual of the form it iterated in.
    double newton(Complex z, Complex& g, bool far) const {
        if (far) {
            Complex w = z * g - 1.0;
            const double res = damped_newton(
                w, [&](Complex u) { return residual_w(z, u); },
                [&](Complex u) {
                    const Complex e = std::exp(-kappa * (1.0 + 2.0 * u));
                    const Complex f = u * e - prefactor * (1.0 + u) / z;
                    const Complex df = e * (1.0 - 2.0 * kappa * u) - prefactor / z;
                    return f / df;
                });
            g = (1.0 + w) / z;
            return res;
        }
        return damped_newton(
            g, [&](Complex u) { return residual(z, u); },
            [&](Complex u) {
                const Complex w = z * u - 1.0;
                const Complex e = std::exp(kappa * (1.0 - 2.0 * z * u));
                const Complex f = w * e - prefactor * u;
                const Complex df = z * e * (1.0 - 2.0 * kappa * w) - prefactor;
                return f / df;
            });
    }
};

void check_cumulant(double c, const char* where) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw ContractError(std::string(where) + ": cumulant must be finite and non-negative");
    }
}

// Smoothed density at height eps, no extrapolation.
double smoothed_density(double lambda, double eps, double c, double skip, std::size_t depth) {
    return -std::imag(solve_green(Complex(lambda, eps), c, skip, depth)) / kPi;
}

double extrapolated_density(double lambda, double eps, double c, double skip, std::size_t depth) {
    const double r1 = smoothed_density(lambda, eps, c, skip, depth);
    const double r2 = smoothed_density(lambda, 2.0 * eps, c, skip, depth);
    return std::max(0.0, 2.0 * r1 - r2);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

}  // namespace

double green_residual(Complex z, Complex g, double c, double skip, std::size_t depth) {
    return GreenEquation(c, skip, depth).residual(z, g);
}

Complex solve_green(Complex z, double c, double skip, std::size_t depth) {
    if (!(std::imag(z) > 0.0) || !std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) {
        throw ContractError("solve_green: need finite z with Im z > 0");
    }
    check_cumulant(c, "solve_green");
    if (skip == 0.0) throw ContractError("solve_green: skip must be non-zero");

    const GreenEquation eq(c, skip, depth);
    if (c == 0.0) return 1.0 / (z - eq.prefactor);

    const double x = std::real(z);
    const double target = std::imag(z);
    const double radius = eq.prefactor * spectral_edges(eq.kappa).upper;
    const double mean = eq.prefactor * std::exp(eq.kappa);

    // Beyond this modulus zG - 1 is small and Newton switches to w = zG - 1.
    const double far_radius = 2.0 * (radius + 1.0);
    auto is_far = [&](Complex zz) { return std::abs(zz) > far_radius; };

    double height = std::max(target, 4.0 * (std::abs(x) + radius + 1.0));
    Complex zs(x, height);
    Complex g = (1.0 + mean / zs) / zs;
    double res = eq.newton(zs, g, is_far(zs));
    if (res > kGreenTolerance) {
        throw NumericalError(res, "solve_green: no convergence at the asymptotic start point");
    }

    double ratio = kStartRatio;
    while (height > target) {
        const double next = std::max(target, height * ratio);
        const Complex zn(x, next);
        Complex trial = g;
        const double r = eq.newton(zn, trial, is_far(zn));
        const bool herglotz = std::imag(trial) <= 1e-14 * std::abs(trial);
        if (r <= kGreenTolerance && herglotz) {
            g = trial;
            res = r;
            height = next;
            ratio = std::max(kStartRatio, ratio * ratio);
        } else {
            ratio = std::sqrt(ratio);
            if (ratio > 1.0 - 1e-9) {
                throw NumericalError(r, "solve_green: continuation stalled at Re z = " +
                                            std::to_string(x) + ", Im z = " +
                                            std::to_string(height));
            }
        }
    }
    return g;
}

Edges spectral_edges(double c) {
    check_cumulant(c, "spectral_edges");
    const double root = std::sqrt(c * (2.0 + c));
    return {(1.0 + c - root) * std::exp(-root), (1.0 + c + root) * std::exp(root)};
}

double spectral_mean(double c, double skip, std::size_t depth) {
    const GreenEquation eq(c, skip, depth);
    return eq.prefactor * std::exp(eq.kappa);
}

Edges locate_support_edges(double c, double skip, std::size_t depth, double threshold) {
    check_cumulant(c, "locate_support_edges");
    const double mean = spectral_mean(c, skip, depth);
    if (c == 0.0) return {mean, mean};

    constexpr std::size_t kScan = 1200;
    constexpr double kRelEps = 1e-11;
    const double lo = std::log(mean * 1e-14);
    const double hi = std::log(mean * 1e6);

    auto rho = [&](double lambda) {
        return smoothed_density(lambda, kRelEps * lambda, c, skip, depth);
    };

    std::vector<double> xs(kScan), ys(kScan);
    std::size_t mode = 0;
    for (std::size_t i = 0; i < kScan; ++i) {
        xs[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kScan - 1));
        ys[i] = rho(xs[i]);
        if (ys[i] > ys[mode]) mode = i;
    }
    if (ys[mode] < threshold) {
        throw NumericalError(0.0, "locate_support_edges: density never exceeds the threshold");
    }

    // Bisect between an inside point (>= threshold) and an outside point.
    auto refine = [&](double inside, double outside) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (inside + outside);
            if (mid == inside || mid == outside) break;
            (rho(mid) >= threshold ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    };

    std::size_t down = mode;
    while (down > 0 && ys[down - 1] >= threshold) --down;
    std::size_t up = mode;
    while (up + 1 < kScan && ys[up + 1] >= threshold) ++up;
    if (down == 0 || up + 1 == kScan) {
        throw NumericalError(0.0, "locate_support_edges: support reaches the scan boundary");
    }
    return {refine(xs[down], xs[down - 1]), refine(xs[up], xs[up + 1])};
}

double TheoreticalSpectrum::normalization() const {
    if (point_mass) return 1.0;
    return trapezoid(grid, density);
}

double TheoreticalSpectrum::first_moment() const {
    if (point_mass) return grid.empty() ? 0.0 : grid.front();
    std::vector<double> weighted(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) weighted[i] = grid[i] * density[i];
    return trapezoid(grid, weighted);
}

SpectrumCdf::SpectrumCdf(const TheoreticalSpectrum& spectrum)
    : grid_(spectrum.grid), point_mass_(spectrum.point_mass) {
    if (grid_.empty()) throw ContractError("SpectrumCdf: empty spectrum");
    if (point_mass_) return;
    cumulative_.assign(grid_.size(), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        cumulative_[i] = cumulative_[i - 1] + 0.5 * (grid_[i] - grid_[i - 1]) *
                                                  (spectrum.density[i] + spectrum.density[i - 1]);
    }
    const double total = cumulative_.back();
    if (!(total > 0.0)) throw ContractError("SpectrumCdf: density has no mass");
    for (double& v : cumulative_) v /= total;
}

double SpectrumCdf::operator()(double x) const {
    if (point_mass_) return x >= grid_.front() ? 1.0 : 0.0;
    if (x <= grid_.front()) return 0.0;
    if (x >= grid_.back()) return 1.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    const double t = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
    return cumulative_[i - 1] + t * (cumulative_[i] - cumulative_[i - 1]);
}

TheoreticalSpectrum spectral_density(double c, double skip, std::size_t depth, const GridSpec& spec) {
    check_cumulant(c, "spectral_density");
    if (spec.points < 3) throw ContractError("spectral_density: grid needs at least 3 points");
    if (!(spec.epsilon_scale > 0.0)) throw ContractError("spectral_density: epsilon_scale must be positive");

    TheoreticalSpectrum out;
    out.c = c;
    out.skip = skip;
    out.depth = depth;
    out.axis = SpectrumAxis::SquaredSingular;

    if (c == 0.0) {
        const double location = spectral_mean(0.0, skip, depth);
        out.point_mass = true;
        out.grid = {location};
        out.density = {1.0};
        out.edges = {location, location};
        return out;
    }

    out.edges = skip == 1.0 ? spectral_edges(c) : locate_support_edges(c, skip, depth);
    const double lower = out.edges.lower;
    const double upper = out.edges.upper;
    const double mid = 0.5 * (lower + upper);
    const double half = 0.5 * (upper - lower);
    out.epsilon = spec.epsilon_scale * (upper - lower);

    const std::size_t n = spec.points;
    out.grid.resize(n);
    out.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
        out.grid[i] = mid - half * std::cos(theta);
    }
    out.grid.front() = lower;
    out.grid.back() = upper;
    for (std::size_t i = 0; i < n; ++i) {
        out.density[i] = extrapolated_density(out.grid[i], out.epsilon, c, skip, depth);
    }
    return out;
}

TheoreticalSpectrum to_singular_density(const TheoreticalSpectrum& spectrum) {
    if (spectrum.axis != SpectrumAxis::SquaredSingular) {
        throw ContractError("to_singular_density: spectrum is already on the singular axis");
    }
    TheoreticalSpectrum out = spectrum;
    out.axis = SpectrumAxis::Singular;
    out.edges = {std::sqrt(spectrum.edges.lower), std::sqrt(spectrum.edges.upper)};
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double s = std::sqrt(spectrum.grid[i]);
        out.grid[i] = s;
        if (!spectrum.point_mass) out.density[i] = 2.0 * s * spectrum.density[i];
    }
    return out;
}

}  // namespace isoplan
