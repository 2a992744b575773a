#include "isoplan/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isoplan/errors.hpp"
#include "isoplan/special.hpp"

namespace isoplan {

namespace {

// exp(-z^2/2) underflows to zero just past 38.6.
constexpr double kDomainHalfWidth = 38.5;
constexpr double kBulkEdge = 8.0;
constexpr unsigned kMaxDepth = 30;

GaussRule build_hermite(std::size_t n) {
    if (n == 0) throw ContractError("gauss_hermite_rule: need at least one node");
    // Jacobi matrix of the monic He_k recurrence: He_{k+1} = z He_k - k He_{k-1}.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for (Eigen::Index k = 0; k < off.size(); ++k) off[k] = std::sqrt(static_cast<double>(k + 1));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalError(0.0, "gauss_hermite_rule: tridiagonal eigensolver failed");
    }

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        rule.nodes[i] = solver.eigenvalues()[col];
        const double v0 = solver.eigenvectors()(0, col);
        rule.weights[i] = v0 * v0;
    }
    // Symmetrize to remove eigensolver round-off.
    for (std::size_t i = 0, j = n - 1; i < j; ++i, --j) {
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

template <typename F>
double adaptive(const F& f, double a, double b, double abs_tol, unsigned depth) {
    double error = 0.0;
    double l1 = 0.0;
    const double estimate = Kronrod::integrate(f, a, b, 0, 0.0, &error, &l1);
    // Without refinement Boost reports the error on the reference interval.
    error *= 0.5 * (b - a);
    // Below ~100 ulp of the local L1 norm the estimate is round-off.
    const double noise = 100.0 * std::numeric_limits<double>::epsilon() * l1;
    if (error <= std::max(abs_tol, noise) || depth == 0) return estimate;
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, 0.5 * abs_tol, depth - 1) +
           adaptive(f, mid, b, 0.5 * abs_tol, depth - 1);
}

std::string describe_node(double z, double q) {
    return "z=" + std::to_string(z) + " (argument " + std::to_string(std::sqrt(q) * z) + ")";
}

}  // namespace

const GaussRule& gauss_hermite_rule(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
    return it->second;
}

double gaussian_moment(const std::function<double(double)>& f, double q,
                       std::span<const double> kinks, const QuadratureOptions& options) {
    if (!std::isfinite(q) || q < 0.0) {
        throw DomainError("gaussian_moment: variance must be finite and non-negative, got " +
                          std::to_string(q));
    }
    if (q == 0.0) {
        const double v = f(0.0);
        if (!std::isfinite(v)) throw DomainError("gaussian_moment: non-finite integrand at 0");
        return v;
    }

    const double scale = std::sqrt(q);
    auto checked = [&](double z) {
        const double v = f(scale * z);
        if (!std::isfinite(v)) {
            throw DomainError("gaussian_moment: non-finite integrand at node " +
                              describe_node(z, q));
        }
        return v;
    };

    if (options.rule == QuadratureRule::GaussHermite) {
        const GaussRule& rule = gauss_hermite_rule(options.hermite_nodes);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * checked(rule.nodes[i]);
        }
        return sum;
    }

    std::vector<double> cuts{-kDomainHalfWidth, -kBulkEdge, 0.0, kBulkEdge, kDomainHalfWidth};
    for (double k : kinks) {
        const double zk = k / scale;
        if (std::isfinite(zk) && std::abs(zk) < kDomainHalfWidth) cuts.push_back(zk);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double z) {
        const double w = normal_pdf(z);
        const double v = checked(z);
        return w == 0.0 ? 0.0 : w * v;
    };

    // The error target is absolute, scaled by the L1 norm of the whole
    // integrand, so tails that underflow into subnormals do not force
    // needless subdivision.
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double seg_l1 = 0.0;
        Kronrod::integrate(integrand, cuts[i], cuts[i + 1], 0, 0.0, nullptr, &seg_l1);
        l1 += seg_l1;
    }
    const double target = std::max(options.tolerance * l1, std::numeric_limits<double>::min());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0.0) continue;
        const double share = target * (cuts[i + 1] - cuts[i]) / (2.0 * kDomainHalfWidth);
        total += adaptive(integrand, cuts[i], cuts[i + 1], share, kMaxDepth);
    }
    return total;
}

}  // namespace isoplan
