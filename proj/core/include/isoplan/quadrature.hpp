#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace isoplan {

/// Integration rule used for Gaussian averages E[f(sqrt(q) z)], z ~ N(0, 1).
enum class QuadratureRule {
    /// Adaptive Gauss-Kronrod on [-38, 38] split at 0, +-8 and the kinks.
    Adaptive,
    /// Fixed probabilists' Gauss-Hermite rule, no kink splitting.
    GaussHermite,
};

struct QuadratureOptions {
    QuadratureRule rule = QuadratureRule::Adaptive;
    std::size_t hermite_nodes = 201;
    double tolerance = 1e-14;
};

/// Nodes and weights of a rule for the standard normal measure; weights sum to 1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch construction of the n-point probabilists' Gauss-Hermite rule.
/// The 201-point rule is built once and cached.
const GaussRule& gauss_hermite_rule(std::size_t n);

/// E[f(sqrt(q) z)] for z ~ N(0, 1).
///
/// `kinks` are points in the argument of f where f (or its derivative) is
/// discontinuous; the adaptive rule splits the integration domain there.
/// q = 0 collapses to f(0). Throws DomainError for negative or non-finite q
/// and when f returns a non-finite value at a quadrature node.
double gaussian_moment(const std::function<double(double)>& f, double q,
                       std::span<const double> kinks = {},
                       const QuadratureOptions& options = {});

}  // namespace isoplan
