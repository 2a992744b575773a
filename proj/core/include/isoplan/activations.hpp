#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isoplan/quadrature.hpp"

namespace isoplan {

enum class ActivationKind { Linear, ReLU, LeakyReLU, HardTanh, Tanh, Sigmoid, SELU, Custom };

inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;
inline constexpr double kSeluBeta = 1.6732632423543772848170429916717;

/// How the hard-tanh moments depend on the preactivation variance.
enum class HardTanhMoments {
    /// erf(1/sqrt(2q)) and the matching second moment at the actual q.
    VarianceDependent,
    /// Constants frozen at q = 1, as in the commonly quoted erf(1/sqrt(2)) form.
    UnitVariance,
};

/// The three Gaussian averages the signal recurrences consume, all taken
/// over h ~ N(0, q).
struct GaussianMoments {
    double m_phi = 0.0;    ///< E[phi(h)]
    double m_phi2 = 0.0;   ///< E[phi(h)^2]
    double m_dphi2 = 0.0;  ///< E[phi'(h)^2]
};

/// Pointwise activation with derivative and Gaussian-moment formulas.
///
/// Derivatives at kinks use a fixed one-sided value: ReLU and leaky ReLU take
/// the right limit at 0 (slope 1), hard tanh takes the inner value at +-1
/// (slope 1). These points have Gaussian measure zero.
class Activation {
public:
    using Function = std::function<double(double)>;

    static Activation linear();
    static Activation relu();
    /// phi(x) = max(alpha x, x), alpha in [0, 1].
    static Activation leaky_relu(double alpha);
    static Activation hard_tanh(HardTanhMoments moments = HardTanhMoments::VarianceDependent);
    static Activation tanh();
    static Activation sigmoid();
    /// phi(x) = lambda x for x > 0 and lambda beta (e^x - 1) otherwise.
    static Activation selu(double lambda = kSeluLambda, double beta = kSeluBeta);
    /// User-supplied phi and phi'. `kinks` lists the points where either is
    /// not smooth so quadrature can split there.
    static Activation custom(std::string name, Function phi, Function dphi,
                             std::vector<double> kinks = {}, bool antisymmetric = false);

    /// Parses "relu", "leaky_relu", "hardtanh", "tanh", "sigmoid", "selu", "linear".
    /// Parameters (alpha, lambda, beta) are taken from the arguments.
    static Activation from_name(std::string_view name, double alpha = 0.01,
                                double lambda = kSeluLambda, double beta = kSeluBeta,
                                HardTanhMoments hard_tanh_moments = HardTanhMoments::VarianceDependent);

    ActivationKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    double alpha() const noexcept { return alpha_; }
    double lambda() const noexcept { return lambda_; }
    double beta() const noexcept { return beta_; }
    HardTanhMoments hard_tanh_moments() const noexcept { return hard_tanh_mode_; }

    double operator()(double x) const;
    double derivative(double x) const;

    /// Points in the argument where phi or phi' is not smooth.
    const std::vector<double>& kinks() const noexcept { return kinks_; }

    /// phi(-x) = -phi(x); E[phi(h)] vanishes identically.
    bool is_antisymmetric() const noexcept;

    /// True when all three moments have closed forms (Linear, ReLU, LeakyReLU,
    /// HardTanh, SELU). Sigmoid only has a closed mean.
    bool has_closed_moments() const noexcept;

    /// E[phi'^2] when it does not depend on q (Linear, ReLU, LeakyReLU, and
    /// hard tanh in the unit-variance mode).
    std::optional<double> constant_slope_moment() const noexcept;

private:
    Activation() = default;

    ActivationKind kind_ = ActivationKind::Linear;
    std::string name_;
    double alpha_ = 1.0;
    double lambda_ = 1.0;
    double beta_ = 0.0;
    HardTanhMoments hard_tanh_mode_ = HardTanhMoments::VarianceDependent;
    bool custom_antisymmetric_ = false;
    std::vector<double> kinks_;
    std::shared_ptr<const Function> custom_phi_;
    std::shared_ptr<const Function> custom_dphi_;
};

/// Exact moments. Throws CapabilityError for Tanh and Custom. For Sigmoid the
/// mean is exact (1/2) and the other two come from quadrature.
GaussianMoments moments_closed(const Activation& act, double q);

/// All three moments by quadrature.
GaussianMoments moments_quadrature(const Activation& act, double q,
                                   const QuadratureOptions& options = {});

/// Closed forms where they exist, quadrature otherwise. q = 0 gives the
/// point values phi(0), phi(0)^2, phi'(0)^2.
GaussianMoments moments(const Activation& act, double q);

}  // namespace isoplan
