#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "isoplan/activations.hpp"

namespace isoplan {

enum class WeightEnsemble {
    /// iid N(0, sigma_w2 / (width * depth)) entries.
    GaussianIID,
    /// sqrt(sigma_w2 / depth) * Q with Q Haar-orthogonal.
    ScaledOrthogonal,
};

std::string_view to_string(WeightEnsemble ensemble);
WeightEnsemble ensemble_from_name(std::string_view name);

/// Residual network x^l = phi(W^l x^{l-1} + b^l) + skip * x^{l-1}.
struct NetConfig {
    std::size_t depth = 10;     ///< number of residual blocks L
    std::size_t width = 500;    ///< neurons per layer N
    double skip = 1.0;          ///< skip-connection coefficient a
    double sigma_w2 = 1.0;      ///< weight scale; entry variance is sigma_w2 / (N L)
    double sigma_b2 = 0.0;      ///< bias variance
    WeightEnsemble ensemble = WeightEnsemble::GaussianIID;
    std::uint64_t seed = 1;
    double input_second_moment = 1.0;  ///< <x^2>_0

    /// Throws ContractError on non-positive sizes or negative variances.
    void validate() const;
};

/// Mean-field depth profile. Vectors are indexed by layer - 1.
struct SignalProfile {
    std::vector<double> q;      ///< preactivation variance q^l
    std::vector<double> x2;     ///< post-activation second moment <x^2>_l
    std::vector<double> xmean;  ///< post-activation mean <x>_l
    std::vector<double> c2;     ///< per-layer cumulant sigma_w2 * E[phi'^2]
    double c = 0.0;             ///< effective cumulant, the depth average of c2
};

/// q beyond this is reported as divergence.
inline constexpr double kDivergenceCap = 1e12;
/// Relative spread of c2 across layers above which a profile is flagged.
inline constexpr double kVariabilityWarning = 0.25;

/// c2 = sigma_w2 * E[phi'(h)^2], h ~ N(0, q).
double per_layer_cumulant(const Activation& act, double sigma_w2, double q);

/// Solves the mean-field recurrence
///   <x>_l   = a <x>_{l-1} + E[phi(h^l)]
///   <x^2>_l = E[phi(h^l)^2] + 2a <x>_{l-1} E[phi(h^l)] + a^2 <x^2>_{l-1}
///   q^{l+1} = sigma_b2 + (sigma_w2 / L) <x^2>_l
/// from <x>_0 = 0, <x^2>_0 = config.input_second_moment.
/// Throws DivergenceError when q^l leaves [0, kDivergenceCap].
SignalProfile propagate_q(const NetConfig& config, const Activation& act);

/// Same recurrence started from an explicit q^1 instead of
/// sigma_b2 + sigma_w2 <x^2>_0 / L. <x^2>_0 is still taken from the config.
SignalProfile propagate_q(const NetConfig& config, const Activation& act, double initial_q);

/// Closed-form depth profiles for skip = 1:
///   antisymmetric phi: q^l = q^1 + (l-1)(sigma_w2/L) E[phi^2](q^1)
///   sigmoid:           q^l = q^1 + (l-1)(sigma_w2/L) E[phi^2](q^1) + (sigma_w2/4L)(l-1)(l-2)
/// x2 is recovered from consecutive q, c2 is evaluated at the approximate q.
/// Throws CapabilityError for other activations or skip != 1.
SignalProfile propagate_q_approx(const NetConfig& config, const Activation& act);

struct EffectiveCumulant {
    double c = 0.0;
    double variability = 0.0;  ///< max_l |c2^l - c| / c, zero when c = 0
    bool exceeds_warning() const noexcept { return variability > kVariabilityWarning; }
};

/// Depth average of the per-layer cumulants. Throws ContractError on an empty profile.
EffectiveCumulant effective_cumulant(const SignalProfile& profile);

}  // namespace isoplan
