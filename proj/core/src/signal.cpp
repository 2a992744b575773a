#include "isoplan/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isoplan/errors.hpp"

namespace isoplan {

namespace {

void check_q(double q, std::size_t layer) {
    if (!std::isfinite(q) || q < 0.0 || q > kDivergenceCap) {
        throw DivergenceError(layer, "signal diverged at layer " + std::to_string(layer) +
                                         ": q = " + std::to_string(q));
    }
}

// Mean of c2 that reproduces the common value exactly when all layers agree.
double depth_average(const std::vector<double>& c2) {
    const double base = c2.front();
    double excess = 0.0;
    for (double v : c2) excess += v - base;
    return base + excess / static_cast<double>(c2.size());
}

}  // namespace

std::string_view to_string(WeightEnsemble ensemble) {
    switch (ensemble) {
        case WeightEnsemble::GaussianIID: return "gaussian";
        case WeightEnsemble::ScaledOrthogonal: return "orthogonal";
    }
    return "gaussian";
}

WeightEnsemble ensemble_from_name(std::string_view name) {
    if (name == "gaussian" || name == "gaussian_iid") return WeightEnsemble::GaussianIID;
    if (name == "orthogonal" || name == "scaled_orthogonal") return WeightEnsemble::ScaledOrthogonal;
    throw ContractError("unknown weight ensemble '" + std::string(name) + "'");
}

void NetConfig::validate() const {
    if (depth == 0) throw ContractError("NetConfig: depth must be positive");
    if (width == 0) throw ContractError("NetConfig: width must be positive");
    if (!std::isfinite(skip)) throw ContractError("NetConfig: skip must be finite");
    if (!(sigma_w2 >= 0.0) || !std::isfinite(sigma_w2)) {
        throw ContractError("NetConfig: sigma_w2 must be finite and non-negative");
    }
    if (!(sigma_b2 >= 0.0) || !std::isfinite(sigma_b2)) {
        throw ContractError("NetConfig: sigma_b2 must be finite and non-negative");
    }
    if (!(input_second_moment >= 0.0) || !std::isfinite(input_second_moment)) {
        throw ContractError("NetConfig: input_second_moment must be finite and non-negative");
    }
}

double per_layer_cumulant(const Activation& act, double sigma_w2, double q) {
    if (sigma_w2 == 0.0) return 0.0;
    if (auto kappa = act.constant_slope_moment()) return sigma_w2 * *kappa;
    return sigma_w2 * moments(act, q).m_dphi2;
}

SignalProfile propagate_q(const NetConfig& config, const Activation& act) {
    config.validate();
    const double q1 = config.sigma_b2 +
                      config.sigma_w2 * config.input_second_moment / static_cast<double>(config.depth);
    return propagate_q(config, act, q1);
}

SignalProfile propagate_q(const NetConfig& config, const Activation& act, double initial_q) {
    config.validate();
    const std::size_t depth = config.depth;
    const double a = config.skip;
    const double gain = config.sigma_w2 / static_cast<double>(depth);

    SignalProfile p;
    p.q.reserve(depth);
    p.x2.reserve(depth);
    p.xmean.reserve(depth);
    p.c2.reserve(depth);

    // The running mean <x>_{l-1} carries the whole history sum
    // sum_k a^k E[phi(h^{l-k})], so each layer costs O(1).
    double xmean_prev = 0.0;
    double x2_prev = config.input_second_moment;
    double q = initial_q;
    for (std::size_t l = 1; l <= depth; ++l) {
        check_q(q, l);
        const GaussianMoments m = moments(act, q);
        const double x2 = m.m_phi2 + 2.0 * a * xmean_prev * m.m_phi + a * a * x2_prev;
        const double xmean = a * xmean_prev + m.m_phi;

        p.q.push_back(q);
        p.x2.push_back(x2);
        p.xmean.push_back(xmean);
        if (config.sigma_w2 == 0.0) {
            p.c2.push_back(0.0);
        } else if (auto kappa = act.constant_slope_moment()) {
            p.c2.push_back(config.sigma_w2 * *kappa);
        } else {
            p.c2.push_back(config.sigma_w2 * m.m_dphi2);
        }

        xmean_prev = xmean;
        x2_prev = x2;
        q = config.sigma_b2 + gain * x2;
    }
    p.c = depth_average(p.c2);
    return p;
}

SignalProfile propagate_q_approx(const NetConfig& config, const Activation& act) {
    config.validate();
    if (config.skip != 1.0) {
        throw CapabilityError("propagate_q_approx: closed profiles exist only for skip = 1");
    }
    const bool sigmoid = act.kind() == ActivationKind::Sigmoid;
    if (!sigmoid && !act.is_antisymmetric()) {
        throw CapabilityError("propagate_q_approx: activation '" + act.name() +
                              "' is neither antisymmetric nor sigmoid");
    }

    const double depth = static_cast<double>(config.depth);
    const double gain = config.sigma_w2 / depth;
    const double q1 = config.sigma_b2 + gain * config.input_second_moment;
    check_q(q1, 1);
    const double slope = gain * moments(act, q1).m_phi2;

    auto q_at = [&](std::size_t l) {
        const double steps = static_cast<double>(l - 1);
        double q = q1 + steps * slope;
        if (sigmoid) q += 0.25 * gain * steps * (steps - 1.0);
        return q;
    };

    SignalProfile p;
    double xmean = 0.0;
    for (std::size_t l = 1; l <= config.depth; ++l) {
        const double q = q_at(l);
        check_q(q, l);
        p.q.push_back(q);
        // <x^2>_l inverted from q^{l+1} = sigma_b2 + gain <x^2>_l.
        p.x2.push_back(gain > 0.0 ? (q_at(l + 1) - config.sigma_b2) / gain
                                  : config.input_second_moment);
        xmean += sigmoid ? 0.5 : 0.0;
        p.xmean.push_back(xmean);
        p.c2.push_back(per_layer_cumulant(act, config.sigma_w2, q));
    }
    p.c = depth_average(p.c2);
    return p;
}

EffectiveCumulant effective_cumulant(const SignalProfile& profile) {
    if (profile.c2.empty()) throw ContractError("effective_cumulant: empty profile");
    EffectiveCumulant out;
    out.c = depth_average(profile.c2);
    if (out.c != 0.0) {
        double worst = 0.0;
        for (double v : profile.c2) worst = std::max(worst, std::abs(v - out.c));
        out.variability = worst / std::abs(out.c);
    }
    return out;
}

}  // namespace isoplan
