#include "isoplan/activations.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "isoplan/errors.hpp"
#include "isoplan/special.hpp"

namespace isoplan {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

GaussianMoments point_moments(const Activation& act) {
    const double v = act(0.0);
    const double d = act.derivative(0.0);
    return {v, v * v, d * d};
}

}  // namespace

Activation Activation::linear() {
    Activation a;
    a.kind_ = ActivationKind::Linear;
    a.name_ = "linear";
    return a;
}

Activation Activation::relu() {
    Activation a;
    a.kind_ = ActivationKind::ReLU;
    a.name_ = "relu";
    a.alpha_ = 0.0;
    a.kinks_ = {0.0};
    return a;
}

Activation Activation::leaky_relu(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ContractError("leaky_relu: alpha must lie in [0, 1], got " + std::to_string(alpha));
    }
    Activation a;
    a.kind_ = ActivationKind::LeakyReLU;
    a.name_ = "leaky_relu";
    a.alpha_ = alpha;
    a.kinks_ = {0.0};
    return a;
}

Activation Activation::hard_tanh(HardTanhMoments moments) {
    Activation a;
    a.kind_ = ActivationKind::HardTanh;
    a.name_ = "hardtanh";
    a.hard_tanh_mode_ = moments;
    a.kinks_ = {-1.0, 1.0};
    return a;
}

Activation Activation::tanh() {
    Activation a;
    a.kind_ = ActivationKind::Tanh;
    a.name_ = "tanh";
    return a;
}

Activation Activation::sigmoid() {
    Activation a;
    a.kind_ = ActivationKind::Sigmoid;
    a.name_ = "sigmoid";
    return a;
}

Activation Activation::selu(double lambda, double beta) {
    if (!(lambda > 0.0) || !std::isfinite(lambda) || !(beta >= 0.0) || !std::isfinite(beta)) {
        throw ContractError("selu: need lambda > 0 and beta >= 0");
    }
    Activation a;
    a.kind_ = ActivationKind::SELU;
    a.name_ = "selu";
    a.lambda_ = lambda;
    a.beta_ = beta;
    a.kinks_ = {0.0};
    return a;
}

Activation Activation::custom(std::string name, Function phi, Function dphi,
                              std::vector<double> kinks, bool antisymmetric) {
    if (!phi || !dphi) {
        throw ContractError("custom activation '" + name + "' must supply both phi and phi'");
    }
    Activation a;
    a.kind_ = ActivationKind::Custom;
    a.name_ = std::move(name);
    a.custom_phi_ = std::make_shared<const Function>(std::move(phi));
    a.custom_dphi_ = std::make_shared<const Function>(std::move(dphi));
    a.kinks_ = std::move(kinks);
    a.custom_antisymmetric_ = antisymmetric;
    return a;
}

Activation Activation::from_name(std::string_view name, double alpha, double lambda, double beta,
                                 HardTanhMoments hard_tanh_moments) {
    const std::string key = lowercase(name);
    if (key == "linear" || key == "identity") return linear();
    if (key == "relu") return relu();
    if (key == "leaky_relu" || key == "leakyrelu" || key == "lrelu") return leaky_relu(alpha);
    if (key == "hardtanh" || key == "hard_tanh") return hard_tanh(hard_tanh_moments);
    if (key == "tanh") return tanh();
    if (key == "sigmoid") return sigmoid();
    if (key == "selu") return selu(lambda, beta);
    throw ContractError("unknown activation '" + std::string(name) + "'");
}

double Activation::operator()(double x) const {
    switch (kind_) {
        case ActivationKind::Linear: return x;
        case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
        case ActivationKind::LeakyReLU: return x >= 0.0 ? x : alpha_ * x;
        case ActivationKind::HardTanh: return std::clamp(x, -1.0, 1.0);
        case ActivationKind::Tanh: return std::tanh(x);
        case ActivationKind::Sigmoid: return stable_sigmoid(x);
        case ActivationKind::SELU: return x > 0.0 ? lambda_ * x : lambda_ * beta_ * std::expm1(x);
        case ActivationKind::Custom: return (*custom_phi_)(x);
    }
    return 0.0;
}

double Activation::derivative(double x) const {
    switch (kind_) {
        case ActivationKind::Linear: return 1.0;
        case ActivationKind::ReLU: return x >= 0.0 ? 1.0 : 0.0;
        case ActivationKind::LeakyReLU: return x >= 0.0 ? 1.0 : alpha_;
        case ActivationKind::HardTanh: return std::abs(x) <= 1.0 ? 1.0 : 0.0;
        case ActivationKind::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case ActivationKind::Sigmoid: {
            const double s = stable_sigmoid(x);
            return s * (1.0 - s);
        }
        case ActivationKind::SELU: return x >= 0.0 ? lambda_ : lambda_ * beta_ * std::exp(x);
        case ActivationKind::Custom: return (*custom_dphi_)(x);
    }
    return 0.0;
}

bool Activation::is_antisymmetric() const noexcept {
    switch (kind_) {
        case ActivationKind::Linear:
        case ActivationKind::HardTanh:
        case ActivationKind::Tanh: return true;
        case ActivationKind::LeakyReLU: return alpha_ == 1.0;
        case ActivationKind::Custom: return custom_antisymmetric_;
        default: return false;
    }
}

bool Activation::has_closed_moments() const noexcept {
    switch (kind_) {
        case ActivationKind::Linear:
        case ActivationKind::ReLU:
        case ActivationKind::LeakyReLU:
        case ActivationKind::HardTanh:
        case ActivationKind::SELU: return true;
        default: return false;
    }
}

std::optional<double> Activation::constant_slope_moment() const noexcept {
    switch (kind_) {
        case ActivationKind::Linear: return 1.0;
        case ActivationKind::ReLU: return 0.5;
        case ActivationKind::LeakyReLU: return 0.5 * (1.0 + alpha_ * alpha_);
        case ActivationKind::HardTanh:
            if (hard_tanh_mode_ == HardTanhMoments::UnitVariance) return std::erf(1.0 / kSqrt2);
            return std::nullopt;
        default: return std::nullopt;
    }
}

GaussianMoments moments_closed(const Activation& act, double q) {
    if (!std::isfinite(q) || q < 0.0) {
        throw DomainError("moments_closed: variance must be finite and non-negative");
    }
    if (act.kind() == ActivationKind::Tanh || act.kind() == ActivationKind::Custom) {
        throw CapabilityError("moments_closed: activation '" + act.name() +
                              "' has no closed-form moments; use moments_quadrature");
    }
    if (q == 0.0) return point_moments(act);

    const double sq = std::sqrt(q);
    const double inv_sqrt_2pi = 1.0 / (kSqrt2 * kSqrtPi);
    GaussianMoments m;
    switch (act.kind()) {
        case ActivationKind::Linear:
            m = {0.0, q, 1.0};
            break;
        case ActivationKind::ReLU:
            m = {sq * inv_sqrt_2pi, 0.5 * q, 0.5};
            break;
        case ActivationKind::LeakyReLU: {
            const double a = act.alpha();
            m = {(1.0 - a) * sq * inv_sqrt_2pi, 0.5 * (1.0 + a * a) * q, 0.5 * (1.0 + a * a)};
            break;
        }
        case ActivationKind::HardTanh: {
            if (act.hard_tanh_moments() == HardTanhMoments::UnitVariance) {
                const double e = std::erf(1.0 / kSqrt2);
                const double g = std::sqrt(2.0 / (kPi * std::exp(1.0)));
                m = {0.0, q * (e - g) + std::erfc(1.0 / kSqrt2), e};
            } else {
                // Inside |h| <= 1 phi is the identity, outside phi^2 = 1.
                const double t = 1.0 / sq;
                const double inner = std::erf(t / kSqrt2);
                const double truncated = inner - t * std::sqrt(2.0 / kPi) * std::exp(-0.5 * t * t);
                m = {0.0, q * truncated + std::erfc(t / kSqrt2), inner};
            }
            break;
        }
        case ActivationKind::Sigmoid: {
            m = moments_quadrature(act, q);
            m.m_phi = 0.5;
            break;
        }
        case ActivationKind::SELU: {
            const double lam = act.lambda();
            const double beta = act.beta();
            const double tail2 = erfcx(std::sqrt(2.0 * q));  // e^{2q} erfc(sqrt(2q))
            const double tail1 = erfcx(std::sqrt(0.5 * q));  // e^{q/2} erfc(sqrt(q/2))
            m.m_phi = lam * sq * inv_sqrt_2pi + 0.5 * lam * beta * (tail1 - 1.0);
            m.m_phi2 = 0.5 * lam * lam * q +
                       0.5 * beta * beta * lam * lam * (1.0 + tail2 - 2.0 * tail1);
            m.m_dphi2 = 0.5 * lam * lam * (1.0 + beta * beta * tail2);
            break;
        }
        default: break;
    }
    return m;
}

GaussianMoments moments_quadrature(const Activation& act, double q,
                                   const QuadratureOptions& options) {
    const auto& kinks = act.kinks();
    GaussianMoments m;
    if (act.is_antisymmetric()) {
        m.m_phi = 0.0;
    } else {
        m.m_phi = gaussian_moment([&](double x) { return act(x); }, q, kinks, options);
    }
    m.m_phi2 = gaussian_moment(
        [&](double x) {
            const double v = act(x);
            return v * v;
        },
        q, kinks, options);
    m.m_dphi2 = gaussian_moment(
        [&](double x) {
            const double d = act.derivative(x);
            return d * d;
        },
        q, kinks, options);
    return m;
}

GaussianMoments moments(const Activation& act, double q) {
    if (q == 0.0) return point_moments(act);
    if (act.kind() == ActivationKind::Sigmoid || act.has_closed_moments()) {
        return moments_closed(act, q);
    }
    return moments_quadrature(act, q);
}

}  // namespace isoplan
