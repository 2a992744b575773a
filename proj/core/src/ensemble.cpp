#include "isoplan/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include "isoplan/errors.hpp"
#include "isoplan/statistics.hpp"
#include "parallel.hpp"

namespace isoplan {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_finite(const Vector& v, std::size_t layer, const char* what) {
    if (!v.allFinite()) {
        throw DivergenceError(layer, std::string("forward: non-finite ") + what + " at layer " +
                                         std::to_string(layer));
    }
}

Vector apply(const Activation& act, const Vector& h) {
    return h.unaryExpr([&](double v) { return act(v); });
}

Vector apply_derivative(const Activation& act, const Vector& h) {
    return h.unaryExpr([&](double v) { return act.derivative(v); });
}

struct TrialOutcome {
    std::vector<double> singular_values;
    double frobenius_sq = 0.0;
    std::vector<double> q, x2, c2;
    double input_second_moment = 0.0;
};

// Streams one network: draws W^l, b^l in the same order as NetworkSample::draw
// and folds each Jacobian factor in immediately, so no weights are kept.
TrialOutcome run_trial(const NetConfig& config, const Activation& act, const Vector& x0,
                       Rng& rng, bool with_jacobian) {
    const std::size_t n = config.width;
    const double a = config.skip;
    TrialOutcome out;
    out.q.reserve(config.depth);
    out.x2.reserve(config.depth);
    out.c2.reserve(config.depth);
    out.input_second_moment = x0.squaredNorm() / static_cast<double>(n);

    Vector x = x0;
    Matrix jac;
    Matrix factor;
    for (std::size_t l = 1; l <= config.depth; ++l) {
        const Matrix w = sample_weights(config.ensemble, n, config.sigma_w2, config.depth, rng);
        const Vector b = sample_gaussian(n, config.sigma_b2, rng);
        const Vector h = w * x + b;
        check_finite(h, l, "preactivation");
        const Vector d = apply_derivative(act, h);
        x = apply(act, h) + a * x;
        check_finite(x, l, "activation");

        const double inv_n = 1.0 / static_cast<double>(n);
        out.q.push_back(h.squaredNorm() * inv_n);
        out.x2.push_back(x.squaredNorm() * inv_n);
        out.c2.push_back(config.sigma_w2 * d.squaredNorm() * inv_n);

        if (with_jacobian) {
            factor.noalias() = d.asDiagonal() * w;
            factor.diagonal().array() += a;
            if (l == 1) {
                jac = factor;
            } else {
                jac = factor * jac;
            }
            if (!jac.allFinite()) {
                throw DivergenceError(l, "jacobian: non-finite entries at layer " + std::to_string(l));
            }
        }
    }

    if (with_jacobian) {
        out.frobenius_sq = jac.squaredNorm();
        Eigen::BDCSVD<Matrix> svd(jac);
        const Vector& s = svd.singularValues();
        out.singular_values.assign(s.data(), s.data() + s.size());
        std::sort(out.singular_values.begin(), out.singular_values.end());
    }
    return out;
}

void check_input(const Vector& x0, const NetConfig& config) {
    if (static_cast<std::size_t>(x0.size()) != config.width) {
        throw ContractError("input length " + std::to_string(x0.size()) +
                            " does not match width " + std::to_string(config.width));
    }
}

std::vector<TrialOutcome> run_trials(const NetConfig& config, const Activation& act,
                                     std::size_t trials, const std::vector<Vector>& inputs,
                                     unsigned threads, bool with_jacobian) {
    config.validate();
    if (trials == 0) throw ContractError("simulate: need at least one trial");
    for (const auto& in : inputs) check_input(in, config);

    std::vector<TrialOutcome> outcomes(trials);
    detail::parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(stream_seed(config.seed, t));
        const Vector x0 = inputs.empty() ? sample_gaussian(config.width, 1.0, rng)
                                         : inputs[t % inputs.size()];
        outcomes[t] = run_trial(config, act, x0, rng, with_jacobian);
    });
    return outcomes;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

Vector sample_gaussian(std::size_t size, double variance, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(variance);
    Vector v(static_cast<Eigen::Index>(size));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scale * normal(rng);
    return v;
}

Matrix sample_weights(WeightEnsemble ensemble, std::size_t width, double sigma_w2,
                      std::size_t depth, Rng& rng) {
    if (width < 2 || depth < 1) throw ContractError("sample_weights: need width >= 2 and depth >= 1");
    if (!(sigma_w2 >= 0.0)) throw ContractError("sample_weights: sigma_w2 must be non-negative");

    const auto n = static_cast<Eigen::Index>(width);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
    }

    const double layer_scale = std::sqrt(sigma_w2 / static_cast<double>(depth));
    if (ensemble == WeightEnsemble::GaussianIID) {
        return g * (layer_scale / std::sqrt(static_cast<double>(width)));
    }

    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const auto r = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r[j] < 0.0) q.col(j) = -q.col(j);
    }
    return q * layer_scale;
}

NetworkSample NetworkSample::draw(const NetConfig& config, Rng& rng) {
    config.validate();
    NetworkSample net;
    net.weights.reserve(config.depth);
    net.biases.reserve(config.depth);
    for (std::size_t l = 0; l < config.depth; ++l) {
        net.weights.push_back(
            sample_weights(config.ensemble, config.width, config.sigma_w2, config.depth, rng));
        net.biases.push_back(sample_gaussian(config.width, config.sigma_b2, rng));
    }
    return net;
}

std::vector<LayerState> forward(const NetConfig& config, const Activation& act,
                                const NetworkSample& net, const Vector& x0) {
    check_input(x0, config);
    if (net.weights.size() != config.depth || net.biases.size() != config.depth) {
        throw ContractError("forward: network depth does not match config");
    }
    std::vector<LayerState> states;
    states.reserve(config.depth);
    Vector x = x0;
    for (std::size_t l = 0; l < config.depth; ++l) {
        LayerState s;
        s.h = net.weights[l] * x + net.biases[l];
        check_finite(s.h, l + 1, "preactivation");
        s.d = apply_derivative(act, s.h);
        s.x = apply(act, s.h) + config.skip * x;
        check_finite(s.x, l + 1, "activation");
        x = s.x;
        states.push_back(std::move(s));
    }
    return states;
}

Matrix jacobian(const NetConfig& config, const NetworkSample& net,
                const std::vector<LayerState>& states) {
    if (states.size() != net.weights.size() || states.empty()) {
        throw ContractError("jacobian: states and weights disagree in depth");
    }
    const auto n = static_cast<Eigen::Index>(config.width);
    Matrix jac = Matrix::Identity(n, n);
    Matrix factor;
    for (std::size_t l = 0; l < states.size(); ++l) {
        const Matrix& w = net.weights[l];
        if (w.rows() != n || w.cols() != n || states[l].d.size() != n) {
            throw ContractError("jacobian: dimension mismatch at layer " + std::to_string(l + 1));
        }
        factor.noalias() = states[l].d.asDiagonal() * w;
        factor.diagonal().array() += config.skip;
        jac = factor * jac;
    }
    return jac;
}

std::vector<Vector> read_input_rows(const std::filesystem::path& path, std::size_t width) {
    std::ifstream in(path);
    if (!in) throw FormatError(0, "cannot open input file '" + path.string() + "'");

    std::vector<Vector> rows;
    std::string line;
    std::size_t row = 0;
    for (; std::getline(in, line); ++row) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::vector<double> values;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            std::string_view cell = rest.substr(0, comma);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw FormatError(row, "row " + std::to_string(row) + ": bad number '" +
                                           std::string(cell) + "'");
            }
            values.push_back(v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (values.size() != width) {
            throw FormatError(row, "row " + std::to_string(row) + " has " +
                                       std::to_string(values.size()) + " columns, expected " +
                                       std::to_string(width));
        }
        rows.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(width)));
    }
    if (rows.empty()) throw FormatError(0, "input file '" + path.string() + "' has no rows");
    return rows;
}

double SimulationReport::empirical_c() const {
    if (empirical_c2.empty()) return 0.0;
    double sum = 0.0;
    for (double v : empirical_c2) sum += v;
    return sum / static_cast<double>(empirical_c2.size());
}

SimulationReport simulate(const NetConfig& config, const Activation& act,
                          const SimulationOptions& options) {
    const auto outcomes = run_trials(config, act, options.trials, options.inputs, options.threads,
                                     !options.signal_only);

    SimulationReport report;
    report.config = config;
    report.activation = act.name();
    report.trials = options.trials;

    const std::size_t depth = config.depth;
    report.empirical_q.assign(depth, 0.0);
    report.empirical_x2.assign(depth, 0.0);
    report.empirical_c2.assign(depth, 0.0);
    const double inv_trials = 1.0 / static_cast<double>(options.trials);

    for (const auto& o : outcomes) {
        for (std::size_t l = 0; l < depth; ++l) {
            report.empirical_q[l] += o.q[l] * inv_trials;
            report.empirical_x2[l] += o.x2[l] * inv_trials;
            report.empirical_c2[l] += o.c2[l] * inv_trials;
        }
        report.input_second_moment += o.input_second_moment * inv_trials;
        if (!options.signal_only) {
            report.trial_singular_values.push_back(o.singular_values);
            report.trial_frobenius_sq.push_back(o.frobenius_sq);
            const double lo = o.singular_values.front();
            const double hi = o.singular_values.back();
            report.per_trial_extremes.emplace_back(lo * lo, hi * hi);
            report.singular_values.insert(report.singular_values.end(), o.singular_values.begin(),
                                          o.singular_values.end());
        }
    }
    std::sort(report.singular_values.begin(), report.singular_values.end());

    if (options.reference && !report.singular_values.empty()) {
        const TheoreticalSpectrum& ref = *options.reference;
        const SpectrumCdf cdf(ref);
        if (ref.axis == SpectrumAxis::Singular) {
            report.ks_distance = isoplan::ks_distance(report.singular_values, cdf);
        } else {
            std::vector<double> squared(report.singular_values.size());
            std::transform(report.singular_values.begin(), report.singular_values.end(),
                           squared.begin(), [](double s) { return s * s; });
            report.ks_distance = isoplan::ks_distance(squared, cdf);
        }
    }
    return report;
}

double RecurrenceComparison::max_rel() const {
    return std::max({max_q_rel, max_x2_rel, max_c2_rel});
}

RecurrenceComparison verify_recurrence(const NetConfig& config, const Activation& act,
                                       std::size_t trials, unsigned threads,
                                       std::vector<Vector> inputs) {
    SimulationOptions options;
    options.trials = trials;
    options.threads = threads;
    options.inputs = std::move(inputs);
    options.signal_only = true;
    const SimulationReport report = simulate(config, act, options);

    NetConfig conditioned = config;
    conditioned.input_second_moment = report.input_second_moment;

    RecurrenceComparison out;
    out.input_second_moment = report.input_second_moment;
    out.theory = propagate_q(conditioned, act);
    for (std::size_t l = 0; l < config.depth; ++l) {
        RecurrenceRow r;
        r.layer = l + 1;
        r.q_theory = out.theory.q[l];
        r.x2_theory = out.theory.x2[l];
        r.c2_theory = out.theory.c2[l];
        r.q_emp = report.empirical_q[l];
        r.x2_emp = report.empirical_x2[l];
        r.c2_emp = report.empirical_c2[l];
        r.q_rel = relative_error(r.q_emp, r.q_theory);
        r.x2_rel = relative_error(r.x2_emp, r.x2_theory);
        r.c2_rel = relative_error(r.c2_emp, r.c2_theory);
        out.max_q_rel = std::max(out.max_q_rel, r.q_rel);
        out.max_x2_rel = std::max(out.max_x2_rel, r.x2_rel);
        out.max_c2_rel = std::max(out.max_c2_rel, r.c2_rel);
        out.rows.push_back(r);
    }
    return out;
}

}  // namespace isoplan
