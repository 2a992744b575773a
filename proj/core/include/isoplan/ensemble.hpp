#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "isoplan/activations.hpp"
#include "isoplan/signal.hpp"
#include "isoplan/spectrum.hpp"

namespace isoplan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Seed of the independent stream `stream` derived from `master`
/// (splitmix64 of a counter). Trial t always uses stream t, so results do
/// not depend on how trials are scheduled across threads.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

/// One N x N weight matrix: iid N(0, sigma_w2 / (N L)) entries, or
/// sqrt(sigma_w2 / L) Q with Q Haar-orthogonal (QR of a Gaussian matrix with
/// the signs of diag(R) folded into Q). Requires width >= 2.
Matrix sample_weights(WeightEnsemble ensemble, std::size_t width, double sigma_w2,
                      std::size_t depth, Rng& rng);

/// Vector of iid N(0, variance) entries.
Vector sample_gaussian(std::size_t size, double variance, Rng& rng);

/// Per-layer record of a forward pass; d holds phi'(h) (the diagonal of D^l).
struct LayerState {
    Vector h;
    Vector x;
    Vector d;
};

/// Weights and biases of every residual block, drawn layer by layer
/// (W^l, then b^l).
struct NetworkSample {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    static NetworkSample draw(const NetConfig& config, Rng& rng);
};

/// h^l = W^l x^{l-1} + b^l, x^l = phi(h^l) + skip x^{l-1}.
/// Throws DivergenceError with the layer index on non-finite values.
std::vector<LayerState> forward(const NetConfig& config, const Activation& act,
                                const NetworkSample& net, const Vector& x0);

/// J = Y_L ... Y_1 with Y_l = D^l W^l + skip I, built factor by factor.
Matrix jacobian(const NetConfig& config, const NetworkSample& net,
                const std::vector<LayerState>& states);

/// Reads one input vector per CSV row. Every row must hold exactly `width`
/// numbers; blank lines are skipped. Throws FormatError with the row index.
std::vector<Vector> read_input_rows(const std::filesystem::path& path, std::size_t width);

struct SimulationOptions {
    std::size_t trials = 1;
    /// When non-empty, trial t feeds inputs[t % inputs.size()] instead of a
    /// fresh standard-normal vector.
    std::vector<Vector> inputs;
    /// Theory to compare the pooled spectrum against (KS distance).
    std::optional<TheoreticalSpectrum> reference;
    /// Worker threads; 0 means one per hardware thread.
    unsigned threads = 0;
    /// Skip the Jacobian and SVD (signal statistics only).
    bool signal_only = false;
};

struct SimulationReport {
    NetConfig config;
    std::string activation;
    std::size_t trials = 0;

    /// Pooled singular values of J over all trials, ascending.
    std::vector<double> singular_values;
    /// Singular values per trial, ascending.
    std::vector<std::vector<double>> trial_singular_values;
    /// (min, max) squared singular value per trial.
    std::vector<std::pair<double, double>> per_trial_extremes;
    /// ||J||_F^2 = trace(J J^T) per trial.
    std::vector<double> trial_frobenius_sq;

    /// Layer averages <h^2>, <x^2>, sigma_w2 <phi'(h)^2>, averaged over trials.
    std::vector<double> empirical_q;
    std::vector<double> empirical_x2;
    std::vector<double> empirical_c2;
    /// Mean <x^2>_0 of the inputs actually fed.
    double input_second_moment = 0.0;

    std::optional<double> ks_distance;

    /// Depth average of empirical_c2.
    double empirical_c() const;
};

/// Monte Carlo over fresh weights, biases and inputs per trial.
SimulationReport simulate(const NetConfig& config, const Activation& act,
                          const SimulationOptions& options);

struct RecurrenceRow {
    std::size_t layer = 0;
    double q_theory = 0.0, q_emp = 0.0;
    double x2_theory = 0.0, x2_emp = 0.0;
    double c2_theory = 0.0, c2_emp = 0.0;
    double q_rel = 0.0, x2_rel = 0.0, c2_rel = 0.0;
};

struct RecurrenceComparison {
    std::vector<RecurrenceRow> rows;
    SignalProfile theory;
    double max_q_rel = 0.0;
    double max_x2_rel = 0.0;
    double max_c2_rel = 0.0;
    double input_second_moment = 0.0;

    double max_rel() const;
};

/// Compares empirical layer statistics with propagate_q. The recurrence is
/// started from the second moment of the inputs actually fed, so the
/// comparison is conditioned on the realized x^0.
RecurrenceComparison verify_recurrence(const NetConfig& config, const Activation& act,
                                       std::size_t trials, unsigned threads = 0,
                                       std::vector<Vector> inputs = {});

}  // namespace isoplan
