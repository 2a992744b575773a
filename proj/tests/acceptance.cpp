// Acceptance suite: one line per criterion, "PASS" or "FAIL" followed by the
// measured quantities and the bound they were checked against.
//
//   isoplan_acceptance          run all criteria
//   isoplan_acceptance 4 6      run the listed criteria only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "isoplan/activations.hpp"
#include "isoplan/ensemble.hpp"
#include "isoplan/errors.hpp"
#include "isoplan/planner.hpp"
#include "isoplan/signal.hpp"
#include "isoplan/spectrum.hpp"
#include "isoplan/statistics.hpp"

using namespace isoplan;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Tanh, sigma_b2 = 0, standard-normal inputs unless stated otherwise.
NetConfig net(std::size_t depth, std::size_t width, double sigma_w2, double sigma_b2,
              std::uint64_t seed) {
    NetConfig cfg;
    cfg.depth = depth;
    cfg.width = width;
    cfg.sigma_w2 = sigma_w2;
    cfg.sigma_b2 = sigma_b2;
    cfg.seed = seed;
    return cfg;
}

std::vector<double> squared(const std::vector<double>& s) {
    std::vector<double> out(s.size());
    std::transform(s.begin(), s.end(), out.begin(), [](double v) { return v * v; });
    return out;
}

Outcome closed_form_cumulants() {
    const auto start = Clock::now();
    struct Case {
        Activation act;
        bool mean_only;
    };
    const std::vector<Case> cases = {
        {Activation::linear(), false},
        {Activation::relu(), false},
        {Activation::leaky_relu(0.05), false},
        {Activation::leaky_relu(0.25), false},
        {Activation::hard_tanh(), false},
        {Activation::sigmoid(), true},
        {Activation::selu(), false},
    };
    double worst = 0.0;
    std::string worst_case;
    for (const auto& cs : cases) {
        for (double q : {0.1, 1.0, 10.0}) {
            const auto exact = moments_closed(cs.act, q);
            const auto quad = moments_quadrature(cs.act, q);
            std::vector<double> diffs = {std::abs(exact.m_phi - quad.m_phi)};
            if (!cs.mean_only) {
                diffs.push_back(std::abs(exact.m_phi2 - quad.m_phi2));
                diffs.push_back(std::abs(exact.m_dphi2 - quad.m_dphi2));
            }
            const double d = *std::max_element(diffs.begin(), diffs.end());
            if (d >= worst) {
                worst = d;
                worst_case = fmt::format("{} q={}", cs.act.name(), q);
            }
        }
    }
    const double t = seconds_since(start);
    return {worst <= 1e-8 && t < 1.0,
            fmt::format("max |closed - quadrature| = {:.2e} at {} (bound 1e-8); {:.2f} s (bound 1 s)",
                        worst, worst_case, t)};
}

Outcome perfect_isometry() {
    const auto start = Clock::now();
    NetConfig cfg = net(20, 200, 0.0, 0.0, 11);
    SimulationOptions opts;
    opts.trials = 1;
    const auto report = simulate(cfg, Activation::tanh(), opts);
    double worst = 0.0;
    for (double s : report.singular_values) worst = std::max(worst, std::abs(s - 1.0));
    const double t = seconds_since(start);
    return {worst <= 1e-12 && t < 1.0,
            fmt::format("sigma_w2=0, a=1, L=20, N=200: max |s - 1| = {:.2e} (bound 1e-12); "
                        "{:.2f} s (bound 1 s)",
                        worst, t)};
}

Outcome edge_formula() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;

    const double c0 = 0.005;
    const Edges small = spectral_edges(c0);
    const double half_width = 2.0 * std::sqrt(2.0 * c0);
    const double rel_hi = std::abs(small.upper - (1.0 + half_width)) / (1.0 + half_width);
    const double rel_lo = std::abs(small.lower - (1.0 - half_width)) / (1.0 - half_width);
    pass = pass && rel_hi <= 0.015 && rel_lo <= 0.015;
    const double width_rel = std::abs((small.upper - small.lower) - 2.0 * half_width) / (2.0 * half_width);
    detail += fmt::format("c=0.005 edges [{:.5f}, {:.5f}] vs [{:.1f}, {:.1f}]: rel dev {:.2f}% / {:.2f}% "
                          "(bound 1.5%; support width off by {:.2f}%)",
                          small.lower, small.upper, 1.0 - half_width, 1.0 + half_width,
                          100.0 * rel_lo, 100.0 * rel_hi, 100.0 * width_rel);

    const GridSpec grid;
    double worst_ratio = 0.0;
    for (double c : {0.01, 0.125, 0.5, 1.0, 2.0}) {
        const Edges exact = spectral_edges(c);
        const Edges found = locate_support_edges(c);
        const double resolution = (exact.upper - exact.lower) / static_cast<double>(grid.points - 1);
        const double dev = std::max(std::abs(found.lower - exact.lower),
                                    std::abs(found.upper - exact.upper));
        worst_ratio = std::max(worst_ratio, dev / resolution);
    }
    pass = pass && worst_ratio <= 1.0;
    const double t = seconds_since(start);
    pass = pass && t < 10.0;
    detail += fmt::format("; located edges: max deviation = {:.3f} grid steps (bound 1); {:.2f} s "
                          "(bound 10 s)",
                          worst_ratio, t);
    return {pass, detail};
}

Outcome tanh_theory_vs_mc() {
    bool pass = true;
    std::string detail = "Tanh, N=500, sigma_w2=1, 20 trials:";
    for (std::size_t depth : {10u, 50u, 100u}) {
        const NetConfig cfg = net(depth, 500, 1.0, 0.0, 400 + depth);
        const auto act = Activation::tanh();
        const double c = effective_cumulant(propagate_q(cfg, act)).c;
        SimulationOptions opts;
        opts.trials = 20;
        opts.threads = 0;
        opts.reference = spectral_density(c);
        const auto report = simulate(cfg, act, opts);
        const double ks = *report.ks_distance;
        pass = pass && ks <= 0.03;
        detail += fmt::format(" L={} c={:.4f} KS={:.4f};", depth, c, ks);
    }
    detail += " (bound 0.03)";
    return {pass, detail};
}

Outcome relu_theory_vs_mc() {
    bool pass = true;
    std::string detail = "ReLU, N=500, L=100, 20 trials:";
    const std::size_t depth = 100;
    for (double target : {0.125, 0.5, 1.0}) {
        PlanRequest req;
        req.act = Activation::relu();
        req.depth = depth;
        req.target_c = target;
        const PlanResult plan = plan_sigma(req);
        const NetConfig cfg = net(depth, 500, plan.sigma_w2, 0.0, 500 + static_cast<int>(target * 1000));
        SimulationOptions opts;
        opts.trials = 20;
        opts.reference = spectral_density(plan.achieved_c);
        const auto report = simulate(cfg, req.act, opts);
        const double ks = *report.ks_distance;

        const auto lambdas = squared(report.singular_values);
        double mean = 0.0;
        for (double v : lambdas) mean += v;
        mean /= static_cast<double>(lambdas.size());
        const double top = lambdas.back();
        const Edges edges = spectral_edges(target);
        const double top_rel = std::abs(top - edges.upper) / edges.upper;
        const double mean_rel = std::abs(mean - std::exp(target)) / std::exp(target);
        pass = pass && ks <= 0.03 && top_rel <= 0.10 && mean_rel <= 0.02;

        // Same statistics with the largest singular value of every trial removed.
        double bulk_top = 0.0;
        double bulk_sum = 0.0;
        std::size_t bulk_count = 0;
        for (const auto& trial : report.trial_singular_values) {
            bulk_top = std::max(bulk_top, trial[trial.size() - 2] * trial[trial.size() - 2]);
            for (std::size_t i = 0; i + 1 < trial.size(); ++i) bulk_sum += trial[i] * trial[i];
            bulk_count += trial.size() - 1;
        }
        const double bulk_mean = bulk_sum / static_cast<double>(bulk_count);
        detail += fmt::format(" c={} (sigma_w2={:.4g}): KS={:.4f}, max lambda {:.4f} vs z+ {:.4f} ({:.2f}%), "
                              "mean {:.4f} vs e^c {:.4f} ({:.2f}%) [without top value per trial: "
                              "max {:.4f} ({:.2f}%), mean {:.4f} ({:.2f}%)];",
                              target, plan.sigma_w2, ks, top, edges.upper, 100.0 * top_rel, mean,
                              std::exp(target), 100.0 * mean_rel, bulk_top,
                              100.0 * std::abs(bulk_top - edges.upper) / edges.upper, bulk_mean,
                              100.0 * std::abs(bulk_mean - std::exp(target)) / std::exp(target));
    }
    detail += " (bounds KS 0.03, 10%, 2%)";
    return {pass, detail};
}

Outcome recurrence_verification() {
    bool pass = true;
    std::string detail = "L=200, N=800, sigma_w2=1, sigma_b2=1, single run:";
    const NetConfig cfg = net(200, 800, 1.0, 1.0, 600);
    for (const char* name : {"tanh", "hardtanh", "sigmoid", "selu"}) {
        const auto act = Activation::from_name(name);
        const auto cmp = verify_recurrence(cfg, act, 1);
        pass = pass && cmp.max_rel() <= 0.05;
        detail += fmt::format(" {} max rel q/x2/c2 = {:.2f}%/{:.2f}%/{:.2f}%;", name,
                              100.0 * cmp.max_q_rel, 100.0 * cmp.max_x2_rel, 100.0 * cmp.max_c2_rel);
    }
    std::string averaged = " [20-trial average:";
    for (const char* name : {"tanh", "hardtanh", "sigmoid", "selu"}) {
        const auto cmp = verify_recurrence(cfg, Activation::from_name(name), 20);
        averaged += fmt::format(" {} {:.2f}%", name, 100.0 * cmp.max_rel());
    }
    averaged += "]";
    for (const char* name : {"tanh", "sigmoid"}) {
        const auto act = Activation::from_name(name);
        const auto full = propagate_q(cfg, act);
        const auto approx = propagate_q_approx(cfg, act);
        const double rel = relative_error(approx.q.back(), full.q.back());
        pass = pass && rel <= 0.05;
        detail += fmt::format(" {} approx q^L rel = {:.2f}%;", name, 100.0 * rel);
    }
    detail += " (bound 5%)" + averaged;
    return {pass, detail};
}

Outcome universality() {
    bool pass = true;
    std::string detail = "ReLU vs HardTanh planned to c=0.125, N=500, 20 trials:";
    for (std::size_t depth : {10u, 20u}) {
        std::vector<std::vector<double>> spectra;
        for (const char* name : {"relu", "hardtanh"}) {
            PlanRequest req;
            req.act = Activation::from_name(name);
            req.depth = depth;
            req.target_c = 0.125;
            const PlanResult plan = plan_sigma(req);
            const NetConfig cfg = net(depth, 500, plan.sigma_w2, 0.0, 700 + depth);
            SimulationOptions opts;
            opts.trials = 20;
            spectra.push_back(simulate(cfg, req.act, opts).singular_values);
        }
        const double ks = ks_two_sample(spectra[0], spectra[1]);
        pass = pass && ks <= 0.03;
        detail += fmt::format(" L={} KS={:.4f};", depth, ks);
    }
    detail += " (bound 0.03)";
    return {pass, detail};
}

Outcome planner_roundtrip() {
    const auto start = Clock::now();
    bool pass = true;
    std::size_t solved = 0;
    std::size_t infeasible = 0;
    double worst = 0.0;
    std::string failures;
    for (const char* name : {"linear", "relu", "leaky_relu", "hardtanh", "tanh", "sigmoid", "selu"}) {
        for (double target : {0.05, 0.125, 0.5}) {
            PlanRequest req;
            req.act = Activation::from_name(name);
            req.depth = 10;
            req.target_c = target;
            try {
                const PlanResult plan = plan_sigma(req);
                NetConfig cfg = net(10, 1, plan.sigma_w2, 0.0, 1);
                const double c = effective_cumulant(propagate_q(cfg, req.act)).c;
                const double rel = std::abs(c - target) / target;
                worst = std::max(worst, rel);
                if (rel > 1e-6) {
                    pass = false;
                    failures += fmt::format(" {}@{}", name, target);
                }
                ++solved;
            } catch (const InfeasibleError& e) {
                ++infeasible;
                failures += fmt::format(" {}@{} infeasible [{:.4g}, {:.4g}]", name, target,
                                        e.min_c(), e.max_c());
            }
        }
    }
    const double t = seconds_since(start);
    pass = pass && t < 30.0;
    return {pass, fmt::format("L=10, sigma_b2=0: {} solved, {} reported infeasible, max rel error {:.2e} "
                              "(bound 1e-6){}; {:.2f} s (bound 30 s)",
                              solved, infeasible, worst, failures, t)};
}

Outcome jacobian_oracle() {
    const auto start = Clock::now();
    const NetConfig cfg = net(10, 100, 1.0, 0.1, 900);
    const auto act = Activation::tanh();
    Rng rng(stream_seed(cfg.seed, 0));
    const Vector x0 = sample_gaussian(cfg.width, 1.0, rng);
    const NetworkSample sample = NetworkSample::draw(cfg, rng);
    const Matrix jac = jacobian(cfg, sample, forward(cfg, act, sample, x0));

    const double h = 1e-4;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        Vector v = sample_gaussian(cfg.width, 1.0, rng);
        v.normalize();
        const Vector plus = forward(cfg, act, sample, x0 + h * v).back().x;
        const Vector minus = forward(cfg, act, sample, x0 - h * v).back().x;
        const Vector fd = (plus - minus) / (2.0 * h);
        const Vector jv = jac * v;
        worst = std::max(worst, (jv - fd).norm() / jv.norm());
    }
    const double t = seconds_since(start);
    return {worst <= 1e-5 && t < 10.0,
            fmt::format("Tanh, L=10, N=100, 10 directions: max ||Jv - FD|| / ||Jv|| = {:.2e} "
                        "(bound 1e-5); {:.2f} s (bound 10 s)",
                        worst, t)};
}

Outcome ensemble_equivalence() {
    const auto act = Activation::tanh();
    std::vector<std::vector<double>> spectra;
    for (auto ensemble : {WeightEnsemble::GaussianIID, WeightEnsemble::ScaledOrthogonal}) {
        NetConfig cfg = net(10, 500, 1.0, 0.0, 1000);
        cfg.ensemble = ensemble;
        SimulationOptions opts;
        opts.trials = 20;
        spectra.push_back(simulate(cfg, act, opts).singular_values);
    }
    const double ks = ks_two_sample(spectra[0], spectra[1]);
    return {ks <= 0.03,
            fmt::format("Tanh, N=500, L=10, sigma_w2=1, 20 trials each: KS(gaussian, orthogonal) = {:.4f} "
                        "(bound 0.03)",
                        ks)};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "closed-form cumulants", closed_form_cumulants},
        {2, "perfect isometry", perfect_isometry},
        {3, "edge formula", edge_formula},
        {4, "theory vs Monte Carlo, tanh over depth", tanh_theory_vs_mc},
        {5, "theory vs Monte Carlo, relu over c", relu_theory_vs_mc},
        {6, "recurrence verification", recurrence_verification},
        {7, "universality", universality},
        {8, "planner roundtrip", planner_roundtrip},
        {9, "Jacobian oracle", jacobian_oracle},
        {10, "ensemble equivalence", ensemble_equivalence},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        const auto start = Clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, fmt::format("exception: {}", e.what())};
        }
        if (!out.pass) ++failed;
        fmt::print("{} [{:2d}] {}: {} [{:.1f} s]\n", out.pass ? "PASS" : "FAIL", c.id, c.title,
                   out.detail, seconds_since(start));
        std::fflush(stdout);
    }
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
