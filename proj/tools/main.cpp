// isoplan: spectra, simulations, signal profiles and initialization plans for
// residual networks. Every subcommand writes CSV + JSON files and a
// manifest.json into --out; errors go to stderr as one line of JSON.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "isoplan/activations.hpp"
#include "isoplan/ensemble.hpp"
#include "isoplan/errors.hpp"
#include "isoplan/planner.hpp"
#include "isoplan/signal.hpp"
#include "isoplan/spectrum.hpp"
#include "isoplan/statistics.hpp"
#include "isoplan/version.hpp"
#include "output.hpp"

namespace {

using namespace isoplan;
using cli::Json;
using cli::number;
using cli::RunRecorder;

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ActivationFlags {
    std::string name = "tanh";
    double alpha = 0.01;
    double selu_lambda = kSeluLambda;
    double selu_beta = kSeluBeta;
    bool hardtanh_unit_q = false;

    void add(CLI::App& app, CLI::Option** name_opt = nullptr) {
        auto* opt = app.add_option("--activation", name,
                                   "linear, relu, leaky_relu, hardtanh, tanh, sigmoid, selu")
                        ->capture_default_str();
        if (name_opt != nullptr) *name_opt = opt;
        app.add_option("--alpha", alpha, "leaky ReLU slope")->capture_default_str();
        app.add_option("--selu-lambda", selu_lambda, "SELU scale")->capture_default_str();
        app.add_option("--selu-beta", selu_beta, "SELU negative-branch factor")->capture_default_str();
        app.add_flag("--hardtanh-unit-q", hardtanh_unit_q,
                     "hard tanh moments frozen at q = 1 instead of tracking q");
    }

    Activation build() const {
        return Activation::from_name(name, alpha, selu_lambda, selu_beta,
                                     hardtanh_unit_q ? HardTanhMoments::UnitVariance
                                                     : HardTanhMoments::VarianceDependent);
    }

    Json json() const {
        return {{"activation", name},
                {"alpha", alpha},
                {"selu_lambda", selu_lambda},
                {"selu_beta", selu_beta},
                {"hardtanh_unit_q", hardtanh_unit_q}};
    }
};

struct NetFlags {
    std::size_t depth = 10;
    std::size_t width = 500;
    double sigma_w2 = 1.0;
    double sigma_b2 = 0.0;
    double skip = 1.0;
    double input_second_moment = 1.0;
    std::string ensemble = "gaussian";

    void add_signal(CLI::App& app) {
        app.add_option("--L", depth, "number of residual blocks")->capture_default_str();
        app.add_option("--sigma-w2", sigma_w2, "weight scale sigma_W^2")->capture_default_str();
        app.add_option("--sigma-b2", sigma_b2, "bias variance sigma_b^2")->capture_default_str();
        app.add_option("--a", skip, "skip-connection coefficient")->capture_default_str();
    }

    void add_x2(CLI::App& app) {
        app.add_option("--input-second-moment", input_second_moment, "<x^2> of the input")
            ->capture_default_str();
    }

    void add_network(CLI::App& app) {
        add_signal(app);
        app.add_option("--N", width, "layer width")->capture_default_str();
        app.add_option("--ensemble", ensemble, "gaussian or orthogonal")->capture_default_str();
    }

    NetConfig config(std::uint64_t seed = 1) const {
        NetConfig c;
        c.depth = depth;
        c.width = width;
        c.sigma_w2 = sigma_w2;
        c.sigma_b2 = sigma_b2;
        c.skip = skip;
        c.input_second_moment = input_second_moment;
        c.ensemble = ensemble_from_name(ensemble);
        c.seed = seed;
        return c;
    }

    Json signal_json() const {
        return {{"L", depth},
                {"sigma_w2", sigma_w2},
                {"sigma_b2", sigma_b2},
                {"a", skip},
                {"input_second_moment", input_second_moment}};
    }

    Json network_json() const {
        Json j = signal_json();
        j.erase("input_second_moment");
        j["N"] = width;
        j["ensemble"] = ensemble;
        return j;
    }
};

struct SeedFlag {
    std::optional<std::uint64_t> value;

    void add(CLI::App& app) {
        app.add_option("--seed", value, "master seed (falls back to ISOPLAN_SEED, then 1)");
    }

    std::pair<std::uint64_t, std::string> resolve() const {
        if (value) return {*value, "flag"};
        if (const char* env = std::getenv("ISOPLAN_SEED"); env != nullptr && *env != '\0') {
            try {
                std::size_t used = 0;
                const auto parsed = std::stoull(env, &used);
                if (used == std::string(env).size()) return {parsed, "ISOPLAN_SEED"};
            } catch (const std::exception&) {
            }
            throw UsageError(fmt::format("ISOPLAN_SEED is not an unsigned integer: '{}'", env));
        }
        return {1, "default"};
    }
};

void merge(Json& into, const Json& from) {
    for (const auto& [k, v] : from.items()) into[k] = v;
}

std::vector<std::string> profile_header() {
    return {"layer", "q_theory", "q_emp", "x2_theory", "x2_emp", "c2_theory", "c2_emp"};
}

Json spectrum_meta(const TheoreticalSpectrum& s) {
    Json meta = {{"c", s.c},
                 {"a", s.skip},
                 {"L", s.depth},
                 {"axis", s.axis == SpectrumAxis::Singular ? "singular" : "lambda"},
                 {"point_mass", s.point_mass},
                 {"lower_edge", s.edges.lower},
                 {"upper_edge", s.edges.upper},
                 {"epsilon", s.epsilon},
                 {"mean_lambda", spectral_mean(s.c, s.skip, s.depth)}};
    if (!s.point_mass) meta["normalization"] = s.normalization();
    return meta;
}

std::vector<std::vector<std::string>> density_rows(const TheoreticalSpectrum& s) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) rows.push_back({number(s.grid[i]), number(s.density[i])});
    return rows;
}

std::vector<std::string> density_header(const TheoreticalSpectrum& s) {
    if (s.axis == SpectrumAxis::Singular) return {"s", "rho_s"};
    return {"lambda", "rho"};
}

std::vector<Vector> load_inputs(const std::string& path, std::size_t width) {
    if (path.empty()) return {};
    return read_input_rows(path, width);
}

// ---------------------------------------------------------------- spectrum

struct SpectrumCmd {
    std::optional<double> c;
    ActivationFlags act;
    NetFlags net;
    std::size_t points = 2000;
    double epsilon_scale = 1e-6;
    std::string axis = "lambda";
    CLI::Option* c_opt = nullptr;
    CLI::Option* act_opt = nullptr;

    void add(CLI::App& app) {
        c_opt = app.add_option("--c", c, "effective cumulant");
        act.add(app, &act_opt);
        act_opt->default_str("");
        net.add_signal(app);
        net.add_x2(app);
        app.add_option("--points", points, "grid points")->capture_default_str();
        app.add_option("--epsilon-scale", epsilon_scale, "Im z as a fraction of the support width")
            ->capture_default_str();
        app.add_option("--axis", axis, "lambda (squared singular values) or singular")
            ->check(CLI::IsMember({"lambda", "singular"}))
            ->capture_default_str();
        c_opt->excludes(act_opt);
    }

    void run(RunRecorder& rec) {
        auto& p = rec.params();
        double cumulant = 0.0;
        if (c) {
            cumulant = *c;
            p["source"] = "c";
            p["c"] = cumulant;
        } else if (act_opt->count() > 0) {
            if (net.depth < 1) throw UsageError("--L must be positive");
            const auto profile = propagate_q(net.config(), act.build());
            const auto eff = effective_cumulant(profile);
            cumulant = eff.c;
            p["source"] = "activation";
            merge(p, act.json());
            p["c"] = cumulant;
            p["c_variability"] = eff.variability;
            if (eff.exceeds_warning()) {
                std::cerr << fmt::format("warning: per-layer cumulants vary by {:.1f}% around c\n",
                                         100.0 * eff.variability);
            }
        } else {
            throw UsageError("spectrum needs either --c or --activation");
        }
        merge(p, net.signal_json());
        p["points"] = points;
        p["epsilon_scale"] = epsilon_scale;
        p["axis"] = axis;

        GridSpec grid;
        grid.points = points;
        grid.epsilon_scale = epsilon_scale;
        auto spectrum = spectral_density(cumulant, net.skip, net.depth, grid);
        if (axis == "singular") spectrum = to_singular_density(spectrum);

        rec.write_csv("density.csv", density_header(spectrum), density_rows(spectrum),
                      spectrum_meta(spectrum));

        const char* var = axis == "singular" ? "s" : "lambda";
        if (spectrum.point_mass) {
            fmt::print("c = {}: point mass at {} = {} (perfect isometry)\n", number(cumulant), var,
                       number(spectrum.edges.lower));
        } else {
            fmt::print("c = {}: support {} in [{}, {}], mean lambda = {}\n", number(cumulant), var,
                       number(spectrum.edges.lower), number(spectrum.edges.upper),
                       number(spectral_mean(cumulant, net.skip, net.depth)));
        }
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    ActivationFlags act;
    NetFlags net;
    SeedFlag seed;
    std::size_t trials = 1;
    std::string input_file;
    bool compare = false;
    unsigned threads = 0;

    void add(CLI::App& app) {
        act.add(app);
        net.add_network(app);
        seed.add(app);
        app.add_option("--trials", trials, "independent networks")->capture_default_str();
        app.add_option("--input-file", input_file, "CSV, one input vector of length N per row");
        app.add_flag("--compare", compare, "compare with the theoretical spectrum at the matched c");
        app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
    }

    void run(RunRecorder& rec) {
        const auto [seed_value, seed_source] = seed.resolve();
        rec.set_seed(seed_value);
        auto& p = rec.params();
        merge(p, act.json());
        merge(p, net.network_json());
        p["trials"] = trials;
        p["seed"] = seed_value;
        p["seed_source"] = seed_source;
        p["input_file"] = input_file.empty() ? Json(nullptr) : Json(input_file);
        p["compare"] = compare;
        p["threads"] = threads;

        const Activation activation = act.build();
        NetConfig config = net.config(seed_value);
        SimulationOptions opts;
        opts.trials = trials;
        opts.threads = threads;
        opts.inputs = load_inputs(input_file, config.width);

        const SimulationReport report = simulate(config, activation, opts);
        config.input_second_moment = report.input_second_moment;
        const SignalProfile theory = propagate_q(config, activation);

        std::optional<double> ks;
        Json theory_meta;
        if (compare) {
            const auto spectrum = spectral_density(theory.c, config.skip, config.depth);
            const SpectrumCdf cdf(spectrum);
            std::vector<double> lambdas(report.singular_values.size());
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                lambdas[i] = report.singular_values[i] * report.singular_values[i];
            }
            ks = ks_distance(lambdas, cdf);
            rec.write_csv("theory_density.csv", density_header(spectrum), density_rows(spectrum),
                          spectrum_meta(spectrum));
        }

        std::vector<std::vector<std::string>> sv_rows;
        for (std::size_t t = 0; t < report.trial_singular_values.size(); ++t) {
            const auto& s = report.trial_singular_values[t];
            for (std::size_t i = 0; i < s.size(); ++i) {
                sv_rows.push_back({std::to_string(t), std::to_string(i), number(s[i])});
            }
        }
        rec.write_csv("singular_values.csv", {"trial", "index", "s"}, sv_rows,
                      {{"order", "ascending within each trial"}});

        std::vector<std::vector<std::string>> prof_rows;
        for (std::size_t l = 0; l < config.depth; ++l) {
            prof_rows.push_back({std::to_string(l + 1), number(theory.q[l]), number(report.empirical_q[l]),
                                 number(theory.x2[l]), number(report.empirical_x2[l]),
                                 number(theory.c2[l]), number(report.empirical_c2[l])});
        }
        rec.write_csv("profiles.csv", profile_header(), prof_rows,
                      {{"theory_input_second_moment", report.input_second_moment}});

        Json extremes = Json::array();
        for (const auto& [lo, hi] : report.per_trial_extremes) extremes.push_back({lo, hi});
        Json doc = {{"activation", activation.name()},
                    {"trials", report.trials},
                    {"seed", seed_value},
                    {"config", p},
                    {"input_second_moment", report.input_second_moment},
                    {"c_theory", theory.c},
                    {"c_empirical", report.empirical_c()},
                    {"per_trial_extremes", extremes},
                    {"frobenius_sq", report.trial_frobenius_sq},
                    {"ks_distance", ks ? Json(*ks) : Json(nullptr)}};
        rec.write_json("report.json", doc);

        fmt::print("c theory = {}, c empirical = {}", number(theory.c), number(report.empirical_c()));
        if (ks) fmt::print(", KS = {}", number(*ks));
        fmt::print("\n");
    }
};

// ---------------------------------------------------------------- propagate

struct PropagateCmd {
    ActivationFlags act;
    NetFlags net;
    bool approx = false;

    void add(CLI::App& app) {
        act.add(app);
        net.add_signal(app);
        net.add_x2(app);
        app.add_flag("--approx", approx, "also write the closed approximate profile (tanh-like, sigmoid)");
    }

    static void write(RunRecorder& rec, const std::string& name, const SignalProfile& p) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t l = 0; l < p.q.size(); ++l) {
            rows.push_back({std::to_string(l + 1), number(p.q[l]), number(p.x2[l]), number(p.xmean[l]),
                            number(p.c2[l])});
        }
        const auto eff = effective_cumulant(p);
        rec.write_csv(name, {"layer", "q", "x2", "xmean", "c2"}, rows,
                      {{"c", eff.c},
                       {"c_variability", eff.variability},
                       {"variability_warning", eff.exceeds_warning()}});
    }

    void run(RunRecorder& rec) {
        auto& p = rec.params();
        merge(p, act.json());
        merge(p, net.signal_json());
        p["approx"] = approx;
        const Activation activation = act.build();
        const NetConfig config = net.config();
        const auto profile = propagate_q(config, activation);
        write(rec, "profile.csv", profile);
        if (approx) write(rec, "profile_approx.csv", propagate_q_approx(config, activation));

        const auto eff = effective_cumulant(profile);
        if (eff.exceeds_warning()) {
            std::cerr << fmt::format("warning: per-layer cumulants vary by {:.1f}% around c\n",
                                     100.0 * eff.variability);
        }
        fmt::print("c = {}, q^L = {}\n", number(eff.c), number(profile.q.back()));
    }
};

// ---------------------------------------------------------------- verify

struct VerifyCmd {
    ActivationFlags act;
    NetFlags net;
    SeedFlag seed;
    std::size_t trials = 1;
    std::string input_file;
    unsigned threads = 0;

    void add(CLI::App& app) {
        act.add(app);
        net.add_network(app);
        net.sigma_b2 = 1.0;
        app.get_option("--sigma-b2")->default_str("1");
        net.depth = 200;
        app.get_option("--L")->default_str("200");
        net.width = 800;
        app.get_option("--N")->default_str("800");
        seed.add(app);
        app.add_option("--trials", trials, "independent networks averaged")->capture_default_str();
        app.add_option("--input-file", input_file, "CSV, one input vector of length N per row");
        app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
    }

    void run(RunRecorder& rec) {
        const auto [seed_value, seed_source] = seed.resolve();
        rec.set_seed(seed_value);
        auto& p = rec.params();
        merge(p, act.json());
        merge(p, net.network_json());
        p["trials"] = trials;
        p["seed"] = seed_value;
        p["seed_source"] = seed_source;
        p["input_file"] = input_file.empty() ? Json(nullptr) : Json(input_file);
        p["threads"] = threads;

        const NetConfig config = net.config(seed_value);
        const auto cmp = verify_recurrence(config, act.build(), trials, threads,
                                           load_inputs(input_file, config.width));
        std::vector<std::vector<std::string>> rows;
        Json rel = Json::array();
        for (const auto& r : cmp.rows) {
            rows.push_back({std::to_string(r.layer), number(r.q_theory), number(r.q_emp), number(r.x2_theory),
                            number(r.x2_emp), number(r.c2_theory), number(r.c2_emp)});
        }
        rec.write_csv("profiles.csv", profile_header(), rows,
                      {{"theory_input_second_moment", cmp.input_second_moment}});
        rec.write_json("verify.json", {{"max_q_rel", cmp.max_q_rel},
                                       {"max_x2_rel", cmp.max_x2_rel},
                                       {"max_c2_rel", cmp.max_c2_rel},
                                       {"max_rel", cmp.max_rel()},
                                       {"c_theory", cmp.theory.c},
                                       {"input_second_moment", cmp.input_second_moment},
                                       {"params", p}});
        fmt::print("max layer relative error: q {:.3f}%, x2 {:.3f}%, c2 {:.3f}%\n", 100.0 * cmp.max_q_rel,
                   100.0 * cmp.max_x2_rel, 100.0 * cmp.max_c2_rel);
    }
};

// ---------------------------------------------------------------- plan

struct PlanCmd {
    ActivationFlags act;
    NetFlags net;
    double target_c = 0.125;
    double tol = 1e-6;

    void add(CLI::App& app) {
        act.add(app);
        app.add_option("--L", net.depth, "number of residual blocks")->capture_default_str();
        app.add_option("--sigma-b2", net.sigma_b2, "bias variance")->capture_default_str();
        app.add_option("--a", net.skip, "skip-connection coefficient")->capture_default_str();
        net.add_x2(app);
        app.add_option("--target-c", target_c, "desired effective cumulant")->capture_default_str();
        app.add_option("--tol", tol, "relative tolerance on the achieved c")->capture_default_str();
    }

    void run(RunRecorder& rec) {
        auto& p = rec.params();
        merge(p, act.json());
        Json sig = net.signal_json();
        sig.erase("sigma_w2");
        merge(p, sig);
        p["target_c"] = target_c;
        p["tol"] = tol;

        PlanRequest req;
        req.act = act.build();
        req.depth = net.depth;
        req.skip = net.skip;
        req.sigma_b2 = net.sigma_b2;
        req.target_c = target_c;
        req.tol = tol;
        req.input_second_moment = net.input_second_moment;
        const PlanResult plan = plan_sigma(req);

        PropagateCmd::write(rec, "plan_profile.csv", plan.profile);
        rec.write_json("plan.json", {{"sigma_w2", plan.sigma_w2},
                                     {"achieved_c", plan.achieved_c},
                                     {"relative_error", std::abs(plan.achieved_c - target_c) / target_c},
                                     {"closed_form", plan.closed_form},
                                     {"other_roots", plan.other_roots},
                                     {"params", p}});
        fmt::print("sigma_w2 = {} (c = {}{})\n", number(plan.sigma_w2), number(plan.achieved_c),
                   plan.closed_form ? ", closed form" : "");
        if (!plan.other_roots.empty()) {
            fmt::print("other sigma_w2 reaching the target: {}\n", fmt::join(plan.other_roots, ", "));
        }
    }
};

// ---------------------------------------------------------------- cmap

struct CmapCmd {
    ActivationFlags act;
    NetFlags net;
    double w_min = 0.01, w_max = 10.0;
    std::size_t w_points = 25;
    double b_min = 0.01, b_max = 10.0;
    std::size_t b_points = 25;
    unsigned threads = 0;

    void add(CLI::App& app) {
        act.add(app);
        app.add_option("--L", net.depth, "number of residual blocks")->capture_default_str();
        app.add_option("--a", net.skip, "skip-connection coefficient")->capture_default_str();
        net.add_x2(app);
        app.add_option("--sigma-w2-min", w_min)->capture_default_str();
        app.add_option("--sigma-w2-max", w_max)->capture_default_str();
        app.add_option("--sigma-w2-points", w_points, "geometric grid size")->capture_default_str();
        app.add_option("--sigma-b2-min", b_min)->capture_default_str();
        app.add_option("--sigma-b2-max", b_max)->capture_default_str();
        app.add_option("--sigma-b2-points", b_points, "geometric grid size")->capture_default_str();
        app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
    }

    static std::vector<double> geometric(double lo, double hi, std::size_t n, const char* what) {
        if (!(lo > 0.0) || !(hi >= lo) || n == 0) {
            throw UsageError(fmt::format("{} grid needs 0 < min <= max and at least one point", what));
        }
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            double e = std::log10(lo) + t * (std::log10(hi) - std::log10(lo));
            if (std::abs(e - std::round(e)) < 1e-12) e = std::round(e);
            v[i] = i + 1 == n && n > 1 ? hi : std::pow(10.0, e);
        }
        return v;
    }

    void run(RunRecorder& rec) {
        auto& p = rec.params();
        merge(p, act.json());
        p["L"] = net.depth;
        p["a"] = net.skip;
        p["input_second_moment"] = net.input_second_moment;
        p["sigma_w2_grid"] = {{"min", w_min}, {"max", w_max}, {"points", w_points}, {"spacing", "geometric"}};
        p["sigma_b2_grid"] = {{"min", b_min}, {"max", b_max}, {"points", b_points}, {"spacing", "geometric"}};
        p["threads"] = threads;

        const auto ws = geometric(w_min, w_max, w_points, "sigma_w2");
        const auto bs = geometric(b_min, b_max, b_points, "sigma_b2");
        const auto cells = cumulant_map(act.build(), net.depth, net.skip, ws, bs, threads,
                                        net.input_second_moment);
        std::vector<std::vector<std::string>> rows;
        std::size_t diverged = 0;
        for (const auto& cell : cells) {
            rows.push_back({number(cell.sigma_w2), number(cell.sigma_b2), cell.diverged ? "" : number(cell.c)});
            diverged += cell.diverged ? 1 : 0;
        }
        rec.write_csv("cmap.csv", {"sigma_w2", "sigma_b2", "c"}, rows,
                      {{"diverged_cells", diverged}, {"missing_value", "empty c cell marks divergence"}});
        fmt::print("{} cells, {} diverged\n", cells.size(), diverged);
    }
};

Json error_json(const std::string& kind, const std::string& message) {
    return {{"error", kind}, {"message", message}};
}

void report_error(const Json& j) { std::cerr << j.dump() << std::endl; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jacobian spectra and isometric initialization for residual networks", "isoplan"};
    app.set_version_flag("--version", std::string(isoplan::kVersion));
    app.require_subcommand(1);
    std::string out_dir = "isoplan_out";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    SpectrumCmd spectrum;
    SimulateCmd simulate_cmd;
    PropagateCmd propagate;
    VerifyCmd verify;
    PlanCmd plan;
    CmapCmd cmap;

    std::function<void(RunRecorder&)> action;
    std::string name;
    auto add = [&](const char* sub, const char* help, auto& cmd) {
        CLI::App* s = app.add_subcommand(sub, help);
        s->fallthrough();
        cmd.add(*s);
        s->callback([&, sub] {
            name = sub;
            action = [&cmd](RunRecorder& rec) { cmd.run(rec); };
        });
    };
    add("spectrum", "theoretical singular-value density", spectrum);
    add("simulate", "Monte Carlo Jacobian spectra", simulate_cmd);
    add("propagate", "mean-field signal profile", propagate);
    add("verify", "empirical layer statistics against the recurrence", verify);
    add("plan", "sigma_w2 for a target effective cumulant", plan);
    add("cmap", "effective cumulant over a sigma_w2 x sigma_b2 grid", cmap);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error(error_json("usage", e.what()));
        return kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        RunRecorder rec(name, out_dir);
        action(rec);
        rec.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    } catch (const UsageError& e) {
        report_error(error_json("usage", e.what()));
        return kExitUsage;
    } catch (const isoplan::DivergenceError& e) {
        Json j = error_json(e.kind(), e.what());
        j["layer"] = e.layer();
        report_error(j);
        return kExitFailure;
    } catch (const isoplan::InfeasibleError& e) {
        Json j = error_json(e.kind(), e.what());
        j["min_c"] = e.min_c();
        j["max_c"] = e.max_c();
        report_error(j);
        return kExitFailure;
    } catch (const isoplan::FormatError& e) {
        Json j = error_json(e.kind(), e.what());
        j["row"] = e.row();
        report_error(j);
        return kExitFailure;
    } catch (const isoplan::Error& e) {
        report_error(error_json(e.kind(), e.what()));
        return kExitFailure;
    } catch (const std::exception& e) {
        report_error(error_json("io", e.what()));
        return kExitFailure;
    }
    return 0;
}
