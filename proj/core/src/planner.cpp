#include "isoplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "isoplan/errors.hpp"
#include "parallel.hpp"

namespace isoplan {

namespace {

NetConfig config_for(const PlanRequest& r, double sigma_w2) {
    NetConfig cfg;
    cfg.depth = r.depth;
    cfg.width = 1;
    cfg.skip = r.skip;
    cfg.sigma_w2 = sigma_w2;
    cfg.sigma_b2 = r.sigma_b2;
    cfg.input_second_moment = r.input_second_moment;
    return cfg;
}

PlanResult finish(const PlanRequest& r, double sigma_w2, bool closed_form) {
    PlanResult out;
    out.sigma_w2 = sigma_w2;
    out.closed_form = closed_form;
    out.profile = propagate_q(config_for(r, sigma_w2), r.act);
    out.achieved_c = effective_cumulant(out.profile).c;
    const double rel = std::abs(out.achieved_c - r.target_c) / r.target_c;
    if (!(rel <= r.tol)) {
        throw NumericalError(rel, fmt::format("plan: achieved c = {:.17g} misses target {:.17g} "
                                              "(relative error {:.3g})",
                                              out.achieved_c, r.target_c, rel));
    }
    return out;
}

double safe_cumulant(const PlanRequest& r, double sigma_w2) {
    try {
        return cumulant_at(r, sigma_w2);
    } catch (const DivergenceError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

void PlanRequest::validate() const {
    if (!(target_c > 0.0) || !std::isfinite(target_c)) {
        throw ContractError("plan: target_c must be positive and finite");
    }
    if (!(tol > 0.0 && tol <= 1e-2)) throw ContractError("plan: tol must lie in (0, 1e-2]");
    if (!(input_second_moment >= 0.0)) {
        throw ContractError("plan: input second moment must be non-negative");
    }
    config_for(*this, 1.0).validate();
}

double cumulant_at(const PlanRequest& request, double sigma_w2) {
    return effective_cumulant(propagate_q(config_for(request, sigma_w2), request.act)).c;
}

PlanResult plan_sigma(const PlanRequest& request) {
    request.validate();
    if (const auto kappa = request.act.constant_slope_moment(); kappa && *kappa > 0.0) {
        const double sigma_w2 = request.target_c / *kappa;
        if (sigma_w2 > kPlanMaxSigmaW2) {
            throw InfeasibleError(0.0, kPlanMaxSigmaW2 * *kappa,
                                  fmt::format("plan: target c = {:.17g} needs sigma_w2 = {:.17g} "
                                              "beyond {:g}",
                                              request.target_c, sigma_w2, kPlanMaxSigmaW2));
        }
        return finish(request, sigma_w2, true);
    }
    return plan_sigma_search(request);
}

PlanResult plan_sigma_search(const PlanRequest& request) {
    request.validate();
    const double target = request.target_c;
    const double log_lo = std::log(kPlanMinSigmaW2);
    const double log_hi = std::log(kPlanMaxSigmaW2);

    std::vector<double> s(kPlanScanPoints);
    std::vector<double> c(kPlanScanPoints);
    for (std::size_t i = 0; i < kPlanScanPoints; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(kPlanScanPoints - 1);
        s[i] = i + 1 == kPlanScanPoints ? kPlanMaxSigmaW2 : std::exp(log_lo + t * (log_hi - log_lo));
        c[i] = safe_cumulant(request, s[i]);
    }

    double c_min = std::numeric_limits<double>::infinity();
    double c_max = -std::numeric_limits<double>::infinity();
    for (double v : c) {
        if (std::isfinite(v)) {
            c_min = std::min(c_min, v);
            c_max = std::max(c_max, v);
        }
    }

    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < kPlanScanPoints; ++i) {
        const double f0 = c[i] - target;
        const double f1 = c[i + 1] - target;
        if (!std::isfinite(f0) || !std::isfinite(f1)) continue;
        if (f0 == 0.0) {
            roots.push_back(s[i]);
            continue;
        }
        if ((f0 < 0.0) == (f1 < 0.0)) continue;

        double lo = s[i];
        double hi = s[i + 1];
        double f_lo = f0;
        while ((hi - lo) > 1e-13 * hi) {
            const double mid = std::sqrt(lo * hi);
            if (mid <= lo || mid >= hi) break;
            const double f_mid = safe_cumulant(request, mid) - target;
            if (!std::isfinite(f_mid)) {
                throw NumericalError(std::numeric_limits<double>::infinity(),
                                     fmt::format("plan: divergence inside bracket [{:g}, {:g}]",
                                                 lo, hi));
            }
            if ((f_mid < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        const double f_hi = safe_cumulant(request, hi) - target;
        roots.push_back(std::abs(f_lo) <= std::abs(f_hi) ? lo : hi);
    }
    if (c.back() == target) roots.push_back(s.back());

    if (roots.empty()) {
        if (!std::isfinite(c_min)) {
            throw InfeasibleError(0.0, 0.0, "plan: the recurrence diverges over the whole range");
        }
        throw InfeasibleError(
            c_min, c_max,
            fmt::format("plan: target c = {:.17g} unreachable for {} with sigma_w2 in [{:g}, {:g}]; "
                        "attainable c in [{:.6g}, {:.6g}]",
                        target, request.act.name(), kPlanMinSigmaW2, kPlanMaxSigmaW2, c_min, c_max));
    }

    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    PlanResult out = finish(request, roots.front(), false);
    out.other_roots.assign(roots.begin() + 1, roots.end());
    return out;
}

std::vector<CumulantCell> cumulant_map(const Activation& act, std::size_t depth, double skip,
                                       const std::vector<double>& sigma_w2_grid,
                                       const std::vector<double>& sigma_b2_grid, unsigned threads,
                                       double input_second_moment) {
    if (sigma_w2_grid.empty() || sigma_b2_grid.empty()) {
        throw ContractError("cumulant_map: empty grid");
    }
    for (double v : sigma_w2_grid) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ContractError("cumulant_map: sigma_w2 values must be positive");
    }
    for (double v : sigma_b2_grid) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ContractError("cumulant_map: sigma_b2 values must be positive");
    }

    const std::size_t nb = sigma_b2_grid.size();
    std::vector<CumulantCell> cells(sigma_w2_grid.size() * nb);
    detail::parallel_for(cells.size(), threads, [&](std::size_t k) {
        CumulantCell& cell = cells[k];
        cell.sigma_w2 = sigma_w2_grid[k / nb];
        cell.sigma_b2 = sigma_b2_grid[k % nb];
        NetConfig cfg;
        cfg.depth = depth;
        cfg.width = 1;
        cfg.skip = skip;
        cfg.sigma_w2 = cell.sigma_w2;
        cfg.sigma_b2 = cell.sigma_b2;
        cfg.input_second_moment = input_second_moment;
        try {
            cell.c = effective_cumulant(propagate_q(cfg, act)).c;
        } catch (const DivergenceError&) {
            cell.c = std::numeric_limits<double>::quiet_NaN();
            cell.diverged = true;
        }
    });
    return cells;
}

}  // namespace isoplan
