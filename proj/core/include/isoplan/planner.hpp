#pragma once

#include <cstddef>
#include <vector>

#include "isoplan/activations.hpp"
#include "isoplan/signal.hpp"

namespace isoplan {

struct PlanRequest {
    Activation act = Activation::relu();
    std::size_t depth = 10;
    double skip = 1.0;
    double sigma_b2 = 0.0;
    double target_c = 0.125;
    double tol = 1e-6;  ///< relative tolerance on the achieved c, in (0, 1e-2]
    double input_second_moment = 1.0;

    /// Throws ContractError when target_c <= 0, tol is outside (0, 1e-2] or
    /// the network parameters are invalid.
    void validate() const;
};

struct PlanResult {
    double sigma_w2 = 0.0;
    double achieved_c = 0.0;
    SignalProfile profile;
    bool closed_form = false;
    /// Larger sigma_w2 values that also reach the target.
    std::vector<double> other_roots;
};

/// Search range for sigma_w2.
inline constexpr double kPlanMinSigmaW2 = 1e-8;
inline constexpr double kPlanMaxSigmaW2 = 1e4;
inline constexpr std::size_t kPlanScanPoints = 200;

/// Finds sigma_w2 with effective_cumulant(propagate_q(...)) = target_c.
/// Activations with a constant E[phi'^2] are inverted in closed form,
/// everything else goes through plan_sigma_search.
PlanResult plan_sigma(const PlanRequest& request);

/// Geometric scan of [kPlanMinSigmaW2, kPlanMaxSigmaW2] followed by bisection
/// on every sign change. Returns the smallest root. Throws InfeasibleError
/// with the attainable range when no scan interval brackets the target.
PlanResult plan_sigma_search(const PlanRequest& request);

/// Effective cumulant at the given sigma_w2.
double cumulant_at(const PlanRequest& request, double sigma_w2);

struct CumulantCell {
    double sigma_w2 = 0.0;
    double sigma_b2 = 0.0;
    double c = 0.0;         ///< NaN when diverged
    bool diverged = false;
};

/// c over the sigma_w2 x sigma_b2 grid; cell (i, j) is stored at i * |b| + j.
/// Divergent cells are flagged instead of aborting the map.
std::vector<CumulantCell> cumulant_map(const Activation& act, std::size_t depth, double skip,
                                       const std::vector<double>& sigma_w2_grid,
                                       const std::vector<double>& sigma_b2_grid,
                                       unsigned threads = 0, double input_second_moment = 1.0);

}  // namespace isoplan
