#pragma once

#include <string>
#include <vector>

#include "hwlrp/instance.hpp"

namespace hwlrp {

/// Capacity-planning variants: `None` collapses every facility's tiers
/// into one effectively unbounded level with a zero minimum; the scaled
/// modes multiply each tier's ceiling by a per-tier factor.
enum class CapacityMode { Paper, None, Increased, Decreased };

struct ScenarioSpec {
    CapacityMode capacity = CapacityMode::Paper;
    double waste_scale = 1.0;
    bool sustainability = true;
    // tier factors, matched by position to capacity_levels.levels
    std::vector<double> increase_factors = {2.0, 1.5, 4.0 / 3.0};
    std::vector<double> decrease_factors = {0.8, 0.7, 2.0 / 3.0};
};

/// Instance with the scenario applied. The capacity-`none` variant keeps
/// the top tier's establishment cost and operating risk (the unbounded
/// facility is at least that size) and is exempt from the minimum
/// threshold invariant by construction.
Instance apply_scenario(const Instance& inst, const ScenarioSpec& spec);

}  // namespace hwlrp
