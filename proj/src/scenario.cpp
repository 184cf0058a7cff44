#include "hwlrp/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace hwlrp {

namespace {

double tier_factor(const std::vector<double>& factors, std::size_t idx) {
    if (factors.empty()) return 1.0;
    return factors[std::min(idx, factors.size() - 1)];
}

std::size_t level_index(const std::vector<std::string>& levels, const std::string& token) {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == token) return i;
    return 0;
}

void rescale_levels(const std::vector<std::string>& order, std::vector<LevelCap>& levels,
                    const std::vector<double>& factors) {
    for (auto& lc : levels) lc.max_capacity *= tier_factor(factors, level_index(order, lc.level));
}

LevelCap top_tier(const std::vector<LevelCap>& levels) {
    LevelCap best;
    for (const auto& lc : levels)
        if (lc.max_capacity >= best.max_capacity) best = lc;
    return best;
}

}  // namespace

Instance apply_scenario(const Instance& inst, const ScenarioSpec& spec) {
    Instance out = inst;

    if (spec.waste_scale != 1.0) {
        for (auto& w : out.waste_types)
            for (auto& [node, d] : w.demand) d *= spec.waste_scale;
        out.name += "+scale" + std::to_string(spec.waste_scale);
    }

    if (spec.capacity == CapacityMode::Increased || spec.capacity == CapacityMode::Decreased) {
        const auto& factors = spec.capacity == CapacityMode::Increased
                                  ? spec.increase_factors
                                  : spec.decrease_factors;
        for (auto& e : out.capacity_levels.treatment)
            rescale_levels(out.capacity_levels.levels, e.levels, factors);
        for (auto& e : out.capacity_levels.recycling)
            rescale_levels(out.capacity_levels.levels, e.levels, factors);
        for (auto& e : out.capacity_levels.disposal)
            rescale_levels(out.capacity_levels.levels, e.levels, factors);
        out.name += spec.capacity == CapacityMode::Increased ? "+cap-up" : "+cap-down";
    } else if (spec.capacity == CapacityMode::None) {
        const double huge = std::max(1.0, out.total_demand()) * 10.0;
        out.capacity_levels.levels = {"unbounded"};
        auto collapse = [&](std::vector<LevelCap>& levels) {
            LevelCap top = top_tier(levels);
            LevelCap lc;
            lc.level = "unbounded";
            lc.max_capacity = std::max(huge, top.max_capacity);
            lc.invest_cost = top.invest_cost;
            lc.op_risk = top.op_risk;
            levels = {lc};
        };
        for (auto& e : out.capacity_levels.treatment) {
            collapse(e.levels);
            e.min_required = 0.0;
        }
        for (auto& e : out.capacity_levels.recycling) {
            collapse(e.levels);
            e.min_required = 0.0;
        }
        for (auto& e : out.capacity_levels.disposal) {
            collapse(e.levels);
            e.min_required = 0.0;
        }
        out.name += "+cap-none";
    }

    return out;
}

}  // namespace hwlrp
