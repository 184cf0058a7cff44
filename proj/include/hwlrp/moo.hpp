#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "hwlrp/formulation.hpp"
#include "hwlrp/instance.hpp"
#include "hwlrp/solver.hpp"

namespace hwlrp {

struct PayoffTable {
    std::array<double, 3> best{};
    std::array<double, 3> worst{};
    std::array<double, 3> range{};       // worst - best, zero guarded to 1
    std::array<bool, 3> degenerate{};    // true where the guard engaged
};

struct PayoffResult {
    SolveStatus status = SolveStatus::LimitReached;
    std::optional<PayoffTable> table;
};

/// Best value per objective from its own minimization; worst value from
/// the stored objective vectors of the other objectives' optima.
PayoffResult payoff_table(const Instance& inst, const SolveParams& params,
                          const FormulationOptions& opts = {});

/// Uniform n-point grids (inclusive of both ends) over [best, worst] of
/// the two objectives moved into constraints; n^2 vectors, outer axis
/// first, deterministic order.
std::vector<std::array<double, 2>> epsilon_grid(const PayoffTable& table, int n,
                                                ObjectiveId retained = ObjectiveId::F1);

/// Augmented scalarization: retained objective minus
/// eps * (s_a/r_a + s_b/r_b), with f_a + s_a = eps_a, f_b + s_b = eps_b
/// and s >= 0. Ranges must be positive.
BuiltModel build_augmented_model(const Instance& inst, const std::array<double, 2>& eps,
                                 const std::array<double, 2>& ranges,
                                 const FormulationOptions& opts = {},
                                 ObjectiveId retained = ObjectiveId::F1);

struct ParetoPoint {
    std::array<double, 3> objectives{};
    std::array<double, 2> eps{};
    Solution solution;
};

struct GridCell {
    std::array<double, 2> eps{};
    SolveStatus status = SolveStatus::LimitReached;
    std::optional<std::array<double, 3>> objectives;
};

struct FrontResult {
    SolveStatus status = SolveStatus::Optimal;  // of the payoff stage
    PayoffResult payoff;
    std::vector<ParetoPoint> points;  // nondominated, sorted by f1 then f2, f3
    std::vector<GridCell> cells;      // every grid solve, in grid order
};

FrontResult pareto_front(const Instance& inst, int n, const SolveParams& params,
                         const FormulationOptions& opts = {},
                         ObjectiveId retained = ObjectiveId::F1);

/// Indices of the points kept by Pareto filtering: p survives iff no
/// other point is <= componentwise and < somewhere. Exact duplicates
/// collapse onto their first occurrence; order is stable.
std::vector<std::size_t> nondominated_indices(const std::vector<std::array<double, 3>>& pts);
std::vector<std::array<double, 3>> nondominated_filter(
    const std::vector<std::array<double, 3>>& pts);

}  // namespace hwlrp
