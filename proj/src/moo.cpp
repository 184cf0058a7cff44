#include "hwlrp/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hwlrp {

PayoffResult payoff_table(const Instance& inst, const SolveParams& params,
                          const FormulationOptions& opts) {
    PayoffResult out;
    CoreModel core = build_core_model(inst, opts);

    std::array<std::array<double, 3>, 3> at_optimum{};  // objective vectors per solve
    for (int i = 0; i < 3; ++i) {
        LinearModel model = core.model;
        model.set_objective(ObjSense::Min, core.objectives[static_cast<std::size_t>(i)],
                            0.0);
        SolveResult res = solve_milp(model, params);
        if (res.status != SolveStatus::Optimal) {
            out.status = res.status;
            return out;
        }
        const Solution sol = extract_solution(inst, core.catalog, *res.assignment, opts);
        at_optimum[static_cast<std::size_t>(i)] = sol.objectives;
    }

    PayoffTable table;
    for (int i = 0; i < 3; ++i) {
        table.best[i] = at_optimum[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        double worst = table.best[i];
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            worst = std::max(worst, at_optimum[static_cast<std::size_t>(j)]
                                               [static_cast<std::size_t>(i)]);
        }
        table.worst[i] = worst;
        const double r = worst - table.best[i];
        if (r > 0.0) {
            table.range[i] = r;
        } else {
            table.range[i] = 1.0;  // division guard for the augmentation term
            table.degenerate[i] = true;
        }
    }
    out.status = SolveStatus::Optimal;
    out.table = table;
    return out;
}

namespace {

std::array<int, 2> constrained_objectives(ObjectiveId retained) {
    switch (retained) {
        case ObjectiveId::F1: return {1, 2};
        case ObjectiveId::F2: return {0, 2};
        case ObjectiveId::F3: return {0, 1};
    }
    return {1, 2};
}

}  // namespace

std::vector<std::array<double, 2>> epsilon_grid(const PayoffTable& table, int n,
                                                ObjectiveId retained) {
    if (n < 2) throw std::invalid_argument("epsilon_grid: n must be >= 2");
    const auto cons = constrained_objectives(retained);
    auto axis = [&](int obj) {
        std::vector<double> vals;
        const double best = table.best[static_cast<std::size_t>(obj)];
        const double worst = table.worst[static_cast<std::size_t>(obj)];
        for (int t = 0; t < n; ++t)
            vals.push_back(best + (worst - best) * static_cast<double>(t) / (n - 1));
        return vals;
    };
    const auto a = axis(cons[0]);
    const auto b = axis(cons[1]);
    std::vector<std::array<double, 2>> grid;
    grid.reserve(static_cast<std::size_t>(n) * n);
    for (double va : a)
        for (double vb : b) grid.push_back({va, vb});
    return grid;
}

BuiltModel build_augmented_model(const Instance& inst, const std::array<double, 2>& eps,
                                 const std::array<double, 2>& ranges,
                                 const FormulationOptions& opts, ObjectiveId retained) {
    if (!(ranges[0] > 0.0) || !(ranges[1] > 0.0))
        throw std::invalid_argument("build_augmented_model: ranges must be positive");
    if (!(inst.eps_constant >= 1e-6 && inst.eps_constant <= 1e-3))
        throw std::invalid_argument("eps_constant outside [1e-6, 1e-3]");

    CoreModel core = build_core_model(inst, opts);
    const auto cons = constrained_objectives(retained);

    const int s_a = core.model.add_variable("s2", 0.0,
                                            std::numeric_limits<double>::infinity(),
                                            VarType::Continuous);
    const int s_b = core.model.add_variable("s3", 0.0,
                                            std::numeric_limits<double>::infinity(),
                                            VarType::Continuous);
    core.catalog.s2 = s_a;
    core.catalog.s3 = s_b;

    for (int side = 0; side < 2; ++side) {
        LinExpr row = core.objectives[static_cast<std::size_t>(cons[side])];
        row.add(side == 0 ? s_a : s_b, 1.0);
        core.model.add_constraint(side == 0 ? "eq42_epsilon" : "eq43_epsilon", row,
                                  ConstraintSense::EQ, eps[static_cast<std::size_t>(side)]);
    }

    LinExpr objective = core.objectives[static_cast<std::size_t>(retained)];
    objective.add(s_a, -inst.eps_constant / ranges[0]);
    objective.add(s_b, -inst.eps_constant / ranges[1]);
    core.model.set_objective(ObjSense::Min, objective, 0.0);
    return BuiltModel{std::move(core.model), std::move(core.catalog)};
}

FrontResult pareto_front(const Instance& inst, int n, const SolveParams& params,
                         const FormulationOptions& opts, ObjectiveId retained) {
    FrontResult out;
    out.payoff = payoff_table(inst, params, opts);
    out.status = out.payoff.status;
    if (out.payoff.status != SolveStatus::Optimal) return out;
    const PayoffTable& table = *out.payoff.table;

    const auto cons = constrained_objectives(retained);
    const std::array<double, 2> ranges = {table.range[static_cast<std::size_t>(cons[0])],
                                          table.range[static_cast<std::size_t>(cons[1])]};

    std::vector<ParetoPoint> raw;
    for (const auto& eps : epsilon_grid(table, n, retained)) {
        GridCell cell;
        cell.eps = eps;
        BuiltModel built = build_augmented_model(inst, eps, ranges, opts, retained);
        SolveResult res = solve_milp(built.model, params);
        cell.status = res.status;
        if (res.status == SolveStatus::Optimal) {
            ParetoPoint p;
            p.eps = eps;
            p.solution = extract_solution(inst, built.catalog, *res.assignment, opts);
            p.objectives = p.solution.objectives;
            cell.objectives = p.objectives;
            raw.push_back(std::move(p));
        }
        out.cells.push_back(std::move(cell));
    }

    std::vector<std::array<double, 3>> vecs;
    vecs.reserve(raw.size());
    for (const auto& p : raw) vecs.push_back(p.objectives);
    for (std::size_t idx : nondominated_indices(vecs)) out.points.push_back(raw[idx]);
    std::sort(out.points.begin(), out.points.end(),
              [](const ParetoPoint& a, const ParetoPoint& b) {
                  return a.objectives < b.objectives;
              });
    return out;
}

std::vector<std::size_t> nondominated_indices(
    const std::vector<std::array<double, 3>>& pts) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
            if (i == j) continue;
            const auto& p = pts[i];
            const auto& q = pts[j];
            const bool leq = q[0] <= p[0] && q[1] <= p[1] && q[2] <= p[2];
            const bool strict = q[0] < p[0] || q[1] < p[1] || q[2] < p[2];
            if (leq && strict) dominated = true;
            if (leq && !strict && j < i) dominated = true;  // exact tie, keep the first
        }
        if (!dominated) keep.push_back(i);
    }
    return keep;
}

std::vector<std::array<double, 3>> nondominated_filter(
    const std::vector<std::array<double, 3>>& pts) {
    std::vector<std::array<double, 3>> out;
    for (std::size_t idx : nondominated_indices(pts)) out.push_back(pts[idx]);
    return out;
}

}  // namespace hwlrp
