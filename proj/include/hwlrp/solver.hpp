#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "hwlrp/milp.hpp"

namespace hwlrp {

struct SolveParams {
    double feas_tol = 1e-7;
    double opt_tol = 1e-9;        // reduced-cost tolerance
    double mip_rel_gap = 1e-6;
    long node_limit = 1'000'000;
    std::optional<double> time_limit_seconds;
    std::ostream* trace = nullptr;  // one line per branch-and-bound node
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, LimitReached };

std::string to_string(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::LimitReached;
    std::optional<Assignment> assignment;
    std::optional<double> objective;
    std::optional<double> bound;
    long nodes = 0;
    long iterations = 0;
    std::string diagnostic;
};

/// Primal simplex on the LP relaxation (integrality ignored). Bounded
/// variables, dense basis inverse, Bland's rule after a degeneracy
/// streak; deterministic for fixed inputs.
SolveResult solve_lp(const LinearModel& model, const SolveParams& params);

/// Best-bound branch and bound over solve_lp, branching on the most
/// fractional integer variable with lowest-index tie-break.
SolveResult solve_milp(const LinearModel& model, const SolveParams& params);

}  // namespace hwlrp
