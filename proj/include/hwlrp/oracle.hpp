#pragma once

#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwlrp/formulation.hpp"
#include "hwlrp/instance.hpp"
#include "hwlrp/milp.hpp"
#include "hwlrp/solver.hpp"

namespace hwlrp {

/// One point of the discrete search space: facility openings plus an
/// ordered route (with terminal) per used vehicle.
struct DiscreteConfig {
    std::map<std::string, std::string> rec_level;   // node -> level
    std::map<std::string, std::string> disp_level;  // node -> level
    std::map<std::string, std::pair<std::string, std::string>> treat_choice;  // node -> (tech, level)
    struct VehicleRoute {
        std::string vehicle;
        std::vector<std::string> gens;  // visit order
        std::string terminal;
    };
    std::vector<VehicleRoute> routes;
};

class OracleIntractable : public std::runtime_error {
  public:
    OracleIntractable(double counted, double limit)
        : std::runtime_error("oracle refuses: search space of about " +
                             std::to_string(counted) + " configurations exceeds " +
                             std::to_string(limit)),
          counted_(counted),
          limit_(limit) {}
    double counted() const { return counted_; }
    double limit() const { return limit_; }

  private:
    double counted_;
    double limit_;
};

/// Counted size of the full discrete space (openings x ordered route
/// assignments x terminals), before load/distance filtering.
double count_configs(const Instance& inst);

/// Streams every structurally valid configuration (compatibility and
/// existing-facility pinning respected; load and distance limits are the
/// optimizer's job). Deterministic order. The visitor returns false to
/// stop early. Throws OracleIntractable beyond the size guard.
void enumerate_configs(const Instance& inst,
                       const std::function<bool(const DiscreteConfig&)>& visit);

struct OracleResult {
    SolveStatus status = SolveStatus::Infeasible;
    double value = 0.0;
    Solution solution;
};

/// Ground truth by complete enumeration: fixes each configuration,
/// checks Eqs-(10)-(16)-style limits combinatorially, resolves the
/// remaining flow variables with solve_lp, and returns the global
/// minimum of the selected objective.
OracleResult oracle_optimum(const Instance& inst, ObjectiveId objective,
                            const FormulationOptions& opts = {});

/// Exact nondominated set over the finite image: every configuration's
/// flow polytope is resolved at its vertices.
std::vector<std::array<double, 3>> oracle_pareto(const Instance& inst,
                                                 const FormulationOptions& opts = {});

/// All vertices of the model's feasible region (equalities eliminated,
/// then basic solutions of the inequality system). Intended for small
/// polytopes; throws OracleIntractable when the subset count explodes.
std::vector<Assignment> enumerate_vertices(const LinearModel& model, double tol = 1e-7);

}  // namespace hwlrp
