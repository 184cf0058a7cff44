#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hwlrp/instance.hpp"
#include "hwlrp/milp.hpp"

namespace hwlrp {

enum class ObjectiveId { F1 = 0, F2 = 1, F3 = 2 };

std::string to_string(ObjectiveId id);
std::optional<ObjectiveId> objective_from_string(const std::string& token);

/// Site-risk accounting. Coupled charges the operating risk of the level
/// (and technology) actually opened via per-level mass splits; the
/// literal mode reproduces the printed objective, which sums the risk
/// rates over every level regardless of the opening.
enum class RiskMode { Coupled, PaperLiteral };

struct FormulationOptions {
    RiskMode risk_mode = RiskMode::Coupled;
    // Pin x*lo linearizers that feed no objective or mass row to zero
    // instead of emitting their three big-M rows. Optimal values are
    // unchanged (those products are read by nothing); the rows matter
    // only when sweeping the linearization itself.
    bool trim_dangling_linearizers = false;
};

/// Bidirectional map between semantic decision variables and model ids.
/// Keys are entity ids: (from, to, vehicle) for routing, (node, level)
/// for openings, and so on.
struct VarCatalog {
    std::map<std::tuple<std::string, std::string, std::string>, int> x;   // routing
    std::map<std::tuple<std::string, std::string, std::string>, int> xl;  // x*lo linearizer
    std::map<std::pair<std::string, std::string>, int> lo;  // load after (gen node, vehicle)
    std::map<std::pair<std::string, std::string>, int> e;   // distance after (node, vehicle)
    std::map<std::pair<std::string, std::string>, int> kflow;  // treatment -> recycling
    std::map<std::pair<std::string, std::string>, int> zflow;  // treatment -> disposal
    std::map<std::pair<std::string, std::string>, int> vflow;  // recycling -> disposal
    std::map<std::string, int> xr;  // recycled mass per node
    std::map<std::string, int> xd;  // disposed mass per node
    std::map<std::pair<std::string, std::string>, int> xt;  // (waste, treatment node)
    std::map<std::pair<std::string, std::string>, int> r_open;  // (node, level)
    std::map<std::pair<std::string, std::string>, int> d_open;
    std::map<std::tuple<std::string, std::string, std::string>, int> t_open;  // (tech,node,level)
    std::map<std::tuple<std::string, std::string, std::string, std::string>, int>
        ts;  // treated-mass split (waste, node, tech, level)
    std::map<std::pair<std::string, std::string>, int> rs;  // recycled-mass split (node, level)
    std::map<std::pair<std::string, std::string>, int> ds;  // disposed-mass split
    int s2 = -1;  // epsilon-constraint slacks, augmented models only
    int s3 = -1;

    std::map<int, std::string> semantic_name;  // var id -> family-qualified name
};

struct CoreModel {
    LinearModel model;
    VarCatalog catalog;
    std::array<LinExpr, 3> objectives;  // linearized f1, f2, f3
};

struct BuiltModel {
    LinearModel model;
    VarCatalog catalog;
};

/// Tightest valid linearization constant: loads never exceed the largest
/// vehicle capacity.
double big_m(const Instance& inst);

/// Constraints and variables shared by every scalarization; objectives
/// come back as expressions over the same variable space.
CoreModel build_core_model(const Instance& inst, const FormulationOptions& opts = {});

BuiltModel build_model(const Instance& inst, ObjectiveId objective,
                       const FormulationOptions& opts = {});

struct Opening {
    std::string node;
    std::string facility;  // recycling | treatment | disposal
    std::string level;
    std::string technology;  // treatment only
};

struct Route {
    std::string vehicle;
    std::vector<std::string> sequence;  // depot, generation nodes, facility, depot
    std::vector<double> load_after;     // per generation stop
    double load = 0.0;                  // delivered mass
    double length = 0.0;                // km
};

struct Solution {
    std::vector<Opening> openings;
    std::vector<Route> routes;
    std::map<std::pair<std::string, std::string>, double> kflow, zflow, vflow;
    std::map<std::pair<std::string, std::string>, double> xt;  // (waste, node)
    std::map<std::string, double> xr, xd;
    std::array<double, 3> objectives{0.0, 0.0, 0.0};
};

/// Rebuild domain decisions from an integral-feasible assignment. Routes
/// are reconstructed by following x arcs from the depots; throws
/// std::runtime_error when the arcs do not form depot-rooted walks.
Solution extract_solution(const Instance& inst, const VarCatalog& catalog,
                          const Assignment& a, const FormulationOptions& opts = {});

/// The original nonlinear objective expressions evaluated directly on
/// decoded decisions; the independent check of the linearization.
std::array<double, 3> evaluate_objectives(const Instance& inst, const Solution& sol,
                                          const FormulationOptions& opts = {});

struct SolutionViolation {
    std::string code;
    std::string entity;
    std::string message;
};

/// Domain-level feasibility: route shape and limits, single service,
/// capacity windows, residue ratio identities, mass balance, link risk
/// caps. Independent of the MILP encoding.
std::vector<SolutionViolation> check_solution_feasible(const Instance& inst,
                                                       const Solution& sol,
                                                       const FormulationOptions& opts = {});

std::string serialize_solution(const Instance& inst, const Solution& sol);
Solution parse_solution(const Instance& inst, const std::string& text);
std::string format_solution_report(const Instance& inst, const Solution& sol);

}  // namespace hwlrp
