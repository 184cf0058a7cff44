#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hwlrp/formulation.hpp"
#include "hwlrp/moo.hpp"
#include "hwlrp/oracle.hpp"
#include "hwlrp/solver.hpp"
#include "test_util.hpp"

using namespace hwlrp;

TEST_CASE("configuration count matches the hand count on the minimal instance") {
    Instance inst = testutil::minimal_instance();
    // openings: r1 in {closed, L1} x t1 in {closed, (a,L1), (b,L1)} x d1 in
    // {closed, L1} = 2*3*2 = 12 opening sets.
    // routing: one service, one vehicle; the only terminal is t1 and only
    // when t1 is open with the compatible technology (a). With t1=(a,L1):
    // 1 assignment * 1 order * 1 terminal = 1 plan; otherwise no routes
    // exist and the waste goes unplanned (0 configurations).
    // total = (opening sets with t1=(a,L1): 2*2=4) * 1 = 4
    CHECK(count_configs(inst) == 4.0);

    int streamed = 0;
    enumerate_configs(inst, [&](const DiscreteConfig& cfg) {
        CHECK(cfg.routes.size() == 1);
        CHECK(cfg.routes[0].terminal == "t1");
        ++streamed;
        return true;
    });
    CHECK(streamed == 4);
}

TEST_CASE("zero demand leaves a single empty plan per opening set") {
    Instance inst = testutil::minimal_instance();
    inst.waste_types[0].demand["g1"] = 0.0;
    // every opening set now carries exactly one (empty) route plan
    CHECK(count_configs(inst) == 12.0);
    OracleResult res = oracle_optimum(inst, ObjectiveId::F1);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == doctest::Approx(0.0));  // no candidates are forced open
    CHECK(check_solution_feasible(inst, res.solution).empty());
}

TEST_CASE("the size guard refuses oversized search spaces") {
    Instance big = synth_instance(1, testutil::tiny_dims(6, 2, 2, 2, 2, 6, 3));
    try {
        enumerate_configs(big, [](const DiscreteConfig&) { return true; });
        FAIL("expected OracleIntractable");
    } catch (const OracleIntractable& e) {
        CHECK(e.counted() > e.limit());
    }
}

TEST_CASE("oracle and MILP certify each other on tiny instances") {
    for (std::uint64_t seed : {2, 8}) {
        Instance inst = synth_instance(seed, testutil::tiny_dims(2, 1, 2, 1, 2, 2, 2));
        for (int oi = 0; oi < 3; ++oi) {
            const auto obj = static_cast<ObjectiveId>(oi);
            OracleResult oracle = oracle_optimum(inst, obj);
            BuiltModel built = build_model(inst, obj);
            SolveParams params;
            const SolveResult milp = solve_milp(built.model, params);
            REQUIRE(oracle.status == SolveStatus::Optimal);
            REQUIRE(milp.status == SolveStatus::Optimal);
            const Solution sol = extract_solution(inst, built.catalog, *milp.assignment);
            const double a = oracle.value;
            const double b = sol.objectives[static_cast<std::size_t>(oi)];
            CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)));
            CHECK(check_solution_feasible(inst, oracle.solution).empty());
        }
    }
}

TEST_CASE("tightening the distance limit can only worsen the optimum") {
    Instance inst = synth_instance(15, testutil::tiny_dims(2, 1, 1, 1, 1, 1, 1));
    OracleResult base = oracle_optimum(inst, ObjectiveId::F1);
    REQUIRE(base.status == SolveStatus::Optimal);

    // find the used route length and forbid anything longer than a hair
    // below it
    double used_length = 0.0;
    for (const auto& r : base.solution.routes) used_length = std::max(used_length, r.length);
    Instance tight = inst;
    for (auto& v : tight.vehicles) v.max_distance = used_length - 0.05;
    OracleResult restricted = oracle_optimum(tight, ObjectiveId::F1);
    if (restricted.status == SolveStatus::Optimal)
        CHECK(restricted.value >= base.value - 1e-9);
    else
        CHECK(restricted.status == SolveStatus::Infeasible);
}

TEST_CASE("oracle pareto collapses under a duplicated objective") {
    Instance inst = synth_instance(21, testutil::tiny_dims(2, 1, 2, 1, 2, 2, 2));
    // rebuild f3 to coincide with f2 on every solution: zero all site
    // terms and give each residue arc an emission rate that reproduces
    // its risk rate exactly (rate * km == risk)
    Instance dup = inst;
    for (auto& [node, v] : dup.co2_ops.recycling) v = 0.0;
    for (auto& e : dup.co2_ops.treatment) e.rate = 0.0;
    for (auto& [node, v] : dup.co2_ops.disposal) v = 0.0;
    for (auto& e : dup.capacity_levels.treatment)
        for (auto& lc : e.levels) lc.op_risk = 0.0;
    for (auto& e : dup.capacity_levels.recycling)
        for (auto& lc : e.levels) lc.op_risk = 0.0;
    for (auto& e : dup.capacity_levels.disposal)
        for (auto& lc : e.levels) lc.op_risk = 0.0;
    for (auto& a : dup.arcs) {
        const double km = a.distance > 0.0 ? a.distance : 1.0;
        a.co2_transport.tr = a.transport_risk.tr / km;
        // z rides treatment->disposal arcs and v recycling->disposal arcs,
        // so each arc carries exactly one of the two td-style rates
        a.co2_transport.td = (a.transport_risk.td + a.transport_risk.rd) / km;
    }
    const auto front = oracle_pareto(dup);
    REQUIRE(!front.empty());
    for (const auto& p : front)
        CHECK(std::abs(p[1] - p[2]) <= 1e-9 * std::max(1.0, std::abs(p[1])));
    // identical coordinates means the set already is the 2-objective front
    std::vector<std::array<double, 3>> squashed;
    for (const auto& p : front) squashed.push_back({p[0], p[1], 0.0});
    CHECK(nondominated_filter(squashed).size() == front.size());
}

TEST_CASE("vertex enumeration finds the box corners") {
    LinearModel m;
    m.add_variable("x", 0.0, 1.0, VarType::Continuous);
    m.add_variable("y", 0.0, 1.0, VarType::Continuous);
    LinExpr cut;
    cut.add(0, 1.0);
    cut.add(1, 1.0);
    m.add_constraint("diag", cut, ConstraintSense::LE, 1.5);
    const auto verts = enumerate_vertices(m, 1e-7);
    CHECK(verts.size() == 5);  // square cut at one corner
}

TEST_CASE("oracle refuses multi-depot instances") {
    Instance inst = testutil::minimal_instance();
    inst.nodes.push_back(Node{"dep2", NodeKind::Depot, ""});
    CHECK_THROWS_AS(oracle_optimum(inst, ObjectiveId::F1), std::invalid_argument);
}
