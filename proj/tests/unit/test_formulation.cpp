#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hwlrp/formulation.hpp"
#include "hwlrp/milp.hpp"
#include "hwlrp/solver.hpp"
#include "test_util.hpp"

using namespace hwlrp;

TEST_CASE("big_m is the largest vehicle capacity") {
    Instance inst = testutil::minimal_instance();
    CHECK(big_m(inst) == 10.0);
    inst.vehicles.push_back(inst.vehicles[0]);
    inst.vehicles.back().id = "k2";
    inst.vehicles.back().capacity = 25.0;
    inst.vehicles.push_back(inst.vehicles[0]);
    inst.vehicles.back().id = "k3";
    inst.vehicles.back().capacity = 8.0;
    CHECK(big_m(inst) == 25.0);
}

TEST_CASE("minimal model matches the hand-derived inventory") {
    Instance inst = testutil::minimal_instance();
    BuiltModel built = build_model(inst, ObjectiveId::F1);

    // variables, counted by family:
    //   x/xl on dep->g1, g1->t1, t1->dep        3 + 3
    //   lo(g1), e(g1), e(t1)                    3
    //   openings r1/L1, (t1,a,L1), (t1,b,L1), d1/L1   4
    //   xt(w1,t1), xr(r1), xd(d1)               3
    //   flows k(t1,r1), z(t1,d1), v(r1,d1)      3
    //   splits ts(w1,t1,a,L1), rs(r1,L1), ds(d1,L1)   3
    CHECK(built.model.num_variables() == 22);
    CHECK(built.catalog.x.size() == built.catalog.xl.size());

    const auto stats = model_stats(built.model);
    CHECK(stats.n_binary == 7);  // 3 routing + 4 openings
    CHECK(stats.n_continuous == 15);

    // rows: eq04(1) eq05(1) eq06(1) eq07(1) eq08(1) eq10(1 terminal)
    //       eq11(2) eq12(1) eq15+16(2) eq37-39(3x3)
    //       eq17(1) eq18(1) eq19(1) eq20(1) eq21(1) eq24(1)
    //       eq24 split cap+sum(2) eq22(1) eq23(1) eq25(1) eq26(1)
    //       eq27(1) eq28(1) level splits rec+disp(4) eq29(1)
    //       one tech/level rows(3) eq34(3)                      = 45
    CHECK(built.model.num_constraints() == 45);

    // nonzero terms per row:
    //   routing: eq04(1) eq05(2) eq06(1) eq07(2) eq08(2) eq10(3)
    //            eq11(2+2) eq12(2) eq15(2) eq16(2)              = 21
    //   linearizers per arc (eq37, eq38, eq39):
    //     dep->g1 2+1+2, g1->t1 2+2+3, t1->dep 2+1+2            = 17
    //   masses: eq17(2) eq18(3) eq19(3) eq20(2)
    //           eq21(1: the ts coefficient (1-0.8)*beta is 0)
    //           eq24(2) split cap(2) split sum(2) eq22(2) eq23(2)
    //           eq25(2) eq26(3) eq27(2) eq28(2)                 = 30
    //   level splits 4x2 = 8, eq29(1), eq30 rows 2+1+1 = 4,
    //   eq34 3x1 = 3                                            = 16
    CHECK(stats.nonzeros == 84);

    // equalities: eq05 eq06 eq07 eq17 eq20 eq21 eq24 eq24sum eq25
    //             eq26 eq29 and the two level-split sums         = 13
    CHECK(stats.n_eq == 13);
    CHECK(stats.n_ge == 7);   // eq11 lb, eq19, eq23, eq28, three eq39 rows
    CHECK(stats.n_le == 25);
}

TEST_CASE("linearizer and routing variable counts match on synthetic instances") {
    for (std::uint64_t seed : {1, 4, 9}) {
        Instance inst = synth_instance(seed, testutil::tiny_dims(3, 2, 2, 2, 3, 4, 2));
        BuiltModel built = build_model(inst, ObjectiveId::F1);
        CHECK(built.catalog.x.size() == built.catalog.xl.size());
    }
}

TEST_CASE("existing facilities are pinned open") {
    Instance inst = testutil::minimal_instance();
    // flip the recycling candidate into an existing plant
    for (auto& n : inst.nodes)
        if (n.id == "r1") n.kind = NodeKind::RecyclingExisting;
    BuiltModel built = build_model(inst, ObjectiveId::F1);
    int pin_rows = 0;
    for (const auto& c : built.model.constraints())
        if (c.name.rfind("eq32_exist_rec_", 0) == 0) {
            ++pin_rows;
            CHECK(c.sense == ConstraintSense::EQ);
            CHECK(c.rhs == 1.0);
            CHECK(c.expr.terms().size() == 1);  // single level in the minimal data
        }
    CHECK(pin_rows == 1);
}

TEST_CASE("linearization is exact over every integral assignment") {
    Instance inst = testutil::minimal_instance();
    BuiltModel built = build_model(inst, ObjectiveId::F1);
    const LinearModel& model = built.model;

    std::vector<int> binaries;
    for (std::size_t j = 0; j < model.num_variables(); ++j)
        if (model.variables()[j].type == VarType::Binary)
            binaries.push_back(static_cast<int>(j));
    REQUIRE(binaries.size() == 7);

    SolveParams params;
    int feasible_points = 0;
    for (unsigned mask = 0; mask < (1u << binaries.size()); ++mask) {
        LinearModel fixed = model;
        for (std::size_t b = 0; b < binaries.size(); ++b) {
            const double v = (mask >> b) & 1u ? 1.0 : 0.0;
            fixed.variable_mut(binaries[b]).lb = v;
            fixed.variable_mut(binaries[b]).ub = v;
        }
        // two extreme continuous completions of this integral assignment
        for (bool flip : {false, true}) {
            LinearModel probe = fixed;
            probe.set_objective(ObjSense::Min, model.objective().expr,
                                model.objective().offset);
            if (flip) probe.set_objective(ObjSense::Max, model.objective().expr, 0.0);
            const SolveResult res = solve_lp(probe, params);
            if (res.status != SolveStatus::Optimal) continue;
            ++feasible_points;
            const Assignment& a = *res.assignment;
            for (const auto& [key, xl_id] : built.catalog.xl) {
                const double x = a[built.catalog.x.at(key)];
                auto lo_it = built.catalog.lo.find({std::get<0>(key), std::get<2>(key)});
                const double lo = lo_it != built.catalog.lo.end() ? a[lo_it->second] : 0.0;
                CHECK(std::abs(a[xl_id] - x * lo) <= 1e-7);
            }
            // decoded nonlinear f1 equals the linearized objective
            const Solution sol = extract_solution(inst, built.catalog, a);
            const double model_f1 = evaluate(model, a, 1e-6).objective;
            CHECK(std::abs(sol.objectives[0] - model_f1) <=
                  1e-6 * std::max(1.0, std::abs(model_f1)));
        }
    }
    // exactly one integral combo is feasible (the route with tech_a and
    // disposal open; recycling is starved and tech_b blocked), probed at
    // its two extreme completions
    CHECK(feasible_points == 2);
}

TEST_CASE("zero demand decodes to empty routes and zero objectives") {
    Instance inst = testutil::minimal_instance();
    inst.waste_types[0].demand["g1"] = 0.0;
    BuiltModel built = build_model(inst, ObjectiveId::F1);
    SolveParams params;
    const SolveResult res = solve_milp(built.model, params);
    REQUIRE(res.status == SolveStatus::Optimal);
    const Solution sol = extract_solution(inst, built.catalog, *res.assignment);
    for (const auto& r : sol.routes) CHECK(r.sequence.empty());
    CHECK(sol.kflow.empty());
    CHECK(sol.objectives[0] == doctest::Approx(0.0));
    CHECK(sol.objectives[1] == doctest::Approx(0.0));
    CHECK(sol.objectives[2] == doctest::Approx(0.0));
    CHECK(check_solution_feasible(inst, sol).empty());
}

TEST_CASE("a two-cycle among generation nodes fails route reconstruction") {
    Instance inst = synth_instance(2, testutil::tiny_dims(2, 1, 1, 1, 1, 1, 1));
    BuiltModel built = build_model(inst, ObjectiveId::F1);
    Assignment a;
    a.values.assign(built.model.num_variables(), 0.0);
    a.values[static_cast<std::size_t>(built.catalog.x.at({"g1", "g2", "k1"}))] = 1.0;
    a.values[static_cast<std::size_t>(built.catalog.x.at({"g2", "g1", "k1"}))] = 1.0;
    CHECK_THROWS_AS(extract_solution(inst, built.catalog, a), std::runtime_error);
}

TEST_CASE("hand-derived optimum of the minimal instance") {
    // cheapest plan: route dep -> g1 -> t1, open t1 at (tech_a, L1) and
    // d1 at L1. f1 = 100 + 90 + 0.05*6 (unload leg) + 0.08*1.2 (residue)
    // f2 = 0.5*6 (site, treated) + 0.3*1.2 (site, disposed) + 0.02*1.2
    // f3 = 980*6 + 271*1.2 + 1.68*8*1.2
    Instance inst = testutil::minimal_instance();
    SolveParams params;
    BuiltModel b1 = build_model(inst, ObjectiveId::F1);
    const SolveResult r1 = solve_milp(b1.model, params);
    REQUIRE(r1.status == SolveStatus::Optimal);
    CHECK(*r1.objective == doctest::Approx(190.396).epsilon(1e-9));
    BuiltModel b2 = build_model(inst, ObjectiveId::F2);
    const SolveResult r2 = solve_milp(b2.model, params);
    REQUIRE(r2.status == SolveStatus::Optimal);
    CHECK(*r2.objective == doctest::Approx(3.384).epsilon(1e-9));
    BuiltModel b3 = build_model(inst, ObjectiveId::F3);
    const SolveResult r3 = solve_milp(b3.model, params);
    REQUIRE(r3.status == SolveStatus::Optimal);
    CHECK(*r3.objective == doctest::Approx(6221.328).epsilon(1e-9));
}

TEST_CASE("objective agreement at solver optima") {
    for (std::uint64_t seed : {7, 8}) {
        Instance inst = synth_instance(seed, testutil::tiny_dims());
        for (int oi = 0; oi < 3; ++oi) {
            BuiltModel built = build_model(inst, static_cast<ObjectiveId>(oi));
            SolveParams params;
            const SolveResult res = solve_milp(built.model, params);
            REQUIRE(res.status == SolveStatus::Optimal);
            const Solution sol = extract_solution(inst, built.catalog, *res.assignment);
            CHECK(std::abs(sol.objectives[static_cast<std::size_t>(oi)] - *res.objective) <=
                  1e-6 * std::max(1.0, std::abs(*res.objective)));
            CHECK(check_solution_feasible(inst, sol).empty());
        }
    }
}

TEST_CASE("cost scaling leaves the f1 argmin unchanged and scales the value") {
    Instance inst = synth_instance(11, testutil::tiny_dims());
    BuiltModel base = build_model(inst, ObjectiveId::F1);
    SolveParams params;
    const SolveResult res = solve_milp(base.model, params);
    REQUIRE(res.status == SolveStatus::Optimal);

    const double lambda = 3.5;
    Instance scaled = inst;
    for (auto& a : scaled.arcs) a.unit_cost *= lambda;
    for (auto& e : scaled.capacity_levels.treatment)
        for (auto& lc : e.levels) lc.invest_cost *= lambda;
    for (auto& e : scaled.capacity_levels.recycling)
        for (auto& lc : e.levels) lc.invest_cost *= lambda;
    for (auto& e : scaled.capacity_levels.disposal)
        for (auto& lc : e.levels) lc.invest_cost *= lambda;
    BuiltModel b2 = build_model(scaled, ObjectiveId::F1);
    const SolveResult res2 = solve_milp(b2.model, params);
    REQUIRE(res2.status == SolveStatus::Optimal);
    CHECK(*res2.objective ==
          doctest::Approx(lambda * *res.objective).epsilon(1e-6));
}

TEST_CASE("feasibility checker pinpoints violated limits") {
    Instance inst = synth_instance(11, testutil::tiny_dims());
    BuiltModel built = build_model(inst, ObjectiveId::F1);
    SolveParams params;
    const SolveResult res = solve_milp(built.model, params);
    REQUIRE(res.status == SolveStatus::Optimal);
    Solution sol = extract_solution(inst, built.catalog, *res.assignment);
    REQUIRE(check_solution_feasible(inst, sol).empty());

    SUBCASE("route longer than the vehicle limit") {
        Instance tight = inst;
        for (auto& v : tight.vehicles) v.max_distance = 1.0;
        const auto viol = check_solution_feasible(tight, sol);
        bool found = false;
        for (const auto& v : viol)
            if (v.code == "eq10-12") found = true;
        CHECK(found);
    }
    SUBCASE("facility below its minimum threshold") {
        Instance strict = inst;
        for (auto& e : strict.capacity_levels.recycling) e.min_required = 1e6;
        for (auto& e : strict.capacity_levels.treatment) e.min_required = 1e6;
        const auto viol = check_solution_feasible(strict, sol);
        bool found = false;
        for (const auto& v : viol)
            if (v.code == "eq19" || v.code == "eq23") found = true;
        CHECK(found);
    }
    SUBCASE("residue ratio identity broken") {
        Solution tampered = sol;
        if (!tampered.vflow.empty()) {
            tampered.vflow.begin()->second *= 2.0;
            const auto viol = check_solution_feasible(inst, tampered);
            CHECK(!viol.empty());
        }
    }
}

TEST_CASE("solution documents round-trip and re-verify") {
    Instance inst = synth_instance(4, testutil::tiny_dims());
    BuiltModel built = build_model(inst, ObjectiveId::F2);
    SolveParams params;
    const SolveResult res = solve_milp(built.model, params);
    REQUIRE(res.status == SolveStatus::Optimal);
    const Solution sol = extract_solution(inst, built.catalog, *res.assignment);
    const std::string text = serialize_solution(inst, sol);
    const Solution again = parse_solution(inst, text);
    CHECK(check_solution_feasible(inst, again).empty());
    CHECK(again.objectives[1] == doctest::Approx(sol.objectives[1]));
    CHECK(serialize_solution(inst, again) == text);
}

TEST_CASE("paper-literal risk mode charges every level") {
    Instance inst = testutil::minimal_instance();
    FormulationOptions literal;
    literal.risk_mode = RiskMode::PaperLiteral;
    BuiltModel coupled = build_model(inst, ObjectiveId::F2);
    BuiltModel printed = build_model(inst, ObjectiveId::F2, literal);
    SolveParams params;
    const SolveResult a = solve_milp(coupled.model, params);
    const SolveResult b = solve_milp(printed.model, params);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    // the printed form sums the treatment risk rates of both technologies,
    // so with mass at t1 it must charge strictly more
    CHECK(*b.objective > *a.objective);
    const Solution sb = extract_solution(inst, printed.catalog, *b.assignment, literal);
    CHECK(std::abs(sb.objectives[1] - *b.objective) <=
          1e-6 * std::max(1.0, std::abs(*b.objective)));
}
