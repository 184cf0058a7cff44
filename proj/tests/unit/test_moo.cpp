#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hwlrp/moo.hpp"
#include "hwlrp/oracle.hpp"
#include "test_util.hpp"

using namespace hwlrp;

TEST_CASE("nondominated filter on the worked examples") {
    std::vector<std::array<double, 3>> pts = {{1, 2, 0}, {2, 1, 0}, {2, 2, 0}};
    const auto front = nondominated_filter(pts);
    REQUIRE(front.size() == 2);
    CHECK(front[0] == std::array<double, 3>{1, 2, 0});
    CHECK(front[1] == std::array<double, 3>{2, 1, 0});

    std::vector<std::array<double, 3>> ties = {{3, 3, 3}, {3, 3, 3}, {3, 3, 3}};
    CHECK(nondominated_filter(ties).size() == 1);

    CHECK(nondominated_filter({}).empty());
}

TEST_CASE("nondominated filter matches a quadratic scan on random clouds") {
    std::mt19937_64 gen(1234);
    auto uni = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::array<double, 3>> pts;
        const int n = 20 + static_cast<int>(gen() % 60);
        for (int i = 0; i < n; ++i) {
            // quantized coordinates so exact ties occur
            pts.push_back({std::floor(uni() * 8.0), std::floor(uni() * 8.0),
                           std::floor(uni() * 8.0)});
        }
        const auto got = nondominated_indices(pts);
        // independent scan: keep i iff nothing dominates it and no earlier
        // exact duplicate exists
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bool keep = true;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j) continue;
                const bool le = pts[j][0] <= pts[i][0] && pts[j][1] <= pts[i][1] &&
                                pts[j][2] <= pts[i][2];
                const bool lt = pts[j][0] < pts[i][0] || pts[j][1] < pts[i][1] ||
                                pts[j][2] < pts[i][2];
                if (le && lt) keep = false;
                if (!lt && le && j < i) keep = false;
            }
            if (keep) want.push_back(i);
        }
        CHECK(got == want);
    }
}

TEST_CASE("epsilon grid hits the corners and midpoints") {
    PayoffTable table;
    table.best = {0.0, 0.0, 0.0};
    table.worst = {1.0, 10.0, 20.0};
    table.range = {1.0, 10.0, 20.0};

    const auto corners = epsilon_grid(table, 2);
    REQUIRE(corners.size() == 4);
    CHECK(corners[0] == std::array<double, 2>{0.0, 0.0});
    CHECK(corners[3] == std::array<double, 2>{10.0, 20.0});

    const auto grid3 = epsilon_grid(table, 3);
    REQUIRE(grid3.size() == 9);
    CHECK(grid3[4] == std::array<double, 2>{5.0, 10.0});

    CHECK(epsilon_grid(table, 5).size() == 25);
    CHECK_THROWS_AS(epsilon_grid(table, 1), std::invalid_argument);
}

TEST_CASE("payoff table on a tiny instance") {
    Instance inst = synth_instance(3, testutil::tiny_dims());
    SolveParams params;
    const PayoffResult payoff = payoff_table(inst, params);
    REQUIRE(payoff.status == SolveStatus::Optimal);
    const PayoffTable& t = *payoff.table;
    for (int i = 0; i < 3; ++i) {
        CHECK(t.worst[i] >= t.best[i] - 1e-9);
        CHECK(t.range[i] > 0.0);
    }
}

TEST_CASE("augmented model at the worst corner reproduces the f1 optimum") {
    Instance inst = synth_instance(3, testutil::tiny_dims());
    SolveParams params;
    const PayoffResult payoff = payoff_table(inst, params);
    REQUIRE(payoff.status == SolveStatus::Optimal);
    const PayoffTable& t = *payoff.table;

    BuiltModel f1_model = build_model(inst, ObjectiveId::F1);
    const SolveResult f1 = solve_milp(f1_model.model, params);
    REQUIRE(f1.status == SolveStatus::Optimal);

    BuiltModel aug = build_augmented_model(inst, {t.worst[1], t.worst[2]},
                                           {t.range[1], t.range[2]});
    CHECK(aug.catalog.s2 >= 0);
    CHECK(aug.catalog.s3 >= 0);
    const SolveResult res = solve_milp(aug.model, params);
    REQUIRE(res.status == SolveStatus::Optimal);
    const Solution sol = extract_solution(inst, aug.catalog, *res.assignment);
    CHECK(sol.objectives[0] == doctest::Approx(*f1.objective).epsilon(1e-6));
}

TEST_CASE("an over-tight epsilon is infeasible") {
    Instance inst = synth_instance(3, testutil::tiny_dims());
    SolveParams params;
    const PayoffResult payoff = payoff_table(inst, params);
    REQUIRE(payoff.status == SolveStatus::Optimal);
    const PayoffTable& t = *payoff.table;
    BuiltModel aug = build_augmented_model(
        inst, {t.best[1] - 0.5 * std::max(1.0, std::abs(t.best[1])), t.worst[2]},
        {t.range[1], t.range[2]});
    CHECK(solve_milp(aug.model, params).status == SolveStatus::Infeasible);
    CHECK_THROWS_AS(build_augmented_model(inst, {1.0, 1.0}, {0.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("pareto front is idempotent under the filter and self-consistent") {
    Instance inst = synth_instance(11, testutil::tiny_dims(2, 1, 2, 1, 2, 2, 2));
    SolveParams params;
    const FrontResult front = pareto_front(inst, 4, params);
    REQUIRE(front.status == SolveStatus::Optimal);
    REQUIRE(!front.points.empty());
    CHECK(front.cells.size() == 16);

    std::vector<std::array<double, 3>> vecs;
    for (const auto& p : front.points) vecs.push_back(p.objectives);
    CHECK(nondominated_filter(vecs).size() == vecs.size());

    // sorted by f1
    for (std::size_t i = 0; i + 1 < front.points.size(); ++i)
        CHECK(front.points[i].objectives[0] <= front.points[i + 1].objectives[0] + 1e-12);

    // every returned solution passes the domain checks
    for (const auto& p : front.points)
        CHECK(check_solution_feasible(inst, p.solution).empty());

    // efficiency self-consistency: re-solving with a point's own (f2, f3)
    // as epsilon yields a vector that does not dominate it
    const PayoffTable& t = *front.payoff.table;
    for (const auto& p : front.points) {
        BuiltModel aug = build_augmented_model(inst, {p.objectives[1], p.objectives[2]},
                                               {t.range[1], t.range[2]});
        const SolveResult res = solve_milp(aug.model, params);
        REQUIRE(res.status == SolveStatus::Optimal);
        const Solution sol = extract_solution(inst, aug.catalog, *res.assignment);
        const auto& q = sol.objectives;
        const bool dominates =
            q[0] <= p.objectives[0] + 1e-7 && q[1] <= p.objectives[1] + 1e-7 &&
            q[2] <= p.objectives[2] + 1e-7 &&
            (q[0] < p.objectives[0] - 1e-6 || q[1] < p.objectives[1] - 1e-6 ||
             q[2] < p.objectives[2] - 1e-6);
        CHECK_FALSE(dominates);
    }
}

TEST_CASE("grid refinement only sharpens the front") {
    Instance inst = synth_instance(21, testutil::tiny_dims(2, 1, 2, 1, 2, 2, 2));
    SolveParams params;
    const FrontResult coarse = pareto_front(inst, 3, params);
    const FrontResult fine = pareto_front(inst, 6, params);
    REQUIRE(coarse.status == SolveStatus::Optimal);
    REQUIRE(fine.status == SolveStatus::Optimal);
    // every coarse point is matched or dominated by a fine point
    for (const auto& p : coarse.points) {
        bool covered = false;
        for (const auto& q : fine.points) {
            if (q.objectives[0] <= p.objectives[0] + 1e-6 &&
                q.objectives[1] <= p.objectives[1] + 1e-6 &&
                q.objectives[2] <= p.objectives[2] + 1e-6)
                covered = true;
        }
        CHECK(covered);
    }
}

TEST_CASE("retaining f2 instead of f1 works symmetrically") {
    Instance inst = synth_instance(7, testutil::tiny_dims());
    SolveParams params;
    const FrontResult front = pareto_front(inst, 3, params, {}, ObjectiveId::F2);
    CHECK(front.status == SolveStatus::Optimal);
    for (const auto& p : front.points)
        CHECK(check_solution_feasible(inst, p.solution).empty());
}
