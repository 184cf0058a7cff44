#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hwlrp/milp.hpp"
#include "hwlrp/oracle.hpp"
#include "hwlrp/solver.hpp"

using namespace hwlrp;

namespace {

LinearModel single_var_lp() {
    LinearModel m;
    const int x = m.add_variable("x", 0.0, std::numeric_limits<double>::infinity(),
                                 VarType::Continuous);
    LinExpr ex;
    ex.add(x, 1.0);
    m.add_constraint("floor", ex, ConstraintSense::GE, 3.0);
    m.set_objective(ObjSense::Min, ex, 0.0);
    return m;
}

// feasible-by-construction random LPs: box bounds plus rows passing
// through a random interior point
LinearModel random_lp(std::mt19937_64& gen) {
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    };
    LinearModel m;
    const int n = 4 + static_cast<int>(gen() % 3);
    std::vector<double> interior;
    for (int j = 0; j < n; ++j) {
        const double ub = uni(2.0, 8.0);
        m.add_variable("x" + std::to_string(j), 0.0, ub, VarType::Continuous);
        interior.push_back(uni(0.2, 0.8) * ub);
    }
    const int rows = 4 + static_cast<int>(gen() % 4);
    for (int r = 0; r < rows; ++r) {
        LinExpr ex;
        double at_interior = 0.0;
        for (int j = 0; j < n; ++j) {
            const double c = uni(-1.0, 1.0);
            if (std::abs(c) < 0.15) continue;
            ex.add(j, c);
            at_interior += c * interior[static_cast<std::size_t>(j)];
        }
        if (ex.empty()) {
            ex.add(0, 1.0);
            at_interior = interior[0];
        }
        if (gen() % 2)
            m.add_constraint("c" + std::to_string(r), ex, ConstraintSense::LE,
                             at_interior + uni(0.1, 2.0));
        else
            m.add_constraint("c" + std::to_string(r), ex, ConstraintSense::GE,
                             at_interior - uni(0.1, 2.0));
    }
    LinExpr obj;
    for (int j = 0; j < n; ++j) obj.add(j, uni(-1.0, 1.0));
    m.set_objective(ObjSense::Min, obj, uni(-3.0, 3.0));
    return m;
}

}  // namespace

TEST_CASE("min x subject to x >= 3") {
    SolveParams p;
    const SolveResult res = solve_lp(single_var_lp(), p);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(*res.objective == doctest::Approx(3.0));
    CHECK((*res.assignment)[0] == doctest::Approx(3.0));
}

TEST_CASE("unbounded ray is reported") {
    LinearModel m;
    const int x = m.add_variable("x", 0.0, std::numeric_limits<double>::infinity(),
                                 VarType::Continuous);
    LinExpr ex;
    ex.add(x, -1.0);
    m.set_objective(ObjSense::Min, ex, 0.0);
    SolveParams p;
    CHECK(solve_lp(m, p).status == SolveStatus::Unbounded);
}

TEST_CASE("contradictory rows are infeasible") {
    LinearModel m;
    const int x = m.add_variable("x", -10.0, 10.0, VarType::Continuous);
    LinExpr ex;
    ex.add(x, 1.0);
    m.add_constraint("le", ex, ConstraintSense::LE, 0.0);
    m.add_constraint("ge", ex, ConstraintSense::GE, 1.0);
    m.set_objective(ObjSense::Min, ex, 0.0);
    SolveParams p;
    CHECK(solve_lp(m, p).status == SolveStatus::Infeasible);
    CHECK(solve_milp(m, p).status == SolveStatus::Infeasible);
}

TEST_CASE("binary knapsack picks the better item") {
    LinearModel m;
    const int a = m.add_variable("a", 0.0, 1.0, VarType::Binary);
    const int b = m.add_variable("b", 0.0, 1.0, VarType::Binary);
    LinExpr cap;
    cap.add(a, 1.0);
    cap.add(b, 1.0);
    m.add_constraint("cap", cap, ConstraintSense::LE, 1.0);
    LinExpr obj;
    obj.add(a, 3.0);
    obj.add(b, 2.0);
    m.set_objective(ObjSense::Max, obj, 0.0);
    SolveParams p;
    const SolveResult res = solve_milp(m, p);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(*res.objective == doctest::Approx(3.0));
    CHECK((*res.assignment)[a] == doctest::Approx(1.0));
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
    std::mt19937_64 gen(20240817);
    SolveParams p;
    int solved = 0;
    for (int trial = 0; trial < 120; ++trial) {
        LinearModel m = random_lp(gen);
        const SolveResult res = solve_lp(m, p);
        const auto verts = enumerate_vertices(m, 1e-7);
        if (res.status == SolveStatus::Infeasible) {
            CHECK(verts.empty());
            continue;
        }
        REQUIRE(res.status == SolveStatus::Optimal);
        REQUIRE_FALSE(verts.empty());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : verts)
            best = std::min(best, evaluate(m, v, 1e-6).objective);
        CHECK(std::abs(best - *res.objective) <=
              1e-8 * std::max(1.0, std::abs(best)));
        CHECK(evaluate(m, *res.assignment, 16 * p.feas_tol).violated.empty());
        ++solved;
    }
    CHECK(solved > 60);  // the generator is biased toward feasibility
}

TEST_CASE("solves are deterministic and the bound never crosses the incumbent") {
    std::mt19937_64 gen(7);
    SolveParams p;
    for (int trial = 0; trial < 10; ++trial) {
        LinearModel m = random_lp(gen);
        // integerize a couple of variables to get a real tree
        for (std::size_t j = 0; j < std::min<std::size_t>(3, m.num_variables()); ++j) {
            m.variable_mut(static_cast<int>(j)).type = VarType::Integer;
        }
        std::ostringstream trace;
        SolveParams traced = p;
        traced.trace = &trace;
        const SolveResult a = solve_milp(m, traced);
        const SolveResult b = solve_milp(m, p);
        CHECK(a.status == b.status);
        CHECK(a.nodes == b.nodes);
        if (a.objective) CHECK(*a.objective == *b.objective);

        // weak duality along the trace (min sense): node bound <= incumbent
        std::istringstream lines(trace.str());
        std::string tok;
        double bound = 0.0, incumbent = 0.0;
        std::string bound_s, inc_s;
        while (lines >> tok) {
            if (tok != "node") continue;
            long id, depth;
            std::string kw;
            lines >> id >> kw >> depth >> kw >> bound_s >> kw >> inc_s;
            if (bound_s == "-inf" || inc_s == "none") continue;
            bound = std::stod(bound_s);
            incumbent = std::stod(inc_s);
            CHECK(bound <= incumbent + 1e-6 * std::max(1.0, std::abs(incumbent)));
        }
    }
}

TEST_CASE("LP relaxation never exceeds the MILP optimum") {
    std::mt19937_64 gen(99);
    SolveParams p;
    for (int trial = 0; trial < 12; ++trial) {
        LinearModel m = random_lp(gen);
        for (std::size_t j = 0; j + 1 < m.num_variables(); j += 2)
            m.variable_mut(static_cast<int>(j)).type = VarType::Integer;
        const SolveResult lp = solve_lp(m, p);
        const SolveResult ip = solve_milp(m, p);
        if (lp.status != SolveStatus::Optimal || ip.status != SolveStatus::Optimal)
            continue;
        CHECK(*lp.objective <= *ip.objective + 1e-7 * std::max(1.0, std::abs(*ip.objective)));
    }
}

TEST_CASE("node limit surfaces as limit-reached") {
    LinearModel m;
    // a wide knapsack that needs more than one node
    LinExpr cap, obj;
    for (int j = 0; j < 14; ++j) {
        const int v = m.add_variable("b" + std::to_string(j), 0.0, 1.0, VarType::Binary);
        cap.add(v, 1.0 + 0.1 * j);
        obj.add(v, 1.0 + 0.07 * (13 - j));
    }
    m.add_constraint("cap", cap, ConstraintSense::LE, 7.3);
    m.set_objective(ObjSense::Max, obj, 0.0);
    SolveParams p;
    p.node_limit = 1;
    const SolveResult res = solve_milp(m, p);
    CHECK(res.status == SolveStatus::LimitReached);
}
