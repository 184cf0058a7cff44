#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hwlrp/formulation.hpp"
#include "hwlrp/milp.hpp"
#include "test_util.hpp"

using namespace hwlrp;

TEST_CASE("evaluate on the empty model returns the offset") {
    LinearModel m;
    m.set_objective(ObjSense::Min, LinExpr{}, 7.5);
    Assignment a;
    Evaluation ev = evaluate(m, a, 1e-7);
    CHECK(ev.objective == 7.5);
    CHECK(ev.violated.empty());
    CHECK(ev.integrality_violations.empty());
}

TEST_CASE("violations respect the feasibility tolerance") {
    LinearModel m;
    const int x = m.add_variable("x", 0.0, 10.0, VarType::Continuous);
    LinExpr ex;
    ex.add(x, 1.0);
    m.add_constraint("cap", ex, ConstraintSense::LE, 5.0);
    m.set_objective(ObjSense::Min, ex, 0.0);

    const double tol = 1e-6;
    Assignment inside{{5.0 + tol / 2.0}};
    CHECK(evaluate(m, inside, tol).violated.empty());
    Assignment outside{{5.0 + 3.0 * tol}};
    const auto ev = evaluate(m, outside, tol);
    REQUIRE(ev.violated.size() == 1);
    CHECK(ev.violated[0].name == "cap");
}

TEST_CASE("evaluate flags missing variables and off-integer binaries") {
    LinearModel m;
    m.add_variable("b", 0.0, 1.0, VarType::Binary);
    Assignment short_a;
    CHECK_THROWS_AS(evaluate(m, short_a, 1e-7), std::invalid_argument);
    Assignment frac{{0.4}};
    CHECK(evaluate(m, frac, 1e-7).integrality_violations.size() == 1);
}

TEST_CASE("evaluate is linear in the assignment") {
    LinearModel m;
    const int x = m.add_variable("x", -100.0, 100.0, VarType::Continuous);
    const int y = m.add_variable("y", -100.0, 100.0, VarType::Continuous);
    LinExpr obj;
    obj.add(x, 2.0);
    obj.add(y, -3.0);
    m.set_objective(ObjSense::Min, obj, 4.0);
    Assignment a{{1.5, 2.0}};
    Assignment b{{-0.5, 7.0}};
    Assignment sum{{1.0, 9.0}};
    const double fa = evaluate(m, a, 1e-7).objective;
    const double fb = evaluate(m, b, 1e-7).objective;
    const double fs = evaluate(m, sum, 1e-7).objective;
    CHECK(fs == doctest::Approx(fa + fb - 4.0));
}

TEST_CASE("LP export of a one-variable model has the expected sections") {
    LinearModel m;
    const int x = m.add_variable("x", 0.0, std::numeric_limits<double>::infinity(),
                                 VarType::Continuous);
    LinExpr ex;
    ex.add(x, 1.0);
    m.add_constraint("floor", ex, ConstraintSense::GE, 0.0);
    m.set_objective(ObjSense::Min, ex, 0.0);
    const std::string text = export_lp(m);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
    CHECK(text.find("End\n") != std::string::npos);
}

TEST_CASE("binary variables land in the Binaries section") {
    LinearModel m;
    m.add_variable("r_ih", 0.0, 1.0, VarType::Binary);
    LinExpr obj;
    obj.add(0, 1.0);
    m.set_objective(ObjSense::Min, obj, 0.0);
    const std::string text = export_lp(m);
    const auto section = text.find("Binaries");
    REQUIRE(section != std::string::npos);
    CHECK(text.find("r_ih", section) != std::string::npos);
}

TEST_CASE("LP export is deterministic and sanitizes hostile names") {
    LinearModel m;
    m.add_variable("2bad name", 0.0, 1.0, VarType::Binary);
    m.add_variable("e5exp", 0.0, 2.0, VarType::Continuous);
    m.add_variable("2bad name", 0.0, 1.0, VarType::Binary);  // collides after sanitizing
    LinExpr obj;
    obj.add(0, 1.0);
    obj.add(1, 1.0);
    obj.add(2, 1.0);
    m.set_objective(ObjSense::Max, obj, 0.0);
    const std::string a = export_lp(m);
    const std::string b = export_lp(m);
    CHECK(a == b);
    CHECK(a.find(" 2bad") == std::string::npos);  // no identifier may start with a digit
    LinExpr bad;
    bad.add(0, std::numeric_limits<double>::quiet_NaN());
    m.add_constraint("nan", bad, ConstraintSense::LE, 0.0);
    CHECK_THROWS_AS(export_lp(m), std::invalid_argument);
}

TEST_CASE("model_stats counts an empty model as all zeros") {
    LinearModel m;
    const auto s = model_stats(m);
    CHECK(s.n_continuous == 0);
    CHECK(s.n_binary == 0);
    CHECK(s.n_integer == 0);
    CHECK(s.n_le + s.n_eq + s.n_ge == 0);
    CHECK(s.nonzeros == 0);
}

TEST_CASE("model_stats splits variables by integrality") {
    LinearModel m;
    m.add_variable("a", 0.0, 1.0, VarType::Binary);
    m.add_variable("b", 0.0, 1.0, VarType::Binary);
    m.add_variable("c", 0.0, 5.0, VarType::Continuous);
    const auto s = model_stats(m);
    CHECK(s.n_binary == 2);
    CHECK(s.n_continuous == 1);
}

TEST_CASE("binary bounds outside [0,1] are rejected") {
    LinearModel m;
    CHECK_THROWS_AS(m.add_variable("b", 0.0, 2.0, VarType::Binary), std::invalid_argument);
    CHECK_THROWS_AS(m.add_variable("x", 3.0, 1.0, VarType::Continuous),
                    std::invalid_argument);
}

TEST_CASE("constraints referencing unknown variables are rejected") {
    LinearModel m;
    LinExpr ex;
    ex.add(3, 1.0);
    CHECK_THROWS_AS(m.add_constraint("bad", ex, ConstraintSense::LE, 0.0),
                    std::invalid_argument);
}
