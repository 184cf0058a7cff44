#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hwlrp {

enum class VarType { Continuous, Binary, Integer };
enum class ConstraintSense { LE, EQ, GE };
enum class ObjSense { Min, Max };

/// Sparse linear expression: (variable id, coefficient) pairs, kept
/// sorted by id with duplicates merged and near-zero entries dropped.
class LinExpr {
  public:
    LinExpr() = default;
    void add(int var, double coef);
    void add(const LinExpr& other, double scale = 1.0);
    const std::vector<std::pair<int, double>>& terms() const;
    bool empty() const { return terms().empty(); }
    double value_at(const std::vector<double>& assignment) const;

  private:
    void canonicalize() const;
    mutable std::vector<std::pair<int, double>> terms_;
    mutable bool dirty_ = false;
};

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = 0.0;
    VarType type = VarType::Continuous;
};

struct Constraint {
    std::string name;
    LinExpr expr;
    ConstraintSense sense = ConstraintSense::LE;
    double rhs = 0.0;
};

struct Objective {
    ObjSense sense = ObjSense::Min;
    LinExpr expr;
    double offset = 0.0;
};

class LinearModel {
  public:
    int add_variable(const std::string& name, double lb, double ub, VarType type);
    void add_constraint(const std::string& name, LinExpr expr, ConstraintSense sense,
                        double rhs);
    void set_objective(ObjSense sense, LinExpr expr, double offset = 0.0);

    std::size_t num_variables() const { return vars_.size(); }
    std::size_t num_constraints() const { return cons_.size(); }
    const Variable& variable(int id) const { return vars_[static_cast<std::size_t>(id)]; }
    Variable& variable_mut(int id) { return vars_[static_cast<std::size_t>(id)]; }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return cons_; }
    const Objective& objective() const { return obj_; }

  private:
    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    Objective obj_;
};

/// Values indexed by variable id; must cover the whole model when used
/// with evaluate().
struct Assignment {
    std::vector<double> values;
    double operator[](int id) const { return values[static_cast<std::size_t>(id)]; }
};

struct ConstraintViolation {
    std::size_t index = 0;
    std::string name;
    double residual = 0.0;  // amount by which the row is violated
};

struct Evaluation {
    double objective = 0.0;
    std::vector<ConstraintViolation> violated;
    std::vector<int> integrality_violations;  // variable ids off-integer
};

Evaluation evaluate(const LinearModel& model, const Assignment& a, double feas_tol);

/// CPLEX-LP text; deterministic (insertion order), names sanitized to
/// the format's identifier rules. Throws on non-finite coefficients.
std::string export_lp(const LinearModel& model);

struct ModelStats {
    std::size_t n_continuous = 0, n_binary = 0, n_integer = 0;
    std::size_t n_le = 0, n_eq = 0, n_ge = 0;
    std::size_t nonzeros = 0;
};

ModelStats model_stats(const LinearModel& model);

}  // namespace hwlrp
