#include "hwlrp/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hwlrp {

namespace {
constexpr double kDropTol = 0.0;  // exact zeros only; tiny coefficients are data
}

void LinExpr::add(int var, double coef) {
    if (coef == 0.0) return;
    terms_.emplace_back(var, coef);
    dirty_ = true;
}

void LinExpr::add(const LinExpr& other, double scale) {
    for (const auto& [v, c] : other.terms()) add(v, c * scale);
}

void LinExpr::canonicalize() const {
    if (!dirty_) return;
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> merged;
    for (const auto& [v, c] : terms_) {
        if (!merged.empty() && merged.back().first == v)
            merged.back().second += c;
        else
            merged.emplace_back(v, c);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& t) { return std::abs(t.second) <= kDropTol; }),
                 merged.end());
    terms_ = std::move(merged);
    dirty_ = false;
}

const std::vector<std::pair<int, double>>& LinExpr::terms() const {
    canonicalize();
    return terms_;
}

double LinExpr::value_at(const std::vector<double>& assignment) const {
    double acc = 0.0;
    for (const auto& [v, c] : terms()) acc += c * assignment[static_cast<std::size_t>(v)];
    return acc;
}

int LinearModel::add_variable(const std::string& name, double lb, double ub, VarType type) {
    if (type == VarType::Binary && (lb < 0.0 || ub > 1.0))
        throw std::invalid_argument("binary variable '" + name +
                                    "' must have bounds within [0,1]");
    if (lb > ub)
        throw std::invalid_argument("variable '" + name + "' has empty bound interval");
    vars_.push_back(Variable{name, lb, ub, type});
    return static_cast<int>(vars_.size()) - 1;
}

void LinearModel::add_constraint(const std::string& name, LinExpr expr,
                                 ConstraintSense sense, double rhs) {
    for (const auto& [v, c] : expr.terms()) {
        (void)c;
        if (v < 0 || static_cast<std::size_t>(v) >= vars_.size())
            throw std::invalid_argument("constraint '" + name +
                                        "' references unknown variable id");
    }
    cons_.push_back(Constraint{name, std::move(expr), sense, rhs});
}

void LinearModel::set_objective(ObjSense sense, LinExpr expr, double offset) {
    for (const auto& [v, c] : expr.terms()) {
        (void)c;
        if (v < 0 || static_cast<std::size_t>(v) >= vars_.size())
            throw std::invalid_argument("objective references unknown variable id");
    }
    obj_ = Objective{sense, std::move(expr), offset};
}

Evaluation evaluate(const LinearModel& model, const Assignment& a, double feas_tol) {
    if (a.values.size() != model.num_variables())
        throw std::invalid_argument("assignment does not cover all model variables");

    Evaluation out;
    out.objective = model.objective().expr.value_at(a.values) + model.objective().offset;

    for (std::size_t i = 0; i < model.constraints().size(); ++i) {
        const Constraint& c = model.constraints()[i];
        const double lhs = c.expr.value_at(a.values);
        double residual = 0.0;
        switch (c.sense) {
            case ConstraintSense::LE: residual = lhs - c.rhs; break;
            case ConstraintSense::GE: residual = c.rhs - lhs; break;
            case ConstraintSense::EQ: residual = std::abs(lhs - c.rhs); break;
        }
        if (residual > feas_tol)
            out.violated.push_back(ConstraintViolation{i, c.name, residual});
    }

    for (std::size_t v = 0; v < model.num_variables(); ++v) {
        const Variable& var = model.variables()[v];
        if (var.type == VarType::Continuous) continue;
        const double x = a.values[v];
        if (std::abs(x - std::round(x)) > feas_tol)
            out.integrality_violations.push_back(static_cast<int>(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// LP export

namespace {

bool lp_name_ok_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '!' || c == '#' ||
           c == '$' || c == '%' || c == '&' || c == '(' || c == ')' || c == ',' || c == '.' ||
           c == ';' || c == '?' || c == '@' || c == '{' || c == '}' || c == '~' || c == '\'';
}

std::string sanitize_lp_name(const std::string& raw, std::size_t index, const char* prefix,
                             std::set<std::string>& used) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw) s.push_back(lp_name_ok_char(c) ? c : '_');
    if (s.empty()) s = std::string(prefix) + std::to_string(index);
    // Identifiers must not start with a digit or a period, nor look like
    // the start of an exponent (e/E followed by a digit or sign).
    const char c0 = s[0];
    bool bad_start = std::isdigit(static_cast<unsigned char>(c0)) || c0 == '.';
    if ((c0 == 'e' || c0 == 'E') && s.size() > 1 &&
        (std::isdigit(static_cast<unsigned char>(s[1])) || s[1] == '+' || s[1] == '-' ||
         s[1] == '.'))
        bad_start = true;
    if (bad_start) s = std::string(prefix) + s;
    std::string candidate = s;
    int suffix = 2;
    while (!used.insert(candidate).second)
        candidate = s + "_" + std::to_string(suffix++);
    return candidate;
}

void write_number(std::ostringstream& os, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coefficient in LP export");
    os.precision(17);
    os << v;
}

void write_expr(std::ostringstream& os, const LinExpr& expr,
                const std::vector<std::string>& names) {
    bool first = true;
    int on_line = 0;
    for (const auto& [v, c] : expr.terms()) {
        if (!std::isfinite(c))
            throw std::invalid_argument("non-finite coefficient in LP export");
        if (first) {
            if (c < 0.0) os << "- ";
            first = false;
        } else {
            os << (c < 0.0 ? " - " : " + ");
        }
        write_number(os, std::abs(c));
        os << " " << names[static_cast<std::size_t>(v)];
        if (++on_line == 6) {
            os << "\n ";
            on_line = 0;
        }
    }
}

}  // namespace

std::string export_lp(const LinearModel& model) {
    std::set<std::string> used;
    std::vector<std::string> vnames;
    vnames.reserve(model.num_variables());
    for (std::size_t i = 0; i < model.num_variables(); ++i)
        vnames.push_back(sanitize_lp_name(model.variables()[i].name, i, "x", used));

    std::ostringstream os;
    os << (model.objective().sense == ObjSense::Min ? "Minimize" : "Maximize") << "\n obj: ";
    if (model.objective().expr.empty()) {
        write_number(os, model.objective().offset);
    } else {
        write_expr(os, model.objective().expr, vnames);
        if (model.objective().offset != 0.0) {
            os << (model.objective().offset < 0.0 ? " - " : " + ");
            write_number(os, std::abs(model.objective().offset));
        }
    }
    os << "\nSubject To\n";

    std::set<std::string> used_rows;
    for (std::size_t i = 0; i < model.constraints().size(); ++i) {
        const Constraint& c = model.constraints()[i];
        os << " " << sanitize_lp_name(c.name, i, "c", used_rows) << ": ";
        if (c.expr.empty()) {
            // degenerate row: keep the file grammatical with a zero column
            os << "0 " << (vnames.empty() ? "x0" : vnames[0]);
        } else {
            write_expr(os, c.expr, vnames);
        }
        switch (c.sense) {
            case ConstraintSense::LE: os << " <= "; break;
            case ConstraintSense::EQ: os << " = "; break;
            case ConstraintSense::GE: os << " >= "; break;
        }
        write_number(os, c.rhs);
        os << "\n";
    }

    os << "Bounds\n";
    for (std::size_t i = 0; i < model.num_variables(); ++i) {
        const Variable& v = model.variables()[i];
        const std::string& n = vnames[i];
        const bool lb_inf = std::isinf(v.lb), ub_inf = std::isinf(v.ub);
        if (lb_inf && ub_inf) {
            os << " " << n << " free\n";
        } else if (lb_inf) {
            os << " -inf <= " << n << " <= ";
            std::ostringstream tmp;
            write_number(tmp, v.ub);
            os << tmp.str() << "\n";
        } else if (ub_inf) {
            if (v.lb != 0.0) {
                std::ostringstream tmp;
                write_number(tmp, v.lb);
                os << " " << tmp.str() << " <= " << n << "\n";
            }
        } else {
            std::ostringstream lo, hi;
            write_number(lo, v.lb);
            write_number(hi, v.ub);
            os << " " << lo.str() << " <= " << n << " <= " << hi.str() << "\n";
        }
    }

    std::ostringstream bins, gens;
    for (std::size_t i = 0; i < model.num_variables(); ++i) {
        if (model.variables()[i].type == VarType::Binary) bins << " " << vnames[i] << "\n";
        if (model.variables()[i].type == VarType::Integer) gens << " " << vnames[i] << "\n";
    }
    if (!bins.str().empty()) os << "Binaries\n" << bins.str();
    if (!gens.str().empty()) os << "Generals\n" << gens.str();
    os << "End\n";
    return os.str();
}

ModelStats model_stats(const LinearModel& model) {
    ModelStats s;
    for (const auto& v : model.variables()) {
        switch (v.type) {
            case VarType::Continuous: ++s.n_continuous; break;
            case VarType::Binary: ++s.n_binary; break;
            case VarType::Integer: ++s.n_integer; break;
        }
    }
    for (const auto& c : model.constraints()) {
        switch (c.sense) {
            case ConstraintSense::LE: ++s.n_le; break;
            case ConstraintSense::EQ: ++s.n_eq; break;
            case ConstraintSense::GE: ++s.n_ge; break;
        }
        s.nonzeros += c.expr.terms().size();
    }
    return s;
}

}  // namespace hwlrp
