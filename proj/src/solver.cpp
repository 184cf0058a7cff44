#include "hwlrp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <memory>
#include <queue>
#include <vector>

namespace hwlrp {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::LimitReached: return "limit-reached";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr std::size_t kMaxDenseRows = 5000;  // dense-inverse working memory budget

// Standard form min c'z, Az = b, L <= z <= U after substituting fixed
// variables and dropping empty rows (the v1 presolve). Rows and columns
// are equilibrated with power-of-two factors so big-M coefficients do
// not poison the pivots; col_scale maps solutions back.
struct StdLp {
    int m = 0;
    int n_struct = 0;
    std::vector<std::vector<std::pair<int, double>>> cols;  // structurals then slacks
    std::vector<double> lower, upper, cost;
    std::vector<double> rhs;
    std::vector<int> orig_of;
    std::vector<double> fixed_value;
    std::vector<double> col_scale;
    bool const_infeasible = false;
    std::string diag;
};

double pow2_inverse(double x) {
    int e = 0;
    std::frexp(x, &e);
    return std::ldexp(1.0, 1 - e);  // x * pow2_inverse(x) lands in [1, 2)
}

void equilibrate(StdLp& lp) {
    const int total = static_cast<int>(lp.cols.size());
    std::vector<double> row_scale(static_cast<std::size_t>(lp.m), 1.0);
    lp.col_scale.assign(static_cast<std::size_t>(total), 1.0);
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> row_max(static_cast<std::size_t>(lp.m), 0.0);
        for (int j = 0; j < total; ++j)
            for (const auto& [r, v] : lp.cols[static_cast<std::size_t>(j)])
                row_max[static_cast<std::size_t>(r)] =
                    std::max(row_max[static_cast<std::size_t>(r)],
                             std::abs(v) * row_scale[static_cast<std::size_t>(r)] *
                                 lp.col_scale[static_cast<std::size_t>(j)]);
        for (int r = 0; r < lp.m; ++r)
            if (row_max[static_cast<std::size_t>(r)] > 0.0)
                row_scale[static_cast<std::size_t>(r)] *=
                    pow2_inverse(row_max[static_cast<std::size_t>(r)]);
        for (int j = 0; j < total; ++j) {
            double col_max = 0.0;
            for (const auto& [r, v] : lp.cols[static_cast<std::size_t>(j)])
                col_max = std::max(col_max,
                                   std::abs(v) * row_scale[static_cast<std::size_t>(r)] *
                                       lp.col_scale[static_cast<std::size_t>(j)]);
            if (col_max > 0.0)
                lp.col_scale[static_cast<std::size_t>(j)] *= pow2_inverse(col_max);
        }
    }
    for (int j = 0; j < total; ++j) {
        const double cs = lp.col_scale[static_cast<std::size_t>(j)];
        for (auto& [r, v] : lp.cols[static_cast<std::size_t>(j)])
            v *= row_scale[static_cast<std::size_t>(r)] * cs;
        if (std::isfinite(lp.lower[static_cast<std::size_t>(j)]))
            lp.lower[static_cast<std::size_t>(j)] /= cs;
        if (std::isfinite(lp.upper[static_cast<std::size_t>(j)]))
            lp.upper[static_cast<std::size_t>(j)] /= cs;
        lp.cost[static_cast<std::size_t>(j)] *= cs;
    }
    for (int r = 0; r < lp.m; ++r)
        lp.rhs[static_cast<std::size_t>(r)] *= row_scale[static_cast<std::size_t>(r)];
}

// keep_fixed retains columns with equal bounds (the branch-and-bound path
// needs a stable column space to reuse a parent basis)
StdLp build_std_lp(const LinearModel& model, const std::vector<double>& lb,
                   const std::vector<double>& ub, double feas_tol, bool maximize,
                   bool keep_fixed = false) {
    StdLp lp;
    const std::size_t nvars = model.num_variables();
    lp.fixed_value.assign(nvars, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> col_of(nvars, -1);

    const double sign = maximize ? -1.0 : 1.0;
    std::vector<double> obj_coef(nvars, 0.0);
    for (const auto& [v, c] : model.objective().expr.terms())
        obj_coef[static_cast<std::size_t>(v)] = sign * c;

    for (std::size_t j = 0; j < nvars; ++j) {
        if (!keep_fixed && ub[j] - lb[j] <= 0.0) {
            lp.fixed_value[j] = lb[j];
            continue;
        }
        col_of[j] = lp.n_struct++;
        lp.orig_of.push_back(static_cast<int>(j));
        lp.lower.push_back(lb[j]);
        lp.upper.push_back(ub[j]);
        lp.cost.push_back(obj_coef[j]);
    }
    lp.cols.assign(static_cast<std::size_t>(lp.n_struct), {});

    for (const auto& con : model.constraints()) {
        double shift = 0.0;
        std::vector<std::pair<int, double>> entries;
        for (const auto& [v, c] : con.expr.terms()) {
            if (col_of[static_cast<std::size_t>(v)] < 0)
                shift += c * lp.fixed_value[static_cast<std::size_t>(v)];
            else
                entries.emplace_back(col_of[static_cast<std::size_t>(v)], c);
        }
        const double rhs = con.rhs - shift;
        if (entries.empty()) {
            bool ok = true;
            switch (con.sense) {
                case ConstraintSense::LE: ok = 0.0 <= rhs + feas_tol; break;
                case ConstraintSense::GE: ok = 0.0 >= rhs - feas_tol; break;
                case ConstraintSense::EQ: ok = std::abs(rhs) <= feas_tol; break;
            }
            if (!ok) {
                lp.const_infeasible = true;
                lp.diag = "constant row '" + con.name + "' is infeasible";
                return lp;
            }
            continue;
        }
        const int row = lp.m++;
        for (const auto& [cidx, coef] : entries)
            lp.cols[static_cast<std::size_t>(cidx)].emplace_back(row, coef);
        lp.rhs.push_back(rhs);
        lp.cols.push_back({{row, 1.0}});
        lp.cost.push_back(0.0);
        switch (con.sense) {
            case ConstraintSense::LE:
                lp.lower.push_back(0.0);
                lp.upper.push_back(kInf);
                break;
            case ConstraintSense::GE:
                lp.lower.push_back(-kInf);
                lp.upper.push_back(0.0);
                break;
            case ConstraintSense::EQ:
                lp.lower.push_back(0.0);
                lp.upper.push_back(0.0);
                break;
        }
    }
    equilibrate(lp);
    return lp;
}

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, Breakdown };

struct WarmStart {
    std::vector<int> basis;            // column per row
    std::vector<std::uint8_t> at_upper;  // nonbasic rest position
};

class Simplex {
  public:
    Simplex(const StdLp& lp, const SolveParams& params)
        : lp_(lp), params_(params), m_(lp.m), total_(static_cast<int>(lp.cols.size())) {}

    LpStatus run(const WarmStart* warm = nullptr) {
        if (m_ == 0) return solve_unconstrained();
        const long iter_limit = 2000 + 200L * (m_ + total_);
        if (warm && try_warm_init(warm)) {
            // a stale basis occasionally thrashes; give it a sub-budget
            // and fall back to the cold start when it misbehaves
            const LpStatus st = solve_phases(iters_ + 4000 + 40L * m_);
            if (st != LpStatus::IterLimit && st != LpStatus::Breakdown) return st;
        }
        cold_init();
        return solve_phases(iters_ + iter_limit);
    }

    bool try_warm_init(const WarmStart* warm) {
        if (static_cast<int>(warm->basis.size()) != m_ ||
            static_cast<int>(warm->at_upper.size()) != total_)
            return false;
        basis_.resize(m_);
        pos_of_.assign(total_, -1);
        x_.assign(total_, 0.0);
        std::vector<char> used(static_cast<std::size_t>(total_), 0);
        for (int i = 0; i < m_; ++i) {
            const int j = warm->basis[static_cast<std::size_t>(i)];
            if (j < 0 || j >= total_ || used[static_cast<std::size_t>(j)]) return false;
            used[static_cast<std::size_t>(j)] = 1;
        }
        for (int i = 0; i < m_; ++i) {
            basis_[i] = warm->basis[static_cast<std::size_t>(i)];
            pos_of_[basis_[i]] = i;
        }
        for (int j = 0; j < total_; ++j) {
            if (pos_of_[j] >= 0) continue;
            if (warm->at_upper[static_cast<std::size_t>(j)] && std::isfinite(lp_.upper[j]))
                x_[j] = lp_.upper[j];
            else
                x_[j] = starting_value(j);
        }
        return refactorize();
    }

    void cold_init() {
        basis_.resize(m_);
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = 1.0;
        pos_of_.assign(total_, -1);
        x_.assign(total_, 0.0);
        for (int i = 0; i < m_; ++i) {
            basis_[i] = lp_.n_struct + i;
            pos_of_[lp_.n_struct + i] = i;
        }
        for (int j = 0; j < lp_.n_struct; ++j) x_[j] = starting_value(j);
        recompute_basics();
    }

    LpStatus solve_phases(long iter_limit) {
        LpStatus st = phase(true, iter_limit);
        if (st == LpStatus::Unbounded) return LpStatus::Breakdown;  // cannot happen
        if (st != LpStatus::Optimal) return st;
        if (max_infeasibility() > 16.0 * params_.feas_tol) return LpStatus::Infeasible;
        return phase(false, iter_limit);
    }

    WarmStart export_basis() const {
        WarmStart ws;
        ws.basis = basis_;
        ws.at_upper.assign(static_cast<std::size_t>(total_), 0);
        for (int j = 0; j < total_; ++j)
            if (pos_of_[j] < 0 && std::isfinite(lp_.upper[j]) && x_[j] >= lp_.upper[j])
                ws.at_upper[static_cast<std::size_t>(j)] = 1;
        return ws;
    }

    double objective() const {
        double acc = 0.0;
        for (int j = 0; j < total_; ++j) acc += lp_.cost[j] * x_[j];
        return acc;
    }

    const std::vector<double>& solution() const { return x_; }
    long iterations() const { return iters_; }

  private:
    std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * m_ + c; }

    double starting_value(int j) const {
        if (std::isfinite(lp_.lower[j])) return lp_.lower[j];
        if (std::isfinite(lp_.upper[j])) return lp_.upper[j];
        return 0.0;
    }

    LpStatus solve_unconstrained() {
        x_.assign(total_, 0.0);
        for (int j = 0; j < total_; ++j) {
            if (lp_.cost[j] > 0.0) {
                if (!std::isfinite(lp_.lower[j])) return LpStatus::Unbounded;
                x_[j] = lp_.lower[j];
            } else if (lp_.cost[j] < 0.0) {
                if (!std::isfinite(lp_.upper[j])) return LpStatus::Unbounded;
                x_[j] = lp_.upper[j];
            } else {
                x_[j] = starting_value(j);
            }
        }
        return LpStatus::Optimal;
    }

    void recompute_basics() {
        std::vector<double> r(lp_.rhs);
        for (int j = 0; j < total_; ++j) {
            if (pos_of_[j] >= 0 || x_[j] == 0.0) continue;
            for (const auto& [row, val] : lp_.cols[j]) r[row] -= val * x_[j];
        }
        for (int i = 0; i < m_; ++i) {
            double acc = 0.0;
            const std::size_t base = static_cast<std::size_t>(i) * m_;
            for (int k = 0; k < m_; ++k) acc += binv_[base + k] * r[k];
            x_[basis_[i]] = acc;
        }
    }

    bool refactorize() {
        std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            for (const auto& [row, val] : lp_.cols[basis_[i]]) a[idx(row, i)] = val;
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) inv[idx(i, i)] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int piv = -1;
            double best = 1e-12;
            for (int r = col; r < m_; ++r)
                if (std::abs(a[idx(r, col)]) > best) {
                    best = std::abs(a[idx(r, col)]);
                    piv = r;
                }
            if (piv < 0) return false;
            if (piv != col)
                for (int k = 0; k < m_; ++k) {
                    std::swap(a[idx(piv, k)], a[idx(col, k)]);
                    std::swap(inv[idx(piv, k)], inv[idx(col, k)]);
                }
            const double p = a[idx(col, col)];
            for (int k = 0; k < m_; ++k) {
                a[idx(col, k)] /= p;
                inv[idx(col, k)] /= p;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double f = a[idx(r, col)];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    a[idx(r, k)] -= f * a[idx(col, k)];
                    inv[idx(r, k)] -= f * inv[idx(col, k)];
                }
            }
        }
        // a is reduced to I, so inv * (basis columns in basis order) = I:
        // inv maps row space correctly; x_B must be refreshed afterwards.
        binv_ = std::move(inv);
        recompute_basics();
        return true;
    }

    double max_infeasibility() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            const int j = basis_[i];
            worst = std::max(worst, lp_.lower[j] - x_[j]);
            worst = std::max(worst, x_[j] - lp_.upper[j]);
        }
        return worst;
    }

    void apply_step(int enter, double sigma, double t, const std::vector<double>& w) {
        if (t == 0.0) return;
        for (int i = 0; i < m_; ++i) x_[basis_[i]] -= sigma * t * w[i];
        x_[enter] += sigma * t;
    }

    LpStatus phase(bool phase1, long iter_limit) {
        int degen_streak = 0;
        bool bland = false;
        int since_refactor = 0;

        while (true) {
            if (iters_ >= iter_limit) return LpStatus::IterLimit;
            ++iters_;

            std::vector<double>& cb = cb_;
            cb.assign(static_cast<std::size_t>(m_), 0.0);
            bool any_infeasible = false;
            for (int i = 0; i < m_; ++i) {
                const int j = basis_[i];
                if (phase1) {
                    if (x_[j] < lp_.lower[j] - params_.feas_tol) {
                        cb[i] = -1.0;
                        any_infeasible = true;
                    } else if (x_[j] > lp_.upper[j] + params_.feas_tol) {
                        cb[i] = 1.0;
                        any_infeasible = true;
                    }
                } else {
                    cb[i] = lp_.cost[j];
                }
            }
            if (phase1 && !any_infeasible) return LpStatus::Optimal;

            std::vector<double>& y = y_;
            y.assign(static_cast<std::size_t>(m_), 0.0);
            for (int k = 0; k < m_; ++k) {
                if (cb[k] == 0.0) continue;
                const double f = cb[k];
                const std::size_t base = static_cast<std::size_t>(k) * m_;
                for (int i = 0; i < m_; ++i) y[i] += f * binv_[base + i];
            }

            int enter = -1, enter_dir = 0;
            double best_score = params_.opt_tol;
            for (int j = 0; j < total_; ++j) {
                if (pos_of_[j] >= 0) continue;
                if (lp_.upper[j] - lp_.lower[j] <= 0.0) continue;
                double d = phase1 ? 0.0 : lp_.cost[j];
                for (const auto& [row, val] : lp_.cols[j]) d -= y[row] * val;
                const bool at_lower = std::isfinite(lp_.lower[j]) && x_[j] <= lp_.lower[j];
                const bool at_upper = std::isfinite(lp_.upper[j]) && x_[j] >= lp_.upper[j];
                int dir = 0;
                if (at_lower) {
                    if (d < -params_.opt_tol) dir = +1;
                } else if (at_upper) {
                    if (d > params_.opt_tol) dir = -1;
                } else {
                    if (d < -params_.opt_tol) dir = +1;
                    else if (d > params_.opt_tol) dir = -1;
                }
                if (dir == 0) continue;
                if (bland) {
                    enter = j;
                    enter_dir = dir;
                    break;
                }
                if (std::abs(d) > best_score + 1e-15) {
                    best_score = std::abs(d);
                    enter = j;
                    enter_dir = dir;
                }
            }
            if (enter < 0) return LpStatus::Optimal;

            std::vector<double>& w = w_;
            w.assign(static_cast<std::size_t>(m_), 0.0);
            for (const auto& [row, val] : lp_.cols[enter])
                for (int i = 0; i < m_; ++i) w[i] += binv_[idx(i, row)] * val;

            const double sigma = enter_dir;
            const double span = lp_.upper[enter] - lp_.lower[enter];
            const double t_bound = std::isfinite(span) ? span : kInf;

            // Harris two-pass ratio test: the relaxed pass sets the step
            // budget (bounds stretched by the feasibility tolerance), the
            // second pass picks the largest pivot within it. Phase 1
            // blocks infeasible basics at the bound they violate.
            std::vector<Block>& blocks = blocks_;
            blocks.clear();
            double t_relaxed = kInf;
            for (int i = 0; i < m_; ++i) {
                const double delta = -sigma * w[i];
                if (std::abs(delta) <= kPivotTol) continue;
                const int j = basis_[i];
                const double xi = x_[j];
                double bound = kInf;
                if (phase1 && xi < lp_.lower[j] - params_.feas_tol) {
                    if (delta > 0.0) bound = lp_.lower[j];
                } else if (phase1 && xi > lp_.upper[j] + params_.feas_tol) {
                    if (delta < 0.0) bound = lp_.upper[j];
                } else if (delta > 0.0) {
                    bound = lp_.upper[j];
                } else {
                    bound = lp_.lower[j];
                }
                if (!std::isfinite(bound)) continue;
                const double t_exact = std::max((bound - xi) / delta, 0.0);
                const double t_slack =
                    std::max((bound - xi + (delta > 0.0 ? 1.0 : -1.0) * params_.feas_tol) /
                                 delta,
                             0.0);
                blocks.push_back(Block{t_exact, i, bound});
                t_relaxed = std::min(t_relaxed, t_slack);
            }

            if (!std::isfinite(t_bound) && blocks.empty()) return LpStatus::Unbounded;

            int leave_row = -1;
            double leave_to = 0.0, best_piv = 0.0, t_star = kInf;
            if (bland) {
                // textbook leaving rule: smallest step, lowest index
                double t_min = kInf;
                for (const auto& b : blocks) t_min = std::min(t_min, b.t_exact);
                int best_var = -1;
                for (const auto& b : blocks) {
                    if (b.t_exact > t_min + 1e-15) continue;
                    if (best_var < 0 || basis_[b.row] < best_var) {
                        best_var = basis_[b.row];
                        leave_row = b.row;
                        leave_to = b.target;
                        t_star = b.t_exact;
                    }
                }
            } else {
                for (const auto& b : blocks) {
                    if (b.t_exact > t_relaxed) continue;
                    const double piv = std::abs(w[b.row]);
                    if (piv > best_piv + 1e-15) {
                        best_piv = piv;
                        leave_row = b.row;
                        leave_to = b.target;
                        t_star = b.t_exact;
                    }
                }
            }

            if (leave_row < 0 || t_bound < t_star) {
                if (!std::isfinite(t_bound)) return LpStatus::Unbounded;
                // entering flips to its opposite bound, basis unchanged
                apply_step(enter, sigma, t_bound, w);
                x_[enter] = sigma > 0 ? lp_.upper[enter] : lp_.lower[enter];
                continue;
            }
            apply_step(enter, sigma, t_star, w);
            const int leaving = basis_[leave_row];
            x_[leaving] = leave_to;
            basis_[leave_row] = enter;
            pos_of_[enter] = leave_row;
            pos_of_[leaving] = -1;

            const double piv = w[leave_row];
            if (std::abs(piv) < kPivotTol) return LpStatus::Breakdown;
            const std::size_t prow = static_cast<std::size_t>(leave_row) * m_;
            for (int k = 0; k < m_; ++k) binv_[prow + k] /= piv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave_row) continue;
                const double f = w[i];
                if (f == 0.0) continue;
                const std::size_t row = static_cast<std::size_t>(i) * m_;
                for (int k = 0; k < m_; ++k) binv_[row + k] -= f * binv_[prow + k];
            }

            if (t_star <= 1e-7) {
                // Harris micro-steps count as degenerate; once Bland's
                // rule engages it stays on for the rest of the phase
                if (++degen_streak > m_ + 50) bland = true;
            } else {
                degen_streak = 0;
            }
            if (++since_refactor >= 64) {
                since_refactor = 0;
                if (!refactorize()) return LpStatus::Breakdown;
            }
        }
    }

    struct Block {
        double t_exact;
        int row;
        double target;
    };

    const StdLp& lp_;
    const SolveParams& params_;
    int m_;
    int total_;
    std::vector<double> binv_;
    std::vector<int> basis_;
    std::vector<int> pos_of_;
    std::vector<double> x_;
    std::vector<double> cb_, y_, w_;
    std::vector<Block> blocks_;
    long iters_ = 0;
};

SolveResult solve_lp_bounds(const LinearModel& model, const std::vector<double>& lb,
                            const std::vector<double>& ub, const SolveParams& params,
                            bool keep_fixed = false, const WarmStart* warm = nullptr,
                            WarmStart* basis_out = nullptr) {
    SolveResult res;
    const bool maximize = model.objective().sense == ObjSense::Max;
    const double off = model.objective().offset;

    for (std::size_t j = 0; j < model.num_variables(); ++j)
        if (lb[j] > ub[j]) {
            res.status = SolveStatus::Infeasible;
            res.diagnostic = "variable '" + model.variables()[j].name + "' has empty domain";
            return res;
        }

    StdLp lp = build_std_lp(model, lb, ub, params.feas_tol, maximize, keep_fixed);
    if (lp.const_infeasible) {
        res.status = SolveStatus::Infeasible;
        res.diagnostic = lp.diag;
        return res;
    }
    if (static_cast<std::size_t>(lp.m) > kMaxDenseRows) {
        res.status = SolveStatus::LimitReached;
        res.diagnostic = "model has " + std::to_string(lp.m) +
                         " rows after presolve; exceeds the dense simplex budget of " +
                         std::to_string(kMaxDenseRows);
        return res;
    }

    Simplex simplex(lp, params);
    const LpStatus st = simplex.run(warm);
    res.iterations = simplex.iterations();
    if (basis_out && st == LpStatus::Optimal) *basis_out = simplex.export_basis();
    switch (st) {
        case LpStatus::Infeasible:
            res.status = SolveStatus::Infeasible;
            return res;
        case LpStatus::Unbounded:
            res.status = maximize ? SolveStatus::Unbounded : SolveStatus::Unbounded;
            return res;
        case LpStatus::IterLimit:
            res.status = SolveStatus::LimitReached;
            res.diagnostic = "simplex iteration limit";
            return res;
        case LpStatus::Breakdown:
            res.status = SolveStatus::LimitReached;
            res.diagnostic = "numerical breakdown in simplex";
            return res;
        case LpStatus::Optimal: break;
    }

    Assignment a;
    a.values.assign(model.num_variables(), 0.0);
    for (std::size_t j = 0; j < model.num_variables(); ++j)
        if (!std::isnan(lp.fixed_value[j])) a.values[j] = lp.fixed_value[j];
    for (int c = 0; c < lp.n_struct; ++c)
        a.values[static_cast<std::size_t>(lp.orig_of[c])] =
            simplex.solution()[c] * lp.col_scale[static_cast<std::size_t>(c)];

    const double internal = simplex.objective();
    const double fixed_cost = [&] {
        double acc = 0.0;
        for (const auto& [v, cf] : model.objective().expr.terms())
            if (!std::isnan(lp.fixed_value[static_cast<std::size_t>(v)]))
                acc += cf * lp.fixed_value[static_cast<std::size_t>(v)];
        return acc;
    }();
    const double obj = (maximize ? -internal : internal) + fixed_cost + off;
    res.status = SolveStatus::Optimal;
    res.objective = obj;
    res.bound = obj;
    res.assignment = std::move(a);
    return res;
}

}  // namespace

SolveResult solve_lp(const LinearModel& model, const SolveParams& params) {
    std::vector<double> lb, ub;
    lb.reserve(model.num_variables());
    ub.reserve(model.num_variables());
    for (const auto& v : model.variables()) {
        lb.push_back(v.lb);
        ub.push_back(v.ub);
    }
    return solve_lp_bounds(model, lb, ub, params);
}

namespace {

struct BnbNode {
    long id = 0;
    int depth = 0;
    double bound = -kInf;
    // bound changes relative to the root, applied in order
    std::vector<std::tuple<int, double, double>> changes;  // var, lb, ub
    std::shared_ptr<const WarmStart> warm;  // parent's optimal basis
};

struct NodeOrder {
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.id > b.id;
    }
};

}  // namespace

SolveResult solve_milp(const LinearModel& model, const SolveParams& params) {
    using Clock = std::chrono::steady_clock;
    const auto t_start = Clock::now();
    auto out_of_time = [&] {
        if (!params.time_limit_seconds) return false;
        const double s = std::chrono::duration<double>(Clock::now() - t_start).count();
        return s > *params.time_limit_seconds;
    };

    const bool maximize = model.objective().sense == ObjSense::Max;
    const double dir = maximize ? -1.0 : 1.0;  // compare in min sense internally

    std::vector<int> int_vars;
    for (std::size_t j = 0; j < model.num_variables(); ++j)
        if (model.variables()[j].type != VarType::Continuous)
            int_vars.push_back(static_cast<int>(j));

    std::vector<double> root_lb, root_ub;
    for (const auto& v : model.variables()) {
        root_lb.push_back(v.lb);
        root_ub.push_back(v.ub);
    }

    SolveResult res;
    res.status = SolveStatus::LimitReached;

    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
    long next_id = 0;
    open.push(BnbNode{next_id++, 0, -kInf, {}});

    bool have_incumbent = false;
    double incumbent = kInf;  // min sense
    Assignment best_assignment;
    double min_pruned_bound = kInf;
    long processed = 0;
    long iterations = 0;

    auto gap_abs = [&] { return params.mip_rel_gap * std::max(1.0, std::abs(incumbent)); };

    while (!open.empty()) {
        if (processed >= params.node_limit || out_of_time()) {
            res.status = SolveStatus::LimitReached;
            res.diagnostic = processed >= params.node_limit ? "node limit" : "time limit";
            double open_bound = open.empty() ? kInf : open.top().bound;
            const double global = std::min({incumbent, open_bound, min_pruned_bound});
            if (std::isfinite(global)) res.bound = maximize ? -global : global;
            break;
        }
        BnbNode node = open.top();
        open.pop();

        if (have_incumbent && node.bound >= incumbent - gap_abs()) {
            min_pruned_bound = std::min(min_pruned_bound, node.bound);
            continue;
        }

        ++processed;

        std::vector<double> lb(root_lb), ub(root_ub);
        for (const auto& [v, l, u] : node.changes) {
            lb[static_cast<std::size_t>(v)] = std::max(lb[static_cast<std::size_t>(v)], l);
            ub[static_cast<std::size_t>(v)] = std::min(ub[static_cast<std::size_t>(v)], u);
        }

        if (params.trace) {
            // the popped node owns the smallest bound in the heap, so this
            // is the global lower bound at this point of the search
            (*params.trace) << "node " << node.id << " depth " << node.depth << " bound ";
            if (std::isfinite(node.bound))
                (*params.trace) << (maximize ? -node.bound : node.bound);
            else
                (*params.trace) << "-inf";
            (*params.trace) << " incumbent ";
            if (have_incumbent)
                (*params.trace) << (maximize ? -incumbent : incumbent);
            else
                (*params.trace) << "none";
            (*params.trace) << "\n";
        }

        WarmStart solved_basis;
        SolveResult rel = solve_lp_bounds(model, lb, ub, params, /*keep_fixed=*/true,
                                          node.warm.get(), &solved_basis);
        iterations += rel.iterations;

        if (rel.status == SolveStatus::Infeasible) continue;
        if (rel.status == SolveStatus::Unbounded) {
            if (node.depth == 0 && !have_incumbent) {
                res.status = SolveStatus::Unbounded;
                res.nodes = processed;
                res.iterations = iterations;
                return res;
            }
            continue;  // a restricted node cannot certify unboundedness soundly
        }
        if (rel.status == SolveStatus::LimitReached) {
            res.status = SolveStatus::LimitReached;
            res.diagnostic = "node LP: " + rel.diagnostic;
            break;
        }

        const double node_obj = dir * (*rel.objective);
        if (have_incumbent && node_obj >= incumbent - gap_abs()) {
            min_pruned_bound = std::min(min_pruned_bound, node_obj);
            continue;
        }

        // most fractional integer variable, lowest index on ties
        int branch_var = -1;
        double best_frac = params.feas_tol;
        for (int v : int_vars) {
            const double x = rel.assignment->values[static_cast<std::size_t>(v)];
            const double frac = std::abs(x - std::round(x));
            if (frac > best_frac + 1e-12) {
                best_frac = frac;
                branch_var = v;
            }
        }

        if (branch_var < 0) {
            // integral: round and accept as incumbent
            Assignment a = *rel.assignment;
            for (int v : int_vars) {
                const std::size_t j = static_cast<std::size_t>(v);
                a.values[j] = std::round(a.values[j]);
            }
            if (!have_incumbent || node_obj < incumbent - 1e-12) {
                have_incumbent = true;
                incumbent = node_obj;
                best_assignment = std::move(a);
            }
            continue;
        }

        const double x = rel.assignment->values[static_cast<std::size_t>(branch_var)];
        auto shared_basis = std::make_shared<const WarmStart>(std::move(solved_basis));
        BnbNode down = node;
        down.id = next_id++;
        down.depth = node.depth + 1;
        down.bound = node_obj;
        down.changes.emplace_back(branch_var, -kInf, std::floor(x));
        down.warm = shared_basis;
        BnbNode up = node;
        up.id = next_id++;
        up.depth = node.depth + 1;
        up.bound = node_obj;
        up.changes.emplace_back(branch_var, std::ceil(x), kInf);
        up.warm = shared_basis;
        open.push(std::move(down));
        open.push(std::move(up));
    }

    res.nodes = processed;
    res.iterations = iterations;

    if (res.status == SolveStatus::LimitReached && !res.diagnostic.empty() &&
        res.diagnostic.rfind("node LP", 0) == 0) {
        if (have_incumbent) {
            res.objective = maximize ? -incumbent : incumbent;
            res.assignment = std::move(best_assignment);
        }
        return res;
    }

    if (!open.empty()) {  // stopped by a limit
        if (have_incumbent) {
            res.objective = maximize ? -incumbent : incumbent;
            res.assignment = std::move(best_assignment);
        }
        return res;
    }

    if (!have_incumbent) {
        res.status = SolveStatus::Infeasible;
        return res;
    }

    res.status = SolveStatus::Optimal;
    res.objective = maximize ? -incumbent : incumbent;
    const double global = std::min(incumbent, min_pruned_bound);
    res.bound = maximize ? -global : global;
    res.assignment = std::move(best_assignment);
    return res;
}

}  // namespace hwlrp
