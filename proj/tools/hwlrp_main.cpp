#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hwlrp/formulation.hpp"
#include "hwlrp/instance.hpp"
#include "hwlrp/milp.hpp"
#include "hwlrp/moo.hpp"
#include "hwlrp/scenario.hpp"
#include "hwlrp/solver.hpp"

namespace fs = std::filesystem;
using namespace hwlrp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverLimit = 4;
constexpr int kExitIo = 5;

struct CommonOpts {
    std::string instance_path;
    std::string out_dir;
    double feas_tol = 1e-7;
    double mip_rel_gap = 1e-6;
    long node_limit = 1'000'000;
    std::optional<double> time_limit;
    std::string risk_mode = "coupled";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("HWLRP_OUT_DIR")) return env;
    return ".";
}

SolveParams make_params(const CommonOpts& o) {
    SolveParams p;
    p.feas_tol = o.feas_tol;
    p.mip_rel_gap = o.mip_rel_gap;
    p.node_limit = o.node_limit;
    p.time_limit_seconds = o.time_limit;
    return p;
}

FormulationOptions make_form_opts(const CommonOpts& o) {
    FormulationOptions f;
    f.risk_mode = o.risk_mode == "paper-literal" ? RiskMode::PaperLiteral : RiskMode::Coupled;
    return f;
}

int load_and_validate(const CommonOpts& o, Instance& inst, bool print_findings) {
    std::string text;
    try {
        text = read_file(o.instance_path);
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    try {
        inst = parse_instance(text);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    const auto findings = validate_instance(inst);
    if (print_findings && !findings.empty()) std::cout << format_findings(findings);
    if (has_fatal(findings)) {
        std::cerr << "instance has fatal findings\n";
        return kExitValidation;
    }
    return kExitOk;
}

int status_to_exit(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return kExitOk;
        case SolveStatus::Infeasible: return kExitInfeasible;
        case SolveStatus::Unbounded: return kExitInfeasible;
        case SolveStatus::LimitReached: return kExitSolverLimit;
    }
    return kExitSolverLimit;
}

int cmd_validate(const CommonOpts& o) {
    Instance inst;
    const int rc = load_and_validate(o, inst, true);
    if (rc == kExitOk) std::cout << "ok: " << inst.name << " is valid\n";
    return rc;
}

int cmd_solve(const CommonOpts& o, const std::string& objective) {
    Instance inst;
    int rc = load_and_validate(o, inst, false);
    if (rc != kExitOk) return rc;
    auto obj = objective_from_string(objective);
    if (!obj) {
        std::cerr << "unknown objective '" << objective << "'\n";
        return kExitValidation;
    }
    const auto fopts = make_form_opts(o);
    BuiltModel built = build_model(inst, *obj, fopts);
    SolveResult res = solve_milp(built.model, make_params(o));
    if (res.status != SolveStatus::Optimal) {
        std::cerr << "solve: " << to_string(res.status)
                  << (res.diagnostic.empty() ? "" : " (" + res.diagnostic + ")") << "\n";
        return status_to_exit(res.status);
    }
    Solution sol = extract_solution(inst, built.catalog, *res.assignment, fopts);
    const fs::path dir = resolve_out_dir(o.out_dir);
    try {
        write_file(dir / (inst.name + "." + objective + ".solution.json"),
                   serialize_solution(inst, sol));
        write_file(dir / (inst.name + "." + objective + ".report.txt"),
                   format_solution_report(inst, sol));
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << format_solution_report(inst, sol);
    return kExitOk;
}

int cmd_pareto(const CommonOpts& o, int grid) {
    Instance inst;
    int rc = load_and_validate(o, inst, false);
    if (rc != kExitOk) return rc;
    const auto fopts = make_form_opts(o);
    FrontResult front = pareto_front(inst, grid, make_params(o), fopts);
    if (front.status != SolveStatus::Optimal) {
        std::cerr << "payoff stage: " << to_string(front.status) << "\n";
        return status_to_exit(front.status);
    }
    std::ostringstream table;
    table << "eps2\teps3\tf1\tf2\tf3\tstatus\n";
    for (const auto& cell : front.cells) {
        table << cell.eps[0] << "\t" << cell.eps[1] << "\t";
        if (cell.objectives)
            table << (*cell.objectives)[0] << "\t" << (*cell.objectives)[1] << "\t"
                  << (*cell.objectives)[2];
        else
            table << "-\t-\t-";
        table << "\t" << to_string(cell.status) << "\n";
    }
    const fs::path dir = resolve_out_dir(o.out_dir);
    try {
        write_file(dir / (inst.name + ".front.tsv"), table.str());
        int idx = 0;
        for (const auto& p : front.points) {
            std::ostringstream name;
            name << inst.name << ".point" << idx++ << ".solution.json";
            write_file(dir / name.str(), serialize_solution(inst, p.solution));
        }
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "payoff best: f1=" << front.payoff.table->best[0]
              << " f2=" << front.payoff.table->best[1]
              << " f3=" << front.payoff.table->best[2] << "\n";
    std::cout << "payoff worst: f1=" << front.payoff.table->worst[0]
              << " f2=" << front.payoff.table->worst[1]
              << " f3=" << front.payoff.table->worst[2] << "\n";
    std::cout << "nondominated points: " << front.points.size() << "\n";
    for (const auto& p : front.points)
        std::cout << "  f1=" << p.objectives[0] << " f2=" << p.objectives[1]
                  << " f3=" << p.objectives[2] << " (eps " << p.eps[0] << ", " << p.eps[1]
                  << ")\n";
    return kExitOk;
}

struct TripleSolve {
    SolveStatus status = SolveStatus::Optimal;
    std::array<double, 3> values{};  // optimal value of each objective, solved separately
};

TripleSolve solve_all_objectives(const Instance& inst, const SolveParams& params,
                                 const FormulationOptions& fopts) {
    TripleSolve out;
    CoreModel core = build_core_model(inst, fopts);
    for (int i = 0; i < 3; ++i) {
        LinearModel model = core.model;
        model.set_objective(ObjSense::Min, core.objectives[static_cast<std::size_t>(i)],
                            0.0);
        SolveResult res = solve_milp(model, params);
        if (res.status != SolveStatus::Optimal) {
            out.status = res.status;
            return out;
        }
        const Solution sol = extract_solution(inst, core.catalog, *res.assignment, fopts);
        out.values[static_cast<std::size_t>(i)] =
            sol.objectives[static_cast<std::size_t>(i)];
    }
    return out;
}

int cmd_sensitivity(const CommonOpts& o, const std::string& scenario, double factor) {
    Instance inst;
    int rc = load_and_validate(o, inst, false);
    if (rc != kExitOk) return rc;
    const auto params = make_params(o);
    const auto fopts = make_form_opts(o);

    std::cout << "baseline: solving f1, f2, f3 on " << inst.name << "\n";
    TripleSolve base = solve_all_objectives(inst, params, fopts);
    if (base.status != SolveStatus::Optimal) {
        std::cerr << "baseline solve: " << to_string(base.status) << "\n";
        return status_to_exit(base.status);
    }
    std::cout << "baseline optima: f1=" << base.values[0] << " f2=" << base.values[1]
              << " f3=" << base.values[2] << "\n";

    TripleSolve scen;
    std::string label = scenario;
    if (scenario == "no-sustainability") {
        // cost-only planning; risk and emissions evaluated at that optimum
        BuiltModel built = build_model(inst, ObjectiveId::F1, fopts);
        SolveResult res = solve_milp(built.model, params);
        if (res.status != SolveStatus::Optimal) {
            std::cerr << "scenario solve: " << to_string(res.status) << "\n";
            return status_to_exit(res.status);
        }
        const Solution sol = extract_solution(inst, built.catalog, *res.assignment, fopts);
        scen.values = sol.objectives;
    } else {
        ScenarioSpec spec;
        if (scenario == "capacity-none") {
            spec.capacity = CapacityMode::None;
        } else if (scenario == "capacity-increased") {
            spec.capacity = CapacityMode::Increased;
        } else if (scenario == "capacity-decreased") {
            spec.capacity = CapacityMode::Decreased;
        } else if (scenario == "waste-scale") {
            spec.waste_scale = factor;
            label += " x" + std::to_string(factor);
        } else {
            std::cerr << "unknown scenario '" << scenario << "'\n";
            return kExitValidation;
        }
        const Instance varied = apply_scenario(inst, spec);
        scen = solve_all_objectives(varied, params, fopts);
        if (scen.status != SolveStatus::Optimal) {
            std::cerr << "scenario '" << label << "' solve: " << to_string(scen.status)
                      << " (baseline above still holds)\n";
            return status_to_exit(scen.status);
        }
    }

    std::cout << "scenario " << label << ": f1=" << scen.values[0]
              << " f2=" << scen.values[1] << " f3=" << scen.values[2] << "\n";
    const char* names[3] = {"f1", "f2", "f3"};
    for (int i = 0; i < 3; ++i) {
        const double b = base.values[static_cast<std::size_t>(i)];
        const double s = scen.values[static_cast<std::size_t>(i)];
        const double delta = b != 0.0 ? (s - b) / std::abs(b) * 100.0 : 0.0;
        std::cout << names[i] << " delta: " << delta << "%\n";
    }
    return kExitOk;
}

int cmd_export(const CommonOpts& o, const std::string& objective,
               std::optional<double> eps2, std::optional<double> eps3,
               const std::string& out_file) {
    Instance inst;
    int rc = load_and_validate(o, inst, false);
    if (rc != kExitOk) return rc;
    const auto fopts = make_form_opts(o);
    std::string lp_text;
    if (eps2 && eps3) {
        const auto payoff = payoff_table(inst, make_params(o), fopts);
        if (payoff.status != SolveStatus::Optimal) {
            std::cerr << "payoff stage: " << to_string(payoff.status) << "\n";
            return status_to_exit(payoff.status);
        }
        BuiltModel built = build_augmented_model(
            inst, {*eps2, *eps3}, {payoff.table->range[1], payoff.table->range[2]}, fopts);
        lp_text = export_lp(built.model);
    } else {
        auto obj = objective_from_string(objective);
        if (!obj) {
            std::cerr << "unknown objective '" << objective << "'\n";
            return kExitValidation;
        }
        BuiltModel built = build_model(inst, *obj, fopts);
        lp_text = export_lp(built.model);
    }
    try {
        if (out_file.empty() || out_file == "-") {
            std::cout << lp_text;
        } else {
            write_file(resolve_out_dir(o.out_dir) / fs::path(out_file), lp_text);
        }
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hwlrp: sustainable hazardous-waste location-routing solver"};
    app.require_subcommand(1);

    CommonOpts common;
    auto add_common = [&](CLI::App* cmd, bool needs_solver) {
        cmd->add_option("instance", common.instance_path, "instance document (json)")
            ->required();
        cmd->add_option("--out", common.out_dir,
                        "output directory (default $HWLRP_OUT_DIR or .)");
        if (needs_solver) {
            cmd->add_option("--feas-tol", common.feas_tol, "feasibility tolerance");
            cmd->add_option("--mip-gap", common.mip_rel_gap, "relative MIP gap");
            cmd->add_option("--node-limit", common.node_limit, "branch-and-bound node limit");
            cmd->add_option("--time-limit", common.time_limit, "time limit in seconds");
            cmd->add_option("--risk-mode", common.risk_mode,
                            "site-risk accounting: coupled | paper-literal")
                ->check(CLI::IsMember({"coupled", "paper-literal"}));
        }
    };

    auto* validate = app.add_subcommand("validate", "check an instance document");
    add_common(validate, false);

    std::string objective = "f1";
    auto* solve = app.add_subcommand("solve", "single-objective exact solve");
    add_common(solve, true);
    solve->add_option("--objective", objective, "f1 | f2 | f3");

    int grid = 5;
    auto* pareto = app.add_subcommand("pareto", "augmented epsilon-constraint front");
    add_common(pareto, true);
    pareto->add_option("--grid", grid, "epsilon grid points per constrained objective")
        ->check(CLI::Range(2, 64));

    std::string scenario = "waste-scale";
    double factor = 1.1;
    auto* sens = app.add_subcommand("sensitivity", "scenario comparison against baseline");
    add_common(sens, true);
    sens->add_option("--scenario", scenario,
                     "capacity-none | capacity-increased | capacity-decreased | "
                     "waste-scale | no-sustainability");
    sens->add_option("--factor", factor, "waste scale factor (waste-scale scenario)")
        ->check(CLI::PositiveNumber);

    std::string export_obj = "f1";
    std::string export_out;
    std::optional<double> eps2, eps3;
    auto* exp = app.add_subcommand("export", "write the model in LP format");
    add_common(exp, true);
    exp->add_option("--objective", export_obj, "f1 | f2 | f3");
    exp->add_option("--eps2", eps2, "epsilon bound on f2 (augmented model)");
    exp->add_option("--eps3", eps3, "epsilon bound on f3 (augmented model)");
    exp->add_option("-o,--output", export_out, "output file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(common);
        if (solve->parsed()) return cmd_solve(common, objective);
        if (pareto->parsed()) return cmd_pareto(common, grid);
        if (sens->parsed()) return cmd_sensitivity(common, scenario, factor);
        if (exp->parsed()) return cmd_export(common, export_obj, eps2, eps3, export_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
