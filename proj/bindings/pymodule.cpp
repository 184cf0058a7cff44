#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hwlrp/formulation.hpp"
#include "hwlrp/instance.hpp"
#include "hwlrp/milp.hpp"
#include "hwlrp/moo.hpp"
#include "hwlrp/oracle.hpp"
#include "hwlrp/scenario.hpp"
#include "hwlrp/solver.hpp"

namespace py = pybind11;
using namespace hwlrp;

namespace {

SolveParams params_from_kwargs(double feas_tol, double mip_rel_gap, long node_limit,
                               std::optional<double> time_limit) {
    SolveParams p;
    p.feas_tol = feas_tol;
    p.mip_rel_gap = mip_rel_gap;
    p.node_limit = node_limit;
    p.time_limit_seconds = time_limit;
    return p;
}

FormulationOptions opts_from_mode(const std::string& risk_mode) {
    FormulationOptions f;
    f.risk_mode = risk_mode == "paper-literal" ? RiskMode::PaperLiteral : RiskMode::Coupled;
    return f;
}

py::dict solution_to_dict(const Solution& sol) {
    py::dict d;
    py::list openings;
    for (const auto& o : sol.openings) {
        py::dict od;
        od["node"] = o.node;
        od["facility"] = o.facility;
        od["level"] = o.level;
        if (!o.technology.empty()) od["technology"] = o.technology;
        openings.append(od);
    }
    d["openings"] = openings;
    py::list routes;
    for (const auto& r : sol.routes) {
        py::dict rd;
        rd["vehicle"] = r.vehicle;
        rd["sequence"] = r.sequence;
        rd["load"] = r.load;
        rd["length"] = r.length;
        routes.append(rd);
    }
    d["routes"] = routes;
    auto flows = [](const std::map<std::pair<std::string, std::string>, double>& m) {
        py::list out;
        for (const auto& [key, v] : m)
            out.append(py::make_tuple(key.first, key.second, v));
        return out;
    };
    d["treatment_to_recycling"] = flows(sol.kflow);
    d["treatment_to_disposal"] = flows(sol.zflow);
    d["recycling_to_disposal"] = flows(sol.vflow);
    d["recycled"] = sol.xr;
    d["disposed"] = sol.xd;
    py::list treated;
    for (const auto& [key, v] : sol.xt)
        treated.append(py::make_tuple(key.first, key.second, v));
    d["treated"] = treated;
    d["objectives"] = sol.objectives;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hwlrp, m) {
    m.doc() = "exact solver toolkit for the sustainable hazardous-waste "
              "location-routing problem";

    m.def("parse_instance_text", [](const std::string& text) {
        return parse_instance(text);  // opaque handle
    });

    py::class_<Instance>(m, "Instance")
        .def_property_readonly("name", [](const Instance& i) { return i.name; })
        .def("total_demand", &Instance::total_demand)
        .def("serialize", [](const Instance& i) { return serialize_instance(i); })
        .def("__repr__", [](const Instance& i) {
            std::ostringstream os;
            os << "<hwlrp.Instance '" << i.name << "' nodes=" << i.nodes.size()
               << " wastes=" << i.waste_types.size() << " vehicles=" << i.vehicles.size()
               << ">";
            return os.str();
        });

    m.def("parse_instance", [](const std::string& text) { return parse_instance(text); },
          py::arg("text"), "Parse an instance document.");
    m.def("serialize_instance", &serialize_instance, py::arg("instance"));
    m.def(
        "validate_instance",
        [](const Instance& inst) {
            py::list out;
            for (const auto& f : validate_instance(inst)) {
                py::dict d;
                d["severity"] = f.severity == Severity::Fatal ? "fatal" : "warning";
                d["code"] = f.code;
                d["entity"] = f.entity;
                d["message"] = f.message;
                out.append(d);
            }
            return out;
        },
        py::arg("instance"));
    m.def(
        "synth_instance",
        [](std::uint64_t seed, int n_gen, int n_rec, int n_treat, int n_disp, int n_waste,
           int n_vehicles, int n_levels) {
            SynthDims dims{n_gen, n_rec, n_treat, n_disp, n_waste, n_vehicles, n_levels};
            return synth_instance(seed, dims);
        },
        py::arg("seed"), py::arg("n_gen") = 2, py::arg("n_rec") = 1, py::arg("n_treat") = 1,
        py::arg("n_disp") = 1, py::arg("n_waste") = 1, py::arg("n_vehicles") = 1,
        py::arg("n_levels") = 1);
    m.def("case_study_instance", &case_study_instance);
    m.def("big_m", &big_m, py::arg("instance"));

    m.def(
        "export_lp",
        [](const Instance& inst, const std::string& objective, const std::string& risk_mode) {
            auto obj = objective_from_string(objective);
            if (!obj) throw std::invalid_argument("objective must be f1|f2|f3");
            BuiltModel built = build_model(inst, *obj, opts_from_mode(risk_mode));
            return export_lp(built.model);
        },
        py::arg("instance"), py::arg("objective") = "f1", py::arg("risk_mode") = "coupled");

    m.def(
        "model_stats",
        [](const Instance& inst, const std::string& objective, const std::string& risk_mode) {
            auto obj = objective_from_string(objective);
            if (!obj) throw std::invalid_argument("objective must be f1|f2|f3");
            BuiltModel built = build_model(inst, *obj, opts_from_mode(risk_mode));
            const auto s = model_stats(built.model);
            py::dict d;
            d["continuous"] = s.n_continuous;
            d["binary"] = s.n_binary;
            d["integer"] = s.n_integer;
            d["le"] = s.n_le;
            d["eq"] = s.n_eq;
            d["ge"] = s.n_ge;
            d["nonzeros"] = s.nonzeros;
            return d;
        },
        py::arg("instance"), py::arg("objective") = "f1", py::arg("risk_mode") = "coupled");

    m.def(
        "solve",
        [](const Instance& inst, const std::string& objective, const std::string& risk_mode,
           double feas_tol, double mip_rel_gap, long node_limit,
           std::optional<double> time_limit) {
            auto obj = objective_from_string(objective);
            if (!obj) throw std::invalid_argument("objective must be f1|f2|f3");
            const auto fopts = opts_from_mode(risk_mode);
            BuiltModel built = build_model(inst, *obj, fopts);
            SolveResult res = solve_milp(
                built.model, params_from_kwargs(feas_tol, mip_rel_gap, node_limit, time_limit));
            py::dict d;
            d["status"] = to_string(res.status);
            d["nodes"] = res.nodes;
            d["iterations"] = res.iterations;
            if (res.objective) d["model_objective"] = *res.objective;
            if (res.bound) d["bound"] = *res.bound;
            if (res.status == SolveStatus::Optimal) {
                Solution sol = extract_solution(inst, built.catalog, *res.assignment, fopts);
                d["solution"] = solution_to_dict(sol);
                const auto viol = check_solution_feasible(inst, sol, fopts);
                py::list vl;
                for (const auto& v : viol) vl.append(v.code + " " + v.entity + ": " + v.message);
                d["violations"] = vl;
            }
            return d;
        },
        py::arg("instance"), py::arg("objective") = "f1", py::arg("risk_mode") = "coupled",
        py::arg("feas_tol") = 1e-7, py::arg("mip_rel_gap") = 1e-6,
        py::arg("node_limit") = 1'000'000, py::arg("time_limit") = py::none());

    m.def(
        "oracle_optimum",
        [](const Instance& inst, const std::string& objective, const std::string& risk_mode) {
            auto obj = objective_from_string(objective);
            if (!obj) throw std::invalid_argument("objective must be f1|f2|f3");
            OracleResult res = oracle_optimum(inst, *obj, opts_from_mode(risk_mode));
            py::dict d;
            d["status"] = to_string(res.status);
            if (res.status == SolveStatus::Optimal) {
                d["value"] = res.value;
                d["solution"] = solution_to_dict(res.solution);
            }
            return d;
        },
        py::arg("instance"), py::arg("objective") = "f1", py::arg("risk_mode") = "coupled");

    m.def(
        "oracle_pareto",
        [](const Instance& inst, const std::string& risk_mode) {
            return oracle_pareto(inst, opts_from_mode(risk_mode));
        },
        py::arg("instance"), py::arg("risk_mode") = "coupled");

    m.def(
        "pareto_front",
        [](const Instance& inst, int grid, const std::string& risk_mode, double feas_tol,
           double mip_rel_gap, long node_limit, std::optional<double> time_limit) {
            const auto fopts = opts_from_mode(risk_mode);
            FrontResult front = pareto_front(
                inst, grid, params_from_kwargs(feas_tol, mip_rel_gap, node_limit, time_limit),
                fopts);
            py::dict d;
            d["status"] = to_string(front.status);
            if (front.payoff.table) {
                d["payoff_best"] = front.payoff.table->best;
                d["payoff_worst"] = front.payoff.table->worst;
            }
            py::list pts;
            for (const auto& p : front.points) {
                py::dict pd;
                pd["objectives"] = p.objectives;
                pd["eps"] = p.eps;
                pts.append(pd);
            }
            d["points"] = pts;
            py::list cells;
            for (const auto& cell : front.cells) {
                py::dict cd;
                cd["eps"] = cell.eps;
                cd["status"] = to_string(cell.status);
                if (cell.objectives) cd["objectives"] = *cell.objectives;
                cells.append(cd);
            }
            d["cells"] = cells;
            return d;
        },
        py::arg("instance"), py::arg("grid") = 5, py::arg("risk_mode") = "coupled",
        py::arg("feas_tol") = 1e-7, py::arg("mip_rel_gap") = 1e-6,
        py::arg("node_limit") = 1'000'000, py::arg("time_limit") = py::none());

    m.def("nondominated_filter", &nondominated_filter, py::arg("points"));

    m.def(
        "apply_scenario",
        [](const Instance& inst, const std::string& capacity, double waste_scale) {
            ScenarioSpec spec;
            if (capacity == "none") spec.capacity = CapacityMode::None;
            else if (capacity == "increased") spec.capacity = CapacityMode::Increased;
            else if (capacity == "decreased") spec.capacity = CapacityMode::Decreased;
            else if (capacity != "paper")
                throw std::invalid_argument("capacity must be paper|none|increased|decreased");
            spec.waste_scale = waste_scale;
            return apply_scenario(inst, spec);
        },
        py::arg("instance"), py::arg("capacity") = "paper", py::arg("waste_scale") = 1.0);
}
