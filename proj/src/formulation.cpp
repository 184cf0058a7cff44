#include "hwlrp/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json_util.hpp"

namespace hwlrp {

std::string to_string(ObjectiveId id) {
    switch (id) {
        case ObjectiveId::F1: return "f1";
        case ObjectiveId::F2: return "f2";
        case ObjectiveId::F3: return "f3";
    }
    return "?";
}

std::optional<ObjectiveId> objective_from_string(const std::string& token) {
    if (token == "f1" || token == "cost") return ObjectiveId::F1;
    if (token == "f2" || token == "risk") return ObjectiveId::F2;
    if (token == "f3" || token == "co2") return ObjectiveId::F3;
    return std::nullopt;
}

double big_m(const Instance& inst) {
    double bm = 0.0;
    for (const auto& v : inst.vehicles) bm = std::max(bm, v.capacity);
    return bm;
}

namespace {

struct Ctx {
    const Instance* inst = nullptr;
    FormulationOptions opts;
    std::vector<std::string> depots, gens, recs, treats, disps;
    std::map<std::string, double> veh_cap, veh_mu;
    std::map<std::string, std::string> veh_waste;
    // nodes a vehicle may visit: the generation nodes holding its cargo
    std::map<std::string, std::vector<std::string>> veh_gens;
    double bm = 0.0;

    double dis(const std::string& a, const std::string& b, const std::string& k) const {
        auto d = inst->distance(a, b, k);
        return d ? *d : 0.0;
    }
    bool has_arc(const std::string& a, const std::string& b) const {
        return inst->find_arc(a, b) != nullptr;
    }
    double demand_for(const std::string& vehicle, const std::string& gen) const {
        return inst->demand(veh_waste.at(vehicle), gen);
    }
    bool node_is_existing(const std::string& id) const {
        const Node* n = inst->find_node(id);
        return n && is_existing(n->kind);
    }
};

Ctx make_ctx(const Instance& inst, const FormulationOptions& opts) {
    Ctx c;
    c.inst = &inst;
    c.opts = opts;
    for (const auto* n : inst.depots()) c.depots.push_back(n->id);
    for (const auto* n : inst.generation_nodes()) c.gens.push_back(n->id);
    for (const auto* n : inst.recycling_nodes()) c.recs.push_back(n->id);
    for (const auto* n : inst.treatment_nodes()) c.treats.push_back(n->id);
    for (const auto* n : inst.disposal_nodes()) c.disps.push_back(n->id);
    for (const auto& v : inst.vehicles) {
        c.veh_cap[v.id] = v.capacity;
        c.veh_mu[v.id] = v.max_distance;
        c.veh_waste[v.id] = inst.vehicle_waste(v);
        std::vector<std::string> reach;
        for (const auto& g : c.gens)
            if (inst.demand(c.veh_waste[v.id], g) > 0.0) reach.push_back(g);
        c.veh_gens[v.id] = std::move(reach);
    }
    c.bm = big_m(inst);
    return c;
}

// Terminal facilities a vehicle may unload at: recycling nodes for
// recyclable-only cargo, treatment nodes with a compatible technology
// entry otherwise.
std::vector<std::string> terminals_of(const Ctx& c, const std::string& vehicle) {
    const std::string& w = c.veh_waste.at(vehicle);
    std::vector<std::string> out;
    if (c.inst->recyclable_only(w)) {
        out = c.recs;
    } else {
        for (const auto& t : c.treats) {
            bool compatible = false;
            for (const auto& tech : c.inst->technologies)
                if (c.inst->com(w, tech.id) && c.inst->treatment_caps(t, tech.id))
                    compatible = true;
            if (compatible) out.push_back(t);
        }
    }
    return out;
}

std::string key3(const std::string& a, const std::string& b, const std::string& k) {
    return a + "_" + b + "_" + k;
}

}  // namespace

CoreModel build_core_model(const Instance& inst, const FormulationOptions& opts) {
    Ctx c = make_ctx(inst, opts);
    if (!std::isfinite(c.bm)) throw std::invalid_argument("non-finite linearization constant");
    CoreModel out;
    LinearModel& m = out.model;
    VarCatalog& cat = out.catalog;

    auto note = [&](int id, const std::string& name) { cat.semantic_name[id] = name; };

    // routing and linearizer variables; an arc's product x*lo is read by
    // the objectives and mass rows only when it unloads at a facility
    for (const auto& veh : inst.vehicles) {
        const std::string& k = veh.id;
        const auto terms = terminals_of(c, k);
        auto add_arc_vars = [&](const std::string& i, const std::string& j, bool used) {
            if (!c.has_arc(i, j)) return;
            const int xv = m.add_variable("x_" + key3(i, j, k), 0.0, 1.0, VarType::Binary);
            cat.x[{i, j, k}] = xv;
            note(xv, "x");
            const bool pin = opts.trim_dangling_linearizers && !used;
            const int lv = m.add_variable("xl_" + key3(i, j, k), 0.0,
                                          pin ? 0.0 : veh.capacity, VarType::Continuous);
            cat.xl[{i, j, k}] = lv;
            note(lv, "xl");
        };
        const auto& gens_k = c.veh_gens.at(k);
        for (const auto& f : c.depots)
            for (const auto& g : gens_k) add_arc_vars(f, g, false);
        for (const auto& g1 : gens_k)
            for (const auto& g2 : gens_k)
                if (g1 != g2) add_arc_vars(g1, g2, false);
        for (const auto& g : gens_k)
            for (const auto& j : terms) add_arc_vars(g, j, true);
        for (const auto& j : terms)
            for (const auto& f : c.depots) add_arc_vars(j, f, false);
    }

    // loads after generation nodes; the load window d <= lo <= delta sits
    // in the variable bounds
    for (const auto& veh : inst.vehicles)
        for (const auto& g : c.veh_gens.at(veh.id)) {
            const double d = c.demand_for(veh.id, g);
            const int v = m.add_variable("lo_" + g + "_" + veh.id, d, veh.capacity,
                                         VarType::Continuous);
            cat.lo[{g, veh.id}] = v;
            note(v, "lo");
        }

    // distance after nodes (generation plus reachable terminals)
    for (const auto& veh : inst.vehicles) {
        for (const auto& g : c.veh_gens.at(veh.id)) {
            const int v = m.add_variable("e_" + g + "_" + veh.id, 0.0, veh.max_distance,
                                         VarType::Continuous);
            cat.e[{g, veh.id}] = v;
            note(v, "e");
        }
        for (const auto& j : terminals_of(c, veh.id)) {
            const int v = m.add_variable("e_" + j + "_" + veh.id, 0.0, veh.max_distance,
                                         VarType::Continuous);
            cat.e[{j, veh.id}] = v;
            note(v, "e");
        }
    }

    // opening binaries
    for (const auto& entry : inst.capacity_levels.recycling)
        for (const auto& lc : entry.levels) {
            const int v = m.add_variable("r_" + entry.node + "_" + lc.level, 0.0, 1.0,
                                         VarType::Binary);
            cat.r_open[{entry.node, lc.level}] = v;
            note(v, "r");
        }
    for (const auto& entry : inst.capacity_levels.treatment)
        for (const auto& lc : entry.levels) {
            const int v = m.add_variable(
                "t_" + entry.technology + "_" + entry.node + "_" + lc.level, 0.0, 1.0,
                VarType::Binary);
            cat.t_open[{entry.technology, entry.node, lc.level}] = v;
            note(v, "t");
        }
    for (const auto& entry : inst.capacity_levels.disposal)
        for (const auto& lc : entry.levels) {
            const int v = m.add_variable("d_" + entry.node + "_" + lc.level, 0.0, 1.0,
                                         VarType::Binary);
            cat.d_open[{entry.node, lc.level}] = v;
            note(v, "d");
        }

    const double inf = std::numeric_limits<double>::infinity();

    // processed masses and residue flows
    for (const auto& w : inst.waste_types)
        for (const auto& t : c.treats) {
            const int v = m.add_variable("xt_" + w.id + "_" + t, 0.0, inf,
                                         VarType::Continuous);
            cat.xt[{w.id, t}] = v;
            note(v, "xt");
        }
    for (const auto& r : c.recs) {
        const int v = m.add_variable("xr_" + r, 0.0, inf, VarType::Continuous);
        cat.xr[r] = v;
        note(v, "xr");
    }
    for (const auto& d : c.disps) {
        const int v = m.add_variable("xd_" + d, 0.0, inf, VarType::Continuous);
        cat.xd[d] = v;
        note(v, "xd");
    }
    for (const auto& t : c.treats)
        for (const auto& r : c.recs)
            if (c.has_arc(t, r)) {
                const int v = m.add_variable("k_" + t + "_" + r, 0.0, inf,
                                             VarType::Continuous);
                cat.kflow[{t, r}] = v;
                note(v, "k");
            }
    for (const auto& t : c.treats)
        for (const auto& d : c.disps)
            if (c.has_arc(t, d)) {
                const int v = m.add_variable("z_" + t + "_" + d, 0.0, inf,
                                             VarType::Continuous);
                cat.zflow[{t, d}] = v;
                note(v, "z");
            }
    for (const auto& r : c.recs)
        for (const auto& d : c.disps)
            if (c.has_arc(r, d)) {
                const int v = m.add_variable("v_" + r + "_" + d, 0.0, inf,
                                             VarType::Continuous);
                cat.vflow[{r, d}] = v;
                note(v, "v");
            }

    // per-level mass splits recovering the level (and technology) coupling
    for (const auto& w : inst.waste_types)
        for (const auto& entry : inst.capacity_levels.treatment) {
            if (!inst.com(w.id, entry.technology)) continue;
            for (const auto& lc : entry.levels) {
                const int v = m.add_variable("xt_" + w.id + "_" + entry.node + "_" +
                                                 entry.technology + "_" + lc.level,
                                             0.0, inf, VarType::Continuous);
                cat.ts[{w.id, entry.node, entry.technology, lc.level}] = v;
                note(v, "ts");
            }
        }
    for (const auto& entry : inst.capacity_levels.recycling)
        for (const auto& lc : entry.levels) {
            const int v = m.add_variable("xr_" + entry.node + "_" + lc.level, 0.0, inf,
                                         VarType::Continuous);
            cat.rs[{entry.node, lc.level}] = v;
            note(v, "rs");
        }
    for (const auto& entry : inst.capacity_levels.disposal)
        for (const auto& lc : entry.levels) {
            const int v = m.add_variable("xd_" + entry.node + "_" + lc.level, 0.0, inf,
                                         VarType::Continuous);
            cat.ds[{entry.node, lc.level}] = v;
            note(v, "ds");
        }

    // ------------------------------------------------------------------
    // constraints

    // eq04: at most one departure per vehicle (a parked vehicle is legal,
    // which keeps zero-demand instances feasible)
    for (const auto& veh : inst.vehicles) {
        LinExpr ex;
        for (const auto& f : c.depots)
            for (const auto& g : c.gens) {
                auto it = cat.x.find({f, g, veh.id});
                if (it != cat.x.end()) ex.add(it->second, 1.0);
            }
        if (!ex.empty()) m.add_constraint("eq04_depart_" + veh.id, ex, ConstraintSense::LE, 1.0);
    }

    // eq05: flow conservation at generation nodes
    for (const auto& veh : inst.vehicles) {
        const auto terms = terminals_of(c, veh.id);
        for (const auto& g : c.veh_gens.at(veh.id)) {
            LinExpr ex;
            for (const auto& f : c.depots) {
                auto it = cat.x.find({f, g, veh.id});
                if (it != cat.x.end()) ex.add(it->second, 1.0);
            }
            for (const auto& g2 : c.gens) {
                if (g2 == g) continue;
                auto in = cat.x.find({g2, g, veh.id});
                if (in != cat.x.end()) ex.add(in->second, 1.0);
                auto outv = cat.x.find({g, g2, veh.id});
                if (outv != cat.x.end()) ex.add(outv->second, -1.0);
            }
            for (const auto& j : terms) {
                auto outv = cat.x.find({g, j, veh.id});
                if (outv != cat.x.end()) ex.add(outv->second, -1.0);
            }
            if (!ex.empty())
                m.add_constraint("eq05_flow_" + g + "_" + veh.id, ex, ConstraintSense::EQ,
                                 0.0);
        }
    }

    // eq06: one visit per (generation node, waste type); optional when the
    // node holds none of that waste
    for (const auto& g : c.gens)
        for (const auto& w : inst.waste_types) {
            LinExpr ex;
            for (const auto& veh : inst.vehicles) {
                if (c.veh_waste.at(veh.id) != w.id) continue;
                for (const auto& [key, id] : cat.x) {
                    if (std::get<0>(key) == g && std::get<2>(key) == veh.id)
                        ex.add(id, 1.0);
                }
            }
            const double d = inst.demand(w.id, g);
            if (ex.empty()) continue;
            if (d > 0.0)
                m.add_constraint("eq06_visit_" + g + "_" + w.id, ex, ConstraintSense::EQ,
                                 1.0);
            else
                m.add_constraint("eq06_visit_" + g + "_" + w.id, ex, ConstraintSense::LE,
                                 1.0);
        }

    // eq07: unload then return to a depot
    for (const auto& veh : inst.vehicles)
        for (const auto& j : terminals_of(c, veh.id)) {
            LinExpr ex;
            for (const auto& g : c.gens) {
                auto in = cat.x.find({g, j, veh.id});
                if (in != cat.x.end()) ex.add(in->second, 1.0);
            }
            for (const auto& f : c.depots) {
                auto ret = cat.x.find({j, f, veh.id});
                if (ret != cat.x.end()) ex.add(ret->second, -1.0);
            }
            if (!ex.empty())
                m.add_constraint("eq07_return_" + j + "_" + veh.id, ex, ConstraintSense::EQ,
                                 0.0);
        }

    // eq08 / eq09: unloading gated on an opened, compatible facility
    for (const auto& veh : inst.vehicles) {
        const std::string& w = c.veh_waste.at(veh.id);
        const bool rec_only = inst.recyclable_only(w);
        for (const auto& j : terminals_of(c, veh.id)) {
            LinExpr gate;
            if (rec_only) {
                const FacilityCapEntry* entry = inst.recycling_caps(j);
                if (entry)
                    for (const auto& lc : entry->levels)
                        gate.add(cat.r_open.at({j, lc.level}), 1.0);
            } else {
                for (const auto& tech : inst.technologies) {
                    if (!inst.com(w, tech.id)) continue;
                    const TreatmentCapEntry* entry = inst.treatment_caps(j, tech.id);
                    if (!entry) continue;
                    for (const auto& lc : entry->levels)
                        gate.add(cat.t_open.at({tech.id, j, lc.level}), 1.0);
                }
            }
            for (const auto& g : c.gens) {
                auto it = cat.x.find({g, j, veh.id});
                if (it == cat.x.end()) continue;
                LinExpr ex;
                ex.add(it->second, 1.0);
                ex.add(gate, -1.0);
                const char* tag = rec_only ? "eq09_rec_gate_" : "eq08_treat_gate_";
                m.add_constraint(tag + g + ("_" + j + "_" + veh.id), ex,
                                 ConstraintSense::LE, 0.0);
            }
        }
    }

    // eq10-eq12: distance propagation and tour-length limits
    for (const auto& veh : inst.vehicles) {
        const std::string& k = veh.id;
        const double mu = veh.max_distance;
        const auto terms = terminals_of(c, k);
        const auto& gens_k = c.veh_gens.at(k);
        for (const auto& g1 : gens_k)
            for (const auto& g2 : gens_k) {
                if (g1 == g2) continue;
                auto fwd = cat.x.find({g1, g2, k});
                if (fwd == cat.x.end()) continue;
                LinExpr ex;
                ex.add(cat.e.at({g1, k}), 1.0);
                ex.add(cat.e.at({g2, k}), -1.0);
                const double d = c.dis(g1, g2, k);
                ex.add(fwd->second, mu + d);
                auto rev = cat.x.find({g2, g1, k});
                if (rev != cat.x.end()) ex.add(rev->second, mu - d);
                m.add_constraint("eq10_dist_" + key3(g1, g2, k), ex, ConstraintSense::LE,
                                 mu);
            }
        for (const auto& g : gens_k)
            for (const auto& j : terms) {
                auto it = cat.x.find({g, j, k});
                if (it == cat.x.end()) continue;
                LinExpr ex;
                ex.add(cat.e.at({g, k}), 1.0);
                ex.add(cat.e.at({j, k}), -1.0);
                ex.add(it->second, mu + c.dis(g, j, k));
                m.add_constraint("eq10_dist_" + key3(g, j, k), ex, ConstraintSense::LE, mu);
            }
        for (const auto& g : gens_k) {
            LinExpr lbex, ubex;
            lbex.add(cat.e.at({g, k}), 1.0);
            ubex.add(cat.e.at({g, k}), 1.0);
            bool any = false;
            for (const auto& f : c.depots) {
                auto it = cat.x.find({f, g, k});
                if (it == cat.x.end()) continue;
                any = true;
                const double d = c.dis(f, g, k);
                lbex.add(it->second, -d);
                ubex.add(it->second, -(d - mu));
            }
            if (any) {
                m.add_constraint("eq11_first_dist_lb_" + g + "_" + k, lbex,
                                 ConstraintSense::GE, 0.0);
                m.add_constraint("eq11_first_dist_ub_" + g + "_" + k, ubex,
                                 ConstraintSense::LE, mu);
            }
        }
        for (const auto& j : terms) {
            LinExpr ex;
            ex.add(cat.e.at({j, k}), 1.0);
            bool any = false;
            for (const auto& f : c.depots) {
                auto it = cat.x.find({j, f, k});
                if (it == cat.x.end()) continue;
                any = true;
                ex.add(it->second, c.dis(j, f, k));
            }
            if (any)
                m.add_constraint("eq12_return_dist_" + j + "_" + k, ex, ConstraintSense::LE,
                                 mu);
        }
    }

    // eq13, eq15, eq16: load propagation (eq14 lives in the lo bounds)
    for (const auto& veh : inst.vehicles) {
        const std::string& k = veh.id;
        const double cap = veh.capacity;
        const auto& gens_k = c.veh_gens.at(k);
        for (const auto& g1 : gens_k)
            for (const auto& g2 : gens_k) {
                if (g1 == g2) continue;
                auto it = cat.x.find({g1, g2, k});
                if (it == cat.x.end()) continue;
                LinExpr ex;
                ex.add(cat.lo.at({g1, k}), 1.0);
                ex.add(cat.lo.at({g2, k}), -1.0);
                ex.add(it->second, cap);
                m.add_constraint("eq13_load_" + key3(g1, g2, k), ex, ConstraintSense::LE,
                                 cap - c.demand_for(k, g2));
            }
        for (const auto& g : gens_k) {
            const double d = c.demand_for(k, g);
            LinExpr lbex, ubex;
            lbex.add(cat.lo.at({g, k}), -1.0);
            ubex.add(cat.lo.at({g, k}), 1.0);
            bool any = false;
            for (const auto& f : c.depots) {
                auto it = cat.x.find({f, g, k});
                if (it == cat.x.end()) continue;
                any = true;
                lbex.add(it->second, d);
                ubex.add(it->second, cap - d);
            }
            if (any) {
                m.add_constraint("eq15_first_load_" + g + "_" + k, lbex,
                                 ConstraintSense::LE, 0.0);
                m.add_constraint("eq16_first_load_ub_" + g + "_" + k, ubex,
                                 ConstraintSense::LE, cap);
            }
        }
    }

    // eq37-eq39: exact big-M linearization of xl = x * lo. Arcs leaving a
    // depot or a facility carry an identically zero load.
    for (const auto& [key, xl_id] : cat.xl) {
        const auto& [i, j, k] = key;
        if (opts.trim_dangling_linearizers) {
            const Node* head = inst.find_node(j);
            if (!head || !is_facility(head->kind)) continue;  // pinned to zero instead
        }
        const int x_id = cat.x.at(key);
        const bool gen_tail = std::find(c.gens.begin(), c.gens.end(), i) != c.gens.end();
        // the vehicle's own capacity is the tightest valid constant here,
        // since loads never exceed it
        const double bm_k = c.veh_cap.at(k);
        {
            LinExpr ex;
            ex.add(xl_id, 1.0);
            ex.add(x_id, -bm_k);
            m.add_constraint("eq37_" + key3(i, j, k), ex, ConstraintSense::LE, 0.0);
        }
        {
            LinExpr ex;
            ex.add(xl_id, 1.0);
            if (gen_tail) ex.add(cat.lo.at({i, k}), -1.0);
            m.add_constraint("eq38_" + key3(i, j, k), ex, ConstraintSense::LE, 0.0);
        }
        {
            LinExpr ex;
            ex.add(xl_id, 1.0);
            if (gen_tail) ex.add(cat.lo.at({i, k}), -1.0);
            ex.add(x_id, -bm_k);
            m.add_constraint("eq39_" + key3(i, j, k), ex, ConstraintSense::GE, -bm_k);
        }
    }

    // eq17: treated mass per waste type
    for (const auto& w : inst.waste_types)
        for (const auto& t : c.treats) {
            LinExpr ex;
            ex.add(cat.xt.at({w.id, t}), 1.0);
            for (const auto& veh : inst.vehicles) {
                if (c.veh_waste.at(veh.id) != w.id) continue;
                for (const auto& g : c.gens) {
                    auto it = cat.xl.find({g, t, veh.id});
                    if (it != cat.xl.end()) ex.add(it->second, -1.0);
                }
            }
            m.add_constraint("eq17_treated_" + w.id + "_" + t, ex, ConstraintSense::EQ, 0.0);
        }

    // eq18 / eq19: treatment capacity window (minimum threshold binds
    // newly established sites only; the existing plant in the case data
    // keeps operating below it)
    for (const auto& t : c.treats) {
        LinExpr total;
        for (const auto& w : inst.waste_types) total.add(cat.xt.at({w.id, t}), 1.0);
        LinExpr cap_ex = total;
        LinExpr min_ex = total;
        bool any_entry = false;
        for (const auto& entry : inst.capacity_levels.treatment) {
            if (entry.node != t) continue;
            any_entry = true;
            for (const auto& lc : entry.levels) {
                const int tv = cat.t_open.at({entry.technology, t, lc.level});
                cap_ex.add(tv, -lc.max_capacity);
                min_ex.add(tv, -entry.min_required);
            }
        }
        if (!any_entry) continue;
        m.add_constraint("eq18_treat_cap_" + t, cap_ex, ConstraintSense::LE, 0.0);
        if (!c.node_is_existing(t))
            m.add_constraint("eq19_treat_min_" + t, min_ex, ConstraintSense::GE, 0.0);
    }

    // eq20: recycled mass = direct deliveries + treatment residues
    for (const auto& r : c.recs) {
        LinExpr ex;
        ex.add(cat.xr.at(r), 1.0);
        for (const auto& veh : inst.vehicles) {
            if (!inst.recyclable_only(c.veh_waste.at(veh.id))) continue;
            for (const auto& g : c.gens) {
                auto it = cat.xl.find({g, r, veh.id});
                if (it != cat.xl.end()) ex.add(it->second, -1.0);
            }
        }
        for (const auto& t : c.treats) {
            auto it = cat.kflow.find({t, r});
            if (it != cat.kflow.end()) ex.add(it->second, -1.0);
        }
        m.add_constraint("eq20_recycled_" + r, ex, ConstraintSense::EQ, 0.0);
    }

    // eq21 / eq24: residue outflows of treatment, coupled to the installed
    // technology through the per-level splits
    for (const auto& t : c.treats) {
        LinExpr rec_ex, disp_ex;
        for (const auto& [key, id] : cat.ts) {
            if (std::get<1>(key) != t) continue;
            const std::string& w = std::get<0>(key);
            const std::string& q = std::get<2>(key);
            const double red = inst.mass_reduction_of(w, q);
            const double beta = inst.beta(w, q);
            rec_ex.add(id, (1.0 - red) * beta);
            disp_ex.add(id, (1.0 - red) * (1.0 - beta));
        }
        for (const auto& r : c.recs) {
            auto it = cat.kflow.find({t, r});
            if (it != cat.kflow.end()) rec_ex.add(it->second, -1.0);
        }
        for (const auto& d : c.disps) {
            auto it = cat.zflow.find({t, d});
            if (it != cat.zflow.end()) disp_ex.add(it->second, -1.0);
        }
        m.add_constraint("eq21_resid_rec_" + t, rec_ex, ConstraintSense::EQ, 0.0);
        m.add_constraint("eq24_resid_disp_" + t, disp_ex, ConstraintSense::EQ, 0.0);
    }

    // split linking: sum of per-level splits equals the processed mass,
    // each split gated by its opening
    for (const auto& w : inst.waste_types)
        for (const auto& t : c.treats) {
            LinExpr ex;
            bool any = false;
            for (const auto& [key, id] : cat.ts) {
                if (std::get<0>(key) != w.id || std::get<1>(key) != t) continue;
                ex.add(id, 1.0);
                any = true;
                LinExpr capex;
                capex.add(id, 1.0);
                const TreatmentCapEntry* entry = inst.treatment_caps(t, std::get<2>(key));
                for (const auto& lc : entry->levels)
                    if (lc.level == std::get<3>(key))
                        capex.add(cat.t_open.at({std::get<2>(key), t, lc.level}),
                                  -lc.max_capacity);
                m.add_constraint("eq24_split_cap_" + w.id + "_" + t + "_" +
                                     std::get<2>(key) + "_" + std::get<3>(key),
                                 capex, ConstraintSense::LE, 0.0);
            }
            ex.add(cat.xt.at({w.id, t}), -1.0);
            // an empty split sum pins xt to zero, which is exactly right
            // for waste with no compatible technology at this node
            (void)any;
            m.add_constraint("eq24_split_sum_" + w.id + "_" + t, ex, ConstraintSense::EQ,
                             0.0);
        }

    // eq22 / eq23: recycling capacity window
    for (const auto& entry : inst.capacity_levels.recycling) {
        LinExpr cap_ex, min_ex;
        cap_ex.add(cat.xr.at(entry.node), 1.0);
        min_ex.add(cat.xr.at(entry.node), 1.0);
        for (const auto& lc : entry.levels) {
            cap_ex.add(cat.r_open.at({entry.node, lc.level}), -lc.max_capacity);
            min_ex.add(cat.r_open.at({entry.node, lc.level}), -entry.min_required);
        }
        m.add_constraint("eq22_rec_cap_" + entry.node, cap_ex, ConstraintSense::LE, 0.0);
        if (!c.node_is_existing(entry.node))
            m.add_constraint("eq23_rec_min_" + entry.node, min_ex, ConstraintSense::GE, 0.0);
    }

    // eq25: recycling residues forwarded to disposal
    for (const auto& r : c.recs) {
        LinExpr ex;
        ex.add(cat.xr.at(r), 1.0 - inst.gamma(r));
        for (const auto& d : c.disps) {
            auto it = cat.vflow.find({r, d});
            if (it != cat.vflow.end()) ex.add(it->second, -1.0);
        }
        m.add_constraint("eq25_rec_disp_" + r, ex, ConstraintSense::EQ, 0.0);
    }

    // eq26: disposal intake
    for (const auto& d : c.disps) {
        LinExpr ex;
        ex.add(cat.xd.at(d), 1.0);
        for (const auto& t : c.treats) {
            auto it = cat.zflow.find({t, d});
            if (it != cat.zflow.end()) ex.add(it->second, -1.0);
        }
        for (const auto& r : c.recs) {
            auto it = cat.vflow.find({r, d});
            if (it != cat.vflow.end()) ex.add(it->second, -1.0);
        }
        m.add_constraint("eq26_disposed_" + d, ex, ConstraintSense::EQ, 0.0);
    }

    // eq27 / eq28: disposal capacity window
    for (const auto& entry : inst.capacity_levels.disposal) {
        LinExpr cap_ex, min_ex;
        cap_ex.add(cat.xd.at(entry.node), 1.0);
        min_ex.add(cat.xd.at(entry.node), 1.0);
        for (const auto& lc : entry.levels) {
            cap_ex.add(cat.d_open.at({entry.node, lc.level}), -lc.max_capacity);
            min_ex.add(cat.d_open.at({entry.node, lc.level}), -entry.min_required);
        }
        m.add_constraint("eq27_disp_cap_" + entry.node, cap_ex, ConstraintSense::LE, 0.0);
        if (!c.node_is_existing(entry.node))
            m.add_constraint("eq28_disp_min_" + entry.node, min_ex, ConstraintSense::GE,
                             0.0);
    }

    // recycled / disposed per-level splits (site-risk level coupling)
    for (const auto& entry : inst.capacity_levels.recycling) {
        LinExpr sum_ex;
        for (const auto& lc : entry.levels) {
            const int sv = cat.rs.at({entry.node, lc.level});
            sum_ex.add(sv, 1.0);
            LinExpr capex;
            capex.add(sv, 1.0);
            capex.add(cat.r_open.at({entry.node, lc.level}), -lc.max_capacity);
            m.add_constraint("lvl_split_rec_cap_" + entry.node + "_" + lc.level, capex,
                             ConstraintSense::LE, 0.0);
        }
        sum_ex.add(cat.xr.at(entry.node), -1.0);
        m.add_constraint("lvl_split_rec_sum_" + entry.node, sum_ex, ConstraintSense::EQ,
                         0.0);
    }
    for (const auto& entry : inst.capacity_levels.disposal) {
        LinExpr sum_ex;
        for (const auto& lc : entry.levels) {
            const int sv = cat.ds.at({entry.node, lc.level});
            sum_ex.add(sv, 1.0);
            LinExpr capex;
            capex.add(sv, 1.0);
            capex.add(cat.d_open.at({entry.node, lc.level}), -lc.max_capacity);
            m.add_constraint("lvl_split_disp_cap_" + entry.node + "_" + lc.level, capex,
                             ConstraintSense::LE, 0.0);
        }
        sum_ex.add(cat.xd.at(entry.node), -1.0);
        m.add_constraint("lvl_split_disp_sum_" + entry.node, sum_ex, ConstraintSense::EQ,
                         0.0);
    }

    // eq29: total generated mass is either treated or directly recycled
    {
        LinExpr ex;
        for (const auto& w : inst.waste_types)
            for (const auto& t : c.treats) ex.add(cat.xt.at({w.id, t}), 1.0);
        for (const auto& veh : inst.vehicles) {
            if (!inst.recyclable_only(c.veh_waste.at(veh.id))) continue;
            for (const auto& g : c.gens)
                for (const auto& r : c.recs) {
                    auto it = cat.xl.find({g, r, veh.id});
                    if (it != cat.xl.end()) ex.add(it->second, 1.0);
                }
        }
        m.add_constraint("eq29_balance", ex, ConstraintSense::EQ, inst.total_demand());
    }

    // eq30: one technology (and one tier) per site; recycling and disposal
    // candidates get the same single-tier rule
    for (const auto& t : c.treats) {
        LinExpr ex;
        for (const auto& [key, id] : cat.t_open)
            if (std::get<1>(key) == t) ex.add(id, 1.0);
        if (!ex.empty() && !c.node_is_existing(t))
            m.add_constraint("eq30_one_tech_" + t, ex, ConstraintSense::LE, 1.0);
    }
    for (const auto& r : c.recs) {
        if (c.node_is_existing(r)) continue;
        LinExpr ex;
        for (const auto& [key, id] : cat.r_open)
            if (key.first == r) ex.add(id, 1.0);
        if (!ex.empty())
            m.add_constraint("eq30_one_level_rec_" + r, ex, ConstraintSense::LE, 1.0);
    }
    for (const auto& d : c.disps) {
        if (c.node_is_existing(d)) continue;
        LinExpr ex;
        for (const auto& [key, id] : cat.d_open)
            if (key.first == d) ex.add(id, 1.0);
        if (!ex.empty())
            m.add_constraint("eq30_one_level_disp_" + d, ex, ConstraintSense::LE, 1.0);
    }

    // eq31-eq33: existing facilities are pinned open (level left free)
    for (const auto& t : c.treats) {
        if (!c.node_is_existing(t)) continue;
        for (const auto& tech : inst.technologies) {
            const TreatmentCapEntry* entry = inst.treatment_caps(t, tech.id);
            if (!entry) continue;
            LinExpr ex;
            for (const auto& lc : entry->levels)
                ex.add(cat.t_open.at({tech.id, t, lc.level}), 1.0);
            auto it = tech.availability.find(t);
            const double avail = it != tech.availability.end() ? it->second : 0.0;
            m.add_constraint("eq31_exist_treat_" + tech.id + "_" + t, ex,
                             ConstraintSense::EQ, avail);
        }
    }
    for (const auto& r : c.recs) {
        if (!c.node_is_existing(r)) continue;
        LinExpr ex;
        for (const auto& [key, id] : cat.r_open)
            if (key.first == r) ex.add(id, 1.0);
        m.add_constraint("eq32_exist_rec_" + r, ex, ConstraintSense::EQ, 1.0);
    }
    for (const auto& d : c.disps) {
        if (!c.node_is_existing(d)) continue;
        LinExpr ex;
        for (const auto& [key, id] : cat.d_open)
            if (key.first == d) ex.add(id, 1.0);
        m.add_constraint("eq33_exist_disp_" + d, ex, ConstraintSense::EQ, 1.0);
    }

    // eq34: per-link risk caps over residue flows
    auto risk_rows = [&](const auto& flows, double TransportRisk::*rate_field,
                         const char* tag) {
        for (const auto& [key, id] : flows) {
            const Arc* arc = inst.find_arc(key.first, key.second);
            if (!arc || !arc->risk_cap) continue;
            const double rate = arc->transport_risk.*rate_field;
            LinExpr ex;
            ex.add(id, rate);
            m.add_constraint(std::string("eq34_risk_") + tag + "_" + key.first + "_" +
                                 key.second,
                             ex, ConstraintSense::LE, *arc->risk_cap);
        }
    };
    risk_rows(cat.kflow, &TransportRisk::tr, "k");
    risk_rows(cat.zflow, &TransportRisk::td, "z");
    risk_rows(cat.vflow, &TransportRisk::rd, "v");

    // ------------------------------------------------------------------
    // objective expressions

    LinExpr f1, f2, f3;

    // f1: unload-leg transport (c * x * lo, linearized), residue
    // transport, and establishment of new facilities
    for (const auto& [key, id] : cat.xl) {
        const auto& [i, j, k] = key;
        const Node* n = inst.find_node(j);
        if (!n || !is_facility(n->kind)) continue;
        const Arc* arc = inst.find_arc(i, j);
        if (arc) f1.add(id, arc->unit_cost);
    }
    auto flow_cost = [&](const auto& flows) {
        for (const auto& [key, id] : flows) {
            const Arc* arc = inst.find_arc(key.first, key.second);
            if (arc) f1.add(id, arc->unit_cost);
        }
    };
    flow_cost(cat.zflow);
    flow_cost(cat.vflow);
    flow_cost(cat.kflow);
    for (const auto& entry : inst.capacity_levels.treatment) {
        if (c.node_is_existing(entry.node)) continue;
        for (const auto& lc : entry.levels)
            f1.add(cat.t_open.at({entry.technology, entry.node, lc.level}), lc.invest_cost);
    }
    for (const auto& entry : inst.capacity_levels.recycling) {
        if (c.node_is_existing(entry.node)) continue;
        for (const auto& lc : entry.levels)
            f1.add(cat.r_open.at({entry.node, lc.level}), lc.invest_cost);
    }
    for (const auto& entry : inst.capacity_levels.disposal) {
        if (c.node_is_existing(entry.node)) continue;
        for (const auto& lc : entry.levels)
            f1.add(cat.d_open.at({entry.node, lc.level}), lc.invest_cost);
    }

    // f2: residue transport risk plus site risk
    auto flow_risk = [&](const auto& flows, double TransportRisk::*rate_field) {
        for (const auto& [key, id] : flows) {
            const Arc* arc = inst.find_arc(key.first, key.second);
            if (arc) f2.add(id, arc->transport_risk.*rate_field);
        }
    };
    flow_risk(cat.kflow, &TransportRisk::tr);
    flow_risk(cat.zflow, &TransportRisk::td);
    flow_risk(cat.vflow, &TransportRisk::rd);
    if (opts.risk_mode == RiskMode::Coupled) {
        for (const auto& [key, id] : cat.ts) {
            const TreatmentCapEntry* entry =
                inst.treatment_caps(std::get<1>(key), std::get<2>(key));
            for (const auto& lc : entry->levels)
                if (lc.level == std::get<3>(key)) f2.add(id, lc.op_risk);
        }
        for (const auto& [key, id] : cat.rs) {
            const FacilityCapEntry* entry = inst.recycling_caps(key.first);
            for (const auto& lc : entry->levels)
                if (lc.level == key.second) f2.add(id, lc.op_risk);
        }
        for (const auto& [key, id] : cat.ds) {
            const FacilityCapEntry* entry = inst.disposal_caps(key.first);
            for (const auto& lc : entry->levels)
                if (lc.level == key.second) f2.add(id, lc.op_risk);
        }
    } else {
        for (const auto& w : inst.waste_types)
            for (const auto& t : c.treats) {
                double rate = 0.0;
                for (const auto& entry : inst.capacity_levels.treatment)
                    if (entry.node == t)
                        for (const auto& lc : entry.levels) rate += lc.op_risk;
                f2.add(cat.xt.at({w.id, t}), rate);
            }
        for (const auto& entry : inst.capacity_levels.recycling) {
            double rate = 0.0;
            for (const auto& lc : entry.levels) rate += lc.op_risk;
            f2.add(cat.xr.at(entry.node), rate);
        }
        for (const auto& entry : inst.capacity_levels.disposal) {
            double rate = 0.0;
            for (const auto& lc : entry.levels) rate += lc.op_risk;
            f2.add(cat.xd.at(entry.node), rate);
        }
    }

    // f3: facility operations plus residue transport emissions
    for (const auto& r : c.recs) f3.add(cat.xr.at(r), inst.co2_recycling(r));
    for (const auto& [key, id] : cat.ts)
        f3.add(id, inst.co2_treatment(std::get<1>(key), std::get<2>(key)));
    for (const auto& d : c.disps) f3.add(cat.xd.at(d), inst.co2_disposal(d));
    for (const auto& [key, id] : cat.kflow) {
        const Arc* arc = inst.find_arc(key.first, key.second);
        if (arc) f3.add(id, arc->co2_transport.tr * arc->distance);
    }
    for (const auto& [key, id] : cat.zflow) {
        const Arc* arc = inst.find_arc(key.first, key.second);
        if (arc) f3.add(id, arc->co2_transport.td * arc->distance);
    }
    for (const auto& [key, id] : cat.vflow) {
        const Arc* arc = inst.find_arc(key.first, key.second);
        if (arc) f3.add(id, arc->co2_transport.td * arc->distance);
    }

    out.objectives = {std::move(f1), std::move(f2), std::move(f3)};
    return out;
}

BuiltModel build_model(const Instance& inst, ObjectiveId objective,
                       const FormulationOptions& opts) {
    CoreModel core = build_core_model(inst, opts);
    core.model.set_objective(ObjSense::Min,
                             core.objectives[static_cast<std::size_t>(objective)], 0.0);
    return BuiltModel{std::move(core.model), std::move(core.catalog)};
}

}  // namespace hwlrp
