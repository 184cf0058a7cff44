#include "hwlrp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "hwlrp/moo.hpp"

namespace hwlrp {

namespace {

constexpr double kConfigLimit = 2e7;
constexpr double kSubsetLimit = 2e6;

struct OpeningSet {
    std::map<std::string, std::string> rec, disp;
    std::map<std::string, std::pair<std::string, std::string>> treat;
};

struct FacilityChoices {
    std::string node;
    char kind;  // 'r', 't', 'd'
    // one entry per choice; empty strings mean closed
    std::vector<std::pair<std::string, std::string>> options;  // (tech, level)
};

std::vector<FacilityChoices> opening_choices(const Instance& inst) {
    std::vector<FacilityChoices> out;
    for (const auto& n : inst.nodes) {
        if (is_recycling(n.kind)) {
            FacilityChoices fc{n.id, 'r', {}};
            const FacilityCapEntry* e = inst.recycling_caps(n.id);
            if (!is_existing(n.kind)) fc.options.push_back({"", ""});
            if (e)
                for (const auto& lc : e->levels) fc.options.push_back({"", lc.level});
            out.push_back(std::move(fc));
        } else if (is_disposal(n.kind)) {
            FacilityChoices fc{n.id, 'd', {}};
            const FacilityCapEntry* e = inst.disposal_caps(n.id);
            if (!is_existing(n.kind)) fc.options.push_back({"", ""});
            if (e)
                for (const auto& lc : e->levels) fc.options.push_back({"", lc.level});
            out.push_back(std::move(fc));
        } else if (is_treatment(n.kind)) {
            FacilityChoices fc{n.id, 't', {}};
            if (is_existing(n.kind)) {
                for (const auto& tech : inst.technologies) {
                    auto it = tech.availability.find(n.id);
                    if (it == tech.availability.end() || it->second != 1) continue;
                    const TreatmentCapEntry* e = inst.treatment_caps(n.id, tech.id);
                    if (e)
                        for (const auto& lc : e->levels)
                            fc.options.push_back({tech.id, lc.level});
                }
            } else {
                fc.options.push_back({"", ""});
                for (const auto& tech : inst.technologies) {
                    const TreatmentCapEntry* e = inst.treatment_caps(n.id, tech.id);
                    if (e)
                        for (const auto& lc : e->levels)
                            fc.options.push_back({tech.id, lc.level});
                }
            }
            out.push_back(std::move(fc));
        }
    }
    return out;
}

void for_each_opening_set(const std::vector<FacilityChoices>& choices,
                          const std::function<bool(const OpeningSet&)>& visit) {
    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
        OpeningSet os;
        for (std::size_t i = 0; i < choices.size(); ++i) {
            const auto& [tech, level] = choices[i].options[pick[i]];
            if (level.empty()) continue;  // closed
            if (choices[i].kind == 'r') os.rec[choices[i].node] = level;
            if (choices[i].kind == 'd') os.disp[choices[i].node] = level;
            if (choices[i].kind == 't') os.treat[choices[i].node] = {tech, level};
        }
        if (!visit(os)) return;
        std::size_t i = 0;
        for (; i < choices.size(); ++i) {
            if (++pick[i] < choices[i].options.size()) break;
            pick[i] = 0;
        }
        if (i == choices.size()) return;
    }
}

struct WasteServices {
    std::string waste;
    bool rec_only = false;
    std::vector<std::string> services;  // generation nodes with positive demand
    std::vector<std::string> vehicles;  // compatible, instance order
};

std::vector<WasteServices> collect_services(const Instance& inst) {
    std::vector<WasteServices> out;
    for (const auto& w : inst.waste_types) {
        WasteServices ws;
        ws.waste = w.id;
        ws.rec_only = inst.recyclable_only(w.id);
        for (const auto* g : inst.generation_nodes())
            if (inst.demand(w.id, g->id) > 0.0) ws.services.push_back(g->id);
        for (const auto& v : inst.vehicles)
            if (v.waste_compat.count(w.id) && v.waste_compat.at(w.id))
                ws.vehicles.push_back(v.id);
        out.push_back(std::move(ws));
    }
    return out;
}

// canonical filter for interchangeable vehicles: among identical ones,
// nonempty groups come first and their smallest service index increases
bool assignment_canonical(const Instance& inst, const WasteServices& ws,
                          const std::vector<int>& assign) {
    const int nv = static_cast<int>(ws.vehicles.size());
    std::vector<int> first(nv, -1);
    for (std::size_t s = 0; s < assign.size(); ++s)
        if (first[assign[s]] < 0) first[assign[s]] = static_cast<int>(s);
    for (int a = 0; a + 1 < nv; ++a) {
        const Vehicle* va = inst.find_vehicle(ws.vehicles[a]);
        const Vehicle* vb = inst.find_vehicle(ws.vehicles[a + 1]);
        const bool identical =
            va->capacity == vb->capacity && va->max_distance == vb->max_distance;
        if (!identical) continue;
        if (first[a] < 0 && first[a + 1] >= 0) return false;
        if (first[a] >= 0 && first[a + 1] >= 0 && first[a] > first[a + 1]) return false;
    }
    return true;
}

std::vector<std::string> open_terminals(const Instance& inst, const OpeningSet& os,
                                        const WasteServices& ws) {
    std::vector<std::string> out;
    if (ws.rec_only) {
        for (const auto& n : inst.nodes)
            if (is_recycling(n.kind) && os.rec.count(n.id)) out.push_back(n.id);
    } else {
        for (const auto& n : inst.nodes) {
            if (!is_treatment(n.kind)) continue;
            auto it = os.treat.find(n.id);
            if (it != os.treat.end() && inst.com(ws.waste, it->second.first))
                out.push_back(n.id);
        }
    }
    return out;
}

double factorial(std::size_t k) {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f;
}

// enumerate assignments of services to compatible vehicles; calls fn with
// per-vehicle groups (service indices, ascending)
void for_each_assignment(const Instance& inst, const WasteServices& ws,
                         const std::function<bool(const std::vector<std::vector<int>>&)>& fn) {
    const int nv = static_cast<int>(ws.vehicles.size());
    const std::size_t ns = ws.services.size();
    if (ns == 0) {
        std::vector<std::vector<int>> groups(static_cast<std::size_t>(nv));
        fn(groups);
        return;
    }
    if (nv == 0) return;  // positive demand but no vehicle: no assignment exists
    std::vector<int> assign(ns, 0);
    while (true) {
        if (assignment_canonical(inst, ws, assign)) {
            std::vector<std::vector<int>> groups(static_cast<std::size_t>(nv));
            for (std::size_t s = 0; s < ns; ++s)
                groups[static_cast<std::size_t>(assign[s])].push_back(
                    static_cast<int>(s));
            if (!fn(groups)) return;
        }
        std::size_t i = 0;
        for (; i < ns; ++i) {
            if (++assign[i] < nv) break;
            assign[i] = 0;
        }
        if (i == ns) return;
    }
}

}  // namespace

double count_configs(const Instance& inst) {
    const auto choices = opening_choices(inst);
    const auto services = collect_services(inst);
    double total = 0.0;
    for_each_opening_set(choices, [&](const OpeningSet& os) {
        double prod = 1.0;
        for (const auto& ws : services) {
            const auto terms = open_terminals(inst, os, ws);
            double cw = 0.0;
            for_each_assignment(inst, ws, [&](const std::vector<std::vector<int>>& groups) {
                double term = 1.0;
                for (const auto& g : groups) {
                    if (g.empty()) continue;
                    term *= factorial(g.size()) * static_cast<double>(terms.size());
                }
                cw += term;
                return true;
            });
            prod *= cw;
        }
        total += prod;
        return true;
    });
    return total;
}

void enumerate_configs(const Instance& inst,
                       const std::function<bool(const DiscreteConfig&)>& visit) {
    if (inst.depots().size() != 1)
        throw std::invalid_argument("oracle supports single-depot instances");
    const double counted = count_configs(inst);
    if (counted > kConfigLimit) throw OracleIntractable(counted, kConfigLimit);

    const auto choices = opening_choices(inst);
    const auto services = collect_services(inst);

    bool keep_going = true;
    for_each_opening_set(choices, [&](const OpeningSet& os) {
        DiscreteConfig base;
        base.rec_level = os.rec;
        base.disp_level = os.disp;
        base.treat_choice = os.treat;

        // per-waste route plans, expanded depth first
        std::function<bool(std::size_t, DiscreteConfig&)> expand =
            [&](std::size_t wi, DiscreteConfig& cfg) -> bool {
            if (wi == services.size()) return visit(cfg);
            const WasteServices& ws = services[wi];
            const auto terms = open_terminals(inst, os, ws);
            bool cont = true;
            for_each_assignment(inst, ws, [&](const std::vector<std::vector<int>>& groups) {
                // orders per nonempty group, then terminals
                std::vector<std::size_t> used;
                for (std::size_t v = 0; v < groups.size(); ++v)
                    if (!groups[v].empty()) used.push_back(v);
                if (!used.empty() && terms.empty()) return true;  // structurally impossible

                std::vector<std::vector<int>> perm(groups.size());
                for (std::size_t v = 0; v < groups.size(); ++v) perm[v] = groups[v];

                std::function<bool(std::size_t)> orders = [&](std::size_t ui) -> bool {
                    if (ui == used.size()) {
                        // terminals odometer over used vehicles
                        std::vector<std::size_t> tpick(used.size(), 0);
                        while (true) {
                            const std::size_t base_routes = cfg.routes.size();
                            for (std::size_t u = 0; u < used.size(); ++u) {
                                DiscreteConfig::VehicleRoute r;
                                r.vehicle = ws.vehicles[used[u]];
                                for (int sidx : perm[used[u]])
                                    r.gens.push_back(
                                        ws.services[static_cast<std::size_t>(sidx)]);
                                r.terminal = terms[tpick[u]];
                                cfg.routes.push_back(std::move(r));
                            }
                            const bool ok = expand(wi + 1, cfg);
                            cfg.routes.resize(base_routes);
                            if (!ok) return false;
                            std::size_t u = 0;
                            for (; u < used.size(); ++u) {
                                if (++tpick[u] < terms.size()) break;
                                tpick[u] = 0;
                            }
                            if (u == used.size()) return true;
                        }
                    }
                    std::vector<int>& grp = perm[used[ui]];
                    std::sort(grp.begin(), grp.end());
                    do {
                        if (!orders(ui + 1)) return false;
                    } while (std::next_permutation(grp.begin(), grp.end()));
                    return true;
                };
                cont = orders(0);
                return cont;
            });
            return cont;
        };

        keep_going = expand(0, base);
        return keep_going;
    });
}

// ---------------------------------------------------------------------------
// continuous resolution

namespace {

struct Profile {
    std::map<std::pair<std::string, std::string>, double> xt;  // (waste, node)
    std::map<std::string, double> direct;                      // recycling node

    bool operator<(const Profile& o) const {
        if (xt != o.xt) return xt < o.xt;
        return direct < o.direct;
    }
};

struct FlowLp {
    LinearModel model;
    std::map<std::pair<std::string, std::string>, int> kf, zf, vf;
    std::map<std::string, int> xr_var, xd_var;
    std::array<LinExpr, 3> fexpr;
    std::array<double, 3> fconst{0.0, 0.0, 0.0};
};

double level_field(const std::vector<LevelCap>& levels, const std::string& level,
                   double LevelCap::*field) {
    for (const auto& lc : levels)
        if (lc.level == level) return lc.*field;
    return 0.0;
}

std::optional<FlowLp> build_flow_lp(const Instance& inst, const FormulationOptions& opts,
                                    const OpeningSet& os, const Profile& prof) {
    FlowLp lp;
    const double inf = std::numeric_limits<double>::infinity();

    // fixed-mass checks on the treatment side
    std::map<std::string, double> treat_total;
    for (const auto& [key, v] : prof.xt) treat_total[key.second] += v;
    for (const auto& [node, choice] : os.treat) {
        const TreatmentCapEntry* e = inst.treatment_caps(node, choice.first);
        if (!e) return std::nullopt;
        const double total = treat_total.count(node) ? treat_total.at(node) : 0.0;
        const double cap = level_field(e->levels, choice.second, &LevelCap::max_capacity);
        if (total > cap + 1e-9) return std::nullopt;
        const Node* n = inst.find_node(node);
        if (n && !is_existing(n->kind) && total < e->min_required - 1e-9)
            return std::nullopt;
    }
    for (const auto& [key, v] : prof.xt)
        if (!os.treat.count(key.second)) return std::nullopt;
    for (const auto& [node, v] : prof.direct)
        if (!os.rec.count(node)) return std::nullopt;

    // residue totals per open treatment node
    std::map<std::string, double> k_total, z_total;
    for (const auto& [key, v] : prof.xt) {
        const auto& choice = os.treat.at(key.second);
        const double red = inst.mass_reduction_of(key.first, choice.first);
        const double beta = inst.beta(key.first, choice.first);
        k_total[key.second] += v * (1.0 - red) * beta;
        z_total[key.second] += v * (1.0 - red) * (1.0 - beta);
    }

    // variables
    for (const auto& [t, choice] : os.treat) {
        (void)choice;
        for (const auto& [r, lvl] : os.rec) {
            (void)lvl;
            if (inst.find_arc(t, r))
                lp.kf[{t, r}] = lp.model.add_variable("k_" + t + "_" + r, 0.0, inf,
                                                      VarType::Continuous);
        }
        for (const auto& [d, lvl] : os.disp) {
            (void)lvl;
            if (inst.find_arc(t, d))
                lp.zf[{t, d}] = lp.model.add_variable("z_" + t + "_" + d, 0.0, inf,
                                                      VarType::Continuous);
        }
    }
    for (const auto& [r, lvl] : os.rec) {
        (void)lvl;
        for (const auto& [d, dlvl] : os.disp) {
            (void)dlvl;
            if (inst.find_arc(r, d))
                lp.vf[{r, d}] = lp.model.add_variable("v_" + r + "_" + d, 0.0, inf,
                                                      VarType::Continuous);
        }
    }
    for (const auto& [r, lvl] : os.rec) {
        (void)lvl;
        lp.xr_var[r] = lp.model.add_variable("xr_" + r, 0.0, inf, VarType::Continuous);
    }
    for (const auto& [d, lvl] : os.disp) {
        (void)lvl;
        lp.xd_var[d] = lp.model.add_variable("xd_" + d, 0.0, inf, VarType::Continuous);
    }

    // conservation rows
    for (const auto& [t, choice] : os.treat) {
        (void)choice;
        LinExpr krow, zrow;
        for (const auto& [key, id] : lp.kf)
            if (key.first == t) krow.add(id, 1.0);
        for (const auto& [key, id] : lp.zf)
            if (key.first == t) zrow.add(id, 1.0);
        const double kt = k_total.count(t) ? k_total.at(t) : 0.0;
        const double zt = z_total.count(t) ? z_total.at(t) : 0.0;
        if (krow.empty() && kt > 1e-9) return std::nullopt;
        if (zrow.empty() && zt > 1e-9) return std::nullopt;
        if (!krow.empty()) lp.model.add_constraint("k_out_" + t, krow, ConstraintSense::EQ, kt);
        if (!zrow.empty()) lp.model.add_constraint("z_out_" + t, zrow, ConstraintSense::EQ, zt);
    }
    for (const auto& [r, lvl] : os.rec) {
        const FacilityCapEntry* e = inst.recycling_caps(r);
        if (!e) return std::nullopt;
        LinExpr def;
        def.add(lp.xr_var.at(r), 1.0);
        for (const auto& [key, id] : lp.kf)
            if (key.second == r) def.add(id, -1.0);
        const double direct = prof.direct.count(r) ? prof.direct.at(r) : 0.0;
        lp.model.add_constraint("xr_def_" + r, def, ConstraintSense::EQ, direct);
        LinExpr cap;
        cap.add(lp.xr_var.at(r), 1.0);
        lp.model.add_constraint("xr_cap_" + r, cap, ConstraintSense::LE,
                                level_field(e->levels, lvl, &LevelCap::max_capacity));
        const Node* n = inst.find_node(r);
        if (n && !is_existing(n->kind)) {
            LinExpr min_ex;
            min_ex.add(lp.xr_var.at(r), 1.0);
            lp.model.add_constraint("xr_min_" + r, min_ex, ConstraintSense::GE,
                                    e->min_required);
        }
        LinExpr vrow;
        vrow.add(lp.xr_var.at(r), 1.0 - inst.gamma(r));
        for (const auto& [key, id] : lp.vf)
            if (key.first == r) vrow.add(id, -1.0);
        lp.model.add_constraint("v_out_" + r, vrow, ConstraintSense::EQ, 0.0);
    }
    for (const auto& [d, lvl] : os.disp) {
        const FacilityCapEntry* e = inst.disposal_caps(d);
        if (!e) return std::nullopt;
        LinExpr def;
        def.add(lp.xd_var.at(d), 1.0);
        for (const auto& [key, id] : lp.zf)
            if (key.second == d) def.add(id, -1.0);
        for (const auto& [key, id] : lp.vf)
            if (key.second == d) def.add(id, -1.0);
        lp.model.add_constraint("xd_def_" + d, def, ConstraintSense::EQ, 0.0);
        LinExpr cap;
        cap.add(lp.xd_var.at(d), 1.0);
        lp.model.add_constraint("xd_cap_" + d, cap, ConstraintSense::LE,
                                level_field(e->levels, lvl, &LevelCap::max_capacity));
        const Node* n = inst.find_node(d);
        if (n && !is_existing(n->kind)) {
            LinExpr min_ex;
            min_ex.add(lp.xd_var.at(d), 1.0);
            lp.model.add_constraint("xd_min_" + d, min_ex, ConstraintSense::GE,
                                    e->min_required);
        }
    }

    // risk caps
    auto risk_rows = [&](const std::map<std::pair<std::string, std::string>, int>& flows,
                         double TransportRisk::*field, const char* tag) {
        for (const auto& [key, id] : flows) {
            const Arc* arc = inst.find_arc(key.first, key.second);
            if (!arc || !arc->risk_cap) continue;
            LinExpr ex;
            ex.add(id, arc->transport_risk.*field);
            lp.model.add_constraint(std::string("risk_") + tag + "_" + key.first + "_" +
                                        key.second,
                                    ex, ConstraintSense::LE, *arc->risk_cap);
        }
    };
    risk_rows(lp.kf, &TransportRisk::tr, "k");
    risk_rows(lp.zf, &TransportRisk::td, "z");
    risk_rows(lp.vf, &TransportRisk::rd, "v");

    // objective parts
    auto arc_of = [&](const std::pair<std::string, std::string>& key) {
        return inst.find_arc(key.first, key.second);
    };
    for (const auto& [key, id] : lp.kf) {
        const Arc* a = arc_of(key);
        lp.fexpr[0].add(id, a->unit_cost);
        lp.fexpr[1].add(id, a->transport_risk.tr);
        lp.fexpr[2].add(id, a->co2_transport.tr * a->distance);
    }
    for (const auto& [key, id] : lp.zf) {
        const Arc* a = arc_of(key);
        lp.fexpr[0].add(id, a->unit_cost);
        lp.fexpr[1].add(id, a->transport_risk.td);
        lp.fexpr[2].add(id, a->co2_transport.td * a->distance);
    }
    for (const auto& [key, id] : lp.vf) {
        const Arc* a = arc_of(key);
        lp.fexpr[0].add(id, a->unit_cost);
        lp.fexpr[1].add(id, a->transport_risk.rd);
        lp.fexpr[2].add(id, a->co2_transport.td * a->distance);
    }

    // establishment cost of newly opened facilities
    for (const auto& [node, choice] : os.treat) {
        const Node* n = inst.find_node(node);
        if (n && is_existing(n->kind)) continue;
        const TreatmentCapEntry* e = inst.treatment_caps(node, choice.first);
        lp.fconst[0] += level_field(e->levels, choice.second, &LevelCap::invest_cost);
    }
    for (const auto& [node, lvl] : os.rec) {
        const Node* n = inst.find_node(node);
        if (n && is_existing(n->kind)) continue;
        lp.fconst[0] +=
            level_field(inst.recycling_caps(node)->levels, lvl, &LevelCap::invest_cost);
    }
    for (const auto& [node, lvl] : os.disp) {
        const Node* n = inst.find_node(node);
        if (n && is_existing(n->kind)) continue;
        lp.fconst[0] +=
            level_field(inst.disposal_caps(node)->levels, lvl, &LevelCap::invest_cost);
    }

    // site risk and operations CO2
    if (opts.risk_mode == RiskMode::Coupled) {
        for (const auto& [node, total] : treat_total) {
            const auto& choice = os.treat.at(node);
            const TreatmentCapEntry* e = inst.treatment_caps(node, choice.first);
            lp.fconst[1] += level_field(e->levels, choice.second, &LevelCap::op_risk) * total;
        }
        for (const auto& [r, lvl] : os.rec)
            lp.fexpr[1].add(lp.xr_var.at(r),
                            level_field(inst.recycling_caps(r)->levels, lvl,
                                        &LevelCap::op_risk));
        for (const auto& [d, lvl] : os.disp)
            lp.fexpr[1].add(lp.xd_var.at(d),
                            level_field(inst.disposal_caps(d)->levels, lvl,
                                        &LevelCap::op_risk));
    } else {
        for (const auto& [node, total] : treat_total) {
            double rate = 0.0;
            for (const auto& entry : inst.capacity_levels.treatment)
                if (entry.node == node)
                    for (const auto& lc : entry.levels) rate += lc.op_risk;
            lp.fconst[1] += rate * total;
        }
        for (const auto& [r, lvl] : os.rec) {
            (void)lvl;
            double rate = 0.0;
            for (const auto& lc : inst.recycling_caps(r)->levels) rate += lc.op_risk;
            lp.fexpr[1].add(lp.xr_var.at(r), rate);
        }
        for (const auto& [d, lvl] : os.disp) {
            (void)lvl;
            double rate = 0.0;
            for (const auto& lc : inst.disposal_caps(d)->levels) rate += lc.op_risk;
            lp.fexpr[1].add(lp.xd_var.at(d), rate);
        }
    }
    for (const auto& [key, v] : prof.xt)
        lp.fconst[2] += inst.co2_treatment(key.second, os.treat.at(key.second).first) * v;
    for (const auto& [r, lvl] : os.rec) {
        (void)lvl;
        lp.fexpr[2].add(lp.xr_var.at(r), inst.co2_recycling(r));
    }
    for (const auto& [d, lvl] : os.disp) {
        (void)lvl;
        lp.fexpr[2].add(lp.xd_var.at(d), inst.co2_disposal(d));
    }

    return lp;
}

struct RoutePlan {
    std::vector<DiscreteConfig::VehicleRoute> routes;  // chosen orders
    double route_cost = 0.0;                           // f1 unload-leg part
};

// best feasible visit order for one route: minimizes the unload-leg cost
// c(last, terminal) * mass subject to the tour-length limit
std::optional<std::pair<std::vector<std::string>, double>> best_order(
    const Instance& inst, const std::string& depot, const std::string& vehicle,
    std::vector<std::string> gens, const std::string& terminal) {
    const Vehicle* veh = inst.find_vehicle(vehicle);
    const std::string waste = inst.vehicle_waste(*veh);
    double mass = 0.0;
    for (const auto& g : gens) mass += inst.demand(waste, g);
    if (mass > veh->capacity + 1e-9) return std::nullopt;

    std::sort(gens.begin(), gens.end());
    std::optional<std::pair<std::vector<std::string>, double>> best;
    do {
        double len = 0.0;
        bool ok = true;
        auto leg = [&](const std::string& a, const std::string& b) {
            auto d = inst.distance(a, b, vehicle);
            if (!d) {
                ok = false;
                return;
            }
            len += *d;
        };
        leg(depot, gens.front());
        for (std::size_t i = 0; ok && i + 1 < gens.size(); ++i) leg(gens[i], gens[i + 1]);
        if (ok) leg(gens.back(), terminal);
        if (ok) leg(terminal, depot);
        if (!ok || len > veh->max_distance + 1e-9) continue;
        const Arc* last_arc = inst.find_arc(gens.back(), terminal);
        const double cost = last_arc ? last_arc->unit_cost * mass : 0.0;
        if (!best || cost < best->second - 1e-15)
            best = std::make_pair(gens, cost);
    } while (std::next_permutation(gens.begin(), gens.end()));
    return best;
}

struct PlanAccumulator {
    Profile profile;
    RoutePlan plan;
};

// enumerate per-waste route plans for a fixed opening set; yields the
// complete profile + plan for all waste types combined
void for_each_plan(const Instance& inst, const OpeningSet& os,
                   const std::vector<WasteServices>& services, const std::string& depot,
                   const std::function<void(const PlanAccumulator&)>& fn) {
    PlanAccumulator acc;
    std::function<void(std::size_t)> rec = [&](std::size_t wi) {
        if (wi == services.size()) {
            fn(acc);
            return;
        }
        const WasteServices& ws = services[wi];
        const auto terms = open_terminals(inst, os, ws);
        for_each_assignment(inst, ws, [&](const std::vector<std::vector<int>>& groups) {
            std::vector<std::size_t> used;
            for (std::size_t v = 0; v < groups.size(); ++v)
                if (!groups[v].empty()) used.push_back(v);
            if (used.empty()) {
                rec(wi + 1);
                return true;
            }
            if (terms.empty()) return true;  // no opened compatible facility

            // terminal odometer; per (group, terminal) the best order is
            // computed once
            std::vector<std::size_t> tpick(used.size(), 0);
            while (true) {
                bool feasible = true;
                const Profile saved_profile = acc.profile;
                const RoutePlan saved_plan = acc.plan;
                for (std::size_t u = 0; u < used.size() && feasible; ++u) {
                    const auto& group = groups[used[u]];
                    std::vector<std::string> gens;
                    for (int sidx : group)
                        gens.push_back(ws.services[static_cast<std::size_t>(sidx)]);
                    const std::string& terminal = terms[tpick[u]];
                    auto ordered =
                        best_order(inst, depot, ws.vehicles[used[u]], gens, terminal);
                    if (!ordered) {
                        feasible = false;
                        break;
                    }
                    double mass = 0.0;
                    for (const auto& g : ordered->first) mass += inst.demand(ws.waste, g);
                    DiscreteConfig::VehicleRoute r;
                    r.vehicle = ws.vehicles[used[u]];
                    r.gens = ordered->first;
                    r.terminal = terminal;
                    acc.plan.routes.push_back(std::move(r));
                    acc.plan.route_cost += ordered->second;
                    if (ws.rec_only)
                        acc.profile.direct[terminal] += mass;
                    else
                        acc.profile.xt[{ws.waste, terminal}] += mass;
                }
                if (feasible) rec(wi + 1);
                acc.profile = saved_profile;
                acc.plan = saved_plan;

                std::size_t u = 0;
                for (; u < used.size(); ++u) {
                    if (++tpick[u] < terms.size()) break;
                    tpick[u] = 0;
                }
                if (u == used.size()) break;
            }
            return true;
        });
    };
    rec(0);
}

bool eq14_globally_feasible(const Instance& inst) {
    for (const auto& w : inst.waste_types)
        for (const auto& [node, d] : w.demand) {
            (void)node;
            if (d <= 0.0) continue;
            for (const auto& v : inst.vehicles)
                if (v.waste_compat.count(w.id) && v.waste_compat.at(w.id) &&
                    d > v.capacity + 1e-9)
                    return false;
        }
    return true;
}

Solution build_oracle_solution(const Instance& inst, const FormulationOptions& opts,
                               const OpeningSet& os, const RoutePlan& plan,
                               const FlowLp& lp, const Assignment& flows,
                               const std::string& depot) {
    Solution sol;
    for (const auto& [node, lvl] : os.rec) sol.openings.push_back({node, "recycling", lvl, ""});
    for (const auto& [node, choice] : os.treat)
        sol.openings.push_back({node, "treatment", choice.second, choice.first});
    for (const auto& [node, lvl] : os.disp) sol.openings.push_back({node, "disposal", lvl, ""});

    std::map<std::string, const DiscreteConfig::VehicleRoute*> by_vehicle;
    for (const auto& r : plan.routes) by_vehicle[r.vehicle] = &r;
    for (const auto& veh : inst.vehicles) {
        Route route;
        route.vehicle = veh.id;
        auto it = by_vehicle.find(veh.id);
        if (it != by_vehicle.end()) {
            const auto* vr = it->second;
            const std::string waste = inst.vehicle_waste(veh);
            route.sequence.push_back(depot);
            double load = 0.0;
            for (const auto& g : vr->gens) {
                route.sequence.push_back(g);
                load += inst.demand(waste, g);
                route.load_after.push_back(load);
            }
            route.sequence.push_back(vr->terminal);
            route.sequence.push_back(depot);
            route.load = load;
            for (std::size_t i = 0; i + 1 < route.sequence.size(); ++i) {
                auto d = inst.distance(route.sequence[i], route.sequence[i + 1], veh.id);
                route.length += d ? *d : 0.0;
            }
        }
        sol.routes.push_back(std::move(route));
    }

    for (const auto& [key, id] : lp.kf)
        if (flows[id] > 1e-11) sol.kflow[key] = flows[id];
    for (const auto& [key, id] : lp.zf)
        if (flows[id] > 1e-11) sol.zflow[key] = flows[id];
    for (const auto& [key, id] : lp.vf)
        if (flows[id] > 1e-11) sol.vflow[key] = flows[id];
    for (const auto& [node, id] : lp.xr_var)
        if (flows[id] > 1e-11) sol.xr[node] = flows[id];
    for (const auto& [node, id] : lp.xd_var)
        if (flows[id] > 1e-11) sol.xd[node] = flows[id];

    // treated masses from the routes
    for (const auto& r : sol.routes) {
        if (r.sequence.size() < 4) continue;
        const std::string& terminal = r.sequence[r.sequence.size() - 2];
        const Node* n = inst.find_node(terminal);
        if (n && is_treatment(n->kind)) {
            const Vehicle* veh = inst.find_vehicle(r.vehicle);
            sol.xt[{inst.vehicle_waste(*veh), terminal}] += r.load;
        }
    }

    sol.objectives = evaluate_objectives(inst, sol, opts);
    return sol;
}

}  // namespace

OracleResult oracle_optimum(const Instance& inst, ObjectiveId objective,
                            const FormulationOptions& opts) {
    if (inst.depots().size() != 1)
        throw std::invalid_argument("oracle supports single-depot instances");
    const double counted = count_configs(inst);
    if (counted > kConfigLimit) throw OracleIntractable(counted, kConfigLimit);

    OracleResult out;
    if (!eq14_globally_feasible(inst)) return out;  // matches the load-window rows

    const std::string depot = inst.depots()[0]->id;
    const auto choices = opening_choices(inst);
    const auto services = collect_services(inst);
    const std::size_t oi = static_cast<std::size_t>(objective);

    SolveParams lp_params;
    bool found = false;
    double best_value = 0.0;
    std::optional<OpeningSet> best_os;
    std::optional<RoutePlan> best_plan;
    std::optional<FlowLp> best_lp;
    std::optional<Assignment> best_flows;

    for_each_opening_set(choices, [&](const OpeningSet& os) {
        // profiles deduped to their cheapest route plan
        std::map<Profile, RoutePlan> plans;
        for_each_plan(inst, os, services, depot, [&](const PlanAccumulator& acc) {
            auto it = plans.find(acc.profile);
            if (it == plans.end() || acc.plan.route_cost < it->second.route_cost - 1e-15)
                plans[acc.profile] = acc.plan;
        });
        for (const auto& [profile, plan] : plans) {
            auto lp = build_flow_lp(inst, opts, os, profile);
            if (!lp) continue;
            LinearModel model = lp->model;
            model.set_objective(ObjSense::Min, lp->fexpr[oi], 0.0);
            SolveResult res = solve_lp(model, lp_params);
            if (res.status != SolveStatus::Optimal) continue;
            double value = *res.objective + lp->fconst[oi];
            if (objective == ObjectiveId::F1) value += plan.route_cost;
            if (!found || value < best_value - 1e-12) {
                found = true;
                best_value = value;
                best_os = os;
                best_plan = plan;
                best_lp = std::move(lp);
                best_flows = *res.assignment;
            }
        }
        return true;
    });

    if (!found) return out;  // infeasible
    out.status = SolveStatus::Optimal;
    out.solution =
        build_oracle_solution(inst, opts, *best_os, *best_plan, *best_lp, *best_flows, depot);
    out.value = out.solution.objectives[oi];
    return out;
}

std::vector<std::array<double, 3>> oracle_pareto(const Instance& inst,
                                                 const FormulationOptions& opts) {
    if (inst.depots().size() != 1)
        throw std::invalid_argument("oracle supports single-depot instances");
    const double counted = count_configs(inst);
    if (counted > kConfigLimit) throw OracleIntractable(counted, kConfigLimit);
    if (!eq14_globally_feasible(inst)) return {};

    const std::string depot = inst.depots()[0]->id;
    const auto choices = opening_choices(inst);
    const auto services = collect_services(inst);

    std::vector<std::array<double, 3>> image;
    for_each_opening_set(choices, [&](const OpeningSet& os) {
        std::map<Profile, RoutePlan> plans;
        for_each_plan(inst, os, services, depot, [&](const PlanAccumulator& acc) {
            auto it = plans.find(acc.profile);
            if (it == plans.end() || acc.plan.route_cost < it->second.route_cost - 1e-15)
                plans[acc.profile] = acc.plan;
        });
        for (const auto& [profile, plan] : plans) {
            auto lp = build_flow_lp(inst, opts, os, profile);
            if (!lp) continue;
            std::vector<Assignment> vertices;
            try {
                vertices = enumerate_vertices(lp->model, 1e-7);
            } catch (const OracleIntractable&) {
                throw;
            }
            for (const auto& vtx : vertices) {
                std::array<double, 3> f;
                for (int i = 0; i < 3; ++i)
                    f[static_cast<std::size_t>(i)] =
                        lp->fexpr[static_cast<std::size_t>(i)].value_at(vtx.values) +
                        lp->fconst[static_cast<std::size_t>(i)];
                f[0] += plan.route_cost;
                image.push_back(f);
            }
        }
        return true;
    });

    return nondominated_filter(image);
}

// ---------------------------------------------------------------------------
// polytope vertex enumeration

namespace {

struct DenseRow {
    std::vector<double> a;
    double b = 0.0;
};

// row echelon solve of E x = b; returns particular solution and nullspace
bool solve_equalities(std::vector<DenseRow>& eq, int n, std::vector<double>& x0,
                      std::vector<std::vector<double>>& nullspace) {
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < static_cast<int>(eq.size()); ++col) {
        int piv = -1;
        double best = 1e-11;
        for (int r = row; r < static_cast<int>(eq.size()); ++r)
            if (std::abs(eq[static_cast<std::size_t>(r)].a[static_cast<std::size_t>(col)]) >
                best) {
                best = std::abs(eq[static_cast<std::size_t>(r)].a[static_cast<std::size_t>(col)]);
                piv = r;
            }
        if (piv < 0) continue;
        std::swap(eq[static_cast<std::size_t>(piv)], eq[static_cast<std::size_t>(row)]);
        const double p = eq[static_cast<std::size_t>(row)].a[static_cast<std::size_t>(col)];
        for (int c = 0; c < n; ++c) eq[static_cast<std::size_t>(row)].a[static_cast<std::size_t>(c)] /= p;
        eq[static_cast<std::size_t>(row)].b /= p;
        for (int r = 0; r < static_cast<int>(eq.size()); ++r) {
            if (r == row) continue;
            const double f = eq[static_cast<std::size_t>(r)].a[static_cast<std::size_t>(col)];
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c)
                eq[static_cast<std::size_t>(r)].a[static_cast<std::size_t>(c)] -=
                    f * eq[static_cast<std::size_t>(row)].a[static_cast<std::size_t>(c)];
            eq[static_cast<std::size_t>(r)].b -= f * eq[static_cast<std::size_t>(row)].b;
        }
        pivot_col.push_back(col);
        ++row;
    }
    // consistency of the eliminated rows
    for (int r = row; r < static_cast<int>(eq.size()); ++r)
        if (std::abs(eq[static_cast<std::size_t>(r)].b) > 1e-7) return false;

    x0.assign(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < row; ++r)
        x0[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(r)])] =
            eq[static_cast<std::size_t>(r)].b;

    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
    for (int f = 0; f < n; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        std::vector<double> dir(static_cast<std::size_t>(n), 0.0);
        dir[static_cast<std::size_t>(f)] = 1.0;
        for (int r = 0; r < row; ++r)
            dir[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(r)])] =
                -eq[static_cast<std::size_t>(r)].a[static_cast<std::size_t>(f)];
        nullspace.push_back(std::move(dir));
    }
    return true;
}

}  // namespace

std::vector<Assignment> enumerate_vertices(const LinearModel& model, double tol) {
    const int n = static_cast<int>(model.num_variables());
    std::vector<DenseRow> equalities;
    std::vector<DenseRow> inequalities;  // a.x <= b

    auto dense_of = [&](const LinExpr& expr) {
        std::vector<double> a(static_cast<std::size_t>(n), 0.0);
        for (const auto& [v, c] : expr.terms()) a[static_cast<std::size_t>(v)] = c;
        return a;
    };

    for (const auto& con : model.constraints()) {
        DenseRow row{dense_of(con.expr), con.rhs};
        switch (con.sense) {
            case ConstraintSense::EQ: equalities.push_back(std::move(row)); break;
            case ConstraintSense::LE: inequalities.push_back(std::move(row)); break;
            case ConstraintSense::GE:
                for (auto& v : row.a) v = -v;
                row.b = -row.b;
                inequalities.push_back(std::move(row));
                break;
        }
    }
    for (int j = 0; j < n; ++j) {
        const Variable& v = model.variables()[static_cast<std::size_t>(j)];
        if (v.lb == v.ub) {
            DenseRow row;
            row.a.assign(static_cast<std::size_t>(n), 0.0);
            row.a[static_cast<std::size_t>(j)] = 1.0;
            row.b = v.lb;
            equalities.push_back(std::move(row));
            continue;
        }
        if (std::isfinite(v.lb)) {
            DenseRow row;
            row.a.assign(static_cast<std::size_t>(n), 0.0);
            row.a[static_cast<std::size_t>(j)] = -1.0;
            row.b = -v.lb;
            inequalities.push_back(std::move(row));
        }
        if (std::isfinite(v.ub)) {
            DenseRow row;
            row.a.assign(static_cast<std::size_t>(n), 0.0);
            row.a[static_cast<std::size_t>(j)] = 1.0;
            row.b = v.ub;
            inequalities.push_back(std::move(row));
        }
    }

    std::vector<double> x0;
    std::vector<std::vector<double>> nullspace;
    if (!solve_equalities(equalities, n, x0, nullspace)) return {};
    const int d = static_cast<int>(nullspace.size());

    // project inequalities to the nullspace coordinates
    struct TRow {
        std::vector<double> a;
        double b;
    };
    std::vector<TRow> rows;
    for (const auto& ineq : inequalities) {
        TRow tr;
        tr.a.assign(static_cast<std::size_t>(d), 0.0);
        double shift = 0.0;
        for (int j = 0; j < n; ++j) shift += ineq.a[static_cast<std::size_t>(j)] * x0[static_cast<std::size_t>(j)];
        tr.b = ineq.b - shift;
        double norm = 0.0;
        for (int t = 0; t < d; ++t) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += ineq.a[static_cast<std::size_t>(j)] *
                       nullspace[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            tr.a[static_cast<std::size_t>(t)] = acc;
            norm = std::max(norm, std::abs(acc));
        }
        if (norm < 1e-11) {
            if (tr.b < -tol) return {};  // constant row violated
            continue;
        }
        rows.push_back(std::move(tr));
    }

    auto feasible_t = [&](const std::vector<double>& t) {
        for (const auto& r : rows) {
            double lhs = 0.0;
            for (int i = 0; i < d; ++i) lhs += r.a[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
            if (lhs > r.b + tol * std::max(1.0, std::abs(r.b))) return false;
        }
        return true;
    };
    auto to_x = [&](const std::vector<double>& t) {
        Assignment a;
        a.values = x0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < n; ++j)
                a.values[static_cast<std::size_t>(j)] +=
                    t[static_cast<std::size_t>(i)] *
                    nullspace[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return a;
    };

    std::vector<Assignment> found;
    auto push_unique = [&](const Assignment& a) {
        for (const auto& prev : found) {
            double diff = 0.0;
            for (int j = 0; j < n; ++j)
                diff = std::max(diff, std::abs(prev.values[static_cast<std::size_t>(j)] -
                                               a.values[static_cast<std::size_t>(j)]));
            if (diff <= 1e-6) return;
        }
        found.push_back(a);
    };

    if (d == 0) {
        std::vector<double> t;
        if (feasible_t(t)) push_unique(to_x(t));
        return found;
    }

    const int q = static_cast<int>(rows.size());
    if (q < d) return {};  // unbounded in some direction, no vertex
    double subsets = 1.0;
    for (int i = 0; i < d; ++i) subsets *= static_cast<double>(q - i) / (i + 1);
    if (subsets > kSubsetLimit) throw OracleIntractable(subsets, kSubsetLimit);

    std::vector<int> comb(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) comb[static_cast<std::size_t>(i)] = i;
    while (true) {
        // solve the d x d active system
        std::vector<std::vector<double>> mat(static_cast<std::size_t>(d));
        std::vector<double> rhs(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            mat[static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(comb[static_cast<std::size_t>(i)])].a;
            rhs[static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(comb[static_cast<std::size_t>(i)])].b;
        }
        bool singular = false;
        for (int col = 0; col < d && !singular; ++col) {
            int piv = -1;
            double best = 1e-10;
            for (int r = col; r < d; ++r)
                if (std::abs(mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) > best) {
                    best = std::abs(mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]);
                    piv = r;
                }
            if (piv < 0) {
                singular = true;
                break;
            }
            std::swap(mat[static_cast<std::size_t>(piv)], mat[static_cast<std::size_t>(col)]);
            std::swap(rhs[static_cast<std::size_t>(piv)], rhs[static_cast<std::size_t>(col)]);
            for (int r = 0; r < d; ++r) {
                if (r == col) continue;
                const double f = mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                                 mat[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
                if (f == 0.0) continue;
                for (int c2 = col; c2 < d; ++c2)
                    mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] -=
                        f * mat[static_cast<std::size_t>(col)][static_cast<std::size_t>(c2)];
                rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
            }
        }
        if (!singular) {
            std::vector<double> t(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                t[static_cast<std::size_t>(i)] =
                    rhs[static_cast<std::size_t>(i)] / mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
            if (feasible_t(t)) push_unique(to_x(t));
        }
        // next combination
        int i = d - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == q - d + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int j2 = i + 1; j2 < d; ++j2)
            comb[static_cast<std::size_t>(j2)] = comb[static_cast<std::size_t>(j2 - 1)] + 1;
    }
    return found;
}

}  // namespace hwlrp
