#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hwlrp/formulation.hpp"
#include "json_util.hpp"

namespace hwlrp {

namespace {

constexpr double kBinTol = 0.5;  // integral assignments: >0.5 means set

bool is_set(const Assignment& a, int id) { return a[id] > kBinTol; }

const TreatmentCapEntry* treatment_entry(const Instance& inst, const std::string& node,
                                         const std::string& tech) {
    return inst.treatment_caps(node, tech);
}

double level_op_risk(const std::vector<LevelCap>& levels, const std::string& level) {
    for (const auto& lc : levels)
        if (lc.level == level) return lc.op_risk;
    return 0.0;
}

double level_max(const std::vector<LevelCap>& levels, const std::string& level) {
    for (const auto& lc : levels)
        if (lc.level == level) return lc.max_capacity;
    return 0.0;
}

double level_cost(const std::vector<LevelCap>& levels, const std::string& level) {
    for (const auto& lc : levels)
        if (lc.level == level) return lc.invest_cost;
    return 0.0;
}

}  // namespace

Solution extract_solution(const Instance& inst, const VarCatalog& catalog,
                          const Assignment& a, const FormulationOptions& opts) {
    Solution sol;

    for (const auto& [key, id] : catalog.r_open)
        if (is_set(a, id)) sol.openings.push_back({key.first, "recycling", key.second, ""});
    for (const auto& [key, id] : catalog.t_open)
        if (is_set(a, id))
            sol.openings.push_back(
                {std::get<1>(key), "treatment", std::get<2>(key), std::get<0>(key)});
    for (const auto& [key, id] : catalog.d_open)
        if (is_set(a, id)) sol.openings.push_back({key.first, "disposal", key.second, ""});

    // routes: follow the set x arcs from a depot departure
    std::set<std::string> vehicles;
    for (const auto& [key, id] : catalog.x) vehicles.insert(std::get<2>(key));

    std::size_t arcs_set = 0;
    for (const auto& [key, id] : catalog.x)
        if (is_set(a, id)) ++arcs_set;

    std::size_t arcs_used = 0;
    for (const auto& veh : inst.vehicles) {
        const std::string& k = veh.id;
        Route route;
        route.vehicle = k;

        std::string depart_from, depart_to;
        for (const auto& [key, id] : catalog.x) {
            if (std::get<2>(key) != k || !is_set(a, id)) continue;
            const Node* tail = inst.find_node(std::get<0>(key));
            if (tail && tail->kind == NodeKind::Depot) {
                const Node* head = inst.find_node(std::get<1>(key));
                if (head && head->kind == NodeKind::Generation) {
                    if (!depart_from.empty())
                        throw std::runtime_error("vehicle " + k +
                                                 ": multiple depot departures");
                    depart_from = std::get<0>(key);
                    depart_to = std::get<1>(key);
                }
            }
        }
        if (depart_from.empty()) {
            sol.routes.push_back(std::move(route));  // parked vehicle, empty sequence
            continue;
        }
        ++arcs_used;

        route.sequence.push_back(depart_from);
        std::string cur = depart_to;
        std::set<std::string> visited;
        const std::size_t guard = inst.nodes.size() + 2;
        while (true) {
            if (visited.count(cur) || route.sequence.size() > guard)
                throw std::runtime_error("vehicle " + k + ": cycle in routing arcs at " +
                                         cur);
            visited.insert(cur);
            route.sequence.push_back(cur);
            const Node* n = inst.find_node(cur);
            if (!n) throw std::runtime_error("vehicle " + k + ": unknown node " + cur);
            if (n->kind == NodeKind::Generation) {
                auto it = catalog.lo.find({cur, k});
                route.load_after.push_back(it != catalog.lo.end() ? a[it->second] : 0.0);
            }
            std::string next;
            int out_count = 0;
            for (const auto& [key, id] : catalog.x) {
                if (std::get<2>(key) != k || std::get<0>(key) != cur) continue;
                if (is_set(a, id)) {
                    ++out_count;
                    next = std::get<1>(key);
                }
            }
            if (is_facility(n->kind)) {
                if (out_count != 1)
                    throw std::runtime_error("vehicle " + k + ": no single return arc from " +
                                             cur);
                const Node* ret = inst.find_node(next);
                if (!ret || ret->kind != NodeKind::Depot)
                    throw std::runtime_error("vehicle " + k +
                                             ": facility successor is not a depot");
                ++arcs_used;
                route.sequence.push_back(next);
                break;
            }
            if (out_count != 1)
                throw std::runtime_error("vehicle " + k + ": node " + cur + " has " +
                                         std::to_string(out_count) + " outgoing arcs");
            ++arcs_used;
            cur = next;
        }

        route.load = route.load_after.empty() ? 0.0 : route.load_after.back();
        for (std::size_t i = 0; i + 1 < route.sequence.size(); ++i) {
            auto d = inst.distance(route.sequence[i], route.sequence[i + 1], k);
            route.length += d ? *d : 0.0;
        }
        sol.routes.push_back(std::move(route));
    }
    if (arcs_used != arcs_set)
        throw std::runtime_error(
            "routing arcs do not form depot-rooted walks (stray subtour): " +
            std::to_string(arcs_set - arcs_used) + " unused set arcs");

    for (const auto& [key, id] : catalog.kflow)
        if (a[id] > 1e-11) sol.kflow[key] = a[id];
    for (const auto& [key, id] : catalog.zflow)
        if (a[id] > 1e-11) sol.zflow[key] = a[id];
    for (const auto& [key, id] : catalog.vflow)
        if (a[id] > 1e-11) sol.vflow[key] = a[id];
    for (const auto& [key, id] : catalog.xt)
        if (a[id] > 1e-11) sol.xt[key] = a[id];
    for (const auto& [key, id] : catalog.xr)
        if (a[id] > 1e-11) sol.xr[key] = a[id];
    for (const auto& [key, id] : catalog.xd)
        if (a[id] > 1e-11) sol.xd[key] = a[id];

    sol.objectives = evaluate_objectives(inst, sol, opts);
    return sol;
}

std::array<double, 3> evaluate_objectives(const Instance& inst, const Solution& sol,
                                          const FormulationOptions& opts) {
    double f1 = 0.0, f2 = 0.0, f3 = 0.0;

    // f1: the x*lo product taken literally on the unload leg
    for (const auto& route : sol.routes) {
        if (route.sequence.size() < 4) continue;  // depot, gens..., facility, depot
        const std::string& last_gen = route.sequence[route.sequence.size() - 3];
        const std::string& terminal = route.sequence[route.sequence.size() - 2];
        const Arc* arc = inst.find_arc(last_gen, terminal);
        if (arc) f1 += arc->unit_cost * route.load;
    }
    auto flow_cost = [&](const std::map<std::pair<std::string, std::string>, double>& m) {
        for (const auto& [key, v] : m) {
            const Arc* arc = inst.find_arc(key.first, key.second);
            if (arc) f1 += arc->unit_cost * v;
        }
    };
    flow_cost(sol.zflow);
    flow_cost(sol.vflow);
    flow_cost(sol.kflow);

    std::map<std::string, const Opening*> opening_of;
    for (const auto& o : sol.openings) opening_of[o.node] = &o;

    for (const auto& o : sol.openings) {
        const Node* n = inst.find_node(o.node);
        if (!n || is_existing(n->kind)) continue;  // existing sites carry no new cost
        if (o.facility == "treatment") {
            const TreatmentCapEntry* e = treatment_entry(inst, o.node, o.technology);
            if (e) f1 += level_cost(e->levels, o.level);
        } else if (o.facility == "recycling") {
            const FacilityCapEntry* e = inst.recycling_caps(o.node);
            if (e) f1 += level_cost(e->levels, o.level);
        } else {
            const FacilityCapEntry* e = inst.disposal_caps(o.node);
            if (e) f1 += level_cost(e->levels, o.level);
        }
    }

    // f2: transport risk on residue flows plus site risk
    auto flow_risk = [&](const std::map<std::pair<std::string, std::string>, double>& m,
                         double TransportRisk::*field) {
        for (const auto& [key, v] : m) {
            const Arc* arc = inst.find_arc(key.first, key.second);
            if (arc) f2 += (arc->transport_risk.*field) * v;
        }
    };
    flow_risk(sol.kflow, &TransportRisk::tr);
    flow_risk(sol.zflow, &TransportRisk::td);
    flow_risk(sol.vflow, &TransportRisk::rd);

    auto mass_treated = [&](const std::string& node) {
        double acc = 0.0;
        for (const auto& [key, v] : sol.xt)
            if (key.second == node) acc += v;
        return acc;
    };

    if (opts.risk_mode == RiskMode::Coupled) {
        for (const auto& o : sol.openings) {
            if (o.facility == "treatment") {
                const TreatmentCapEntry* e = treatment_entry(inst, o.node, o.technology);
                if (e) f2 += level_op_risk(e->levels, o.level) * mass_treated(o.node);
            } else if (o.facility == "recycling") {
                const FacilityCapEntry* e = inst.recycling_caps(o.node);
                auto it = sol.xr.find(o.node);
                if (e && it != sol.xr.end())
                    f2 += level_op_risk(e->levels, o.level) * it->second;
            } else {
                const FacilityCapEntry* e = inst.disposal_caps(o.node);
                auto it = sol.xd.find(o.node);
                if (e && it != sol.xd.end())
                    f2 += level_op_risk(e->levels, o.level) * it->second;
            }
        }
    } else {
        // printed form: rates summed over every level and technology
        for (const auto* n : inst.treatment_nodes()) {
            double rate = 0.0;
            for (const auto& entry : inst.capacity_levels.treatment)
                if (entry.node == n->id)
                    for (const auto& lc : entry.levels) rate += lc.op_risk;
            f2 += rate * mass_treated(n->id);
        }
        for (const auto* n : inst.recycling_nodes()) {
            const FacilityCapEntry* e = inst.recycling_caps(n->id);
            if (!e) continue;
            double rate = 0.0;
            for (const auto& lc : e->levels) rate += lc.op_risk;
            auto it = sol.xr.find(n->id);
            if (it != sol.xr.end()) f2 += rate * it->second;
        }
        for (const auto* n : inst.disposal_nodes()) {
            const FacilityCapEntry* e = inst.disposal_caps(n->id);
            if (!e) continue;
            double rate = 0.0;
            for (const auto& lc : e->levels) rate += lc.op_risk;
            auto it = sol.xd.find(n->id);
            if (it != sol.xd.end()) f2 += rate * it->second;
        }
    }

    // f3: operations use the installed technology's rate
    for (const auto& [node, v] : sol.xr) f3 += inst.co2_recycling(node) * v;
    for (const auto& o : sol.openings)
        if (o.facility == "treatment")
            f3 += inst.co2_treatment(o.node, o.technology) * mass_treated(o.node);
    for (const auto& [node, v] : sol.xd) f3 += inst.co2_disposal(node) * v;
    for (const auto& [key, v] : sol.kflow) {
        const Arc* arc = inst.find_arc(key.first, key.second);
        if (arc) f3 += arc->co2_transport.tr * arc->distance * v;
    }
    for (const auto& [key, v] : sol.zflow) {
        const Arc* arc = inst.find_arc(key.first, key.second);
        if (arc) f3 += arc->co2_transport.td * arc->distance * v;
    }
    for (const auto& [key, v] : sol.vflow) {
        const Arc* arc = inst.find_arc(key.first, key.second);
        if (arc) f3 += arc->co2_transport.td * arc->distance * v;
    }

    return {f1, f2, f3};
}

std::vector<SolutionViolation> check_solution_feasible(const Instance& inst,
                                                       const Solution& sol,
                                                       const FormulationOptions& opts) {
    (void)opts;
    std::vector<SolutionViolation> out;
    auto flag = [&](std::string code, std::string entity, std::string message) {
        out.push_back({std::move(code), std::move(entity), std::move(message)});
    };
    const double tol = 1e-7;
    auto rel_ok = [](double a, double b) {
        return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
    };

    std::map<std::string, const Opening*> opening_of;
    std::map<std::string, int> openings_per_node;
    for (const auto& o : sol.openings) {
        opening_of[o.node] = &o;
        openings_per_node[o.node] += 1;
    }
    for (const auto& [node, count] : openings_per_node)
        if (count > 1)
            flag("eq30", node, "more than one opening (level/technology) at a site");

    // existing facilities must be open; treatment must match availability
    for (const auto& n : inst.nodes) {
        if (!is_existing(n.kind)) continue;
        auto it = opening_of.find(n.id);
        if (it == opening_of.end()) {
            flag("eq31-33", n.id, "existing facility not opened");
            continue;
        }
        if (n.kind == NodeKind::TreatmentExisting) {
            const Technology* tech = inst.find_technology(it->second->technology);
            bool ok = false;
            if (tech) {
                auto av = tech->availability.find(n.id);
                ok = av != tech->availability.end() && av->second == 1;
            }
            if (!ok)
                flag("eq31", n.id, "existing treatment opened with unavailable technology");
        }
    }

    // routes
    std::map<std::pair<std::string, std::string>, int> visits;  // (gen, waste) -> count
    std::map<std::pair<std::string, std::string>, double> delivered;  // (waste,node)
    std::map<std::string, double> direct_recycled;
    for (const auto& route : sol.routes) {
        if (route.sequence.empty()) continue;
        const Vehicle* veh = inst.find_vehicle(route.vehicle);
        if (!veh) {
            flag("route", route.vehicle, "unknown vehicle");
            continue;
        }
        const std::string waste = inst.vehicle_waste(*veh);
        if (route.sequence.size() < 4) {
            flag("eq04-07", route.vehicle, "route shorter than depot-node-facility-depot");
            continue;
        }
        const Node* start = inst.find_node(route.sequence.front());
        const Node* end = inst.find_node(route.sequence.back());
        if (!start || start->kind != NodeKind::Depot || !end ||
            end->kind != NodeKind::Depot)
            flag("eq04-07", route.vehicle, "route does not start and end at a depot");
        const std::string& terminal = route.sequence[route.sequence.size() - 2];
        const Node* term = inst.find_node(terminal);
        if (!term || !is_facility(term->kind)) {
            flag("eq07", route.vehicle, "route does not unload at a facility");
            continue;
        }
        const bool rec_only = inst.recyclable_only(waste);
        if (rec_only && !is_recycling(term->kind))
            flag("eq09", route.vehicle, "recyclable cargo unloaded outside recycling");
        if (!rec_only) {
            if (!is_treatment(term->kind)) {
                flag("eq08", route.vehicle, "treatable cargo unloaded outside treatment");
            } else {
                auto it = opening_of.find(terminal);
                if (it == opening_of.end())
                    flag("eq08", route.vehicle, "unloads at a closed facility " + terminal);
                else if (!inst.com(waste, it->second->technology))
                    flag("eq08", route.vehicle,
                         "technology at " + terminal + " incompatible with " + waste);
            }
        }
        if (rec_only && is_recycling(term->kind) && !opening_of.count(terminal))
            flag("eq09", route.vehicle, "unloads at a closed facility " + terminal);

        double collected = 0.0, length = 0.0;
        for (std::size_t i = 1; i + 2 < route.sequence.size(); ++i) {
            const Node* n = inst.find_node(route.sequence[i]);
            if (!n || n->kind != NodeKind::Generation) {
                flag("eq05", route.vehicle,
                     "mid-route stop " + route.sequence[i] + " is not a generation node");
                continue;
            }
            visits[{route.sequence[i], waste}] += 1;
            collected += inst.demand(waste, route.sequence[i]);
            if (collected > veh->capacity + tol)
                flag("eq13-16", route.vehicle,
                     "load exceeds capacity at " + route.sequence[i]);
        }
        for (std::size_t i = 0; i + 1 < route.sequence.size(); ++i) {
            auto d = inst.distance(route.sequence[i], route.sequence[i + 1], veh->id);
            if (!d) {
                flag("route", route.vehicle,
                     "no arc " + route.sequence[i] + " -> " + route.sequence[i + 1]);
                continue;
            }
            length += *d;
        }
        if (length > veh->max_distance + 1e-6 * std::max(1.0, veh->max_distance))
            flag("eq10-12", route.vehicle, "tour length exceeds the vehicle limit");
        if (route.load + tol < collected)
            flag("eq13-16", route.vehicle, "delivered load below collected demand");
        if (route.load > veh->capacity + tol)
            flag("eq14", route.vehicle, "delivered load exceeds vehicle capacity");

        if (is_treatment(term->kind))
            delivered[{waste, terminal}] += route.load;
        else
            direct_recycled[terminal] += route.load;
    }

    for (const auto& w : inst.waste_types)
        for (const auto& [node, d] : w.demand) {
            if (d <= 0.0) continue;
            const int count = visits.count({node, w.id}) ? visits.at({node, w.id}) : 0;
            if (count != 1)
                flag("eq06", node + "/" + w.id,
                     "served " + std::to_string(count) + " times (expected 1)");
        }

    // delivered mass consistency with the processed quantities
    for (const auto& [key, mass] : delivered) {
        const double xt = sol.xt.count(key) ? sol.xt.at(key) : 0.0;
        if (!rel_ok(mass, xt))
            flag("eq17", key.first + "@" + key.second,
                 "treated mass does not match route deliveries");
    }
    for (const auto& [key, xt] : sol.xt) {
        if (!delivered.count(key) && xt > 1e-6)
            flag("eq17", key.first + "@" + key.second, "treated mass without a route");
    }

    // residue identities and capacity windows
    for (const auto* n : inst.treatment_nodes()) {
        double total = 0.0;
        for (const auto& [key, v] : sol.xt)
            if (key.second == n->id) total += v;
        auto it = opening_of.find(n->id);
        double k_expect = 0.0, z_expect = 0.0;
        if (it != opening_of.end() && it->second->facility == "treatment") {
            for (const auto& [key, v] : sol.xt) {
                if (key.second != n->id) continue;
                const double red = inst.mass_reduction_of(key.first, it->second->technology);
                const double beta = inst.beta(key.first, it->second->technology);
                k_expect += v * (1.0 - red) * beta;
                z_expect += v * (1.0 - red) * (1.0 - beta);
            }
        }
        double k_actual = 0.0, z_actual = 0.0;
        for (const auto& [key, v] : sol.kflow)
            if (key.first == n->id) k_actual += v;
        for (const auto& [key, v] : sol.zflow)
            if (key.first == n->id) z_actual += v;
        if (!rel_ok(k_actual, k_expect))
            flag("eq21", n->id, "recyclable-residue outflow does not match the ratio");
        if (!rel_ok(z_actual, z_expect))
            flag("eq24", n->id, "disposable-residue outflow does not match the ratio");
        if (total > 1e-6 && it == opening_of.end())
            flag("eq18", n->id, "treated mass at a closed facility");
        if (it != opening_of.end() && it->second->facility == "treatment") {
            const TreatmentCapEntry* e =
                treatment_entry(inst, n->id, it->second->technology);
            if (e) {
                const double cap = level_max(e->levels, it->second->level);
                if (total > cap + 1e-6 * std::max(1.0, cap))
                    flag("eq18", n->id, "treated mass above the level capacity");
                if (!is_existing(n->kind) && total + tol < e->min_required)
                    flag("eq19", n->id, "treated mass below the minimum threshold");
            }
        }
    }

    for (const auto* n : inst.recycling_nodes()) {
        const double xr = sol.xr.count(n->id) ? sol.xr.at(n->id) : 0.0;
        double inflow = direct_recycled.count(n->id) ? direct_recycled.at(n->id) : 0.0;
        for (const auto& [key, v] : sol.kflow)
            if (key.second == n->id) inflow += v;
        if (!rel_ok(xr, inflow)) flag("eq20", n->id, "recycled mass does not match inflow");
        double v_actual = 0.0;
        for (const auto& [key, v] : sol.vflow)
            if (key.first == n->id) v_actual += v;
        const double v_expect = xr * (1.0 - inst.gamma(n->id));
        if (!rel_ok(v_actual, v_expect))
            flag("eq25", n->id, "recycling residue outflow does not match (1-gamma)");
        auto it = opening_of.find(n->id);
        if (xr > 1e-6 && it == opening_of.end())
            flag("eq22", n->id, "recycled mass at a closed facility");
        if (it != opening_of.end()) {
            const FacilityCapEntry* e = inst.recycling_caps(n->id);
            if (e) {
                const double cap = level_max(e->levels, it->second->level);
                if (xr > cap + 1e-6 * std::max(1.0, cap))
                    flag("eq22", n->id, "recycled mass above the level capacity");
                if (!is_existing(n->kind) && xr + tol < e->min_required)
                    flag("eq23", n->id, "recycled mass below the minimum threshold");
            }
        }
    }

    for (const auto* n : inst.disposal_nodes()) {
        const double xd = sol.xd.count(n->id) ? sol.xd.at(n->id) : 0.0;
        double inflow = 0.0;
        for (const auto& [key, v] : sol.zflow)
            if (key.second == n->id) inflow += v;
        for (const auto& [key, v] : sol.vflow)
            if (key.second == n->id) inflow += v;
        if (!rel_ok(xd, inflow)) flag("eq26", n->id, "disposed mass does not match inflow");
        auto it = opening_of.find(n->id);
        if (xd > 1e-6 && it == opening_of.end())
            flag("eq27", n->id, "disposed mass at a closed facility");
        if (it != opening_of.end()) {
            const FacilityCapEntry* e = inst.disposal_caps(n->id);
            if (e) {
                const double cap = level_max(e->levels, it->second->level);
                if (xd > cap + 1e-6 * std::max(1.0, cap))
                    flag("eq27", n->id, "disposed mass above the level capacity");
                if (!is_existing(n->kind) && xd + tol < e->min_required)
                    flag("eq28", n->id, "disposed mass below the minimum threshold");
            }
        }
    }

    // eq29: global balance
    {
        double treated = 0.0;
        for (const auto& [key, v] : sol.xt) treated += v;
        double direct = 0.0;
        for (const auto& [node, v] : direct_recycled) direct += v;
        if (!rel_ok(treated + direct, inst.total_demand()))
            flag("eq29", "balance", "treated + directly recycled mass != total demand");
    }

    // eq34: link risk caps
    auto risk_check = [&](const std::map<std::pair<std::string, std::string>, double>& m,
                          double TransportRisk::*field) {
        for (const auto& [key, v] : m) {
            const Arc* arc = inst.find_arc(key.first, key.second);
            if (!arc || !arc->risk_cap) continue;
            const double risk = (arc->transport_risk.*field) * v;
            if (risk > *arc->risk_cap + 1e-6 * std::max(1.0, *arc->risk_cap))
                flag("eq34", key.first + "->" + key.second, "link risk above the cap");
        }
    };
    risk_check(sol.kflow, &TransportRisk::tr);
    risk_check(sol.zflow, &TransportRisk::td);
    risk_check(sol.vflow, &TransportRisk::rd);

    return out;
}

// ---------------------------------------------------------------------------
// solution documents

using detail::json;

std::string serialize_solution(const Instance& inst, const Solution& sol) {
    (void)inst;
    json doc;
    doc["schema"] = "hwlrp-solution/1";
    json openings = json::array();
    for (const auto& o : sol.openings) {
        json j;
        j["node"] = o.node;
        j["facility"] = o.facility;
        j["level"] = o.level;
        if (!o.technology.empty()) j["technology"] = o.technology;
        openings.push_back(std::move(j));
    }
    doc["openings"] = std::move(openings);
    json routes = json::array();
    for (const auto& r : sol.routes) {
        json j;
        j["vehicle"] = r.vehicle;
        j["sequence"] = r.sequence;
        j["load_after"] = r.load_after;
        j["load"] = r.load;
        j["length"] = r.length;
        routes.push_back(std::move(j));
    }
    doc["routes"] = std::move(routes);
    auto flows_to_json = [](const std::map<std::pair<std::string, std::string>, double>& m) {
        json arr = json::array();
        for (const auto& [key, v] : m) {
            json j;
            j["from"] = key.first;
            j["to"] = key.second;
            j["mass"] = v;
            arr.push_back(std::move(j));
        }
        return arr;
    };
    doc["residue_flows"]["treatment_to_recycling"] = flows_to_json(sol.kflow);
    doc["residue_flows"]["treatment_to_disposal"] = flows_to_json(sol.zflow);
    doc["residue_flows"]["recycling_to_disposal"] = flows_to_json(sol.vflow);
    json xt = json::array();
    for (const auto& [key, v] : sol.xt) {
        json j;
        j["waste"] = key.first;
        j["node"] = key.second;
        j["mass"] = v;
        xt.push_back(std::move(j));
    }
    doc["processed"]["treated"] = std::move(xt);
    doc["processed"]["recycled"] = sol.xr;
    doc["processed"]["disposed"] = sol.xd;
    doc["objectives"]["f1"] = sol.objectives[0];
    doc["objectives"]["f2"] = sol.objectives[1];
    doc["objectives"]["f3"] = sol.objectives[2];
    return doc.dump(2) + "\n";
}

Solution parse_solution(const Instance& inst, const std::string& text) {
    (void)inst;
    json doc = json::parse(text);
    Solution sol;
    for (const auto& j : doc.at("openings")) {
        Opening o;
        o.node = j.at("node").get<std::string>();
        o.facility = j.at("facility").get<std::string>();
        o.level = j.at("level").get<std::string>();
        if (j.contains("technology")) o.technology = j.at("technology").get<std::string>();
        sol.openings.push_back(std::move(o));
    }
    for (const auto& j : doc.at("routes")) {
        Route r;
        r.vehicle = j.at("vehicle").get<std::string>();
        r.sequence = j.at("sequence").get<std::vector<std::string>>();
        r.load_after = j.at("load_after").get<std::vector<double>>();
        r.load = j.at("load").get<double>();
        r.length = j.at("length").get<double>();
        sol.routes.push_back(std::move(r));
    }
    auto flows_from = [&](const json& arr,
                          std::map<std::pair<std::string, std::string>, double>& m) {
        for (const auto& j : arr)
            m[{j.at("from").get<std::string>(), j.at("to").get<std::string>()}] =
                j.at("mass").get<double>();
    };
    flows_from(doc.at("residue_flows").at("treatment_to_recycling"), sol.kflow);
    flows_from(doc.at("residue_flows").at("treatment_to_disposal"), sol.zflow);
    flows_from(doc.at("residue_flows").at("recycling_to_disposal"), sol.vflow);
    for (const auto& j : doc.at("processed").at("treated"))
        sol.xt[{j.at("waste").get<std::string>(), j.at("node").get<std::string>()}] =
            j.at("mass").get<double>();
    sol.xr = doc.at("processed").at("recycled").get<std::map<std::string, double>>();
    sol.xd = doc.at("processed").at("disposed").get<std::map<std::string, double>>();
    sol.objectives[0] = doc.at("objectives").at("f1").get<double>();
    sol.objectives[1] = doc.at("objectives").at("f2").get<double>();
    sol.objectives[2] = doc.at("objectives").at("f3").get<double>();
    return sol;
}

std::string format_solution_report(const Instance& inst, const Solution& sol) {
    (void)inst;
    std::ostringstream os;
    os << "objectives: f1=" << sol.objectives[0] << " f2=" << sol.objectives[1]
       << " f3=" << sol.objectives[2] << "\n\n";
    os << "openings (node, facility, level, technology):\n";
    for (const auto& o : sol.openings)
        os << "  " << o.node << "  " << o.facility << "  level " << o.level
           << (o.technology.empty() ? "" : "  " + o.technology) << "\n";
    if (sol.openings.empty()) os << "  (none)\n";
    os << "\nroutes (vehicle: sequence | load t | length km):\n";
    for (const auto& r : sol.routes) {
        os << "  " << r.vehicle << ": ";
        if (r.sequence.empty()) {
            os << "(unused)\n";
            continue;
        }
        for (std::size_t i = 0; i < r.sequence.size(); ++i)
            os << (i ? " -> " : "") << r.sequence[i];
        os << " | " << r.load << " | " << r.length << "\n";
    }
    os << "\nresidue flows (from -> to: mass t):\n";
    auto dump_flows = [&](const char* label,
                          const std::map<std::pair<std::string, std::string>, double>& m) {
        for (const auto& [key, v] : m)
            os << "  " << label << " " << key.first << " -> " << key.second << ": " << v
               << "\n";
    };
    dump_flows("[t->r]", sol.kflow);
    dump_flows("[t->d]", sol.zflow);
    dump_flows("[r->d]", sol.vflow);
    os << "\nprocessed mass per facility:\n";
    for (const auto& [key, v] : sol.xt)
        os << "  treated   " << key.second << " (" << key.first << "): " << v << "\n";
    for (const auto& [node, v] : sol.xr) os << "  recycled  " << node << ": " << v << "\n";
    for (const auto& [node, v] : sol.xd) os << "  disposed  " << node << ": " << v << "\n";
    return os.str();
}

}  // namespace hwlrp
