#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hwlrp/instance.hpp"

namespace hwlrp {

namespace {

struct Point {
    double x = 0.0, y = 0.0;
};

double dist(const Point& a, const Point& b) {
    const double d = std::hypot(a.x - b.x, a.y - b.y);
    return std::round(d * 10.0) / 10.0;
}

struct District {
    std::string id;
    double generated;       // tons per year, published
    double density_mid;     // people per km^2, midpoint of the published range
    double cost5, cost10, cost15;  // establishment cost by capacity level
    Point center;
    int n_demand_nodes;
};

}  // namespace

// The Babol-style case: every published figure is carried verbatim;
// geometry, per-node demand splits, fleet limits and capacity
// annualization are deterministic stand-ins tagged in `provenance`.
Instance case_study_instance() {
    Instance inst;
    inst.name = "babol-case";
    inst.eps_constant = 1e-4;

    const std::vector<District> districts = {
        {"I", 13746.0, 600.5, 1572.0, 1932.0, 2241.0, {50.0, 48.0}, 3},
        {"II", 8190.0, 425.5, 1275.0, 1583.0, 1987.0, {28.0, 60.0}, 2},
        {"III", 7120.0, 500.5, 1463.0, 1892.0, 2340.0, {40.0, 24.0}, 2},
        {"IV", 8961.0, 325.5, 1098.0, 1386.0, 1791.0, {70.0, 66.0}, 2},
        {"V", 5167.0, 200.5, 1137.0, 1408.0, 1853.0, {62.0, 30.0}, 2},
        {"VI", 4329.0, 100.0, 847.0, 1230.0, 1596.0, {78.0, 46.0}, 2},
    };

    std::map<std::string, Point> pos;
    std::map<std::string, std::string> district_of;
    auto place = [&](const std::string& id, NodeKind kind, const std::string& district,
                     Point p) {
        inst.nodes.push_back(Node{id, kind, district});
        pos[id] = p;
        district_of[id] = district;
    };

    place("depot", NodeKind::Depot, "I", {50.0, 50.0});

    // 13 demand nodes spread over the six districts.
    const Point offsets[3] = {{-4.0, 2.0}, {3.0, -3.0}, {1.0, 4.0}};
    std::vector<std::string> gens;
    int gen_no = 0;
    for (const auto& d : districts) {
        for (int i = 0; i < d.n_demand_nodes; ++i) {
            ++gen_no;
            std::string id = "g" + std::string(gen_no < 10 ? "0" : "") + std::to_string(gen_no);
            place(id, NodeKind::Generation, d.id,
                  {d.center.x + offsets[i].x, d.center.y + offsets[i].y});
            gens.push_back(id);
        }
    }

    // Candidate facilities in every district, plus the existing network:
    // recycling and treatment in district I, disposal in I and IV, and the
    // two out-of-town recycling plants to the north and west.
    std::vector<std::string> recs, treats, disps;
    for (const auto& d : districts) {
        place("rec_" + d.id, NodeKind::RecyclingCandidate, d.id,
              {d.center.x - 6.0, d.center.y - 1.0});
        recs.push_back("rec_" + d.id);
        place("treat_" + d.id, NodeKind::TreatmentCandidate, d.id,
              {d.center.x + 6.0, d.center.y + 1.0});
        treats.push_back("treat_" + d.id);
        place("disp_" + d.id, NodeKind::DisposalCandidate, d.id,
              {d.center.x, d.center.y - 6.0});
        disps.push_back("disp_" + d.id);
    }
    place("rec_I_ex", NodeKind::RecyclingExisting, "I", {47.0, 44.0});
    recs.push_back("rec_I_ex");
    place("rec_juybar", NodeKind::RecyclingExisting, "", {44.0, 92.0});
    recs.push_back("rec_juybar");
    place("rec_amol", NodeKind::RecyclingExisting, "", {8.0, 58.0});
    recs.push_back("rec_amol");
    place("treat_I_ex", NodeKind::TreatmentExisting, "I", {54.0, 44.0});
    treats.push_back("treat_I_ex");
    place("disp_I_ex", NodeKind::DisposalExisting, "I", {46.0, 54.0});
    disps.push_back("disp_I_ex");
    place("disp_IV_ex", NodeKind::DisposalExisting, "IV", {74.0, 62.0});
    disps.push_back("disp_IV_ex");

    inst.technologies.push_back(Technology{"incineration", {{"treat_I_ex", 1}}});
    inst.technologies.push_back(Technology{"chemical", {{"treat_I_ex", 0}}});

    // Waste classes: recyclable, incineration-only, chemical-only, and
    // either technology. Shares of the generated mass follow the summed
    // sector fractions (25/116, 43/116, 35/116, 13/116).
    struct WasteSpec {
        std::string id;
        int com_inc, com_chem;
        double potential;
        double share_num;
    };
    const std::vector<WasteSpec> waste_specs = {
        {"w1_recyclable", 0, 0, 0.05, 25.0},
        {"w2_incineration", 1, 0, 0.2, 43.0},
        {"w3_chemical", 0, 1, 0.2, 35.0},
        {"w4_both", 1, 1, 0.2, 13.0},
    };
    const double share_den = 116.0;

    for (const auto& ws : waste_specs) {
        WasteType w;
        w.id = ws.id;
        w.risk_potential = ws.potential;
        w.tech_compat = {{"incineration", ws.com_inc}, {"chemical", ws.com_chem}};
        w.recyclable_fraction_after_tech = {{"incineration", 0.0}, {"chemical", 0.3}};
        w.mass_reduction = {{"incineration", 0.8}, {"chemical", 0.2}};
        inst.waste_types.push_back(std::move(w));
    }

    // Per-node demands on a 1/16-ton grid with the last slot of each
    // district absorbing the rounding residual, so district totals (and
    // the 47,513 grand total) are reproduced exactly in double arithmetic.
    std::size_t gen_cursor = 0;
    for (const auto& d : districts) {
        std::vector<std::string> local(gens.begin() + gen_cursor,
                                       gens.begin() + gen_cursor + d.n_demand_nodes);
        gen_cursor += d.n_demand_nodes;
        double assigned = 0.0;
        for (std::size_t wi = 0; wi < waste_specs.size(); ++wi) {
            for (std::size_t ni = 0; ni < local.size(); ++ni) {
                const bool last = (wi + 1 == waste_specs.size()) && (ni + 1 == local.size());
                double v;
                if (last) {
                    v = d.generated - assigned;
                } else {
                    const double raw = d.generated * waste_specs[wi].share_num /
                                       (share_den * local.size());
                    v = std::floor(raw * 16.0) / 16.0;
                    assigned += v;
                }
                inst.waste_types[wi].demand[local[ni]] = v;
            }
        }
    }

    // Twelve trucks, three per waste class; capacity and range limits
    // are unpublished and sized with headroom over the per-class totals.
    std::vector<double> class_total(4, 0.0);
    for (std::size_t wi = 0; wi < inst.waste_types.size(); ++wi)
        for (const auto& [node, v] : inst.waste_types[wi].demand) class_total[wi] += v;
    int truck_no = 0;
    for (std::size_t wi = 0; wi < inst.waste_types.size(); ++wi) {
        const double cap = std::ceil(class_total[wi] / 3.0 * 1.45);
        for (int j = 0; j < 3; ++j) {
            ++truck_no;
            Vehicle v;
            v.id = "truck" + std::string(truck_no < 10 ? "0" : "") + std::to_string(truck_no);
            for (const auto& ws : waste_specs)
                v.waste_compat[ws.id] = (ws.id == inst.waste_types[wi].id) ? 1 : 0;
            v.capacity = cap;
            v.max_distance = 320.0;
            inst.vehicles.push_back(std::move(v));
        }
    }

    // Capacity tiers 5/10/15 tons per day; the yearly ceiling uses a
    // deterministic 730-day-equivalent annualization so that the network
    // keeps slack under the +10% demand and reduced-capacity scenarios.
    const double annualize = 730.0;
    inst.capacity_levels.levels = {"5", "10", "15"};
    const double day_tons[3] = {5.0, 10.0, 15.0};
    const double min_required = 100.0;

    auto cost_of = [&](const std::string& node, int level_idx) -> double {
        const std::string& d = district_of[node];
        for (const auto& ds : districts)
            if (ds.id == d)
                return level_idx == 0 ? ds.cost5 : (level_idx == 1 ? ds.cost10 : ds.cost15);
        return 0.0;  // out-of-town existing plants never pay establishment cost
    };

    const double consequence_mid = 16650.0;  // midpoint of [0.01, 3.32] x 10^4 people
    auto site_risk = [&](double probability, int level_idx) {
        return probability * consequence_mid * day_tons[level_idx] / day_tons[2];
    };

    auto fill_levels = [&](const std::string& node, double probability) {
        std::vector<LevelCap> caps;
        for (int h = 0; h < 3; ++h) {
            LevelCap c;
            c.level = inst.capacity_levels.levels[h];
            c.max_capacity = day_tons[h] * annualize;
            c.invest_cost = cost_of(node, h);
            c.op_risk = site_risk(probability, h);
            caps.push_back(std::move(c));
        }
        return caps;
    };

    const double p_rec = 20e-6, p_inc = 50e-6, p_chem = 60e-6, p_disp = 30e-6;
    for (const auto& t : treats) {
        inst.capacity_levels.treatment.push_back(
            TreatmentCapEntry{t, "incineration", min_required, fill_levels(t, p_inc)});
        inst.capacity_levels.treatment.push_back(
            TreatmentCapEntry{t, "chemical", min_required, fill_levels(t, p_chem)});
    }
    for (const auto& r : recs)
        inst.capacity_levels.recycling.push_back(
            FacilityCapEntry{r, min_required, fill_levels(r, p_rec)});
    for (const auto& d : disps)
        inst.capacity_levels.disposal.push_back(
            FacilityCapEntry{d, min_required, fill_levels(d, p_disp)});

    // Transport risk per ton of residue: waste potential x people within
    // the 0.8 km corridor x accident model 0.4e-6/km * 0.9 * length.
    const double accident = 0.4e-6, release = 0.9;
    auto corridor_density = [&](const std::string& a, const std::string& b) {
        double acc = 0.0;
        int n = 0;
        for (const auto* id : {&a, &b}) {
            const std::string& d = district_of.count(*id) ? district_of[*id] : "";
            for (const auto& ds : districts)
                if (ds.id == d) {
                    acc += ds.density_mid;
                    ++n;
                }
        }
        return n > 0 ? acc / n : 100.0;  // out-of-town links use the sparsest density
    };
    auto residue_rate = [&](const std::string& a, const std::string& b, double potential) {
        const double km = dist(pos[a], pos[b]);
        const double people = corridor_density(a, b) * 0.8 * km;
        const double probability = accident * release * km;
        return potential * people * probability * 1000.0;  // per ton
    };

    const double co2_transport = 1.68;  // kg CO2 per km per ton
    const double total_mass = 47513.0;
    auto add_arc = [&](const std::string& a, const std::string& b, char flow_kind) {
        Arc arc;
        arc.from = a;
        arc.to = b;
        arc.distance = dist(pos[a], pos[b]);
        arc.unit_cost = arc.distance * 0.01;
        arc.co2_transport.tr = co2_transport;
        arc.co2_transport.td = co2_transport;
        if (flow_kind != 0) {
            double rate = 0.0;
            if (flow_kind == 'k') rate = arc.transport_risk.tr = residue_rate(a, b, 0.05);
            if (flow_kind == 'z') rate = arc.transport_risk.td = residue_rate(a, b, 0.1);
            if (flow_kind == 'v') rate = arc.transport_risk.rd = residue_rate(a, b, 0.1);
            arc.risk_cap = std::ceil(rate * total_mass);
        }
        inst.arcs.push_back(std::move(arc));
    };

    for (const auto& g : gens) add_arc("depot", g, 0);
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j) add_arc(gens[i], gens[j], 0);
    for (const auto& g : gens) {
        for (const auto& r : recs) add_arc(g, r, 0);
        for (const auto& t : treats) add_arc(g, t, 0);
    }
    for (const auto& r : recs) add_arc("depot", r, 0);
    for (const auto& t : treats) add_arc("depot", t, 0);
    for (const auto& t : treats) {
        for (const auto& r : recs) add_arc(t, r, 'k');
        for (const auto& d : disps) add_arc(t, d, 'z');
    }
    for (const auto& r : recs)
        for (const auto& d : disps) add_arc(r, d, 'v');

    for (const auto& r : recs) {
        inst.recycling_ratio[r] = 0.95;  // 5% of recycled mass continues to disposal
        inst.co2_ops.recycling[r] = 398.0;
    }
    for (const auto& t : treats) {
        inst.co2_ops.treatment.push_back(TreatmentCo2{t, "incineration", 980.0});
        inst.co2_ops.treatment.push_back(TreatmentCo2{t, "chemical", 280.0});
    }
    for (const auto& d : disps) inst.co2_ops.disposal[d] = 271.0;

    inst.waste_composition["industrial"] = {{"w1_recyclable", 0.15},
                                            {"w2_incineration", 0.13},
                                            {"w3_chemical", 0.20},
                                            {"w4_both", 0.05}};
    inst.waste_composition["health"] = {{"w1_recyclable", 0.10},
                                        {"w2_incineration", 0.30},
                                        {"w3_chemical", 0.15},
                                        {"w4_both", 0.08}};

    RiskTables rt;
    rt.consequence_low = 100.0;
    rt.consequence_high = 33200.0;
    rt.consequence_midpoint = consequence_mid;
    rt.accident_rate_per_km = accident;
    rt.release_probability = release;
    rt.site_probability = {{"recycling", p_rec},
                           {"incineration", p_inc},
                           {"chemical", p_chem},
                           {"disposal", p_disp}};
    for (const auto& d : districts) rt.district_density[d.id] = d.density_mid;
    rt.residue_potential = {{"disposable_hw", 0.1},
                            {"treatment_recyclable", 0.05},
                            {"treatment_disposable", 0.1},
                            {"recycling_disposable", 0.1}};
    inst.risk_tables = std::move(rt);

    inst.provenance = {
        {"waste_composition", "paper"},
        {"waste_types.risk_potential", "paper"},
        {"waste_types.recyclable_fraction_after_tech", "paper"},
        {"waste_types.mass_reduction", "paper"},
        {"waste_types.demand", "synthetic"},
        {"recycling_ratio", "paper"},
        {"co2_ops", "paper"},
        {"arcs.co2_transport", "paper"},
        {"arcs.distance", "synthetic"},
        {"arcs.unit_cost", "derived"},
        {"arcs.transport_risk", "derived"},
        {"arcs.risk_cap", "synthetic"},
        {"capacity_levels.levels", "paper"},
        {"capacity_levels.invest_cost", "paper"},
        {"capacity_levels.max_capacity", "derived"},
        {"capacity_levels.min_required", "synthetic"},
        {"capacity_levels.op_risk", "derived"},
        {"technologies.availability", "synthetic"},
        {"vehicles", "synthetic"},
        {"risk_tables", "paper"},
        {"nodes", "synthetic"},
    };

    return inst;
}

// Three aggregated demand zones, one truck per waste class, one candidate
// plus one existing site per facility kind. Rates, ratios and the cost
// tiers carry the same published values as the full encoding.
Instance case_study_desk_instance() {
    Instance inst;
    inst.name = "babol-case-desk";
    inst.eps_constant = 1e-4;

    std::map<std::string, Point> pos;
    auto place = [&](const std::string& id, NodeKind kind, const std::string& district,
                     Point p) {
        inst.nodes.push_back(Node{id, kind, district});
        pos[id] = p;
    };

    place("depot", NodeKind::Depot, "I", {50.0, 50.0});
    // zone totals are sums of the published district amounts:
    // I+II+III = 13746+8190+7120, IV+V+VI = 8961+5167+4329
    const std::vector<std::pair<std::string, double>> zones = {{"z1", 29056.0},
                                                              {"z2", 18457.0}};
    place("z1", NodeKind::Generation, "I", {40.0, 56.0});
    place("z2", NodeKind::Generation, "IV", {66.0, 40.0});

    place("rec_new", NodeKind::RecyclingCandidate, "VI", {70.0, 40.0});
    place("rec_ex", NodeKind::RecyclingExisting, "I", {46.0, 46.0});
    place("treat_new", NodeKind::TreatmentCandidate, "VI", {76.0, 48.0});
    place("treat_ex", NodeKind::TreatmentExisting, "I", {54.0, 46.0});
    place("disp_new", NodeKind::DisposalCandidate, "VI", {80.0, 36.0});
    place("disp_ex", NodeKind::DisposalExisting, "I", {44.0, 54.0});

    inst.technologies.push_back(Technology{"incineration", {{"treat_ex", 1}}});
    inst.technologies.push_back(Technology{"chemical", {{"treat_ex", 0}}});

    struct WasteSpec {
        std::string id;
        int com_inc, com_chem;
        double potential;
        double share_num;
    };
    const std::vector<WasteSpec> waste_specs = {
        {"w1_recyclable", 0, 0, 0.05, 25.0},
        {"w2_incineration", 1, 0, 0.2, 43.0},
        {"w3_chemical", 0, 1, 0.2, 35.0},
        {"w4_both", 1, 1, 0.2, 13.0},
    };
    std::vector<double> class_total(4, 0.0);
    for (std::size_t wi = 0; wi < waste_specs.size(); ++wi) {
        const auto& ws = waste_specs[wi];
        WasteType w;
        w.id = ws.id;
        w.risk_potential = ws.potential;
        w.tech_compat = {{"incineration", ws.com_inc}, {"chemical", ws.com_chem}};
        w.recyclable_fraction_after_tech = {{"incineration", 0.0}, {"chemical", 0.3}};
        w.mass_reduction = {{"incineration", 0.8}, {"chemical", 0.2}};
        for (std::size_t z = 0; z < zones.size(); ++z) {
            double v;
            if (wi + 1 == waste_specs.size()) {
                double assigned = 0.0;
                for (std::size_t wj = 0; wj + 1 < waste_specs.size(); ++wj)
                    assigned += inst.waste_types[wj].demand.at(zones[z].first);
                v = zones[z].second - assigned;
            } else {
                v = std::floor(zones[z].second * ws.share_num / 116.0 * 16.0) / 16.0;
            }
            w.demand[zones[z].first] = v;
            class_total[wi] += v;
        }
        inst.waste_types.push_back(std::move(w));
    }

    for (std::size_t wi = 0; wi < waste_specs.size(); ++wi) {
        Vehicle v;
        v.id = "truck" + std::to_string(wi + 1);
        for (const auto& ws : waste_specs)
            v.waste_compat[ws.id] = (ws.id == waste_specs[wi].id) ? 1 : 0;
        v.capacity = std::ceil(class_total[wi] * 1.30);
        v.max_distance = 320.0;
        inst.vehicles.push_back(std::move(v));
    }

    // levels 5/10/15 scaled so two treatment sites cover the treatable
    // mass with headroom for the +10% demand scenario
    const double treatable = class_total[1] + class_total[2] + class_total[3];
    const double scale_up = std::ceil(treatable * 1.25 / 2.0 / 15.0);
    inst.capacity_levels.levels = {"5", "10", "15"};
    const double day_tons[3] = {5.0, 10.0, 15.0};
    const double consequence_mid = 16650.0;
    const double cost5 = 847.0, cost10 = 1230.0, cost15 = 1596.0;  // district VI tier costs
    auto fill_levels = [&](double probability) {
        std::vector<LevelCap> caps;
        for (int h = 0; h < 3; ++h) {
            LevelCap c;
            c.level = inst.capacity_levels.levels[h];
            c.max_capacity = day_tons[h] * scale_up;
            c.invest_cost = h == 0 ? cost5 : (h == 1 ? cost10 : cost15);
            c.op_risk = probability * consequence_mid * day_tons[h] / day_tons[2];
            caps.push_back(std::move(c));
        }
        return caps;
    };
    const double p_rec = 20e-6, p_inc = 50e-6, p_chem = 60e-6, p_disp = 30e-6;
    for (const auto& t : {"treat_new", "treat_ex"}) {
        inst.capacity_levels.treatment.push_back(
            TreatmentCapEntry{t, "incineration", 100.0, fill_levels(p_inc)});
        inst.capacity_levels.treatment.push_back(
            TreatmentCapEntry{t, "chemical", 100.0, fill_levels(p_chem)});
    }
    for (const auto& r : {"rec_new", "rec_ex"})
        inst.capacity_levels.recycling.push_back(
            FacilityCapEntry{r, 100.0, fill_levels(p_rec)});
    for (const auto& d : {"disp_new", "disp_ex"})
        inst.capacity_levels.disposal.push_back(
            FacilityCapEntry{d, 100.0, fill_levels(p_disp)});

    const double accident = 0.4e-6, release = 0.9;
    const double density_mid = 425.5;  // central corridor midpoint
    auto residue_rate = [&](const std::string& a, const std::string& b, double potential) {
        const double km = dist(pos[a], pos[b]);
        return potential * (density_mid * 0.8 * km) * (accident * release * km) * 1000.0;
    };
    const double total_mass = 47513.0;
    auto add_arc = [&](const std::string& a, const std::string& b, char flow_kind) {
        Arc arc;
        arc.from = a;
        arc.to = b;
        arc.distance = dist(pos[a], pos[b]);
        arc.unit_cost = arc.distance * 0.01;
        arc.co2_transport.tr = 1.68;
        arc.co2_transport.td = 1.68;
        if (flow_kind != 0) {
            double rate = 0.0;
            if (flow_kind == 'k') rate = arc.transport_risk.tr = residue_rate(a, b, 0.05);
            if (flow_kind == 'z') rate = arc.transport_risk.td = residue_rate(a, b, 0.1);
            if (flow_kind == 'v') rate = arc.transport_risk.rd = residue_rate(a, b, 0.1);
            arc.risk_cap = std::ceil(rate * total_mass);
        }
        inst.arcs.push_back(std::move(arc));
    };
    const std::vector<std::string> gens = {"z1", "z2", "z3"};
    const std::vector<std::string> recs = {"rec_new", "rec_ex"};
    const std::vector<std::string> treats = {"treat_new", "treat_ex"};
    const std::vector<std::string> disps = {"disp_new", "disp_ex"};
    for (const auto& g : gens) add_arc("depot", g, 0);
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j) add_arc(gens[i], gens[j], 0);
    for (const auto& g : gens) {
        for (const auto& r : recs) add_arc(g, r, 0);
        for (const auto& t : treats) add_arc(g, t, 0);
    }
    for (const auto& r : recs) add_arc("depot", r, 0);
    for (const auto& t : treats) add_arc("depot", t, 0);
    for (const auto& t : treats) {
        for (const auto& r : recs) add_arc(t, r, 'k');
        for (const auto& d : disps) add_arc(t, d, 'z');
    }
    for (const auto& r : recs)
        for (const auto& d : disps) add_arc(r, d, 'v');

    for (const auto& r : recs) {
        inst.recycling_ratio[r] = 0.95;
        inst.co2_ops.recycling[r] = 398.0;
    }
    for (const auto& t : treats) {
        inst.co2_ops.treatment.push_back(TreatmentCo2{t, "incineration", 980.0});
        inst.co2_ops.treatment.push_back(TreatmentCo2{t, "chemical", 280.0});
    }
    for (const auto& d : disps) inst.co2_ops.disposal[d] = 271.0;

    inst.provenance = {
        {"waste_types", "derived"},
        {"recycling_ratio", "paper"},
        {"co2_ops", "paper"},
        {"capacity_levels.invest_cost", "paper"},
        {"capacity_levels.max_capacity", "derived"},
        {"arcs", "synthetic"},
        {"nodes", "synthetic"},
        {"vehicles", "synthetic"},
    };
    return inst;
}

}  // namespace hwlrp
