#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwlrp/instance.hpp"

namespace hwlrp {

namespace {

// Thin wrapper over mt19937_64 with hand-rolled uniforms; the standard
// distributions are implementation defined and would break byte-level
// reproducibility across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    // Rounded to 1/16 so sums of generated values stay exact in binary.
    double uniform_q(double lo, double hi) {
        return std::floor(uniform(lo, hi) * 16.0) / 16.0;
    }

    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::mt19937_64 gen_;
};

struct Point {
    double x = 0.0, y = 0.0;
};

double dist(const Point& a, const Point& b) {
    const double d = std::hypot(a.x - b.x, a.y - b.y);
    return std::round(d * 10.0) / 10.0;  // 0.1 km grid
}

}  // namespace

Instance synth_instance(std::uint64_t seed, const SynthDims& dims) {
    if (dims.n_gen < 1 || dims.n_rec < 1 || dims.n_treat < 1 || dims.n_disp < 1 ||
        dims.n_waste < 1 || dims.n_vehicles < 1 || dims.n_levels < 1)
        throw std::invalid_argument("synth_instance: all dims must be >= 1");
    if (dims.n_vehicles < dims.n_waste)
        throw std::invalid_argument(
            "synth_instance: need at least one vehicle per waste type");

    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 12345ULL);
    Instance inst;
    inst.name = "synth-" + std::to_string(seed) + "-g" + std::to_string(dims.n_gen) + "r" +
                std::to_string(dims.n_rec) + "t" + std::to_string(dims.n_treat) + "d" +
                std::to_string(dims.n_disp) + "w" + std::to_string(dims.n_waste) + "k" +
                std::to_string(dims.n_vehicles) + "h" + std::to_string(dims.n_levels);
    inst.eps_constant = 1e-4;

    std::map<std::string, Point> pos;
    auto add_node = [&](const std::string& id, NodeKind kind) {
        inst.nodes.push_back(Node{id, kind, ""});
        pos[id] = Point{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    };

    inst.nodes.push_back(Node{"dep", NodeKind::Depot, ""});
    pos["dep"] = Point{50.0, 50.0};
    std::vector<std::string> gens, recs, treats, disps;
    for (int i = 1; i <= dims.n_gen; ++i) {
        gens.push_back("g" + std::to_string(i));
        add_node(gens.back(), NodeKind::Generation);
    }
    for (int i = 1; i <= dims.n_rec; ++i) {
        recs.push_back("r" + std::to_string(i));
        add_node(recs.back(), NodeKind::RecyclingCandidate);
    }
    for (int i = 1; i <= dims.n_treat; ++i) {
        treats.push_back("t" + std::to_string(i));
        add_node(treats.back(), NodeKind::TreatmentCandidate);
    }
    for (int i = 1; i <= dims.n_disp; ++i) {
        disps.push_back("d" + std::to_string(i));
        add_node(disps.back(), NodeKind::DisposalCandidate);
    }

    inst.technologies.push_back(Technology{"tech_a", {}});  // incineration-like
    inst.technologies.push_back(Technology{"tech_b", {}});  // chemical-like

    // Waste classes rotate with the seed: recyclable-only, tech_a-only,
    // tech_b-only, both.
    const int class_offset = static_cast<int>(seed % 4);
    std::vector<double> waste_total(dims.n_waste, 0.0);
    for (int w = 0; w < dims.n_waste; ++w) {
        WasteType wt;
        wt.id = "w" + std::to_string(w + 1);
        const int cls = (w + class_offset) % 4;
        switch (cls) {
            case 0:
                wt.tech_compat = {{"tech_a", 0}, {"tech_b", 0}};
                wt.risk_potential = 0.05;
                break;
            case 1:
                wt.tech_compat = {{"tech_a", 1}, {"tech_b", 0}};
                wt.risk_potential = 0.2;
                break;
            case 2:
                wt.tech_compat = {{"tech_a", 0}, {"tech_b", 1}};
                wt.risk_potential = 0.2;
                break;
            default:
                wt.tech_compat = {{"tech_a", 1}, {"tech_b", 1}};
                wt.risk_potential = 0.2;
                break;
        }
        wt.recyclable_fraction_after_tech = {{"tech_a", 0.0}, {"tech_b", 0.3}};
        wt.mass_reduction = {{"tech_a", 0.8}, {"tech_b", 0.2}};
        for (const auto& g : gens) {
            const double d = rng.uniform_q(2.0, 10.0);
            wt.demand[g] = d;
            waste_total[w] += d;
        }
        inst.waste_types.push_back(std::move(wt));
    }

    // One waste type per vehicle, capacities sized so that any service
    // partition the oracle enumerates stays load-feasible.
    for (int k = 0; k < dims.n_vehicles; ++k) {
        Vehicle v;
        v.id = "k" + std::to_string(k + 1);
        const int w = k % dims.n_waste;
        for (int j = 0; j < dims.n_waste; ++j)
            v.waste_compat["w" + std::to_string(j + 1)] = (j == w) ? 1 : 0;
        v.capacity = std::ceil(waste_total[w] * 1.25) + 1.0;
        v.max_distance = 150.0 * (dims.n_gen + 3);
        inst.vehicles.push_back(std::move(v));
    }

    const double total = inst.total_demand();
    const double top_cap = std::ceil(total * 1.25) + 4.0;
    auto make_levels = [&](double risk_lo, double risk_hi) {
        std::vector<LevelCap> caps;
        for (int h = 1; h <= dims.n_levels; ++h) {
            LevelCap c;
            c.level = "L" + std::to_string(h);
            c.max_capacity = std::ceil(top_cap * h / dims.n_levels);
            c.invest_cost = std::floor(rng.uniform(800.0, 1600.0)) * (0.8 + 0.4 * h);
            c.op_risk = rng.uniform_q(risk_lo, risk_hi);
            caps.push_back(std::move(c));
        }
        return caps;
    };
    const double min_required = std::max(0.25, std::floor(total * 0.02 * 16.0) / 16.0);
    // Disposal thresholds stay well under the smallest plausible residue
    // inflow (a recyclable-only instance sheds only (1-gamma) of its mass).
    const double min_disposal = std::max(0.0625, std::floor(total * 0.005 * 16.0) / 16.0);
    inst.capacity_levels.levels.clear();
    for (int h = 1; h <= dims.n_levels; ++h)
        inst.capacity_levels.levels.push_back("L" + std::to_string(h));
    for (const auto& t : treats)
        for (const auto& tech : {"tech_a", "tech_b"}) {
            TreatmentCapEntry e;
            e.node = t;
            e.technology = tech;
            e.min_required = min_required;
            e.levels = make_levels(0.3, 1.0);
            inst.capacity_levels.treatment.push_back(std::move(e));
        }
    for (const auto& r : recs) {
        FacilityCapEntry e;
        e.node = r;
        e.min_required = min_required;
        e.levels = make_levels(0.1, 0.4);
        inst.capacity_levels.recycling.push_back(std::move(e));
    }
    for (const auto& d : disps) {
        FacilityCapEntry e;
        e.node = d;
        e.min_required = min_disposal;
        e.levels = make_levels(0.2, 0.6);
        inst.capacity_levels.disposal.push_back(std::move(e));
    }

    auto add_arc = [&](const std::string& a, const std::string& b, bool interfacility,
                       char flow_kind) {
        Arc arc;
        arc.from = a;
        arc.to = b;
        arc.distance = dist(pos[a], pos[b]);
        arc.unit_cost = std::round(arc.distance) * 0.01;
        arc.co2_transport.tr = rng.uniform_q(1.0, 2.5);
        arc.co2_transport.td = rng.uniform_q(1.0, 2.5);
        if (interfacility) {
            const double rate = rng.uniform_q(0.002, 0.02);
            if (flow_kind == 'k') arc.transport_risk.tr = rate;
            if (flow_kind == 'z') arc.transport_risk.td = rate;
            if (flow_kind == 'v') arc.transport_risk.rd = rate;
            arc.risk_cap = std::ceil(rate * total * 4.0) + 1.0;
        }
        inst.arcs.push_back(std::move(arc));
    };

    for (const auto& g : gens) add_arc("dep", g, false, 0);
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j) add_arc(gens[i], gens[j], false, 0);
    for (const auto& g : gens) {
        for (const auto& r : recs) add_arc(g, r, false, 0);
        for (const auto& t : treats) add_arc(g, t, false, 0);
    }
    for (const auto& r : recs) add_arc("dep", r, false, 0);
    for (const auto& t : treats) add_arc("dep", t, false, 0);
    for (const auto& t : treats) {
        for (const auto& r : recs) add_arc(t, r, true, 'k');
        for (const auto& d : disps) add_arc(t, d, true, 'z');
    }
    for (const auto& r : recs)
        for (const auto& d : disps) add_arc(r, d, true, 'v');

    for (const auto& r : recs) {
        inst.recycling_ratio[r] = rng.uniform_q(0.9, 0.98);
        inst.co2_ops.recycling[r] = std::floor(rng.uniform(300.0, 500.0));
    }
    for (const auto& t : treats) {
        inst.co2_ops.treatment.push_back(
            TreatmentCo2{t, "tech_a", std::floor(rng.uniform(800.0, 1100.0))});
        inst.co2_ops.treatment.push_back(
            TreatmentCo2{t, "tech_b", std::floor(rng.uniform(200.0, 350.0))});
    }
    for (const auto& d : disps)
        inst.co2_ops.disposal[d] = std::floor(rng.uniform(200.0, 300.0));

    inst.provenance["*"] = "synthetic";
    return inst;
}

}  // namespace hwlrp
