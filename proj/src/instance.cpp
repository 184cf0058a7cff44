#include "hwlrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace hwlrp {

using detail::json;
using detail::join_path;

std::string to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Depot: return "depot";
        case NodeKind::Generation: return "generation";
        case NodeKind::RecyclingCandidate: return "recycling-candidate";
        case NodeKind::RecyclingExisting: return "recycling-existing";
        case NodeKind::TreatmentCandidate: return "treatment-candidate";
        case NodeKind::TreatmentExisting: return "treatment-existing";
        case NodeKind::DisposalCandidate: return "disposal-candidate";
        case NodeKind::DisposalExisting: return "disposal-existing";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_string(const std::string& token) {
    static const std::map<std::string, NodeKind> table = {
        {"depot", NodeKind::Depot},
        {"generation", NodeKind::Generation},
        {"recycling-candidate", NodeKind::RecyclingCandidate},
        {"recycling-existing", NodeKind::RecyclingExisting},
        {"treatment-candidate", NodeKind::TreatmentCandidate},
        {"treatment-existing", NodeKind::TreatmentExisting},
        {"disposal-candidate", NodeKind::DisposalCandidate},
        {"disposal-existing", NodeKind::DisposalExisting},
    };
    auto it = table.find(token);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool is_recycling(NodeKind k) {
    return k == NodeKind::RecyclingCandidate || k == NodeKind::RecyclingExisting;
}
bool is_treatment(NodeKind k) {
    return k == NodeKind::TreatmentCandidate || k == NodeKind::TreatmentExisting;
}
bool is_disposal(NodeKind k) {
    return k == NodeKind::DisposalCandidate || k == NodeKind::DisposalExisting;
}
bool is_existing(NodeKind k) {
    return k == NodeKind::RecyclingExisting || k == NodeKind::TreatmentExisting ||
           k == NodeKind::DisposalExisting;
}
bool is_facility(NodeKind k) { return is_recycling(k) || is_treatment(k) || is_disposal(k); }

const Node* Instance::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const WasteType* Instance::find_waste(const std::string& id) const {
    for (const auto& w : waste_types)
        if (w.id == id) return &w;
    return nullptr;
}

const Vehicle* Instance::find_vehicle(const std::string& id) const {
    for (const auto& v : vehicles)
        if (v.id == id) return &v;
    return nullptr;
}

const Technology* Instance::find_technology(const std::string& id) const {
    for (const auto& t : technologies)
        if (t.id == id) return &t;
    return nullptr;
}

std::vector<const Node*> Instance::nodes_of(NodeKind kind) const {
    std::vector<const Node*> out;
    for (const auto& n : nodes)
        if (n.kind == kind) out.push_back(&n);
    return out;
}

std::vector<const Node*> Instance::depots() const { return nodes_of(NodeKind::Depot); }
std::vector<const Node*> Instance::generation_nodes() const {
    return nodes_of(NodeKind::Generation);
}

static std::vector<const Node*> collect(const Instance& inst, bool (*pred)(NodeKind)) {
    std::vector<const Node*> out;
    for (const auto& n : inst.nodes)
        if (pred(n.kind)) out.push_back(&n);
    return out;
}

std::vector<const Node*> Instance::recycling_nodes() const { return collect(*this, is_recycling); }
std::vector<const Node*> Instance::treatment_nodes() const { return collect(*this, is_treatment); }
std::vector<const Node*> Instance::disposal_nodes() const { return collect(*this, is_disposal); }

const Arc* Instance::find_arc(const std::string& from, const std::string& to) const {
    for (const auto& a : arcs) {
        if (a.from == from && a.to == to) return &a;
        if (a.symmetric && a.from == to && a.to == from) return &a;
    }
    return nullptr;
}

std::optional<double> Instance::distance(const std::string& from, const std::string& to,
                                         const std::string& vehicle_id) const {
    const Arc* a = find_arc(from, to);
    if (!a) return std::nullopt;
    if (!vehicle_id.empty()) {
        auto it = a->distance_by_vehicle.find(vehicle_id);
        if (it != a->distance_by_vehicle.end()) return it->second;
    }
    return a->distance;
}

const TreatmentCapEntry* Instance::treatment_caps(const std::string& node,
                                                  const std::string& tech) const {
    for (const auto& e : capacity_levels.treatment)
        if (e.node == node && e.technology == tech) return &e;
    return nullptr;
}

const FacilityCapEntry* Instance::recycling_caps(const std::string& node) const {
    for (const auto& e : capacity_levels.recycling)
        if (e.node == node) return &e;
    return nullptr;
}

const FacilityCapEntry* Instance::disposal_caps(const std::string& node) const {
    for (const auto& e : capacity_levels.disposal)
        if (e.node == node) return &e;
    return nullptr;
}

std::string Instance::vehicle_waste(const Vehicle& v) const {
    for (const auto& [w, flag] : v.waste_compat)
        if (flag) return w;
    return {};
}

double Instance::demand(const std::string& waste, const std::string& node) const {
    const WasteType* w = find_waste(waste);
    if (!w) return 0.0;
    auto it = w->demand.find(node);
    return it == w->demand.end() ? 0.0 : it->second;
}

double Instance::total_demand() const {
    double total = 0.0;
    for (const auto& w : waste_types)
        for (const auto& [node, d] : w.demand) total += d;
    return total;
}

int Instance::com(const std::string& waste, const std::string& tech) const {
    const WasteType* w = find_waste(waste);
    if (!w) return 0;
    auto it = w->tech_compat.find(tech);
    return it == w->tech_compat.end() ? 0 : it->second;
}

double Instance::beta(const std::string& waste, const std::string& tech) const {
    const WasteType* w = find_waste(waste);
    if (!w) return 0.0;
    auto it = w->recyclable_fraction_after_tech.find(tech);
    return it == w->recyclable_fraction_after_tech.end() ? 0.0 : it->second;
}

double Instance::mass_reduction_of(const std::string& waste, const std::string& tech) const {
    const WasteType* w = find_waste(waste);
    if (!w) return 0.0;
    auto it = w->mass_reduction.find(tech);
    return it == w->mass_reduction.end() ? 0.0 : it->second;
}

bool Instance::recyclable_only(const std::string& waste) const {
    const WasteType* w = find_waste(waste);
    if (!w) return false;
    for (const auto& [tech, flag] : w->tech_compat)
        if (flag) return false;
    return true;
}

double Instance::gamma(const std::string& node) const {
    auto it = recycling_ratio.find(node);
    return it == recycling_ratio.end() ? 1.0 : it->second;
}

double Instance::co2_recycling(const std::string& node) const {
    auto it = co2_ops.recycling.find(node);
    return it == co2_ops.recycling.end() ? 0.0 : it->second;
}

double Instance::co2_treatment(const std::string& node, const std::string& tech) const {
    for (const auto& e : co2_ops.treatment)
        if (e.node == node && e.technology == tech) return e.rate;
    return 0.0;
}

double Instance::co2_disposal(const std::string& node) const {
    auto it = co2_ops.disposal.find(node);
    return it == co2_ops.disposal.end() ? 0.0 : it->second;
}

ParseError::ParseError(std::string message, std::size_t line, std::size_t column)
    : std::runtime_error("parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

SchemaError::SchemaError(std::string field, std::string message)
    : std::runtime_error("schema violation at '" + field + "': " + message),
      field_(std::move(field)) {}

// ---------------------------------------------------------------------------
// parsing

namespace {

std::pair<std::size_t, std::size_t> offset_to_line_col(const std::string& text,
                                                       std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::map<std::string, double> parse_number_map(const json& j, const std::string& path,
                                               double lo, double hi, const char* what) {
    detail::require_object(j, path);
    std::map<std::string, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string p = join_path(path, it.key());
        double v = detail::get_number(*it, p);
        if (!(v >= lo && v <= hi)) throw SchemaError(p, what);
        out[it.key()] = v;
    }
    return out;
}

std::map<std::string, int> parse_flag_map(const json& j, const std::string& path) {
    detail::require_object(j, path);
    std::map<std::string, int> out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out[it.key()] = detail::get_flag(*it, join_path(path, it.key()));
    return out;
}

const double kInf = std::numeric_limits<double>::infinity();

std::vector<LevelCap> parse_level_caps(const json& j, const std::string& path) {
    detail::require_array(j, path);
    std::vector<LevelCap> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        detail::check_keys(j[i], p, {"level", "max_capacity", "invest_cost", "op_risk"});
        LevelCap cap;
        cap.level = detail::get_string(detail::require_field(j[i], p, "level"),
                                       join_path(p, "level"));
        cap.max_capacity = detail::get_number_min(
            detail::require_field(j[i], p, "max_capacity"), join_path(p, "max_capacity"),
            0.0, "max_capacity must be >= 0");
        cap.invest_cost = detail::get_number_min(
            detail::require_field(j[i], p, "invest_cost"), join_path(p, "invest_cost"),
            0.0, "invest_cost must be >= 0");
        cap.op_risk = detail::get_number_min(detail::require_field(j[i], p, "op_risk"),
                                             join_path(p, "op_risk"), 0.0,
                                             "op_risk must be >= 0");
        out.push_back(std::move(cap));
    }
    return out;
}

}  // namespace

Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = offset_to_line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(e.what(), line, col);
    }

    detail::check_keys(doc, "",
                       {"schema", "name", "eps_constant", "nodes", "technologies",
                        "waste_types", "vehicles", "capacity_levels", "arcs",
                        "recycling_ratio", "co2_ops", "waste_composition", "provenance",
                        "risk_tables"});

    const std::string schema =
        detail::get_string(detail::require_field(doc, "", "schema"), "schema");
    if (schema != "hwlrp-instance/1")
        throw SchemaError("schema", "unsupported schema '" + schema + "'");

    Instance inst;
    if (doc.contains("name")) inst.name = detail::get_string(doc["name"], "name");

    if (doc.contains("eps_constant")) {
        inst.eps_constant = detail::get_number(doc["eps_constant"], "eps_constant");
        if (!(inst.eps_constant >= 1e-6 && inst.eps_constant <= 1e-3))
            throw SchemaError("eps_constant", "must lie in [1e-6, 1e-3]");
    }

    const json& jnodes = detail::require_field(doc, "", "nodes");
    detail::require_array(jnodes, "nodes");
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const std::string p = "nodes[" + std::to_string(i) + "]";
        detail::check_keys(jnodes[i], p, {"id", "kind", "district"});
        Node n;
        n.id = detail::get_string(detail::require_field(jnodes[i], p, "id"),
                                  join_path(p, "id"));
        if (!seen_ids.insert(n.id).second)
            throw SchemaError(join_path(p, "id"), "duplicate node id '" + n.id + "'");
        const std::string kind = detail::get_string(
            detail::require_field(jnodes[i], p, "kind"), join_path(p, "kind"));
        auto k = node_kind_from_string(kind);
        if (!k) throw SchemaError(join_path(p, "kind"), "unknown node kind '" + kind + "'");
        n.kind = *k;
        if (jnodes[i].contains("district"))
            n.district = detail::get_string(jnodes[i]["district"], join_path(p, "district"));
        inst.nodes.push_back(std::move(n));
    }

    const json& jtech = detail::require_field(doc, "", "technologies");
    detail::require_array(jtech, "technologies");
    for (std::size_t i = 0; i < jtech.size(); ++i) {
        const std::string p = "technologies[" + std::to_string(i) + "]";
        detail::check_keys(jtech[i], p, {"id", "availability"});
        Technology t;
        t.id = detail::get_string(detail::require_field(jtech[i], p, "id"),
                                  join_path(p, "id"));
        if (jtech[i].contains("availability"))
            t.availability = parse_flag_map(jtech[i]["availability"],
                                            join_path(p, "availability"));
        inst.technologies.push_back(std::move(t));
    }

    const json& jwaste = detail::require_field(doc, "", "waste_types");
    detail::require_array(jwaste, "waste_types");
    for (std::size_t i = 0; i < jwaste.size(); ++i) {
        const std::string p = "waste_types[" + std::to_string(i) + "]";
        detail::check_keys(jwaste[i], p,
                           {"id", "risk_potential", "demand", "tech_compat",
                            "recyclable_fraction_after_tech", "mass_reduction"});
        WasteType w;
        w.id = detail::get_string(detail::require_field(jwaste[i], p, "id"),
                                  join_path(p, "id"));
        w.risk_potential = detail::get_number_min(
            detail::require_field(jwaste[i], p, "risk_potential"),
            join_path(p, "risk_potential"), 0.0, "risk_potential must be >= 0");
        w.demand = parse_number_map(detail::require_field(jwaste[i], p, "demand"),
                                    join_path(p, "demand"), 0.0, kInf,
                                    "demand must be >= 0");
        if (jwaste[i].contains("tech_compat"))
            w.tech_compat = parse_flag_map(jwaste[i]["tech_compat"],
                                           join_path(p, "tech_compat"));
        if (jwaste[i].contains("recyclable_fraction_after_tech"))
            w.recyclable_fraction_after_tech = parse_number_map(
                jwaste[i]["recyclable_fraction_after_tech"],
                join_path(p, "recyclable_fraction_after_tech"), 0.0, 1.0,
                "expected a ratio in [0,1]");
        if (jwaste[i].contains("mass_reduction"))
            w.mass_reduction =
                parse_number_map(jwaste[i]["mass_reduction"], join_path(p, "mass_reduction"),
                                 0.0, 1.0, "expected a ratio in [0,1]");
        inst.waste_types.push_back(std::move(w));
    }

    const json& jveh = detail::require_field(doc, "", "vehicles");
    detail::require_array(jveh, "vehicles");
    for (std::size_t i = 0; i < jveh.size(); ++i) {
        const std::string p = "vehicles[" + std::to_string(i) + "]";
        detail::check_keys(jveh[i], p, {"id", "waste_compat", "capacity", "max_distance"});
        Vehicle v;
        v.id = detail::get_string(detail::require_field(jveh[i], p, "id"),
                                  join_path(p, "id"));
        v.waste_compat =
            parse_flag_map(detail::require_field(jveh[i], p, "waste_compat"),
                           join_path(p, "waste_compat"));
        v.capacity = detail::get_number(detail::require_field(jveh[i], p, "capacity"),
                                        join_path(p, "capacity"));
        if (!(v.capacity > 0.0))
            throw SchemaError(join_path(p, "capacity"), "capacity must be > 0");
        v.max_distance = detail::get_number(
            detail::require_field(jveh[i], p, "max_distance"), join_path(p, "max_distance"));
        if (!(v.max_distance > 0.0))
            throw SchemaError(join_path(p, "max_distance"), "max_distance must be > 0");
        inst.vehicles.push_back(std::move(v));
    }

    const json& jcaps = detail::require_field(doc, "", "capacity_levels");
    detail::check_keys(jcaps, "capacity_levels",
                       {"levels", "treatment", "recycling", "disposal"});
    const json& jlevels = detail::require_field(jcaps, "capacity_levels", "levels");
    detail::require_array(jlevels, "capacity_levels.levels");
    for (std::size_t i = 0; i < jlevels.size(); ++i)
        inst.capacity_levels.levels.push_back(detail::get_string(
            jlevels[i], "capacity_levels.levels[" + std::to_string(i) + "]"));
    if (jcaps.contains("treatment")) {
        const json& arr = jcaps["treatment"];
        detail::require_array(arr, "capacity_levels.treatment");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "capacity_levels.treatment[" + std::to_string(i) + "]";
            detail::check_keys(arr[i], p, {"node", "technology", "min_required", "levels"});
            TreatmentCapEntry e;
            e.node = detail::get_string(detail::require_field(arr[i], p, "node"),
                                        join_path(p, "node"));
            e.technology = detail::get_string(
                detail::require_field(arr[i], p, "technology"), join_path(p, "technology"));
            e.min_required = detail::get_number_min(
                detail::require_field(arr[i], p, "min_required"),
                join_path(p, "min_required"), 0.0, "min_required must be >= 0");
            e.levels = parse_level_caps(detail::require_field(arr[i], p, "levels"),
                                        join_path(p, "levels"));
            inst.capacity_levels.treatment.push_back(std::move(e));
        }
    }
    auto parse_fac_entries = [&](const char* key, std::vector<FacilityCapEntry>& out) {
        if (!jcaps.contains(key)) return;
        const json& arr = jcaps[key];
        const std::string base = std::string("capacity_levels.") + key;
        detail::require_array(arr, base);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = base + "[" + std::to_string(i) + "]";
            detail::check_keys(arr[i], p, {"node", "min_required", "levels"});
            FacilityCapEntry e;
            e.node = detail::get_string(detail::require_field(arr[i], p, "node"),
                                        join_path(p, "node"));
            e.min_required = detail::get_number_min(
                detail::require_field(arr[i], p, "min_required"),
                join_path(p, "min_required"), 0.0, "min_required must be >= 0");
            e.levels = parse_level_caps(detail::require_field(arr[i], p, "levels"),
                                        join_path(p, "levels"));
            out.push_back(std::move(e));
        }
    };
    parse_fac_entries("recycling", inst.capacity_levels.recycling);
    parse_fac_entries("disposal", inst.capacity_levels.disposal);

    const json& jarcs = detail::require_field(doc, "", "arcs");
    detail::require_array(jarcs, "arcs");
    for (std::size_t i = 0; i < jarcs.size(); ++i) {
        const std::string p = "arcs[" + std::to_string(i) + "]";
        detail::check_keys(jarcs[i], p,
                           {"from", "to", "distance", "symmetric", "distance_by_vehicle",
                            "unit_cost", "transport_risk", "risk_cap", "co2_transport"});
        Arc a;
        a.from = detail::get_string(detail::require_field(jarcs[i], p, "from"),
                                    join_path(p, "from"));
        a.to = detail::get_string(detail::require_field(jarcs[i], p, "to"),
                                  join_path(p, "to"));
        a.distance = detail::get_number_min(detail::require_field(jarcs[i], p, "distance"),
                                            join_path(p, "distance"), 0.0,
                                            "distance must be >= 0");
        if (jarcs[i].contains("symmetric")) {
            const json& s = jarcs[i]["symmetric"];
            if (!s.is_boolean()) throw SchemaError(join_path(p, "symmetric"), "expected a bool");
            a.symmetric = s.get<bool>();
        }
        if (jarcs[i].contains("distance_by_vehicle"))
            a.distance_by_vehicle = parse_number_map(
                jarcs[i]["distance_by_vehicle"], join_path(p, "distance_by_vehicle"), 0.0,
                kInf, "distance must be >= 0");
        if (jarcs[i].contains("unit_cost"))
            a.unit_cost = detail::get_number_min(jarcs[i]["unit_cost"],
                                                 join_path(p, "unit_cost"), 0.0,
                                                 "unit_cost must be >= 0");
        if (jarcs[i].contains("transport_risk")) {
            const json& r = jarcs[i]["transport_risk"];
            const std::string rp = join_path(p, "transport_risk");
            detail::check_keys(r, rp, {"tr", "td", "rd"});
            if (r.contains("tr"))
                a.transport_risk.tr = detail::get_number_min(r["tr"], join_path(rp, "tr"),
                                                             0.0, "risk rate must be >= 0");
            if (r.contains("td"))
                a.transport_risk.td = detail::get_number_min(r["td"], join_path(rp, "td"),
                                                             0.0, "risk rate must be >= 0");
            if (r.contains("rd"))
                a.transport_risk.rd = detail::get_number_min(r["rd"], join_path(rp, "rd"),
                                                             0.0, "risk rate must be >= 0");
        }
        if (jarcs[i].contains("risk_cap"))
            a.risk_cap = detail::get_number_min(jarcs[i]["risk_cap"],
                                                join_path(p, "risk_cap"), 0.0,
                                                "risk_cap must be >= 0");
        if (jarcs[i].contains("co2_transport")) {
            const json& c = jarcs[i]["co2_transport"];
            const std::string cp = join_path(p, "co2_transport");
            detail::check_keys(c, cp, {"tr", "td"});
            if (c.contains("tr"))
                a.co2_transport.tr = detail::get_number_min(c["tr"], join_path(cp, "tr"),
                                                            0.0, "rate must be >= 0");
            if (c.contains("td"))
                a.co2_transport.td = detail::get_number_min(c["td"], join_path(cp, "td"),
                                                            0.0, "rate must be >= 0");
        }
        inst.arcs.push_back(std::move(a));
    }

    if (doc.contains("recycling_ratio"))
        inst.recycling_ratio = parse_number_map(doc["recycling_ratio"], "recycling_ratio",
                                                0.0, 1.0, "expected a ratio in [0,1]");

    if (doc.contains("co2_ops")) {
        const json& c = doc["co2_ops"];
        detail::check_keys(c, "co2_ops", {"recycling", "treatment", "disposal"});
        if (c.contains("recycling"))
            inst.co2_ops.recycling = parse_number_map(c["recycling"], "co2_ops.recycling",
                                                      0.0, kInf, "rate must be >= 0");
        if (c.contains("treatment")) {
            const json& arr = c["treatment"];
            detail::require_array(arr, "co2_ops.treatment");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string p = "co2_ops.treatment[" + std::to_string(i) + "]";
                detail::check_keys(arr[i], p, {"node", "technology", "rate"});
                TreatmentCo2 e;
                e.node = detail::get_string(detail::require_field(arr[i], p, "node"),
                                            join_path(p, "node"));
                e.technology = detail::get_string(
                    detail::require_field(arr[i], p, "technology"),
                    join_path(p, "technology"));
                e.rate = detail::get_number_min(detail::require_field(arr[i], p, "rate"),
                                                join_path(p, "rate"), 0.0,
                                                "rate must be >= 0");
                inst.co2_ops.treatment.push_back(std::move(e));
            }
        }
        if (c.contains("disposal"))
            inst.co2_ops.disposal = parse_number_map(c["disposal"], "co2_ops.disposal",
                                                     0.0, kInf, "rate must be >= 0");
    }

    if (doc.contains("waste_composition")) {
        const json& wc = doc["waste_composition"];
        detail::require_object(wc, "waste_composition");
        for (auto it = wc.begin(); it != wc.end(); ++it)
            inst.waste_composition[it.key()] = parse_number_map(
                *it, join_path("waste_composition", it.key()), 0.0, 1.0,
                "expected a ratio in [0,1]");
    }

    if (doc.contains("provenance")) {
        const json& prov = doc["provenance"];
        detail::require_object(prov, "provenance");
        for (auto it = prov.begin(); it != prov.end(); ++it) {
            const std::string p = join_path("provenance", it.key());
            const std::string v = detail::get_string(*it, p);
            if (v != "paper" && v != "synthetic" && v != "derived")
                throw SchemaError(p, "expected one of paper|synthetic|derived");
            inst.provenance[it.key()] = v;
        }
    }

    if (doc.contains("risk_tables")) {
        const json& r = doc["risk_tables"];
        detail::check_keys(r, "risk_tables",
                           {"consequence_low", "consequence_high", "consequence_midpoint",
                            "accident_rate_per_km", "release_probability",
                            "site_probability", "district_density", "residue_potential"});
        RiskTables rt;
        auto num = [&](const char* key) {
            return detail::get_number_min(detail::require_field(r, "risk_tables", key),
                                          join_path("risk_tables", key), 0.0,
                                          "must be >= 0");
        };
        rt.consequence_low = num("consequence_low");
        rt.consequence_high = num("consequence_high");
        rt.consequence_midpoint = num("consequence_midpoint");
        rt.accident_rate_per_km = num("accident_rate_per_km");
        rt.release_probability = num("release_probability");
        if (r.contains("site_probability"))
            rt.site_probability = parse_number_map(r["site_probability"],
                                                   "risk_tables.site_probability", 0.0, kInf,
                                                   "must be >= 0");
        if (r.contains("district_density"))
            rt.district_density = parse_number_map(r["district_density"],
                                                   "risk_tables.district_density", 0.0, kInf,
                                                   "must be >= 0");
        if (r.contains("residue_potential"))
            rt.residue_potential = parse_number_map(r["residue_potential"],
                                                    "risk_tables.residue_potential", 0.0,
                                                    kInf, "must be >= 0");
        inst.risk_tables = std::move(rt);
    }

    return inst;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

json level_caps_to_json(const std::vector<LevelCap>& caps) {
    json arr = json::array();
    for (const auto& c : caps) {
        json j;
        j["level"] = c.level;
        j["max_capacity"] = c.max_capacity;
        j["invest_cost"] = c.invest_cost;
        j["op_risk"] = c.op_risk;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

std::string serialize_instance(const Instance& inst) {
    json doc;
    doc["schema"] = "hwlrp-instance/1";
    doc["name"] = inst.name;
    doc["eps_constant"] = inst.eps_constant;

    json nodes = json::array();
    for (const auto& n : inst.nodes) {
        json j;
        j["id"] = n.id;
        j["kind"] = to_string(n.kind);
        if (!n.district.empty()) j["district"] = n.district;
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);

    json techs = json::array();
    for (const auto& t : inst.technologies) {
        json j;
        j["id"] = t.id;
        if (!t.availability.empty()) j["availability"] = t.availability;
        techs.push_back(std::move(j));
    }
    doc["technologies"] = std::move(techs);

    json wastes = json::array();
    for (const auto& w : inst.waste_types) {
        json j;
        j["id"] = w.id;
        j["risk_potential"] = w.risk_potential;
        j["demand"] = w.demand;
        j["tech_compat"] = w.tech_compat;
        j["recyclable_fraction_after_tech"] = w.recyclable_fraction_after_tech;
        j["mass_reduction"] = w.mass_reduction;
        wastes.push_back(std::move(j));
    }
    doc["waste_types"] = std::move(wastes);

    json vehicles = json::array();
    for (const auto& v : inst.vehicles) {
        json j;
        j["id"] = v.id;
        j["waste_compat"] = v.waste_compat;
        j["capacity"] = v.capacity;
        j["max_distance"] = v.max_distance;
        vehicles.push_back(std::move(j));
    }
    doc["vehicles"] = std::move(vehicles);

    json caps;
    caps["levels"] = inst.capacity_levels.levels;
    json tarr = json::array();
    for (const auto& e : inst.capacity_levels.treatment) {
        json j;
        j["node"] = e.node;
        j["technology"] = e.technology;
        j["min_required"] = e.min_required;
        j["levels"] = level_caps_to_json(e.levels);
        tarr.push_back(std::move(j));
    }
    caps["treatment"] = std::move(tarr);
    auto fac_to_json = [](const std::vector<FacilityCapEntry>& entries) {
        json arr = json::array();
        for (const auto& e : entries) {
            json j;
            j["node"] = e.node;
            j["min_required"] = e.min_required;
            j["levels"] = level_caps_to_json(e.levels);
            arr.push_back(std::move(j));
        }
        return arr;
    };
    caps["recycling"] = fac_to_json(inst.capacity_levels.recycling);
    caps["disposal"] = fac_to_json(inst.capacity_levels.disposal);
    doc["capacity_levels"] = std::move(caps);

    json arcs = json::array();
    for (const auto& a : inst.arcs) {
        json j;
        j["from"] = a.from;
        j["to"] = a.to;
        j["distance"] = a.distance;
        if (!a.symmetric) j["symmetric"] = false;
        if (!a.distance_by_vehicle.empty()) j["distance_by_vehicle"] = a.distance_by_vehicle;
        j["unit_cost"] = a.unit_cost;
        json r;
        r["tr"] = a.transport_risk.tr;
        r["td"] = a.transport_risk.td;
        r["rd"] = a.transport_risk.rd;
        j["transport_risk"] = std::move(r);
        if (a.risk_cap) j["risk_cap"] = *a.risk_cap;
        json c;
        c["tr"] = a.co2_transport.tr;
        c["td"] = a.co2_transport.td;
        j["co2_transport"] = std::move(c);
        arcs.push_back(std::move(j));
    }
    doc["arcs"] = std::move(arcs);

    doc["recycling_ratio"] = inst.recycling_ratio;

    json co2;
    co2["recycling"] = inst.co2_ops.recycling;
    json tc = json::array();
    for (const auto& e : inst.co2_ops.treatment) {
        json j;
        j["node"] = e.node;
        j["technology"] = e.technology;
        j["rate"] = e.rate;
        tc.push_back(std::move(j));
    }
    co2["treatment"] = std::move(tc);
    co2["disposal"] = inst.co2_ops.disposal;
    doc["co2_ops"] = std::move(co2);

    if (!inst.waste_composition.empty()) doc["waste_composition"] = inst.waste_composition;

    if (!inst.provenance.empty()) doc["provenance"] = inst.provenance;

    if (inst.risk_tables) {
        const RiskTables& rt = *inst.risk_tables;
        json r;
        r["consequence_low"] = rt.consequence_low;
        r["consequence_high"] = rt.consequence_high;
        r["consequence_midpoint"] = rt.consequence_midpoint;
        r["accident_rate_per_km"] = rt.accident_rate_per_km;
        r["release_probability"] = rt.release_probability;
        r["site_probability"] = rt.site_probability;
        r["district_density"] = rt.district_density;
        r["residue_potential"] = rt.residue_potential;
        doc["risk_tables"] = std::move(r);
    }

    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// validation

namespace {

void add(std::vector<Finding>& out, Severity sev, std::string code, std::string entity,
         std::string message) {
    out.push_back(Finding{sev, std::move(code), std::move(entity), std::move(message)});
}

}  // namespace

std::vector<Finding> validate_instance(const Instance& inst) {
    std::vector<Finding> out;

    std::set<std::string> ids;
    for (const auto& n : inst.nodes) {
        if (!ids.insert(n.id).second)
            add(out, Severity::Fatal, "duplicate-node-id", n.id, "node id appears twice");
    }
    if (inst.depots().empty())
        add(out, Severity::Fatal, "no-depot", "nodes", "at least one depot is required");
    if (inst.generation_nodes().empty())
        add(out, Severity::Fatal, "no-generation-node", "nodes",
            "at least one generation node is required");

    auto known_node = [&](const std::string& id) { return inst.find_node(id) != nullptr; };
    auto known_tech = [&](const std::string& id) {
        return inst.find_technology(id) != nullptr;
    };

    for (const auto& t : inst.technologies) {
        for (const auto& [node, flag] : t.availability) {
            const Node* n = inst.find_node(node);
            if (!n)
                add(out, Severity::Fatal, "unknown-node", "technologies." + t.id,
                    "availability references unknown node '" + node + "'");
            else if (n->kind != NodeKind::TreatmentExisting && flag)
                add(out, Severity::Fatal, "availability-on-non-existing",
                    "technologies." + t.id,
                    "availability only applies to existing treatment nodes ('" + node + "')");
        }
    }

    for (const auto& w : inst.waste_types) {
        for (const auto& [node, d] : w.demand) {
            const Node* n = inst.find_node(node);
            if (!n || n->kind != NodeKind::Generation)
                add(out, Severity::Fatal, "demand-on-non-generation", "waste." + w.id,
                    "demand placed on '" + node + "' which is not a generation node");
            if (d < 0.0)
                add(out, Severity::Fatal, "negative-demand", "waste." + w.id,
                    "demand at '" + node + "' is negative");
        }
        for (const auto& [tech, flag] : w.tech_compat) {
            if (!known_tech(tech))
                add(out, Severity::Fatal, "unknown-technology", "waste." + w.id,
                    "tech_compat references unknown technology '" + tech + "'");
            (void)flag;
        }
        auto check_ratio_map = [&](const std::map<std::string, double>& m, const char* what) {
            for (const auto& [tech, v] : m) {
                if (!known_tech(tech))
                    add(out, Severity::Fatal, "unknown-technology", "waste." + w.id,
                        std::string(what) + " references unknown technology '" + tech + "'");
                if (v < 0.0 || v > 1.0)
                    add(out, Severity::Fatal, "ratio-out-of-range", "waste." + w.id,
                        std::string(what) + " for '" + tech + "' is outside [0,1]");
            }
        };
        check_ratio_map(w.recyclable_fraction_after_tech, "recyclable_fraction_after_tech");
        check_ratio_map(w.mass_reduction, "mass_reduction");
    }

    for (const auto& v : inst.vehicles) {
        int compat = 0;
        for (const auto& [waste, flag] : v.waste_compat) {
            if (!inst.find_waste(waste))
                add(out, Severity::Fatal, "unknown-waste", "vehicle." + v.id,
                    "waste_compat references unknown waste '" + waste + "'");
            compat += flag;
        }
        if (compat != 1)
            add(out, Severity::Fatal, "vehicle-waste-compat", "vehicle." + v.id,
                "each vehicle must be compatible with exactly one waste type");
        if (!(v.capacity > 0.0))
            add(out, Severity::Fatal, "vehicle-capacity", "vehicle." + v.id,
                "capacity must be > 0");
        if (!(v.max_distance > 0.0))
            add(out, Severity::Fatal, "vehicle-distance", "vehicle." + v.id,
                "max_distance must be > 0");
    }

    // Largest single demand must fit every compatible vehicle: the load
    // window d <= lo <= delta is unsatisfiable otherwise.
    for (const auto& w : inst.waste_types) {
        bool any_vehicle = false;
        for (const auto& v : inst.vehicles)
            if (v.waste_compat.count(w.id) && v.waste_compat.at(w.id)) any_vehicle = true;
        for (const auto& [node, d] : w.demand) {
            if (d <= 0.0) continue;
            if (!any_vehicle) {
                add(out, Severity::Fatal, "no-compatible-vehicle", "waste." + w.id,
                    "positive demand at '" + node + "' but no compatible vehicle");
                continue;
            }
            for (const auto& v : inst.vehicles) {
                if (!(v.waste_compat.count(w.id) && v.waste_compat.at(w.id))) continue;
                if (d > v.capacity)
                    add(out, Severity::Fatal, "demand-exceeds-capacity",
                        "waste." + w.id + "@" + node,
                        "demand " + std::to_string(d) + " exceeds capacity of vehicle '" +
                            v.id + "' (" + std::to_string(v.capacity) + ")");
            }
        }
    }

    // Serviceability of waste classes: recyclable-only types need a
    // recycling node, treatable types a compatible treatment entry.
    for (const auto& w : inst.waste_types) {
        double total = 0.0;
        for (const auto& [node, d] : w.demand) total += d;
        if (total <= 0.0) continue;
        if (inst.recyclable_only(w.id)) {
            if (inst.recycling_nodes().empty())
                add(out, Severity::Fatal, "no-recycling-node", "waste." + w.id,
                    "recyclable-only waste with demand but no recycling node");
        } else {
            bool any = false;
            for (const auto& e : inst.capacity_levels.treatment)
                if (inst.com(w.id, e.technology)) any = true;
            if (!any)
                add(out, Severity::Fatal, "no-compatible-treatment", "waste." + w.id,
                    "treatable waste with demand but no compatible treatment capacity entry");
        }
    }

    auto check_caps = [&](const std::string& entity, const std::string& node,
                          double min_required, const std::vector<LevelCap>& levels) {
        if (!known_node(node))
            add(out, Severity::Fatal, "unknown-node", entity,
                "capacity entry references unknown node '" + node + "'");
        if (!(min_required > 0.0))
            add(out, Severity::Fatal, "min-threshold-nonpositive", entity,
                "minimum threshold must be > 0");
        if (levels.empty())
            add(out, Severity::Fatal, "no-levels", entity, "no capacity levels listed");
        for (const auto& c : levels) {
            if (std::find(inst.capacity_levels.levels.begin(),
                          inst.capacity_levels.levels.end(),
                          c.level) == inst.capacity_levels.levels.end())
                add(out, Severity::Fatal, "unknown-level", entity,
                    "level '" + c.level + "' not declared in capacity_levels.levels");
            if (min_required > c.max_capacity)
                add(out, Severity::Fatal, "min-exceeds-max", entity,
                    "minimum threshold exceeds max capacity of level '" + c.level + "'");
            if (c.invest_cost < 0.0 || c.op_risk < 0.0)
                add(out, Severity::Fatal, "negative-cost-or-risk", entity,
                    "costs and risks must be >= 0");
        }
    };
    for (const auto& e : inst.capacity_levels.treatment) {
        check_caps("caps.treatment." + e.node + "." + e.technology, e.node, e.min_required,
                   e.levels);
        const Node* n = inst.find_node(e.node);
        if (n && !is_treatment(n->kind))
            add(out, Severity::Fatal, "caps-wrong-kind", "caps.treatment." + e.node,
                "treatment capacity entry on a non-treatment node");
        if (!known_tech(e.technology))
            add(out, Severity::Fatal, "unknown-technology", "caps.treatment." + e.node,
                "unknown technology '" + e.technology + "'");
    }
    for (const auto& e : inst.capacity_levels.recycling) {
        check_caps("caps.recycling." + e.node, e.node, e.min_required, e.levels);
        const Node* n = inst.find_node(e.node);
        if (n && !is_recycling(n->kind))
            add(out, Severity::Fatal, "caps-wrong-kind", "caps.recycling." + e.node,
                "recycling capacity entry on a non-recycling node");
    }
    for (const auto& e : inst.capacity_levels.disposal) {
        check_caps("caps.disposal." + e.node, e.node, e.min_required, e.levels);
        const Node* n = inst.find_node(e.node);
        if (n && !is_disposal(n->kind))
            add(out, Severity::Fatal, "caps-wrong-kind", "caps.disposal." + e.node,
                "disposal capacity entry on a non-disposal node");
    }

    // Every facility node needs a capacity entry, every existing treatment
    // node an available technology.
    for (const auto& n : inst.nodes) {
        if (is_recycling(n.kind) && !inst.recycling_caps(n.id))
            add(out, Severity::Fatal, "missing-caps", n.id,
                "recycling node has no capacity entry");
        if (is_disposal(n.kind) && !inst.disposal_caps(n.id))
            add(out, Severity::Fatal, "missing-caps", n.id,
                "disposal node has no capacity entry");
        if (is_treatment(n.kind)) {
            bool any = false;
            for (const auto& e : inst.capacity_levels.treatment)
                if (e.node == n.id) any = true;
            if (!any)
                add(out, Severity::Fatal, "missing-caps", n.id,
                    "treatment node has no capacity entry");
        }
        if (n.kind == NodeKind::TreatmentExisting) {
            int avail = 0;
            for (const auto& t : inst.technologies) {
                auto it = t.availability.find(n.id);
                if (it != t.availability.end()) avail += it->second;
            }
            if (avail != 1)
                add(out, Severity::Fatal, "existing-availability", n.id,
                    "existing treatment node must have exactly one available technology");
        }
        if (is_recycling(n.kind) && !inst.recycling_ratio.count(n.id))
            add(out, Severity::Fatal, "missing-gamma", n.id,
                "recycling node has no recycling_ratio entry");
    }

    for (const auto& a : inst.arcs) {
        if (!known_node(a.from) || !known_node(a.to))
            add(out, Severity::Fatal, "unknown-node", "arc " + a.from + "->" + a.to,
                "arc references an unknown node");
        if (a.distance < 0.0)
            add(out, Severity::Fatal, "negative-distance", "arc " + a.from + "->" + a.to,
                "distance must be >= 0");
        if (a.risk_cap && *a.risk_cap < 0.0)
            add(out, Severity::Fatal, "negative-risk-cap", "arc " + a.from + "->" + a.to,
                "risk_cap must be >= 0");
    }

    if (!(inst.eps_constant >= 1e-6 && inst.eps_constant <= 1e-3))
        add(out, Severity::Fatal, "eps-out-of-range", "eps_constant",
            "eps_constant must lie in [1e-6, 1e-3]");

    return out;
}

bool has_fatal(const std::vector<Finding>& findings) {
    for (const auto& f : findings)
        if (f.severity == Severity::Fatal) return true;
    return false;
}

std::string format_findings(const std::vector<Finding>& findings) {
    std::ostringstream os;
    for (const auto& f : findings) {
        os << (f.severity == Severity::Fatal ? "FATAL  " : "WARN   ") << f.code << " ["
           << f.entity << "] " << f.message << "\n";
    }
    return os.str();
}

}  // namespace hwlrp
