#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hwlrp {

enum class NodeKind {
    Depot,
    Generation,
    RecyclingCandidate,
    RecyclingExisting,
    TreatmentCandidate,
    TreatmentExisting,
    DisposalCandidate,
    DisposalExisting,
};

std::string to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& token);

bool is_recycling(NodeKind kind);
bool is_treatment(NodeKind kind);
bool is_disposal(NodeKind kind);
bool is_existing(NodeKind kind);
bool is_facility(NodeKind kind);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Generation;
    std::string district;  // optional label, empty when absent

    bool operator==(const Node&) const = default;
};

/// One hazardous-waste category: demands per generation node (d_wi),
/// technology compatibility (com_wq) and the post-treatment ratios
/// beta_wq (recyclable fraction of residue) and r_wq (mass reduction).
struct WasteType {
    std::string id;
    double risk_potential = 0.0;
    std::map<std::string, double> demand;                           // generation node -> tons
    std::map<std::string, int> tech_compat;                         // technology -> 0/1
    std::map<std::string, double> recyclable_fraction_after_tech;   // technology -> [0,1]
    std::map<std::string, double> mass_reduction;                   // technology -> [0,1]

    bool operator==(const WasteType&) const = default;
};

/// A collection truck. Each vehicle is compatible with exactly one waste
/// type; capacity is delta_w and max_distance is mu_w.
struct Vehicle {
    std::string id;
    std::map<std::string, int> waste_compat;  // waste type -> 0/1
    double capacity = 0.0;                    // tons
    double max_distance = 0.0;                // km

    bool operator==(const Vehicle&) const = default;
};

struct LevelCap {
    std::string level;
    double max_capacity = 0.0;  // tc_qjh / rc_jh / dc_jh
    double invest_cost = 0.0;   // ft_qih / fr_ih / fd_ih
    double op_risk = 0.0;       // s_thq / s_rh / s_dh, risk units per ton

    bool operator==(const LevelCap&) const = default;
};

struct TreatmentCapEntry {
    std::string node;
    std::string technology;
    double min_required = 0.0;  // tc^m_qj
    std::vector<LevelCap> levels;

    bool operator==(const TreatmentCapEntry&) const = default;
};

struct FacilityCapEntry {
    std::string node;
    double min_required = 0.0;  // rc^m_j / dc^m_j
    std::vector<LevelCap> levels;

    bool operator==(const FacilityCapEntry&) const = default;
};

/// Capacity tiers per facility. `levels` fixes the token order; each
/// entry lists the tiers available at one node (treatment entries are
/// additionally keyed by technology).
struct CapacityLevelSpec {
    std::vector<std::string> levels;
    std::vector<TreatmentCapEntry> treatment;
    std::vector<FacilityCapEntry> recycling;
    std::vector<FacilityCapEntry> disposal;

    bool operator==(const CapacityLevelSpec&) const = default;
};

struct TransportRisk {
    double tr = 0.0;  // PTr_ij, treatment -> recycling, risk per ton
    double td = 0.0;  // Ptd_ij, treatment -> disposal
    double rd = 0.0;  // Prd_ij, recycling -> disposal

    bool operator==(const TransportRisk&) const = default;
};

struct Co2Transport {
    double tr = 0.0;  // QTr, kg CO2 per km per ton, treatment -> recycling
    double td = 0.0;  // QTd, kg CO2 per km per ton, flows to disposal

    bool operator==(const Co2Transport&) const = default;
};

struct Arc {
    std::string from;
    std::string to;
    double distance = 0.0;  // km (dis_ij)
    bool symmetric = true;  // reverse arc implied with identical data
    std::map<std::string, double> distance_by_vehicle;  // optional dis_ijk override
    double unit_cost = 0.0;      // c_ij, cost per ton over this arc
    TransportRisk transport_risk;
    std::optional<double> risk_cap;  // PC_ij, absent = uncapped
    Co2Transport co2_transport;

    bool operator==(const Arc&) const = default;
};

struct TreatmentCo2 {
    std::string node;
    std::string technology;
    double rate = 0.0;  // Qt_qi, kg CO2 per ton treated

    bool operator==(const TreatmentCo2&) const = default;
};

struct Co2Ops {
    std::map<std::string, double> recycling;  // node -> Qr, kg CO2 per ton
    std::vector<TreatmentCo2> treatment;
    std::map<std::string, double> disposal;   // node -> Qd

    bool operator==(const Co2Ops&) const = default;
};

struct Technology {
    std::string id;
    std::map<std::string, int> availability;  // a_qi over existing treatment nodes

    bool operator==(const Technology&) const = default;
};

/// Raw risk-table data carried by the case document (consequence range,
/// accident model, site probabilities, district densities). The per-arc
/// and per-site rates are precomputed from these at encoding time; the
/// solver only ever reads the precomputed rates.
struct RiskTables {
    double consequence_low = 0.0;   // people
    double consequence_high = 0.0;  // people
    double consequence_midpoint = 0.0;
    double accident_rate_per_km = 0.0;
    double release_probability = 0.0;
    std::map<std::string, double> site_probability;   // facility class -> probability
    std::map<std::string, double> district_density;   // district -> people per km^2
    std::map<std::string, double> residue_potential;  // residue class -> potential

    bool operator==(const RiskTables&) const = default;
};

struct Instance {
    std::string name;
    std::vector<Node> nodes;
    std::vector<Technology> technologies;
    std::vector<WasteType> waste_types;
    std::vector<Vehicle> vehicles;
    CapacityLevelSpec capacity_levels;
    std::vector<Arc> arcs;
    std::map<std::string, double> recycling_ratio;  // recycling node -> gamma_i
    Co2Ops co2_ops;
    double eps_constant = 1e-4;
    // Published waste-category fractions by source sector (case data);
    // demand splits are derived from these.
    std::map<std::string, std::map<std::string, double>> waste_composition;
    std::map<std::string, std::string> provenance;  // field path -> paper|synthetic|derived
    std::optional<RiskTables> risk_tables;

    bool operator==(const Instance&) const = default;

    const Node* find_node(const std::string& id) const;
    const WasteType* find_waste(const std::string& id) const;
    const Vehicle* find_vehicle(const std::string& id) const;
    const Technology* find_technology(const std::string& id) const;

    std::vector<const Node*> nodes_of(NodeKind kind) const;
    std::vector<const Node*> depots() const;
    std::vector<const Node*> generation_nodes() const;
    std::vector<const Node*> recycling_nodes() const;  // candidates + existing
    std::vector<const Node*> treatment_nodes() const;
    std::vector<const Node*> disposal_nodes() const;

    /// Arc data for (from, to); falls back to a symmetric reverse entry.
    const Arc* find_arc(const std::string& from, const std::string& to) const;
    std::optional<double> distance(const std::string& from, const std::string& to,
                                   const std::string& vehicle_id = {}) const;

    const TreatmentCapEntry* treatment_caps(const std::string& node,
                                            const std::string& tech) const;
    const FacilityCapEntry* recycling_caps(const std::string& node) const;
    const FacilityCapEntry* disposal_caps(const std::string& node) const;

    /// Waste type the vehicle is dedicated to (the single compat entry).
    std::string vehicle_waste(const Vehicle& v) const;

    double demand(const std::string& waste, const std::string& node) const;
    double total_demand() const;
    int com(const std::string& waste, const std::string& tech) const;
    double beta(const std::string& waste, const std::string& tech) const;
    double mass_reduction_of(const std::string& waste, const std::string& tech) const;
    bool recyclable_only(const std::string& waste) const;
    double gamma(const std::string& recycling_node) const;
    double co2_recycling(const std::string& node) const;
    double co2_treatment(const std::string& node, const std::string& tech) const;
    double co2_disposal(const std::string& node) const;
};

/// Parse failure with the byte offset mapped to line/column.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string message, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// Document violates the instance schema; names the offending field.
class SchemaError : public std::runtime_error {
  public:
    SchemaError(std::string field, std::string message);
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);

enum class Severity { Fatal, Warning };

struct Finding {
    Severity severity = Severity::Fatal;
    std::string code;
    std::string entity;
    std::string message;
};

/// Data-level checks: type invariants plus single-route serviceability
/// of the largest demand against vehicle capacities. Findings are data,
/// not errors; an empty report means the instance is well formed.
std::vector<Finding> validate_instance(const Instance& inst);

bool has_fatal(const std::vector<Finding>& findings);
std::string format_findings(const std::vector<Finding>& findings);

struct SynthDims {
    int n_gen = 1;
    int n_rec = 1;
    int n_treat = 1;
    int n_disp = 1;
    int n_waste = 1;
    int n_vehicles = 1;
    int n_levels = 1;
};

/// Deterministic synthetic instance on planar points; every output
/// passes validate_instance. Generation-node counts <= 6 keep the
/// exhaustive oracle tractable.
Instance synth_instance(std::uint64_t seed, const SynthDims& dims);

/// The built-in case instance: published values encoded verbatim,
/// unpublished quantities synthesized deterministically and tagged in
/// the document's provenance map.
Instance case_study_instance();

/// Desk-scale companion of the case instance for the sensitivity
/// reruns: same published rates, ratios and cost tables, with the
/// demand geography aggregated into three zones so that exact solves
/// stay within the embedded solver's envelope.
Instance case_study_desk_instance();

}  // namespace hwlrp
