#pragma once

#include <string>

#include "hwlrp/instance.hpp"

namespace hwlrp::testutil {

// Smallest valid instance: one depot, one generation node, one candidate
// of each facility kind, one (treatable) waste type, one vehicle.
inline std::string minimal_doc() {
    return R"({
  "schema": "hwlrp-instance/1",
  "name": "minimal",
  "nodes": [
    {"id": "dep", "kind": "depot"},
    {"id": "g1", "kind": "generation"},
    {"id": "r1", "kind": "recycling-candidate"},
    {"id": "t1", "kind": "treatment-candidate"},
    {"id": "d1", "kind": "disposal-candidate"}
  ],
  "technologies": [{"id": "tech_a"}, {"id": "tech_b"}],
  "waste_types": [
    {
      "id": "w1",
      "risk_potential": 0.2,
      "demand": {"g1": 6.0},
      "tech_compat": {"tech_a": 1, "tech_b": 0},
      "recyclable_fraction_after_tech": {"tech_a": 0.0, "tech_b": 0.3},
      "mass_reduction": {"tech_a": 0.8, "tech_b": 0.2}
    }
  ],
  "vehicles": [
    {"id": "k1", "waste_compat": {"w1": 1}, "capacity": 10.0, "max_distance": 100.0}
  ],
  "capacity_levels": {
    "levels": ["L1"],
    "treatment": [
      {"node": "t1", "technology": "tech_a", "min_required": 1.0,
       "levels": [{"level": "L1", "max_capacity": 20.0, "invest_cost": 100.0, "op_risk": 0.5}]},
      {"node": "t1", "technology": "tech_b", "min_required": 1.0,
       "levels": [{"level": "L1", "max_capacity": 20.0, "invest_cost": 120.0, "op_risk": 0.6}]}
    ],
    "recycling": [
      {"node": "r1", "min_required": 1.0,
       "levels": [{"level": "L1", "max_capacity": 20.0, "invest_cost": 80.0, "op_risk": 0.2}]}
    ],
    "disposal": [
      {"node": "d1", "min_required": 0.5,
       "levels": [{"level": "L1", "max_capacity": 20.0, "invest_cost": 90.0, "op_risk": 0.3}]}
    ]
  },
  "arcs": [
    {"from": "dep", "to": "g1", "distance": 4.0, "unit_cost": 0.04,
     "transport_risk": {"tr": 0, "td": 0, "rd": 0}, "co2_transport": {"tr": 1.68, "td": 1.68}},
    {"from": "g1", "to": "t1", "distance": 5.0, "unit_cost": 0.05,
     "transport_risk": {"tr": 0, "td": 0, "rd": 0}, "co2_transport": {"tr": 1.68, "td": 1.68}},
    {"from": "g1", "to": "r1", "distance": 6.0, "unit_cost": 0.06,
     "transport_risk": {"tr": 0, "td": 0, "rd": 0}, "co2_transport": {"tr": 1.68, "td": 1.68}},
    {"from": "dep", "to": "t1", "distance": 3.0, "unit_cost": 0.03,
     "transport_risk": {"tr": 0, "td": 0, "rd": 0}, "co2_transport": {"tr": 1.68, "td": 1.68}},
    {"from": "dep", "to": "r1", "distance": 2.0, "unit_cost": 0.02,
     "transport_risk": {"tr": 0, "td": 0, "rd": 0}, "co2_transport": {"tr": 1.68, "td": 1.68}},
    {"from": "t1", "to": "r1", "distance": 7.0, "unit_cost": 0.07, "risk_cap": 50.0,
     "transport_risk": {"tr": 0.01, "td": 0, "rd": 0}, "co2_transport": {"tr": 1.68, "td": 1.68}},
    {"from": "t1", "to": "d1", "distance": 8.0, "unit_cost": 0.08, "risk_cap": 50.0,
     "transport_risk": {"tr": 0, "td": 0.02, "rd": 0}, "co2_transport": {"tr": 1.68, "td": 1.68}},
    {"from": "r1", "to": "d1", "distance": 9.0, "unit_cost": 0.09, "risk_cap": 50.0,
     "transport_risk": {"tr": 0, "td": 0, "rd": 0.015}, "co2_transport": {"tr": 1.68, "td": 1.68}}
  ],
  "recycling_ratio": {"r1": 0.95},
  "co2_ops": {
    "recycling": {"r1": 398.0},
    "treatment": [
      {"node": "t1", "technology": "tech_a", "rate": 980.0},
      {"node": "t1", "technology": "tech_b", "rate": 280.0}
    ],
    "disposal": {"d1": 271.0}
  }
})";
}

inline Instance minimal_instance() { return parse_instance(minimal_doc()); }

inline SynthDims tiny_dims(int n_gen = 2, int n_rec = 1, int n_treat = 1, int n_disp = 1,
                           int n_waste = 2, int n_vehicles = 2, int n_levels = 2) {
    SynthDims d;
    d.n_gen = n_gen;
    d.n_rec = n_rec;
    d.n_treat = n_treat;
    d.n_disp = n_disp;
    d.n_waste = n_waste;
    d.n_vehicles = n_vehicles;
    d.n_levels = n_levels;
    return d;
}

}  // namespace hwlrp::testutil
