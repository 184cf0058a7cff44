#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "hwlrp/instance.hpp"
#include "test_util.hpp"

using namespace hwlrp;

TEST_CASE("minimal doc parses to a five-node instance") {
    Instance inst = testutil::minimal_instance();
    CHECK(inst.nodes.size() == 5);
    CHECK(inst.depots().size() == 1);
    CHECK(inst.generation_nodes().size() == 1);
    CHECK(inst.total_demand() == doctest::Approx(6.0));
    CHECK(validate_instance(inst).empty());
}

TEST_CASE("negative demand is a schema violation naming the field") {
    std::string doc = testutil::minimal_doc();
    const auto pos = doc.find("\"g1\": 6.0");
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 9, "\"g1\": -3.0");
    CHECK_THROWS_WITH_AS(parse_instance(doc),
                         doctest::Contains("waste_types[0].demand.g1"), SchemaError);
}

TEST_CASE("unknown fields are rejected") {
    std::string doc = testutil::minimal_doc();
    doc.insert(doc.rfind('}'), ", \"surprise\": 1\n");
    CHECK_THROWS_AS(parse_instance(doc), SchemaError);
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_instance("{\n  \"schema\": oops\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 1);
    }
}

TEST_CASE("duplicate node ids are rejected") {
    std::string doc = testutil::minimal_doc();
    const auto pos = doc.find("\"id\": \"g1\"");
    REQUIRE(pos != std::string::npos);
    std::string dup = doc;
    dup.replace(dup.find("\"id\": \"r1\""), 10, "\"id\": \"g1\"");
    CHECK_THROWS_WITH_AS(parse_instance(dup), doctest::Contains("duplicate"), SchemaError);
}

TEST_CASE("parse of serialize is the identity") {
    Instance inst = testutil::minimal_instance();
    const std::string text = serialize_instance(inst);
    Instance again = parse_instance(text);
    CHECK(again == inst);
    CHECK(serialize_instance(again) == text);

    Instance synth = synth_instance(5, testutil::tiny_dims());
    CHECK(parse_instance(serialize_instance(synth)) == synth);

    Instance case_inst = case_study_instance();
    CHECK(parse_instance(serialize_instance(case_inst)) == case_inst);
}

TEST_CASE("synthetic generation is deterministic and valid") {
    const auto dims = testutil::tiny_dims(3, 2, 2, 1, 2, 3, 2);
    Instance a = synth_instance(9, dims);
    Instance b = synth_instance(9, dims);
    CHECK(serialize_instance(a) == serialize_instance(b));
    CHECK(validate_instance(a).empty());
    Instance c = synth_instance(10, dims);
    CHECK(serialize_instance(a) != serialize_instance(c));

    for (std::uint64_t seed = 1; seed <= 8; ++seed)
        CHECK(validate_instance(synth_instance(seed, testutil::tiny_dims())).empty());

    SynthDims bad;
    bad.n_gen = 0;
    CHECK_THROWS_AS(synth_instance(1, bad), std::invalid_argument);
}

TEST_CASE("validator flags demand exceeding every compatible vehicle") {
    Instance inst = testutil::minimal_instance();
    inst.waste_types[0].demand["g1"] = 12.0;  // vehicle capacity is 10
    const auto findings = validate_instance(inst);
    CHECK(has_fatal(findings));
    bool found = false;
    for (const auto& f : findings)
        if (f.code == "demand-exceeds-capacity") found = true;
    CHECK(found);
}

TEST_CASE("validator flags a minimum threshold above every level capacity") {
    Instance inst = testutil::minimal_instance();
    inst.capacity_levels.disposal[0].min_required = 25.0;  // max is 20
    const auto findings = validate_instance(inst);
    CHECK(has_fatal(findings));
    bool found = false;
    for (const auto& f : findings)
        if (f.code == "min-exceeds-max") found = true;
    CHECK(found);
}

TEST_CASE("validator flags a vehicle with two compatible waste types") {
    Instance inst = synth_instance(3, testutil::tiny_dims());
    inst.vehicles[0].waste_compat["w2"] = 1;
    CHECK(has_fatal(validate_instance(inst)));
}

TEST_CASE("case instance reproduces the published values") {
    Instance inst = case_study_instance();
    CHECK(validate_instance(inst).empty());

    // totals per district and overall
    CHECK(inst.total_demand() == 47513.0);
    std::map<std::string, double> district_sum;
    for (const auto& w : inst.waste_types)
        for (const auto& [node, d] : w.demand) {
            const Node* n = inst.find_node(node);
            REQUIRE(n != nullptr);
            district_sum[n->district] += d;
        }
    CHECK(district_sum["I"] == 13746.0);
    CHECK(district_sum["II"] == 8190.0);
    CHECK(district_sum["III"] == 7120.0);
    CHECK(district_sum["IV"] == 8961.0);
    CHECK(district_sum["V"] == 5167.0);
    CHECK(district_sum["VI"] == 4329.0);

    // thirteen demand nodes, twelve trucks
    CHECK(inst.generation_nodes().size() == 13);
    CHECK(inst.vehicles.size() == 12);

    // operations emission rates
    CHECK(inst.co2_recycling("rec_I") == 398.0);
    CHECK(inst.co2_treatment("treat_I", "incineration") == 980.0);
    CHECK(inst.co2_treatment("treat_I", "chemical") == 280.0);
    CHECK(inst.co2_ops.disposal.at("disp_I") == 271.0);
    for (const auto& a : inst.arcs) {
        CHECK(a.co2_transport.tr == 1.68);
        CHECK(a.co2_transport.td == 1.68);
    }

    // establishment costs by district and tier
    auto cost = [&](const std::string& node, const std::string& level) {
        const FacilityCapEntry* e = inst.recycling_caps(node);
        REQUIRE(e != nullptr);
        for (const auto& lc : e->levels)
            if (lc.level == level) return lc.invest_cost;
        return -1.0;
    };
    CHECK(cost("rec_VI", "5") == 847.0);
    CHECK(cost("rec_VI", "10") == 1230.0);
    CHECK(cost("rec_VI", "15") == 1596.0);
    CHECK(cost("rec_I", "5") == 1572.0);
    CHECK(cost("rec_III", "15") == 2340.0);

    // risk potentials and waste-category fractions
    CHECK(inst.find_waste("w1_recyclable")->risk_potential == 0.05);
    CHECK(inst.find_waste("w2_incineration")->risk_potential == 0.2);
    CHECK(inst.find_waste("w3_chemical")->risk_potential == 0.2);
    CHECK(inst.find_waste("w4_both")->risk_potential == 0.2);
    CHECK(inst.waste_composition.at("industrial").at("w1_recyclable") == 0.15);
    CHECK(inst.waste_composition.at("industrial").at("w2_incineration") == 0.13);
    CHECK(inst.waste_composition.at("industrial").at("w3_chemical") == 0.20);
    CHECK(inst.waste_composition.at("industrial").at("w4_both") == 0.05);
    CHECK(inst.waste_composition.at("health").at("w1_recyclable") == 0.10);
    CHECK(inst.waste_composition.at("health").at("w2_incineration") == 0.30);
    CHECK(inst.waste_composition.at("health").at("w3_chemical") == 0.15);
    CHECK(inst.waste_composition.at("health").at("w4_both") == 0.08);

    // treatment ratios
    const WasteType* w = inst.find_waste("w4_both");
    CHECK(w->mass_reduction.at("incineration") == 0.80);
    CHECK(w->mass_reduction.at("chemical") == 0.20);
    CHECK(w->recyclable_fraction_after_tech.at("chemical") == 0.30);
    CHECK(w->recyclable_fraction_after_tech.at("incineration") == 0.0);
    for (const auto& [node, g] : inst.recycling_ratio) CHECK(g == 0.95);
    for (const auto& a : inst.arcs) CHECK(a.unit_cost == doctest::Approx(0.01 * a.distance));

    // risk tables carried verbatim
    REQUIRE(inst.risk_tables.has_value());
    CHECK(inst.risk_tables->consequence_low == 100.0);
    CHECK(inst.risk_tables->consequence_high == 33200.0);
    CHECK(inst.risk_tables->consequence_midpoint == 16650.0);
    CHECK(inst.risk_tables->site_probability.at("recycling") == 20e-6);
    CHECK(inst.risk_tables->site_probability.at("incineration") == 50e-6);
    CHECK(inst.risk_tables->site_probability.at("chemical") == 60e-6);
    CHECK(inst.risk_tables->site_probability.at("disposal") == 30e-6);
    CHECK(inst.risk_tables->district_density.at("I") == 600.5);
    CHECK(inst.risk_tables->district_density.at("VI") == 100.0);
    CHECK(inst.risk_tables->accident_rate_per_km == 0.4e-6);
    CHECK(inst.risk_tables->release_probability == 0.9);

    // provenance distinguishes published from synthesized data
    CHECK(inst.provenance.at("co2_ops") == "paper");
    CHECK(inst.provenance.at("waste_types.demand") == "synthetic");
    CHECK(inst.provenance.at("arcs.distance") == "synthetic");
}

TEST_CASE("desk companion of the case keeps the published rates") {
    Instance inst = case_study_desk_instance();
    CHECK(validate_instance(inst).empty());
    CHECK(inst.total_demand() == 47513.0);
    CHECK(inst.co2_recycling("rec_ex") == 398.0);
    CHECK(inst.co2_treatment("treat_new", "chemical") == 280.0);
    CHECK(inst.vehicles.size() == 4);
}
