#include <doctest.h>

#include <chrono>
#include <random>

#include "plse/derivation.hpp"
#include "plse/ingest.hpp"
#include "test_support.hpp"

using namespace plse;
using plse::testing::read_corpus;

namespace {

LayeredModel engine_flat() {
    return parse_layered_model(read_corpus("engine-flat/layered.json")).model;
}

LayeredModel engine_hierarchical() {
    return parse_layered_model(read_corpus("engine-hierarchical/layered.json")).model;
}

bool has_variant_edge(const VariabilityModel& vm, const Id& from, const Id& to) {
    for (const auto& e : vm.interactions)
        if (e.from == from && e.to == to)
            return true;
    return false;
}

void erase_edge(InteractionSet& set, const Id& from, const Id& to) {
    std::erase_if(set, [&](const Interaction& e) { return e.from == from && e.to == to; });
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Syntax;
}

}  // namespace

TEST_CASE("diff on the flat engine model uses the mandatory flag") {
    auto difs = diff(engine_flat());
    CHECK(difs.difs == std::set<Id>{"P2", "P3", "PF1", "PF2", "PF3", "S2", "S3"});
    REQUIRE(difs.grouping.size() == 3);
    CHECK(difs.grouping.at("Input Parameter") == std::set<Id>{"P2", "P3"});
    CHECK(difs.grouping.at("Sensing Function") == std::set<Id>{"S2", "S3"});
    CHECK(difs.grouping.at("Process Function") == std::set<Id>{"PF1", "PF2", "PF3"});
}

TEST_CASE("diff over products marks activities with varying presence") {
    auto model = engine_flat();
    ProductSet products{{{"p-a", {"P1", "S1", "P2", "S2", "PF2"}}, {"p-b", {"P1", "S1", "P3", "S3", "PF3"}},
                         {"p-c", {"P1", "S1", "PF1"}}}};
    auto difs = diff(model, products);
    CHECK(difs.difs == std::set<Id>{"P2", "P3", "PF1", "PF2", "PF3", "S2", "S3"});

    // Present everywhere or nowhere is not variable.
    ProductSet constant{{{"p-a", {"P1", "P2"}}, {"p-b", {"P1", "P2"}}}};
    CHECK(diff(model, constant).difs.empty());
}

TEST_CASE("diff over products matches the presence-vector oracle") {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        auto input = testing::random_layered(rng, true);
        auto expected = testing::presence_difs(input.model, *input.products);
        try {
            CHECK(diff(input.model, input.products).difs == expected);
            ++checked;
        } catch (const Error& e) {
            // A dif with neither label nor refined parent cannot be grouped.
            CHECK(e.code() == ErrorCode::Ungroupable);
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("ungroupable and mixed-layer groups are rejected") {
    auto model = engine_flat();
    model.activities["P2"].group.reset();
    CHECK(code_of([&] { diff(model); }) == ErrorCode::Ungroupable);

    auto mixed = engine_hierarchical();
    mixed.activities["fc_meter_p"].group = "Control Mode";
    auto difs = diff(mixed);
    CHECK(code_of([&] { create_variation_points(difs, mixed); }) == ErrorCode::MixedLayerGroup);
}

TEST_CASE("create_variation_points builds one point per group and one variant per dif") {
    auto model = engine_flat();
    auto plm = create_variation_points(diff(model), model);
    CHECK(plm.vm.variation_points.size() == 3);
    CHECK(plm.vm.variants.size() == 7);
    CHECK(plm.vm.variants.at("PF2").vp_id == "Process Function");
    CHECK(plm.vm.variants.at("PF2").name == "Process(PFuel1, PFuel2)");
    CHECK(plm.vm.variation_points.at("Sensing Function").level == Layer::Functional);
    CHECK(plm.bindings.size() == 7);
    CHECK(plm.bindings.contains(Binding::activity("S3", "S3")));
    CHECK(plm.vm.interactions.empty());
    REQUIRE(plm.artifacts);
    CHECK(*plm.artifacts == model);
}

TEST_CASE("mapping preconditions") {
    auto model = engine_flat();
    auto plm = create_variation_points(diff(model), model);
    CHECK(code_of([&] { mapping(Layer::Component, Layer::Feature, plm); }) == ErrorCode::LayerOrder);
    CHECK(code_of([&] { mapping(Layer::Feature, Layer::Functional, plm); }) == ErrorCode::LayerOrder);
    auto bare = plm;
    bare.artifacts.reset();
    CHECK(code_of([&] { mapping(Layer::Functional, Layer::Functional, bare); }) == ErrorCode::Precondition);
}

TEST_CASE("flat engine derivation lifts exactly the dif-to-dif interactions") {
    auto plm = derive_initial_vm(engine_flat());
    const auto& vm = plm.vm;
    CHECK(vm.variation_points.size() == 3);
    CHECK(vm.variants.size() == 7);
    CHECK(vm.interactions.size() == 4);
    CHECK(has_variant_edge(vm, "P2", "S2"));
    CHECK(has_variant_edge(vm, "S2", "PF2"));
    CHECK(has_variant_edge(vm, "P3", "S3"));
    CHECK(has_variant_edge(vm, "S3", "PF3"));
    for (const auto& e : vm.interactions)
        CHECK(e.level == InteractionLevel::VariantLevel);
    CHECK(vm.refinements.empty());
    CHECK(validate(plm).empty());
}

TEST_CASE("strict and default refinement creation agree on the flat engine model") {
    auto model = engine_flat();
    CHECK(derive_initial_vm(model, std::nullopt, {true}) == derive_initial_vm(model));
}

TEST_CASE("hierarchical derivation builds the refinement forest") {
    auto plm = derive_initial_vm(engine_hierarchical());
    const auto& vm = plm.vm;
    CHECK(vm.variation_points.size() == 10);
    CHECK(roots(vm) == std::vector<Id>{"Control Mode", "Health Monitoring"});
    CHECK(vm.refinements.contains({"Fuel Metering", "f_full"}));
    CHECK(vm.refinements.contains({"Metering Sensor", "f_full"}));
    CHECK(vm.refinements.contains({"Valve Driver", "fc_meter_p"}));
    CHECK(vm.refinements.contains({"Transducer", "fc_sens_p"}));
    // A group keyed by its refined parent activity.
    CHECK(vm.refinements.contains({"fc_vib_fft", "fc_vib_fft"}));
    CHECK(vm.variation_points.at("Valve Driver").level == Layer::Component);
    CHECK(validate(plm).empty());
}

TEST_CASE("interactions between refining difs induce one between their parents") {
    auto model = engine_hierarchical();
    erase_edge(model.interactions, "fc_sens_p", "fc_meter_p");
    erase_edge(model.interactions, "f_super", "f_oil");
    auto plm = derive_initial_vm(model);
    // Component edge c_tr_strain -> c_drv_torque reaches the functional layer.
    CHECK(has_variant_edge(plm.vm, "fc_sens_p", "fc_meter_p"));
    // Supervisory -> oil debris edges reach the feature layer.
    CHECK(has_variant_edge(plm.vm, "f_super", "f_oil"));
    REQUIRE(plm.artifacts);
    bool induced = false;
    for (const auto& e : plm.artifacts->interactions)
        induced |= e.from == "f_super" && e.to == "f_oil";
    CHECK(induced);
}

TEST_CASE("strict mode only refines interacting difs with bound parents") {
    auto model = engine_hierarchical();
    auto strict = derive_initial_vm(model, std::nullopt, {true});
    auto loose = derive_initial_vm(model);
    // The FFT implementations do not interact with anything, so strict mode
    // leaves their group a root.
    CHECK(loose.vm.refinements.contains({"fc_vib_fft", "fc_vib_fft"}));
    CHECK_FALSE(strict.vm.refinements.contains({"fc_vib_fft", "fc_vib_fft"}));
    CHECK(strict.vm.refinements.contains({"Valve Driver", "fc_meter_p"}));
    CHECK(validate(strict).empty());
}

TEST_CASE("conflicting refinement parents are reported") {
    auto model = engine_hierarchical();
    // Put a dif refining f_full and one refining f_super into the same group.
    model.activities["fc_sup_lim"].group = "Fuel Metering";
    CHECK(code_of([&] { derive_initial_vm(model); }) == ErrorCode::ConflictingParents);
}

TEST_CASE("derivation on random layered models is valid or fails with a documented code") {
    std::mt19937_64 rng(32);
    int derived = 0;
    for (int i = 0; i < 200; ++i) {
        auto input = testing::random_layered(rng, i % 3 == 0);
        try {
            auto plm = derive_initial_vm(input.model, input.products);
            ++derived;
            auto difs = diff(input.model, input.products);
            CHECK(plm.vm.variants.size() == difs.difs.size());
            CHECK(plm.vm.variation_points.size() == difs.grouping.size());
            CHECK(validate(plm).empty());
            for (const auto& e : plm.vm.interactions)
                CHECK(plm.vm.variants.at(e.from).vp_id != plm.vm.variants.at(e.to).vp_id);
        } catch (const Error& e) {
            const auto code = e.code();
            CHECK((code == ErrorCode::Ungroupable || code == ErrorCode::ConflictingParents ||
                   code == ErrorCode::MixedLayerGroup));
        }
    }
    CHECK(derived > 50);
}

TEST_CASE("flat engine derivation runs well under a second") {
    auto model = engine_flat();
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 100; ++i)
        derive_initial_vm(model);
    auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(elapsed < std::chrono::seconds(1));
}
