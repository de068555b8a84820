#include "plse/ingest.hpp"

#include <algorithm>
#include <initializer_list>

#include <json.hpp>

namespace plse {

using json = nlohmann::json;

std::string_view to_string(DocumentKind kind) {
    switch (kind) {
    case DocumentKind::LayeredModel: return "layered-model";
    case DocumentKind::VariabilityModel: return "variability-model";
    case DocumentKind::ProductLineModel: return "product-line-model";
    case DocumentKind::Configuration: return "configuration";
    case DocumentKind::ReductionTrace: return "reduction-trace";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

json parse_json(std::string_view bytes) {
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Syntax, "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

void expect_object(const json& j, const std::string& ctx) {
    if (!j.is_object())
        fail(ErrorCode::Schema, ctx + ": expected an object");
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& ctx) {
    expect_object(obj, ctx);
    for (const auto& [key, _] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(ErrorCode::Schema, ctx + ": unknown field '" + key + "'");
}

const json& require(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end())
        fail(ErrorCode::Schema, ctx + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& ctx) {
    const auto& v = require(obj, key, ctx);
    if (!v.is_string())
        fail(ErrorCode::Schema, ctx + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

bool optional_bool(const json& obj, const char* key, bool fallback, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_boolean())
        fail(ErrorCode::Schema, ctx + ": field '" + key + "' must be a boolean");
    return it->get<bool>();
}

/// Missing arrays read as empty.
const json& optional_array(const json& obj, const char* key, const std::string& ctx) {
    static const json empty = json::array();
    auto it = obj.find(key);
    if (it == obj.end())
        return empty;
    if (!it->is_array())
        fail(ErrorCode::Schema, ctx + ": field '" + key + "' must be an array");
    return *it;
}

std::vector<std::string> string_array(const json& arr, const std::string& ctx) {
    if (!arr.is_array())
        fail(ErrorCode::Schema, ctx + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& v : arr) {
        if (!v.is_string())
            fail(ErrorCode::Schema, ctx + ": expected an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

Layer parse_layer(const std::string& s, const std::string& ctx) {
    if (s == "feature") return Layer::Feature;
    if (s == "functional") return Layer::Functional;
    if (s == "component") return Layer::Component;
    fail(ErrorCode::Schema, ctx + ": unknown layer '" + s + "'");
}

InteractionKind parse_interaction_kind(const std::string& s, const std::string& ctx) {
    if (s == "material") return InteractionKind::Material;
    if (s == "information") return InteractionKind::Information;
    fail(ErrorCode::Schema, ctx + ": unknown interaction kind '" + s + "'");
}

RefinementKind parse_refinement_kind(const std::string& s, const std::string& ctx) {
    if (s == "feature-refinement") return RefinementKind::FeatureRefinement;
    if (s == "functional-refinement") return RefinementKind::FunctionalRefinement;
    fail(ErrorCode::Schema, ctx + ": unknown refinement kind '" + s + "'");
}

const json& open_envelope(const json& doc, std::initializer_list<DocumentKind> accepted, DocumentKind* kind_out) {
    check_keys(doc, {"schema_version", "kind", "body"}, "document");
    auto version = require_string(doc, "schema_version", "document");
    if (version != kSchemaVersion)
        fail(ErrorCode::UnknownSchemaVersion, "unknown schema version '" + version + "'");
    auto kind = require_string(doc, "kind", "document");
    for (auto k : accepted) {
        if (kind == to_string(k)) {
            if (kind_out)
                *kind_out = k;
            const auto& body = require(doc, "body", "document");
            expect_object(body, "body");
            return body;
        }
    }
    fail(ErrorCode::Schema, "unexpected document kind '" + kind + "'");
}

Interaction read_interaction(const json& j, InteractionLevel level, const std::string& ctx) {
    check_keys(j, {"from", "to", "kind", "requires"}, ctx);
    Interaction edge;
    edge.from = require_string(j, "from", ctx);
    edge.to = require_string(j, "to", ctx);
    edge.kind = parse_interaction_kind(require_string(j, "kind", ctx), ctx);
    edge.level = level;
    edge.is_requires = optional_bool(j, "requires", false, ctx);
    return edge;
}

json write_interaction(const Interaction& edge) {
    json j = {{"from", edge.from}, {"to", edge.to}, {"kind", std::string(to_string(edge.kind))}};
    if (edge.is_requires)
        j["requires"] = true;
    return j;
}

Binding read_binding(const json& j, const std::string& ctx) {
    expect_object(j, ctx);
    if (j.contains("activity")) {
        check_keys(j, {"activity", "variant"}, ctx);
        return Binding::activity(require_string(j, "activity", ctx), require_string(j, "variant", ctx));
    }
    check_keys(j, {"artifact", "vp"}, ctx);
    return Binding::artifact(require_string(j, "artifact", ctx), require_string(j, "vp", ctx));
}

json write_binding(const Binding& b) {
    if (b.kind == BindingKind::ActivityVariant)
        return {{"activity", b.source_id}, {"variant", b.target_id}};
    return {{"artifact", b.source_id}, {"vp", b.target_id}};
}

template <class T>
void insert_unique(std::map<Id, T>& m, T value, const std::string& what) {
    Id id = value.id;
    if (!m.emplace(id, std::move(value)).second)
        fail(ErrorCode::Schema, "duplicate " + what + " id '" + id + "'");
}

void dangling(const std::string& what, const Id& id) {
    fail(ErrorCode::DanglingReference, "dangling reference: " + what + " '" + id + "'");
}

LayeredModel read_layered_body(const json& body) {
    LayeredModel model;
    for (const auto& j : optional_array(body, "artifacts", "layered-model")) {
        const std::string ctx = "artifact";
        check_keys(j, {"id", "layer", "activities"}, ctx);
        FunctionalArtifact art;
        art.id = require_string(j, "id", ctx);
        art.layer = parse_layer(require_string(j, "layer", ctx), ctx + " '" + art.id + "'");
        for (auto& a : string_array(optional_array(j, "activities", ctx), ctx + " '" + art.id + "'"))
            art.activity_ids.insert(std::move(a));
        insert_unique(model.artifacts, std::move(art), "artifact");
    }
    for (const auto& j : optional_array(body, "activities", "layered-model")) {
        const std::string ctx = "activity";
        check_keys(j, {"id", "name", "layer", "artifact", "mandatory", "group"}, ctx);
        Activity act;
        act.id = require_string(j, "id", ctx);
        const std::string ictx = ctx + " '" + act.id + "'";
        act.name = require_string(j, "name", ictx);
        act.layer = parse_layer(require_string(j, "layer", ictx), ictx);
        act.artifact_id = require_string(j, "artifact", ictx);
        act.mandatory = optional_bool(j, "mandatory", true, ictx);
        if (j.contains("group"))
            act.group = require_string(j, "group", ictx);
        if (act.mandatory && act.group)
            fail(ErrorCode::Schema, ictx + ": a mandatory activity cannot carry a variability group");
        insert_unique(model.activities, std::move(act), "activity");
    }
    for (const auto& j : optional_array(body, "refinements", "layered-model")) {
        const std::string ctx = "refinement";
        check_keys(j, {"child_artifact", "parent_activity", "kind"}, ctx);
        model.refinements.insert({require_string(j, "child_artifact", ctx), require_string(j, "parent_activity", ctx),
                                  parse_refinement_kind(require_string(j, "kind", ctx), ctx)});
    }
    for (const auto& j : optional_array(body, "interactions", "layered-model"))
        add_interaction(model.interactions, read_interaction(j, InteractionLevel::ArtifactLevel, "interaction"));

    for (const auto& [id, act] : model.activities)
        if (!model.artifacts.contains(act.artifact_id))
            dangling("artifact referenced by activity '" + id + "'", act.artifact_id);
    for (const auto& [id, art] : model.artifacts)
        for (const auto& member : art.activity_ids)
            if (!model.activities.contains(member))
                dangling("activity listed by artifact '" + id + "'", member);
    for (const auto& r : model.refinements) {
        if (!model.artifacts.contains(r.child_artifact_id))
            dangling("refining artifact", r.child_artifact_id);
        if (!model.activities.contains(r.parent_activity_id))
            dangling("refined activity", r.parent_activity_id);
    }
    for (const auto& e : model.interactions)
        for (const auto* id : {&e.from, &e.to})
            if (!model.activities.contains(*id))
                dangling("interaction endpoint", *id);
    return model;
}

json write_layered_body(const LayeredModel& model) {
    json artifacts = json::array();
    for (const auto& [id, art] : model.artifacts)
        artifacts.push_back({{"id", id}, {"layer", std::string(to_string(art.layer))}, {"activities", art.activity_ids}});
    json activities = json::array();
    for (const auto& [id, act] : model.activities) {
        json j = {{"id", id},
                  {"name", act.name},
                  {"layer", std::string(to_string(act.layer))},
                  {"artifact", act.artifact_id},
                  {"mandatory", act.mandatory}};
        if (act.group)
            j["group"] = *act.group;
        activities.push_back(std::move(j));
    }
    json refinements = json::array();
    for (const auto& r : model.refinements)
        refinements.push_back({{"child_artifact", r.child_artifact_id},
                               {"parent_activity", r.parent_activity_id},
                               {"kind", std::string(to_string(r.kind))}});
    json interactions = json::array();
    for (const auto& e : model.interactions)
        interactions.push_back(write_interaction(e));
    return {{"artifacts", std::move(artifacts)},
            {"activities", std::move(activities)},
            {"refinements", std::move(refinements)},
            {"interactions", std::move(interactions)}};
}

void read_vm_body(const json& body, ProductLineModel& plm) {
    auto& vm = plm.vm;
    for (const auto& j : optional_array(body, "variation_points", "variability-model")) {
        const std::string ctx = "variation point";
        check_keys(j, {"id", "name", "level"}, ctx);
        VariationPoint vp;
        vp.id = require_string(j, "id", ctx);
        vp.name = require_string(j, "name", ctx + " '" + vp.id + "'");
        vp.level = parse_layer(require_string(j, "level", ctx), ctx + " '" + vp.id + "'");
        insert_unique(vm.variation_points, std::move(vp), "variation point");
    }
    for (const auto& j : optional_array(body, "variants", "variability-model")) {
        const std::string ctx = "variant";
        check_keys(j, {"id", "name", "vp"}, ctx);
        Variant v;
        v.id = require_string(j, "id", ctx);
        v.name = require_string(j, "name", ctx + " '" + v.id + "'");
        v.vp_id = require_string(j, "vp", ctx + " '" + v.id + "'");
        insert_unique(vm.variants, std::move(v), "variant");
    }
    for (const auto& j : optional_array(body, "interactions", "variability-model"))
        add_interaction(vm.interactions, read_interaction(j, InteractionLevel::VariantLevel, "interaction"));
    for (const auto& j : optional_array(body, "refinements", "variability-model")) {
        const std::string ctx = "variability refinement";
        check_keys(j, {"child_vp", "parent_variant"}, ctx);
        vm.refinements.insert({require_string(j, "child_vp", ctx), require_string(j, "parent_variant", ctx)});
    }
    for (const auto& j : optional_array(body, "bindings", "variability-model"))
        plm.bindings.insert(read_binding(j, "binding"));

    for (const auto& [id, v] : vm.variants)
        if (!vm.variation_points.contains(v.vp_id))
            dangling("variation point realized by variant '" + id + "'", v.vp_id);
    for (const auto& e : vm.interactions)
        for (const auto* id : {&e.from, &e.to})
            if (!vm.variants.contains(*id))
                dangling("interaction endpoint", *id);
    for (const auto& r : vm.refinements) {
        if (!vm.variation_points.contains(r.child_vp_id))
            dangling("refining variation point", r.child_vp_id);
        if (!vm.variants.contains(r.parent_variant_id))
            dangling("refined variant", r.parent_variant_id);
    }
    for (const auto& b : plm.bindings) {
        bool ok = b.kind == BindingKind::ActivityVariant ? vm.variants.contains(b.target_id)
                                                         : vm.variation_points.contains(b.target_id);
        if (!ok)
            dangling("binding target", b.target_id);
        if (plm.artifacts) {
            bool src = b.kind == BindingKind::ActivityVariant ? plm.artifacts->activities.contains(b.source_id)
                                                              : plm.artifacts->artifacts.contains(b.source_id);
            if (!src)
                dangling("binding source", b.source_id);
        }
    }
}

json write_vm_body(const ProductLineModel& plm) {
    const auto& vm = plm.vm;
    json vps = json::array();
    for (const auto& [id, vp] : vm.variation_points)
        vps.push_back({{"id", id}, {"name", vp.name}, {"level", std::string(to_string(vp.level))}});
    json variants = json::array();
    for (const auto& [id, v] : vm.variants)
        variants.push_back({{"id", id}, {"name", v.name}, {"vp", v.vp_id}});
    json interactions = json::array();
    for (const auto& e : vm.interactions)
        interactions.push_back(write_interaction(e));
    json refinements = json::array();
    for (const auto& r : vm.refinements)
        refinements.push_back({{"child_vp", r.child_vp_id}, {"parent_variant", r.parent_variant_id}});
    json body = {{"variation_points", std::move(vps)},
                 {"variants", std::move(variants)},
                 {"interactions", std::move(interactions)},
                 {"refinements", std::move(refinements)}};
    if (!plm.bindings.empty()) {
        json bindings = json::array();
        for (const auto& b : plm.bindings)
            bindings.push_back(write_binding(b));
        body["bindings"] = std::move(bindings);
    }
    return body;
}

void throw_on_violations(const std::vector<Violation>& violations) {
    if (violations.empty())
        return;
    ErrorCode code = ErrorCode::InvalidModel;
    for (const auto& v : violations)
        if (v.rule == Rule::RefinementLayer)
            code = ErrorCode::LayerAdjacency;
    std::string message;
    for (const auto& v : violations)
        message += (message.empty() ? "" : "; ") + describe(v);
    fail(code, message);
}

std::string finish(DocumentKind kind, json body) {
    json doc = {{"schema_version", std::string(kSchemaVersion)},
                {"kind", std::string(to_string(kind))},
                {"body", std::move(body)}};
    return doc.dump(2) + "\n";
}

}  // namespace

DocumentKind peek_kind(std::string_view bytes) {
    json doc = parse_json(bytes);
    DocumentKind kind{};
    open_envelope(doc,
                  {DocumentKind::LayeredModel, DocumentKind::VariabilityModel, DocumentKind::ProductLineModel,
                   DocumentKind::Configuration, DocumentKind::ReductionTrace},
                  &kind);
    return kind;
}

LayeredInput parse_layered_model(std::string_view bytes) {
    json doc = parse_json(bytes);
    const json& body = open_envelope(doc, {DocumentKind::LayeredModel}, nullptr);
    check_keys(body, {"artifacts", "activities", "refinements", "interactions", "products"}, "layered-model");

    LayeredInput input;
    input.model = read_layered_body(body);
    if (body.contains("products")) {
        ProductSet products;
        std::set<Id> seen;
        for (const auto& j : optional_array(body, "products", "layered-model")) {
            check_keys(j, {"id", "includes"}, "product");
            Product p;
            p.id = require_string(j, "id", "product");
            if (!seen.insert(p.id).second)
                fail(ErrorCode::Schema, "duplicate product id '" + p.id + "'");
            for (auto& a : string_array(require(j, "includes", "product '" + p.id + "'"), "product '" + p.id + "'")) {
                if (!input.model.activities.contains(a))
                    dangling("activity included by product '" + p.id + "'", a);
                p.includes.insert(std::move(a));
            }
            products.products.push_back(std::move(p));
        }
        std::sort(products.products.begin(), products.products.end(),
                  [](const Product& a, const Product& b) { return a.id < b.id; });
        input.products = std::move(products);
    }
    throw_on_violations(validate(input.model));
    return input;
}

ProductLineModel parse_variability_model(std::string_view bytes) {
    json doc = parse_json(bytes);
    DocumentKind kind{};
    const json& body = open_envelope(doc, {DocumentKind::VariabilityModel, DocumentKind::ProductLineModel}, &kind);
    ProductLineModel plm;
    if (kind == DocumentKind::ProductLineModel) {
        check_keys(body,
                   {"variation_points", "variants", "interactions", "refinements", "bindings", "layered_model"},
                   "product-line-model");
        const json& layered = require(body, "layered_model", "product-line-model");
        check_keys(layered, {"artifacts", "activities", "refinements", "interactions"}, "layered_model");
        plm.artifacts = read_layered_body(layered);
    } else {
        check_keys(body, {"variation_points", "variants", "interactions", "refinements", "bindings"},
                   "variability-model");
    }
    read_vm_body(body, plm);
    throw_on_violations(validate(plm));
    return plm;
}

Configuration parse_configuration(std::string_view bytes) {
    json doc = parse_json(bytes);
    const json& body = open_envelope(doc, {DocumentKind::Configuration}, nullptr);
    check_keys(body, {"selection"}, "configuration");
    Configuration cfg;
    for (auto& id : string_array(require(body, "selection", "configuration"), "configuration selection"))
        if (!cfg.selection.insert(id).second)
            fail(ErrorCode::Schema, "configuration selects '" + id + "' twice");
    return cfg;
}

ReductionTrace parse_trace(std::string_view bytes) {
    json doc = parse_json(bytes);
    const json& body = open_envelope(doc, {DocumentKind::ReductionTrace}, nullptr);
    check_keys(body, {"pass_count", "merges"}, "reduction-trace");
    ReductionTrace trace;
    const auto& passes = require(body, "pass_count", "reduction-trace");
    if (!passes.is_number_unsigned())
        fail(ErrorCode::Schema, "reduction-trace: pass_count must be a non-negative integer");
    trace.pass_count = passes.get<std::size_t>();
    for (const auto& j : optional_array(body, "merges", "reduction-trace")) {
        const std::string ctx = "merge record";
        check_keys(j,
                   {"source", "target", "variant_pairing", "rebound_bindings", "transferred_refinements",
                    "transferred_interactions"},
                   ctx);
        MergeRecord rec;
        rec.source_vp_id = require_string(j, "source", ctx);
        rec.target_vp_id = require_string(j, "target", ctx);
        const auto& pairing = require(j, "variant_pairing", ctx);
        expect_object(pairing, ctx + " variant_pairing");
        for (const auto& [target, source] : pairing.items()) {
            if (!source.is_string())
                fail(ErrorCode::Schema, ctx + ": variant_pairing values must be strings");
            rec.variant_pairing.emplace(target, source.get<std::string>());
        }
        for (const auto& b : optional_array(j, "rebound_bindings", ctx))
            rec.rebound_bindings.push_back(read_binding(b, ctx + " binding"));
        for (const auto& r : optional_array(j, "transferred_refinements", ctx)) {
            check_keys(r, {"child_vp", "parent_variant"}, ctx + " refinement");
            rec.transferred_refinements.push_back(
                {require_string(r, "child_vp", ctx), require_string(r, "parent_variant", ctx)});
        }
        for (const auto& e : optional_array(j, "transferred_interactions", ctx))
            rec.transferred_interactions.push_back(
                read_interaction(e, InteractionLevel::VariantLevel, ctx + " interaction"));
        trace.merges.push_back(std::move(rec));
    }
    return trace;
}

std::string serialize(const LayeredInput& input) {
    json body = write_layered_body(input.model);
    if (input.products) {
        json products = json::array();
        for (const auto& p : input.products->products)
            products.push_back({{"id", p.id}, {"includes", p.includes}});
        body["products"] = std::move(products);
    }
    return finish(DocumentKind::LayeredModel, std::move(body));
}

std::string serialize(const LayeredModel& model) {
    return serialize(LayeredInput{model, std::nullopt});
}

std::string serialize(const ProductLineModel& plm) {
    json body = write_vm_body(plm);
    if (!plm.artifacts)
        return finish(DocumentKind::VariabilityModel, std::move(body));
    body["layered_model"] = write_layered_body(*plm.artifacts);
    return finish(DocumentKind::ProductLineModel, std::move(body));
}

std::string serialize(const Configuration& cfg) {
    return finish(DocumentKind::Configuration, {{"selection", cfg.selection}});
}

std::string serialize(const ReductionTrace& trace) {
    json merges = json::array();
    for (const auto& rec : trace.merges) {
        json pairing = json::object();
        for (const auto& [target, source] : rec.variant_pairing)
            pairing[target] = source;
        json bindings = json::array();
        for (const auto& b : rec.rebound_bindings)
            bindings.push_back(write_binding(b));
        json refinements = json::array();
        for (const auto& r : rec.transferred_refinements)
            refinements.push_back({{"child_vp", r.child_vp_id}, {"parent_variant", r.parent_variant_id}});
        json interactions = json::array();
        for (const auto& e : rec.transferred_interactions)
            interactions.push_back(write_interaction(e));
        merges.push_back({{"source", rec.source_vp_id},
                          {"target", rec.target_vp_id},
                          {"variant_pairing", std::move(pairing)},
                          {"rebound_bindings", std::move(bindings)},
                          {"transferred_refinements", std::move(refinements)},
                          {"transferred_interactions", std::move(interactions)}});
    }
    return finish(DocumentKind::ReductionTrace, {{"pass_count", trace.pass_count}, {"merges", std::move(merges)}});
}

}  // namespace plse
