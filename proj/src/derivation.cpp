#include "plse/derivation.hpp"

#include <vector>

namespace plse {

namespace {

std::optional<Id> refined_parent(const LayeredModel& model, const Activity& act) {
    for (const auto& r : model.refinements)
        if (r.child_artifact_id == act.artifact_id)
            return r.parent_activity_id;
    return std::nullopt;
}

std::map<Id, std::vector<Id>> variants_by_activity(const ProductLineModel& plm) {
    std::map<Id, std::vector<Id>> out;
    for (const auto& b : plm.bindings)
        if (b.kind == BindingKind::ActivityVariant)
            out[b.source_id].push_back(b.target_id);
    return out;
}

}  // namespace

DifSet diff(const LayeredModel& model, const std::optional<ProductSet>& products) {
    DifSet out;
    for (const auto& [id, act] : model.activities) {
        bool variable;
        if (products) {
            std::size_t present = 0;
            for (const auto& p : products->products)
                present += p.includes.contains(id) ? 1 : 0;
            variable = present > 0 && present < products->products.size();
        } else {
            variable = !act.mandatory;
        }
        if (!variable)
            continue;

        std::string key;
        if (act.group) {
            key = *act.group;
        } else if (auto parent = refined_parent(model, act)) {
            key = *parent;
        } else {
            throw Error(ErrorCode::Ungroupable,
                        "variable activity '" + id + "' has no group label and refines no activity");
        }
        out.difs.insert(id);
        out.grouping[key].insert(id);
    }
    return out;
}

ProductLineModel create_variation_points(const DifSet& difset, const LayeredModel& model) {
    ProductLineModel plm;
    plm.artifacts = model;
    for (const auto& [key, members] : difset.grouping) {
        std::optional<Layer> layer;
        for (const auto& id : members) {
            auto it = model.activities.find(id);
            if (it == model.activities.end())
                throw Error(ErrorCode::UnknownId, "unknown activity '" + id + "' in group '" + key + "'");
            if (layer && *layer != it->second.layer)
                throw Error(ErrorCode::MixedLayerGroup, "group '" + key + "' spans more than one layer");
            layer = it->second.layer;
        }
        if (!layer)
            continue;
        plm.vm.variation_points.emplace(key, VariationPoint{key, key, *layer});
        for (const auto& id : members) {
            plm.vm.variants.emplace(id, Variant{id, model.activities.at(id).name, key});
            plm.bindings.insert(Binding::activity(id, id));
        }
    }
    return plm;
}

ProductLineModel mapping(Layer lower, Layer upper, const ProductLineModel& plm, const DerivationOptions& options) {
    const int gap = depth(lower) - depth(upper);
    if (gap != 0 && gap != 1)
        throw Error(ErrorCode::LayerOrder, "mapping needs the upper layer to equal or sit directly above the lower");
    if (!plm.artifacts)
        throw Error(ErrorCode::Precondition, "mapping needs a product-line model with attached artifacts");

    ProductLineModel out = plm;
    auto& layered = *out.artifacts;
    const auto bound = variants_by_activity(plm);
    const auto& vm = plm.vm;

    auto in_lower = [&](const Id& act) {
        auto it = layered.activities.find(act);
        return it != layered.activities.end() && it->second.layer == lower;
    };
    auto variants_of = [&](const Id& act) -> const std::vector<Id>* {
        auto it = bound.find(act);
        return it == bound.end() ? nullptr : &it->second;
    };
    auto parent_in_upper = [&](const Id& act) -> std::optional<Id> {
        if (gap == 0)
            return std::nullopt;
        auto parent = refined_parent(layered, layered.activities.at(act));
        if (parent && layered.activities.at(*parent).layer == upper)
            return parent;
        return std::nullopt;
    };
    auto add_refinements = [&](const Id& child_act, const Id& parent_act) {
        const auto* children = variants_of(child_act);
        const auto* parents = variants_of(parent_act);
        if (!children || !parents)
            return;
        for (const auto& cv : *children)
            for (const auto& pv : *parents)
                out.vm.refinements.insert({vm.variants.at(cv).vp_id, pv});
    };

    // Snapshot: edges induced on the upper layer are not revisited here.
    const InteractionSet edges = plm.artifacts->interactions;
    for (const auto& edge : edges) {
        if (!in_lower(edge.from) || !in_lower(edge.to))
            continue;
        const auto* from_variants = variants_of(edge.from);
        const auto* to_variants = variants_of(edge.to);
        if (!from_variants || !to_variants)
            continue;

        for (const auto& fv : *from_variants)
            for (const auto& tv : *to_variants)
                if (vm.variants.at(fv).vp_id != vm.variants.at(tv).vp_id)
                    add_interaction(out.vm.interactions,
                                    {fv, tv, edge.kind, InteractionLevel::VariantLevel, edge.is_requires});

        auto from_parent = parent_in_upper(edge.from);
        auto to_parent = parent_in_upper(edge.to);
        if (!from_parent || !to_parent)
            continue;
        if (*from_parent != *to_parent)
            add_interaction(layered.interactions,
                            {*from_parent, *to_parent, edge.kind, InteractionLevel::ArtifactLevel, edge.is_requires});
        if (options.strict_refinement && variants_of(*from_parent) && variants_of(*to_parent)) {
            add_refinements(edge.from, *from_parent);
            add_refinements(edge.to, *to_parent);
        }
    }

    if (!options.strict_refinement) {
        for (const auto& [id, act] : layered.activities) {
            if (act.layer != lower || !variants_of(id))
                continue;
            if (auto parent = parent_in_upper(id))
                add_refinements(id, *parent);
        }
    }

    std::map<Id, Id> parent_of;
    for (const auto& r : out.vm.refinements) {
        auto [it, inserted] = parent_of.emplace(r.child_vp_id, r.parent_variant_id);
        if (!inserted)
            throw Error(ErrorCode::ConflictingParents, "variation point '" + r.child_vp_id +
                                                           "' would refine both '" + it->second + "' and '" +
                                                           r.parent_variant_id + "'");
    }
    return out;
}

ProductLineModel derive_initial_vm(const LayeredModel& model, const std::optional<ProductSet>& products,
                                   const DerivationOptions& options) {
    ProductLineModel plm = create_variation_points(diff(model, products), model);
    plm = mapping(Layer::Component, Layer::Functional, plm, options);
    plm = mapping(Layer::Functional, Layer::Feature, plm, options);
    plm = mapping(Layer::Feature, Layer::Feature, plm, options);
    auto violations = validate(plm);
    if (!violations.empty())
        throw Error(ErrorCode::InvalidModel, "derived model is invalid: " + describe(violations.front()));
    return plm;
}

}  // namespace plse
