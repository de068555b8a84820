#include "plse/model.hpp"

#include <algorithm>
#include <sstream>

namespace plse {

std::string_view to_string(Layer layer) {
    switch (layer) {
    case Layer::Feature: return "feature";
    case Layer::Functional: return "functional";
    case Layer::Component: return "component";
    }
    return "?";
}

std::string_view to_string(InteractionKind kind) {
    return kind == InteractionKind::Material ? "material" : "information";
}

std::string_view to_string(RefinementKind kind) {
    return kind == RefinementKind::FeatureRefinement ? "feature-refinement" : "functional-refinement";
}

int depth(Layer layer) {
    return static_cast<int>(layer);
}

bool is_directly_above(Layer upper, Layer lower) {
    return depth(lower) - depth(upper) == 1;
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Syntax: return "syntax";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::UnknownSchemaVersion: return "unknown-schema-version";
    case ErrorCode::DanglingReference: return "dangling-reference";
    case ErrorCode::LayerAdjacency: return "layer-adjacency";
    case ErrorCode::InvalidModel: return "invalid-model";
    case ErrorCode::UnknownId: return "unknown-id";
    case ErrorCode::Ungroupable: return "ungroupable";
    case ErrorCode::MixedLayerGroup: return "mixed-layer-group";
    case ErrorCode::ConflictingParents: return "conflicting-parents";
    case ErrorCode::LayerOrder: return "layer-order";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    }
    return "?";
}

void add_interaction(InteractionSet& set, Interaction edge) {
    auto it = set.find(edge);
    if (it == set.end()) {
        set.insert(std::move(edge));
        return;
    }
    if (edge.is_requires && !it->is_requires) {
        Interaction merged = *it;
        merged.is_requires = true;
        set.erase(it);
        set.insert(std::move(merged));
    }
}

namespace {

const std::vector<Id> kEmpty;

const std::vector<Id>& lookup(const std::map<Id, std::vector<Id>>& m, const Id& key) {
    auto it = m.find(key);
    return it == m.end() ? kEmpty : it->second;
}

void sort_unique(std::vector<Id>& ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace

VmIndex::VmIndex(const VariabilityModel& vm) : vm_(&vm) {
    // Maps iterate in id order, so the per-key lists come out sorted.
    for (const auto& [id, variant] : vm.variants)
        variants_of_[variant.vp_id].push_back(id);
    for (const auto& r : vm.refinements) {
        child_vps_of_[r.parent_variant_id].push_back(r.child_vp_id);
        parent_variant_of_.emplace(r.child_vp_id, r.parent_variant_id);
    }
    for (auto& [_, children] : child_vps_of_)
        sort_unique(children);
    for (const auto& edge : vm.interactions) {
        successors_[edge.from].push_back(edge.to);
        predecessors_[edge.to].push_back(edge.from);
        neighbours_[edge.from].push_back(edge.to);
        neighbours_[edge.to].push_back(edge.from);
    }
    for (auto* m : {&successors_, &predecessors_, &neighbours_})
        for (auto& [_, ids] : *m)
            sort_unique(ids);
}

const std::vector<Id>& VmIndex::variants_of(const Id& vp_id) const {
    return lookup(variants_of_, vp_id);
}

const std::vector<Id>& VmIndex::child_vps_of(const Id& variant_id) const {
    return lookup(child_vps_of_, variant_id);
}

std::optional<Id> VmIndex::parent_variant_of(const Id& vp_id) const {
    auto it = parent_variant_of_.find(vp_id);
    if (it == parent_variant_of_.end())
        return std::nullopt;
    return it->second;
}

std::optional<Id> VmIndex::parent_vp_of(const Id& vp_id) const {
    auto parent = parent_variant_of(vp_id);
    if (!parent)
        return std::nullopt;
    auto it = vm_->variants.find(*parent);
    if (it == vm_->variants.end())
        return std::nullopt;
    return it->second.vp_id;
}

const std::vector<Id>& VmIndex::successors(const Id& variant_id) const {
    return lookup(successors_, variant_id);
}

const std::vector<Id>& VmIndex::predecessors(const Id& variant_id) const {
    return lookup(predecessors_, variant_id);
}

const std::vector<Id>& VmIndex::neighbours(const Id& variant_id) const {
    return lookup(neighbours_, variant_id);
}

std::vector<Id> subtree_vps(const Id& vp_id, const VariabilityModel& vm) {
    if (!vm.variation_points.contains(vp_id))
        throw Error(ErrorCode::UnknownId, "unknown variation point '" + vp_id + "'");
    VmIndex index(vm);
    std::vector<Id> out;
    std::set<Id> seen;
    std::vector<Id> stack{vp_id};
    while (!stack.empty()) {
        Id current = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(current).second)
            continue;
        out.push_back(current);
        for (const auto& variant : index.variants_of(current))
            for (const auto& child : index.child_vps_of(variant))
                stack.push_back(child);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t tree_size(const Id& root_vp_id, const VariabilityModel& vm) {
    VmIndex index(vm);
    std::size_t total = 0;
    for (const auto& vp : subtree_vps(root_vp_id, vm))
        total += index.variants_of(vp).size();
    return total;
}

std::vector<Id> roots(const VariabilityModel& vm) {
    std::set<Id> refined;
    for (const auto& r : vm.refinements)
        refined.insert(r.child_vp_id);
    std::vector<Id> out;
    for (const auto& [id, _] : vm.variation_points)
        if (!refined.contains(id))
            out.push_back(id);
    return out;
}

std::string_view to_string(Rule rule) {
    switch (rule) {
    case Rule::ActivityArtifact: return "activity-artifact";
    case Rule::ArtifactMembership: return "artifact-membership";
    case Rule::RefinementEndpoint: return "refinement-endpoint";
    case Rule::RefinementLayer: return "refinement-layer-adjacency";
    case Rule::RefinementKindMismatch: return "refinement-kind";
    case Rule::RefinementSingleParent: return "refinement-single-parent";
    case Rule::ArtifactInteraction: return "artifact-interaction";
    case Rule::RealizationConsistency: return "realization-consistency";
    case Rule::VariantInteraction: return "variant-interaction";
    case Rule::InteractionLevelMismatch: return "interaction-level";
    case Rule::ForestSingleParent: return "forest-single-parent";
    case Rule::ForestAcyclic: return "forest-acyclicity";
    case Rule::RefinementDangling: return "variability-refinement-endpoint";
    case Rule::BindingEndpoint: return "binding-endpoint";
    case Rule::BindingConsistency: return "binding-consistency";
    }
    return "?";
}

std::string describe(const Violation& violation) {
    std::ostringstream os;
    os << to_string(violation.rule) << ": " << violation.message;
    if (!violation.ids.empty()) {
        os << " [";
        for (std::size_t i = 0; i < violation.ids.size(); ++i)
            os << (i ? ", " : "") << violation.ids[i];
        os << "]";
    }
    return os.str();
}

namespace {

class Collector {
public:
    void add(Rule rule, std::vector<Id> ids, std::string message) {
        out.push_back({rule, std::move(ids), std::move(message)});
    }
    std::vector<Violation> out;
};

void check_layered(const LayeredModel& model, Collector& c) {
    for (const auto& [id, activity] : model.activities) {
        auto art = model.artifacts.find(activity.artifact_id);
        if (art == model.artifacts.end()) {
            c.add(Rule::ActivityArtifact, {id, activity.artifact_id}, "activity references unknown artifact");
            continue;
        }
        if (art->second.layer != activity.layer)
            c.add(Rule::ActivityArtifact, {id, art->first}, "activity layer differs from its artifact's layer");
        if (!art->second.activity_ids.contains(id))
            c.add(Rule::ArtifactMembership, {art->first, id}, "artifact does not list its activity");
    }
    for (const auto& [id, artifact] : model.artifacts) {
        for (const auto& member : artifact.activity_ids) {
            auto act = model.activities.find(member);
            if (act == model.activities.end())
                c.add(Rule::ArtifactMembership, {id, member}, "artifact lists unknown activity");
            else if (act->second.artifact_id != id)
                c.add(Rule::ArtifactMembership, {id, member}, "activity belongs to a different artifact");
        }
    }

    std::map<Id, Id> parent_of_artifact;
    for (const auto& r : model.refinements) {
        auto child = model.artifacts.find(r.child_artifact_id);
        auto parent = model.activities.find(r.parent_activity_id);
        if (child == model.artifacts.end() || parent == model.activities.end()) {
            c.add(Rule::RefinementEndpoint, {r.child_artifact_id, r.parent_activity_id},
                  "refinement endpoint does not resolve");
            continue;
        }
        if (!is_directly_above(parent->second.layer, child->second.layer))
            c.add(Rule::RefinementLayer, {r.child_artifact_id, r.parent_activity_id},
                  "parent activity must be exactly one layer above the refining artifact");
        bool feature_parent = parent->second.layer == Layer::Feature;
        if (feature_parent != (r.kind == RefinementKind::FeatureRefinement))
            c.add(Rule::RefinementKindMismatch, {r.child_artifact_id, r.parent_activity_id},
                  "refinement kind does not match the parent layer");
        auto [it, inserted] = parent_of_artifact.emplace(r.child_artifact_id, r.parent_activity_id);
        if (!inserted)
            c.add(Rule::RefinementSingleParent, {r.child_artifact_id, it->second, r.parent_activity_id},
                  "artifact refines more than one activity");
    }

    for (const auto& edge : model.interactions) {
        if (edge.level != InteractionLevel::ArtifactLevel) {
            c.add(Rule::InteractionLevelMismatch, {edge.from, edge.to},
                  "layered model holds a variant-level interaction");
            continue;
        }
        auto from = model.activities.find(edge.from);
        auto to = model.activities.find(edge.to);
        if (from == model.activities.end() || to == model.activities.end())
            c.add(Rule::ArtifactInteraction, {edge.from, edge.to}, "interaction endpoint is not an activity");
        else if (edge.from == edge.to)
            c.add(Rule::ArtifactInteraction, {edge.from}, "interaction is a self-loop");
        else if (from->second.layer != to->second.layer)
            c.add(Rule::ArtifactInteraction, {edge.from, edge.to}, "interaction crosses layers");
    }
}

void check_variability(const VariabilityModel& vm, Collector& c) {
    for (const auto& [id, variant] : vm.variants)
        if (!vm.variation_points.contains(variant.vp_id))
            c.add(Rule::RealizationConsistency, {id, variant.vp_id},
                  "variant realizes an unknown variation point");

    for (const auto& edge : vm.interactions) {
        if (edge.level != InteractionLevel::VariantLevel) {
            c.add(Rule::InteractionLevelMismatch, {edge.from, edge.to},
                  "variability model holds an artifact-level interaction");
            continue;
        }
        auto from = vm.variants.find(edge.from);
        auto to = vm.variants.find(edge.to);
        if (from == vm.variants.end() || to == vm.variants.end())
            c.add(Rule::VariantInteraction, {edge.from, edge.to}, "interaction endpoint is not a variant");
        else if (edge.from == edge.to)
            c.add(Rule::VariantInteraction, {edge.from}, "interaction is a self-loop");
        else if (from->second.vp_id == to->second.vp_id)
            c.add(Rule::VariantInteraction, {edge.from, edge.to, from->second.vp_id},
                  "interaction connects variants of the same variation point");
    }

    std::map<Id, Id> parent_variant;
    for (const auto& r : vm.refinements) {
        if (!vm.variation_points.contains(r.child_vp_id) || !vm.variants.contains(r.parent_variant_id)) {
            c.add(Rule::RefinementDangling, {r.child_vp_id, r.parent_variant_id},
                  "variability refinement endpoint does not resolve");
            continue;
        }
        auto [it, inserted] = parent_variant.emplace(r.child_vp_id, r.parent_variant_id);
        if (!inserted)
            c.add(Rule::ForestSingleParent, {r.child_vp_id, it->second, r.parent_variant_id},
                  "variation point has more than one parent variant");
    }

    // Walk every parent chain; any revisit within one walk is a cycle.
    std::set<std::vector<Id>> cycles;
    for (const auto& [start, _] : vm.variation_points) {
        std::vector<Id> chain;
        std::map<Id, std::size_t> position;
        Id current = start;
        while (true) {
            auto [pos, fresh] = position.emplace(current, chain.size());
            if (!fresh) {
                std::vector<Id> cycle(chain.begin() + static_cast<std::ptrdiff_t>(pos->second), chain.end());
                std::sort(cycle.begin(), cycle.end());
                cycles.insert(std::move(cycle));
                break;
            }
            chain.push_back(current);
            auto p = parent_variant.find(current);
            if (p == parent_variant.end())
                break;
            current = vm.variants.at(p->second).vp_id;
            if (!vm.variation_points.contains(current))
                break;
        }
    }
    for (const auto& cycle : cycles)
        c.add(Rule::ForestAcyclic, cycle, "variability refinement forms a cycle");
}

void check_bindings(const ProductLineModel& plm, Collector& c) {
    const auto& vm = plm.vm;
    const LayeredModel* layered = plm.artifacts ? &*plm.artifacts : nullptr;
    std::map<Id, std::vector<Id>> vps_of_artifact;
    for (const auto& b : plm.bindings) {
        if (b.kind == BindingKind::ActivityVariant) {
            bool ok = vm.variants.contains(b.target_id) &&
                      (!layered || layered->activities.contains(b.source_id));
            if (!ok)
                c.add(Rule::BindingEndpoint, {b.source_id, b.target_id}, "activity binding does not resolve");
        } else {
            bool ok = vm.variation_points.contains(b.target_id) &&
                      (!layered || layered->artifacts.contains(b.source_id));
            if (!ok)
                c.add(Rule::BindingEndpoint, {b.source_id, b.target_id}, "artifact binding does not resolve");
            else
                vps_of_artifact[b.source_id].push_back(b.target_id);
        }
    }
    if (!layered)
        return;
    for (const auto& b : plm.bindings) {
        if (b.kind != BindingKind::ActivityVariant)
            continue;
        auto act = layered->activities.find(b.source_id);
        auto variant = vm.variants.find(b.target_id);
        if (act == layered->activities.end() || variant == vm.variants.end())
            continue;
        auto vps = vps_of_artifact.find(act->second.artifact_id);
        if (vps == vps_of_artifact.end())
            continue;
        for (const auto& vp : vps->second)
            if (vp != variant->second.vp_id)
                c.add(Rule::BindingConsistency, {b.source_id, b.target_id, act->second.artifact_id, vp},
                      "activity is bound to a variant outside its artifact's variation point");
    }
}

}  // namespace

std::vector<Violation> validate(const LayeredModel& model) {
    Collector c;
    check_layered(model, c);
    return std::move(c.out);
}

std::vector<Violation> validate(const ProductLineModel& plm) {
    Collector c;
    if (plm.artifacts)
        check_layered(*plm.artifacts, c);
    check_variability(plm.vm, c);
    check_bindings(plm, c);
    return std::move(c.out);
}

}  // namespace plse
