#include "plse/reduction.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

namespace plse {

namespace {

void require_vp(const VariabilityModel& vm, const Id& vp_id) {
    if (!vm.variation_points.contains(vp_id))
        throw Error(ErrorCode::UnknownId, "unknown variation point '" + vp_id + "'");
}

bool contains(const std::vector<Id>& sorted, const Id& id) {
    return std::binary_search(sorted.begin(), sorted.end(), id);
}

std::vector<Id> partners(const VmIndex& index, const Id& variant, const std::vector<Id>& other_variants) {
    std::vector<Id> out;
    for (const auto& n : index.neighbours(variant))
        if (contains(other_variants, n))
            out.push_back(n);
    return out;
}

bool completeness(const VmIndex& index, const Id& source, const Id& target) {
    if (source == target)
        return false;
    const auto& source_variants = index.variants_of(source);
    for (const auto& v : index.variants_of(target))
        if (partners(index, v, source_variants).empty())
            return false;
    return true;
}

std::optional<std::map<Id, Id>> pairing(const VmIndex& index, const Id& source, const Id& target) {
    const auto& source_variants = index.variants_of(source);
    std::map<Id, Id> out;
    for (const auto& v : index.variants_of(target)) {
        auto p = partners(index, v, source_variants);
        if (p.size() != 1)
            return std::nullopt;
        out.emplace(v, p.front());
    }
    return out;
}

/// True if `to` is reachable from `from` without using the direct edge.
bool has_detour(const VmIndex& index, const Id& from, const Id& to) {
    std::set<Id> visited{from};
    std::deque<Id> queue{from};
    while (!queue.empty()) {
        Id current = std::move(queue.front());
        queue.pop_front();
        for (const auto& next : index.successors(current)) {
            if (current == from && next == to)
                continue;
            if (next == to)
                return true;
            if (visited.insert(next).second)
                queue.push_back(next);
        }
    }
    return false;
}

bool uniqueness(const VmIndex& index, const Id& source, const Id& target) {
    if (!completeness(index, source, target))
        return false;
    auto pairs = pairing(index, source, target);
    if (!pairs)
        return false;
    for (const auto& [target_variant, source_variant] : *pairs) {
        if (contains(index.successors(source_variant), target_variant) &&
            has_detour(index, source_variant, target_variant))
            return false;
        if (contains(index.successors(target_variant), source_variant) &&
            has_detour(index, target_variant, source_variant))
            return false;
    }
    return true;
}

bool is_ancestor(const VmIndex& index, const Id& ancestor, const Id& vp) {
    std::set<Id> seen;
    auto current = index.parent_vp_of(vp);
    while (current && seen.insert(*current).second) {
        if (*current == ancestor)
            return true;
        current = index.parent_vp_of(*current);
    }
    return false;
}

bool mergeable(const VariabilityModel& vm, const VmIndex& index, const Id& source, const Id& target) {
    if (source == target || !vm.variation_points.contains(source) || !vm.variation_points.contains(target))
        return false;
    return uniqueness(index, source, target) && !is_ancestor(index, target, source);
}

std::vector<VpPair> pairs_in_tree(const VariabilityModel& vm, const VmIndex& index, const Id& root) {
    std::vector<Id> tree_variants;
    for (const auto& vp : subtree_vps(root, vm))
        for (const auto& v : index.variants_of(vp))
            tree_variants.push_back(v);
    std::sort(tree_variants.begin(), tree_variants.end());

    std::vector<VpPair> out;
    std::set<std::pair<Id, Id>> seen;
    for (const auto& v : tree_variants) {
        const Id& own = vm.variants.at(v).vp_id;
        for (const auto& n : index.neighbours(v)) {
            const Id& other = vm.variants.at(n).vp_id;
            if (other == own)
                continue;
            auto key = std::minmax(own, other);
            if (!seen.emplace(key.first, key.second).second)
                continue;
            // The variation point reached first keeps the source role on a tie.
            if (index.variants_of(own).size() >= index.variants_of(other).size())
                out.push_back({own, other});
            else
                out.push_back({other, own});
        }
    }
    return out;
}

}  // namespace

std::vector<Id> roots_by_size(const VariabilityModel& vm) {
    std::vector<std::pair<std::size_t, Id>> sized;
    for (const auto& r : roots(vm))
        sized.emplace_back(tree_size(r, vm), r);
    std::stable_sort(sized.begin(), sized.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Id> out;
    for (auto& [_, id] : sized)
        out.push_back(std::move(id));
    return out;
}

Id identify_main_root(const VariabilityModel& vm) {
    auto ordered = roots_by_size(vm);
    if (ordered.empty())
        throw Error(ErrorCode::Precondition, "model has no root variation point");
    return ordered.front();
}

std::vector<VpPair> interacting_pairs(const VariabilityModel& vm, const Id& root_vp_id) {
    require_vp(vm, root_vp_id);
    return pairs_in_tree(vm, VmIndex(vm), root_vp_id);
}

bool check_completeness(const VariabilityModel& vm, const Id& source_vp_id, const Id& target_vp_id) {
    require_vp(vm, source_vp_id);
    require_vp(vm, target_vp_id);
    return completeness(VmIndex(vm), source_vp_id, target_vp_id);
}

bool check_uniqueness(const VariabilityModel& vm, const Id& source_vp_id, const Id& target_vp_id) {
    require_vp(vm, source_vp_id);
    require_vp(vm, target_vp_id);
    return uniqueness(VmIndex(vm), source_vp_id, target_vp_id);
}

std::optional<std::map<Id, Id>> variant_pairing(const VariabilityModel& vm, const Id& source_vp_id,
                                                const Id& target_vp_id) {
    require_vp(vm, source_vp_id);
    require_vp(vm, target_vp_id);
    return pairing(VmIndex(vm), source_vp_id, target_vp_id);
}

bool can_merge(const VariabilityModel& vm, const Id& source_vp_id, const Id& target_vp_id) {
    return mergeable(vm, VmIndex(vm), source_vp_id, target_vp_id);
}

MergeResult merge(const ProductLineModel& plm, const Id& source_vp_id, const Id& target_vp_id) {
    const auto& vm = plm.vm;
    VmIndex index(vm);
    if (!mergeable(vm, index, source_vp_id, target_vp_id))
        throw Error(ErrorCode::Precondition, "cannot merge '" + target_vp_id + "' into '" + source_vp_id +
                                                 "': completeness or uniqueness does not hold");

    MergeResult result{plm, {}};
    auto& out = result.model;
    auto& rec = result.record;
    rec.source_vp_id = source_vp_id;
    rec.target_vp_id = target_vp_id;
    rec.variant_pairing = *pairing(index, source_vp_id, target_vp_id);
    const auto& paired = rec.variant_pairing;
    auto mapped = [&](const Id& id) -> const Id& {
        auto it = paired.find(id);
        return it == paired.end() ? id : it->second;
    };

    out.vm.variation_points.erase(target_vp_id);
    for (const auto& [target_variant, _] : paired)
        out.vm.variants.erase(target_variant);

    std::set<Binding> bindings;
    for (const auto& b : plm.bindings) {
        if (b.kind == BindingKind::ActivityVariant && paired.contains(b.target_id)) {
            rec.rebound_bindings.push_back(b);
            bindings.insert(Binding::activity(b.source_id, paired.at(b.target_id)));
        } else if (b.kind == BindingKind::ArtifactVariationPoint && b.target_id == target_vp_id) {
            rec.rebound_bindings.push_back(b);
            bindings.insert(Binding::artifact(b.source_id, source_vp_id));
        } else {
            bindings.insert(b);
        }
    }
    out.bindings = std::move(bindings);

    std::set<VariabilityRefinement> refinements;
    for (const auto& r : vm.refinements) {
        if (r.child_vp_id == target_vp_id)
            continue;
        if (paired.contains(r.parent_variant_id)) {
            rec.transferred_refinements.push_back(r);
            refinements.insert({r.child_vp_id, paired.at(r.parent_variant_id)});
        } else {
            refinements.insert(r);
        }
    }
    out.vm.refinements = std::move(refinements);

    InteractionSet interactions;
    std::vector<Interaction> moved;
    for (const auto& e : vm.interactions) {
        if (paired.contains(e.from) || paired.contains(e.to)) {
            rec.transferred_interactions.push_back(e);
            moved.push_back(e);
        } else {
            interactions.insert(e);
        }
    }
    for (auto e : moved) {
        e.from = mapped(e.from);
        e.to = mapped(e.to);
        if (e.from != e.to)
            add_interaction(interactions, std::move(e));
    }
    out.vm.interactions = std::move(interactions);
    return result;
}

ReductionResult reduce(const ProductLineModel& plm) {
    ReductionResult result{plm, {}};
    while (true) {
        ++result.trace.pass_count;
        const auto& vm = result.model.vm;
        VmIndex index(vm);
        std::optional<VpPair> chosen;
        for (const auto& root : roots_by_size(vm)) {
            for (const auto& pair : pairs_in_tree(vm, index, root)) {
                if (mergeable(vm, index, pair.source, pair.target)) {
                    chosen = pair;
                    break;
                }
            }
            if (chosen)
                break;
        }
        if (!chosen)
            break;
        auto merged = merge(result.model, chosen->source, chosen->target);
        result.model = std::move(merged.model);
        result.trace.merges.push_back(std::move(merged.record));
    }
    return result;
}

}  // namespace plse
