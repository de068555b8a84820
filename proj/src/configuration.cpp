#include "plse/configuration.hpp"

#include <algorithm>
#include <sstream>

namespace plse {

std::string_view to_string(ConfigRule rule) {
    switch (rule) {
    case ConfigRule::MissingSelection: return "missing-selection";
    case ConfigRule::MultipleSelection: return "multiple-selection";
    case ConfigRule::InactiveSelection: return "inactive-selection";
    case ConfigRule::InteractionClosure: return "interaction-closure";
    case ConfigRule::UnboundVariant: return "unbound-variant";
    }
    return "?";
}

std::string describe(const ConfigViolation& violation) {
    std::ostringstream os;
    os << to_string(violation.rule) << ": " << violation.message << " [";
    for (std::size_t i = 0; i < violation.ids.size(); ++i)
        os << (i ? ", " : "") << violation.ids[i];
    os << "]";
    return os.str();
}

namespace {

Count count_below(const VmIndex& index, const Id& vp) {
    Count total = 0;
    for (const auto& variant : index.variants_of(vp)) {
        Count product = 1;
        for (const auto& child : index.child_vps_of(variant))
            product *= count_below(index, child);
        total += product;
    }
    return total;
}

std::set<Id> bound_variants(const ProductLineModel& plm) {
    std::set<Id> out;
    for (const auto& b : plm.bindings)
        if (b.kind == BindingKind::ActivityVariant)
            out.insert(b.target_id);
    return out;
}

}  // namespace

Count unconstrained_count(const VariabilityModel& vm) {
    VmIndex index(vm);
    Count total = 1;
    for (const auto& root : roots(vm))
        total *= count_below(index, root);
    return total;
}

std::vector<ConfigViolation> validate_config(const ProductLineModel& plm, const Configuration& cfg) {
    const auto& vm = plm.vm;
    for (const auto& id : cfg.selection)
        if (!vm.variants.contains(id))
            throw Error(ErrorCode::UnknownId, "configuration selects unknown variant '" + id + "'");

    VmIndex index(vm);
    std::set<Id> active;
    std::vector<Id> stack = roots(vm);
    while (!stack.empty()) {
        Id vp = std::move(stack.back());
        stack.pop_back();
        if (!active.insert(vp).second)
            continue;
        for (const auto& v : index.variants_of(vp))
            if (cfg.selection.contains(v))
                for (const auto& child : index.child_vps_of(v))
                    stack.push_back(child);
    }

    std::vector<ConfigViolation> out;
    for (const auto& [vp, _] : vm.variation_points) {
        std::vector<Id> chosen;
        for (const auto& v : index.variants_of(vp))
            if (cfg.selection.contains(v))
                chosen.push_back(v);
        if (active.contains(vp)) {
            if (chosen.empty())
                out.push_back({ConfigRule::MissingSelection, {vp}, "active variation point has no selected variant"});
            else if (chosen.size() > 1) {
                chosen.insert(chosen.begin(), vp);
                out.push_back({ConfigRule::MultipleSelection, chosen,
                               "active variation point has more than one selected variant"});
            }
        } else if (!chosen.empty()) {
            chosen.insert(chosen.begin(), vp);
            out.push_back({ConfigRule::InactiveSelection, chosen, "variant selected under an inactive variation point"});
        }
    }
    for (const auto& e : vm.interactions) {
        if (!active.contains(vm.variants.at(e.from).vp_id) || !active.contains(vm.variants.at(e.to).vp_id))
            continue;
        if (cfg.selection.contains(e.from) != cfg.selection.contains(e.to))
            out.push_back({ConfigRule::InteractionClosure, {e.from, e.to},
                           "only one endpoint of an interaction is selected"});
    }
    if (!plm.bindings.empty()) {
        auto bound = bound_variants(plm);
        for (const auto& v : cfg.selection)
            if (!bound.contains(v))
                out.push_back({ConfigRule::UnboundVariant, {v}, "selected variant binds no activity"});
    }
    return out;
}

namespace {

struct Enumerator {
    const ProductLineModel& plm;
    VmIndex index;
    std::set<Id> bound;
    std::set<Id> selection;
    std::vector<Configuration> out;

    // Selections built here always satisfy cardinality and activation, so
    // only the closure and binding rules remain.
    bool acceptable() const {
        const auto& vm = plm.vm;
        for (const auto& e : vm.interactions) {
            bool from = selection.contains(e.from);
            bool to = selection.contains(e.to);
            if (from == to)
                continue;
            // The unselected endpoint matters only if its variation point is active.
            const Id& other = from ? e.to : e.from;
            if (is_active(vm.variants.at(other).vp_id))
                return false;
        }
        if (!plm.bindings.empty())
            for (const auto& v : selection)
                if (!bound.contains(v))
                    return false;
        return true;
    }

    bool is_active(const Id& vp) const {
        auto parent = index.parent_variant_of(vp);
        return !parent || selection.contains(*parent);
    }

    void run(std::vector<Id> pending) {
        if (pending.empty()) {
            if (acceptable())
                out.push_back({selection});
            return;
        }
        Id vp = pending.back();
        pending.pop_back();
        for (const auto& v : index.variants_of(vp)) {
            auto next = pending;
            const auto& children = index.child_vps_of(v);
            next.insert(next.end(), children.begin(), children.end());
            selection.insert(v);
            run(std::move(next));
            selection.erase(v);
        }
    }
};

}  // namespace

std::vector<Configuration> enumerate_valid(const ProductLineModel& plm, std::uint64_t budget) {
    Count space = unconstrained_count(plm.vm);
    if (space > budget)
        throw BudgetExceeded(space, budget);
    Enumerator e{plm, VmIndex(plm.vm), bound_variants(plm), {}, {}};
    e.run(roots(plm.vm));
    std::sort(e.out.begin(), e.out.end());
    return std::move(e.out);
}

}  // namespace plse
