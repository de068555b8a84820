#pragma once

// Variation-point reduction.
//
// Trees are visited from the largest (most variants) down. Within a tree,
// every variant-level interaction to another variation point nominates a
// (source, target) pair: the side with more variants is the source, and on a
// tie the variation point reached first keeps the source role. A target is
// merged into its source when
//
//   * every target variant interacts with some source variant (completeness,
//     direction ignored), and
//   * each target variant has exactly one source partner and every
//     source-target edge is the only directed path between its endpoints
//     (uniqueness).
//
// Merging removes the target, rebinds its activities and re-parents its
// subtrees and interactions onto the paired source variants. The whole pass
// restarts after each merge and stops once a full pass merges nothing.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "plse/model.hpp"

namespace plse {

struct VpPair {
    Id source;
    Id target;

    bool operator==(const VpPair&) const = default;
};

struct MergeRecord {
    Id source_vp_id;
    Id target_vp_id;
    std::map<Id, Id> variant_pairing;  // target variant -> source variant
    std::vector<Binding> rebound_bindings;
    std::vector<VariabilityRefinement> transferred_refinements;
    std::vector<Interaction> transferred_interactions;

    bool operator==(const MergeRecord&) const = default;
};

struct ReductionTrace {
    std::vector<MergeRecord> merges;
    std::size_t pass_count = 0;

    bool operator==(const ReductionTrace&) const = default;
};

struct MergeResult {
    ProductLineModel model;
    MergeRecord record;
};

struct ReductionResult {
    ProductLineModel model;
    ReductionTrace trace;
};

/// Root whose tree holds the most variants; ties go to the smaller id.
/// Throws Error(Precondition) on a model without variation points.
Id identify_main_root(const VariabilityModel& vm);

/// Roots ordered by descending tree size, then ascending id.
std::vector<Id> roots_by_size(const VariabilityModel& vm);

std::vector<VpPair> interacting_pairs(const VariabilityModel& vm, const Id& root_vp_id);

bool check_completeness(const VariabilityModel& vm, const Id& source_vp_id, const Id& target_vp_id);

bool check_uniqueness(const VariabilityModel& vm, const Id& source_vp_id, const Id& target_vp_id);

/// Target variant -> its single interacting source variant; nullopt when some
/// target variant does not have exactly one partner.
std::optional<std::map<Id, Id>> variant_pairing(const VariabilityModel& vm, const Id& source_vp_id, const Id& target_vp_id);

/// Completeness, uniqueness, and the target not being an ancestor of the
/// source (re-parenting would otherwise close a cycle).
bool can_merge(const VariabilityModel& vm, const Id& source_vp_id, const Id& target_vp_id);

/// Throws Error(Precondition) when can_merge is false.
MergeResult merge(const ProductLineModel& plm, const Id& source_vp_id, const Id& target_vp_id);

ReductionResult reduce(const ProductLineModel& plm);

}  // namespace plse
