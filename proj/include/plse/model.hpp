#pragma once

// Core product-line model types.
//
// A product-line model binds a variability model (variation points, the
// variants realizing them, variant-level interactions and the refinement
// hierarchy) to a layered functional-artifact model through artifact
// bindings. All types are plain values; the operations declared here are pure.
//
// Identifiers are opaque strings. Every deterministic ordering used by the
// library is ascending lexicographic over ids, which is why entities live in
// ordered maps and edges in ordered sets.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace plse {

using Id = std::string;

/// Layers of the functional artifact, highest abstraction first.
enum class Layer { Feature, Functional, Component };

enum class InteractionKind { Material, Information };

enum class InteractionLevel { ArtifactLevel, VariantLevel };

enum class RefinementKind { FeatureRefinement, FunctionalRefinement };

enum class BindingKind { ActivityVariant, ArtifactVariationPoint };

std::string_view to_string(Layer layer);
std::string_view to_string(InteractionKind kind);
std::string_view to_string(RefinementKind kind);

/// 0 for Feature, 1 for Functional, 2 for Component.
int depth(Layer layer);

/// True if `upper` sits exactly one layer above `lower`.
bool is_directly_above(Layer upper, Layer lower);

enum class ErrorCode {
    Syntax,
    Schema,
    UnknownSchemaVersion,
    DanglingReference,
    LayerAdjacency,
    InvalidModel,
    UnknownId,
    Ungroupable,
    MixedLayerGroup,
    ConflictingParents,
    LayerOrder,
    Precondition,
    BudgetExceeded,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct Activity {
    Id id;
    std::string name;
    Layer layer = Layer::Functional;
    Id artifact_id;
    bool mandatory = true;
    std::optional<std::string> group;

    bool operator==(const Activity&) const = default;
};

struct FunctionalArtifact {
    Id id;
    Layer layer = Layer::Functional;
    std::set<Id> activity_ids;

    bool operator==(const FunctionalArtifact&) const = default;
};

/// A lower-layer artifact refining a higher-layer activity. Member activities
/// of the child artifact inherit the relation.
struct Refinement {
    Id child_artifact_id;
    Id parent_activity_id;
    RefinementKind kind = RefinementKind::FunctionalRefinement;

    auto operator<=>(const Refinement&) const = default;
    bool operator==(const Refinement&) const = default;
};

/// Material or information flow. ArtifactLevel interactions connect
/// activities; VariantLevel interactions connect variants and act as
/// variability dependencies. `is_requires` marks the «requires» subset.
struct Interaction {
    Id from;
    Id to;
    InteractionKind kind = InteractionKind::Information;
    InteractionLevel level = InteractionLevel::ArtifactLevel;
    bool is_requires = false;

    bool operator==(const Interaction&) const = default;
};

/// Edges are identified by (from, to, kind); the requires flag is an attribute.
struct InteractionOrder {
    bool operator()(const Interaction& a, const Interaction& b) const {
        return std::tie(a.from, a.to, a.kind) < std::tie(b.from, b.to, b.kind);
    }
};

using InteractionSet = std::set<Interaction, InteractionOrder>;

/// Inserts `edge`; an existing edge with the same identity keeps its place
/// and absorbs the requires flag.
void add_interaction(InteractionSet& set, Interaction edge);

struct VariationPoint {
    Id id;
    std::string name;
    Layer level = Layer::Functional;

    bool operator==(const VariationPoint&) const = default;
};

/// `vp_id` is the realization dependency: every variant realizes exactly one
/// variation point.
struct Variant {
    Id id;
    std::string name;
    Id vp_id;

    bool operator==(const Variant&) const = default;
};

struct Binding {
    BindingKind kind = BindingKind::ActivityVariant;
    Id source_id;  // activity or artifact
    Id target_id;  // variant or variation point

    static Binding activity(Id activity_id, Id variant_id) {
        return {BindingKind::ActivityVariant, std::move(activity_id), std::move(variant_id)};
    }
    static Binding artifact(Id artifact_id, Id vp_id) {
        return {BindingKind::ArtifactVariationPoint, std::move(artifact_id), std::move(vp_id)};
    }

    auto operator<=>(const Binding&) const = default;
    bool operator==(const Binding&) const = default;
};

/// A lower-level variation point refining a higher-level variant. The
/// variant-to-variant form of the relation follows from the child's variants.
struct VariabilityRefinement {
    Id child_vp_id;
    Id parent_variant_id;

    auto operator<=>(const VariabilityRefinement&) const = default;
    bool operator==(const VariabilityRefinement&) const = default;
};

struct VariabilityModel {
    std::map<Id, VariationPoint> variation_points;
    std::map<Id, Variant> variants;
    InteractionSet interactions;  // VariantLevel only
    std::set<VariabilityRefinement> refinements;

    bool operator==(const VariabilityModel&) const = default;
};

struct LayeredModel {
    std::map<Id, FunctionalArtifact> artifacts;
    std::map<Id, Activity> activities;
    std::set<Refinement> refinements;
    InteractionSet interactions;  // ArtifactLevel only

    bool operator==(const LayeredModel&) const = default;
};

/// A variability model bound to its artifacts. `artifacts` is empty when the
/// model was loaded without a layered model; binding sources are then
/// external references and are not resolved.
struct ProductLineModel {
    VariabilityModel vm;
    std::optional<LayeredModel> artifacts;
    std::set<Binding> bindings;

    bool operator==(const ProductLineModel&) const = default;
};

/// Read-only adjacency views over a variability model. Built once per
/// operation; every list is in ascending id order.
class VmIndex {
public:
    explicit VmIndex(const VariabilityModel& vm);

    const std::vector<Id>& variants_of(const Id& vp_id) const;
    const std::vector<Id>& child_vps_of(const Id& variant_id) const;
    std::optional<Id> parent_variant_of(const Id& vp_id) const;
    /// Variation point containing the parent variant, if any.
    std::optional<Id> parent_vp_of(const Id& vp_id) const;
    const std::vector<Id>& successors(const Id& variant_id) const;
    const std::vector<Id>& predecessors(const Id& variant_id) const;
    /// Union of successors and predecessors.
    const std::vector<Id>& neighbours(const Id& variant_id) const;

private:
    const VariabilityModel* vm_;
    std::map<Id, std::vector<Id>> variants_of_;
    std::map<Id, std::vector<Id>> child_vps_of_;
    std::map<Id, Id> parent_variant_of_;
    std::map<Id, std::vector<Id>> successors_;
    std::map<Id, std::vector<Id>> predecessors_;
    std::map<Id, std::vector<Id>> neighbours_;
};

/// Number of variants in the tree below `root_vp_id`, counted at every depth.
/// Throws Error(UnknownId) for an unknown variation point.
std::size_t tree_size(const Id& root_vp_id, const VariabilityModel& vm);

/// Variation points without a refinement parent, in ascending id order.
std::vector<Id> roots(const VariabilityModel& vm);

/// Variation points in the subtree rooted at `vp_id`, including itself.
std::vector<Id> subtree_vps(const Id& vp_id, const VariabilityModel& vm);

enum class Rule {
    ActivityArtifact,
    ArtifactMembership,
    RefinementEndpoint,
    RefinementLayer,
    RefinementKindMismatch,
    RefinementSingleParent,
    ArtifactInteraction,
    RealizationConsistency,
    VariantInteraction,
    InteractionLevelMismatch,
    ForestSingleParent,
    ForestAcyclic,
    RefinementDangling,
    BindingEndpoint,
    BindingConsistency,
};

std::string_view to_string(Rule rule);

struct Violation {
    Rule rule;
    std::vector<Id> ids;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Checks every structural invariant; an empty result means the model is
/// valid. Violations are reported in a deterministic order.
std::vector<Violation> validate(const ProductLineModel& plm);

/// Validation of a layered model on its own.
std::vector<Violation> validate(const LayeredModel& model);

std::string describe(const Violation& violation);

}  // namespace plse
