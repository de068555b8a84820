#pragma once

// Derivation of an initial variability model from a layered model.
//
// Variable activities ("difs") are found by comparing products (or read from
// the mandatory flag of a combined model), grouped into variation points, and
// bound to one variant each. Mapping passes then carry the layered structure
// over to the variability model:
//
//   * an interaction between two difs induces an interaction between their
//     variants;
//   * an interaction between two refining difs induces one between the
//     activities they refine;
//   * a dif refining a bound activity makes its variation point a child of
//     that activity's variant.

#include <map>
#include <optional>
#include <set>
#include <string>

#include "plse/ingest.hpp"
#include "plse/model.hpp"

namespace plse {

struct DifSet {
    std::set<Id> difs;
    std::map<std::string, std::set<Id>> grouping;

    bool operator==(const DifSet&) const = default;
};

struct DerivationOptions {
    /// Only create refinement edges for interacting difs whose parents are
    /// both bound. By default every bound refinement pair yields an edge.
    bool strict_refinement = false;
};

/// With products an activity is variable iff its presence differs between
/// products; without, iff it is not mandatory. Groups come from the explicit
/// label, else from the refined parent activity.
/// Throws Error(Ungroupable) for a dif with neither.
DifSet diff(const LayeredModel& model, const std::optional<ProductSet>& products = std::nullopt);

/// One variation point per group, one variant and one binding per dif.
/// Throws Error(MixedLayerGroup) when a group spans layers.
ProductLineModel create_variation_points(const DifSet& difset, const LayeredModel& model);

/// Throws Error(LayerOrder) unless `upper` equals `lower` or sits one layer
/// above it, Error(Precondition) without attached artifacts, and
/// Error(ConflictingParents) if a variation point would gain two parents.
ProductLineModel mapping(Layer lower, Layer upper, const ProductLineModel& plm, const DerivationOptions& options = {});

ProductLineModel derive_initial_vm(const LayeredModel& model, const std::optional<ProductSet>& products = std::nullopt,
                                   const DerivationOptions& options = {});

}  // namespace plse
