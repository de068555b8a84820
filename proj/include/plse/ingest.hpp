#pragma once

// JSON interchange for layered models, variability models, configurations
// and reduction traces.
//
// Every document is an envelope
//
//     {"schema_version": "1.0", "kind": <kind>, "body": {...}}
//
// with kind one of layered-model, variability-model, product-line-model,
// configuration or reduction-trace. Unknown fields are rejected. Output is
// canonical: keys sorted, collections ordered by id, two-space indentation,
// UTF-8, terminated by a newline, so serialize(parse(serialize(m))) is
// byte-identical to serialize(m).

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "plse/configuration.hpp"
#include "plse/model.hpp"
#include "plse/reduction.hpp"

namespace plse {

inline constexpr std::string_view kSchemaVersion = "1.0";

enum class DocumentKind { LayeredModel, VariabilityModel, ProductLineModel, Configuration, ReductionTrace };

std::string_view to_string(DocumentKind kind);

struct Product {
    Id id;
    std::set<Id> includes;

    bool operator==(const Product&) const = default;
};

/// Per-product activity inclusion, ordered by product id.
struct ProductSet {
    std::vector<Product> products;

    bool operator==(const ProductSet&) const = default;
};

struct LayeredInput {
    LayeredModel model;
    std::optional<ProductSet> products;

    bool operator==(const LayeredInput&) const = default;
};

/// Reads the envelope and returns the document kind without parsing the body.
DocumentKind peek_kind(std::string_view bytes);

LayeredInput parse_layered_model(std::string_view bytes);

/// Accepts variability-model and product-line-model documents.
ProductLineModel parse_variability_model(std::string_view bytes);

Configuration parse_configuration(std::string_view bytes);

ReductionTrace parse_trace(std::string_view bytes);

std::string serialize(const LayeredInput& input);
std::string serialize(const LayeredModel& model);
/// Writes a product-line-model document when artifacts are attached and a
/// variability-model document otherwise.
std::string serialize(const ProductLineModel& plm);
std::string serialize(const Configuration& cfg);
std::string serialize(const ReductionTrace& trace);

}  // namespace plse
