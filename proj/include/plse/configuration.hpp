#pragma once

// Configuration space of a variability model.
//
// A configuration picks exactly one variant for every active variation point.
// Roots are always active; a refining variation point is active only while
// its parent variant is selected. Variant-level interactions are read as
// closure constraints: when both endpoint variation points are active, the
// endpoints are selected together or not at all.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "plse/model.hpp"

namespace plse {

using Count = boost::multiprecision::cpp_int;

struct Configuration {
    std::set<Id> selection;

    auto operator<=>(const Configuration&) const = default;
    bool operator==(const Configuration&) const = default;
};

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

class BudgetExceeded : public Error {
public:
    BudgetExceeded(Count count, std::uint64_t budget)
        : Error(ErrorCode::BudgetExceeded,
                "configuration space of " + count.str() + " exceeds the enumeration budget of " +
                    std::to_string(budget)),
          count_(std::move(count)) {}

    const Count& count() const noexcept { return count_; }

private:
    Count count_;
};

/// Selections with exactly one variant per active variation point, ignoring
/// interactions. The empty model has one (empty) configuration.
Count unconstrained_count(const VariabilityModel& vm);

enum class ConfigRule {
    MissingSelection,
    MultipleSelection,
    InactiveSelection,
    InteractionClosure,
    UnboundVariant,
};

std::string_view to_string(ConfigRule rule);

struct ConfigViolation {
    ConfigRule rule;
    std::vector<Id> ids;
    std::string message;

    bool operator==(const ConfigViolation&) const = default;
};

std::string describe(const ConfigViolation& violation);

/// Throws Error(UnknownId) if a selected id is not a variant.
std::vector<ConfigViolation> validate_config(const ProductLineModel& plm, const Configuration& cfg);

/// All valid configurations in lexicographic order of their sorted ids.
/// Throws BudgetExceeded when the unconstrained space is larger than `budget`.
std::vector<Configuration> enumerate_valid(const ProductLineModel& plm, std::uint64_t budget = kDefaultBudget);

}  // namespace plse
