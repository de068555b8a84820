#pragma once

// Batch front end: derive, reduce, report and configs subcommands.
//
// Exit codes: 0 success, 1 model or validation error, 2 usage error,
// 3 enumeration budget exceeded.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plse/configuration.hpp"
#include "plse/model.hpp"
#include "plse/reduction.hpp"

namespace plse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitModel = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

struct ReductionReport {
    std::size_t initial_vp_count = 0;
    std::size_t final_vp_count = 0;
    int reduction_percentage = 0;
    /// Absent when no trace was supplied and none could be recomputed.
    std::optional<std::vector<VpPair>> merges;
    Count unconstrained_before;
    Count unconstrained_after;
    std::optional<Count> valid_before;
    std::optional<Count> valid_after;
};

/// round(100 * (initial - final) / initial), halves rounded up; 0 for an
/// empty initial model.
int reduction_percentage(std::size_t initial, std::size_t final);

/// Throws Error(InvalidModel) when the trace's merge count disagrees with
/// the variation point counts.
ReductionReport make_report(const ProductLineModel& before, const ProductLineModel& after,
                            const std::optional<ReductionTrace>& trace, std::uint64_t budget);

std::string report_json(const ReductionReport& report);
std::string report_table(const ReductionReport& report);

/// Enumeration budget from PLSE_BUDGET, or the default.
std::uint64_t default_budget();

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plse::cli
