#include "plse/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "plse/derivation.hpp"
#include "plse/ingest.hpp"

namespace plse::cli {

int reduction_percentage(std::size_t initial, std::size_t final) {
    if (initial == 0 || final >= initial)
        return 0;
    const std::size_t removed = initial - final;
    return static_cast<int>((200 * removed + initial) / (2 * initial));
}

std::uint64_t default_budget() {
    if (const char* env = std::getenv("PLSE_BUDGET")) {
        try {
            std::size_t used = 0;
            auto value = std::stoull(env, &used);
            if (used == std::string_view(env).size())
                return value;
        } catch (const std::exception&) {
        }
        throw Error(ErrorCode::Schema, std::string("PLSE_BUDGET is not a non-negative integer: '") + env + "'");
    }
    return kDefaultBudget;
}

namespace {

std::optional<Count> valid_count(const ProductLineModel& plm, std::uint64_t budget) {
    try {
        return Count(enumerate_valid(plm, budget).size());
    } catch (const BudgetExceeded&) {
        return std::nullopt;
    }
}

std::vector<VpPair> merges_of(const ReductionTrace& trace) {
    std::vector<VpPair> out;
    for (const auto& rec : trace.merges)
        out.push_back({rec.source_vp_id, rec.target_vp_id});
    return out;
}

}  // namespace

ReductionReport make_report(const ProductLineModel& before, const ProductLineModel& after,
                            const std::optional<ReductionTrace>& trace, std::uint64_t budget) {
    ReductionReport r;
    r.initial_vp_count = before.vm.variation_points.size();
    r.final_vp_count = after.vm.variation_points.size();
    r.reduction_percentage = reduction_percentage(r.initial_vp_count, r.final_vp_count);
    if (trace) {
        if (r.final_vp_count > r.initial_vp_count ||
            trace->merges.size() != r.initial_vp_count - r.final_vp_count)
            throw Error(ErrorCode::InvalidModel, "trace records " + std::to_string(trace->merges.size()) +
                                                     " merges but the models differ by " +
                                                     std::to_string(r.initial_vp_count) + " -> " +
                                                     std::to_string(r.final_vp_count) + " variation points");
        r.merges = merges_of(*trace);
    } else {
        auto recomputed = reduce(before);
        if (serialize(recomputed.model) == serialize(after))
            r.merges = merges_of(recomputed.trace);
        else if (before == after)
            r.merges = std::vector<VpPair>{};
    }
    r.unconstrained_before = unconstrained_count(before.vm);
    r.unconstrained_after = unconstrained_count(after.vm);
    r.valid_before = valid_count(before, budget);
    r.valid_after = valid_count(after, budget);
    return r;
}

std::string report_json(const ReductionReport& r) {
    using json = nlohmann::json;
    auto count = [](const std::optional<Count>& c) -> json { return c ? json(c->str()) : json(nullptr); };
    json merges = nullptr;
    if (r.merges) {
        merges = json::array();
        for (const auto& m : *r.merges)
            merges.push_back({{"source", m.source}, {"target", m.target}});
    }
    json j = {{"initial_vp_count", r.initial_vp_count},
              {"final_vp_count", r.final_vp_count},
              {"reduction_percentage", r.reduction_percentage},
              {"merges", std::move(merges)},
              {"unconstrained_before", r.unconstrained_before.str()},
              {"unconstrained_after", r.unconstrained_after.str()},
              {"valid_before", count(r.valid_before)},
              {"valid_after", count(r.valid_after)}};
    return j.dump(2) + "\n";
}

std::string report_table(const ReductionReport& r) {
    auto count = [](const std::optional<Count>& c) { return c ? c->str() : std::string("over budget"); };
    std::ostringstream os;
    os << "variation points   " << r.initial_vp_count << " -> " << r.final_vp_count << "\n";
    os << "reduction          " << r.reduction_percentage << "%\n";
    if (!r.merges) {
        os << "merges             unknown (no trace)\n";
    } else if (r.merges->empty()) {
        os << "merges             none\n";
    } else {
        bool first = true;
        for (const auto& m : *r.merges) {
            os << (first ? "merges             " : "                   ") << m.target << " -> " << m.source << "\n";
            first = false;
        }
    }
    os << "unconstrained      " << r.unconstrained_before.str() << " -> " << r.unconstrained_after.str() << "\n";
    os << "valid              " << count(r.valid_before) << " -> " << count(r.valid_after) << "\n";
    return os.str();
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Schema, "cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& bytes, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << bytes;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw Error(ErrorCode::Schema, "cannot write '" + path + "'");
    file << bytes;
}

std::string format_config(const Configuration& cfg) {
    std::string s = "{";
    for (const auto& id : cfg.selection)
        s += (s.size() > 1 ? ", " : "") + id;
    return s + "}";
}

struct Options {
    std::string input;
    std::string output;
    std::string trace;
    std::string before;
    std::string after;
    std::string format = "json";
    std::string validate_path;
    bool strict = false;
    bool with_artifacts = false;
    bool count = false;
    bool enumerate = false;
    std::optional<std::uint64_t> budget;
};

int cmd_derive(const Options& o, std::ostream& out) {
    auto input = parse_layered_model(read_file(o.input));
    auto plm = derive_initial_vm(input.model, input.products, DerivationOptions{o.strict});
    if (!o.with_artifacts)
        plm.artifacts.reset();
    write_output(o.output, serialize(plm), out);
    return kExitOk;
}

int cmd_reduce(const Options& o, std::ostream& out) {
    auto plm = parse_variability_model(read_file(o.input));
    auto result = reduce(plm);
    write_output(o.output, serialize(result.model), out);
    if (!o.trace.empty())
        write_output(o.trace, serialize(result.trace), out);
    return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
    auto before = parse_variability_model(read_file(o.before));
    auto after = parse_variability_model(read_file(o.after));
    std::optional<ReductionTrace> trace;
    if (!o.trace.empty())
        trace = parse_trace(read_file(o.trace));
    auto report = make_report(before, after, trace, o.budget.value_or(default_budget()));
    if (!o.output.empty())
        write_output(o.output, report_json(report), out);
    out << (o.format == "table" ? report_table(report) : report_json(report));
    return kExitOk;
}

int cmd_configs(const Options& o, std::ostream& out, std::ostream& err) {
    auto plm = parse_variability_model(read_file(o.input));
    const auto budget = o.budget.value_or(default_budget());
    if (!o.validate_path.empty()) {
        auto violations = validate_config(plm, parse_configuration(read_file(o.validate_path)));
        if (violations.empty()) {
            out << "valid\n";
            return kExitOk;
        }
        for (const auto& v : violations)
            out << describe(v) << "\n";
        return kExitModel;
    }
    auto space = unconstrained_count(plm.vm);
    try {
        auto valid = enumerate_valid(plm, budget);
        if (o.enumerate) {
            for (const auto& cfg : valid)
                out << format_config(cfg) << "\n";
        } else {
            out << space.str() << " unconstrained, " << valid.size() << " valid\n";
        }
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        out << e.count().str() << " unconstrained\n";
        return kExitBudget;
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Product-line variability derivation and variation-point reduction", "plse"};
    app.require_subcommand(1);
    Options o;

    auto* derive = app.add_subcommand("derive", "Derive a variability model from a layered model");
    derive->add_option("-i,--input", o.input, "layered-model document")->required()->check(CLI::ExistingFile);
    derive->add_option("-o,--output", o.output, "output path (default: stdout)");
    derive->add_flag("--strict-alg1", o.strict, "create refinements only for interacting, bound parent pairs");
    derive->add_flag("--with-artifacts", o.with_artifacts, "write a product-line-model including the layered model");

    auto* red = app.add_subcommand("reduce", "Merge variation points that are complete and unique");
    red->add_option("-i,--input", o.input, "variability-model or product-line-model document")
        ->required()
        ->check(CLI::ExistingFile);
    red->add_option("-o,--output", o.output, "output path (default: stdout)");
    red->add_option("--trace", o.trace, "write the merge trace to this path");

    auto* rep = app.add_subcommand("report", "Summarize a reduction");
    rep->add_option("before", o.before, "model before reduction")->required()->check(CLI::ExistingFile);
    rep->add_option("after", o.after, "model after reduction")->required()->check(CLI::ExistingFile);
    rep->add_option("--trace", o.trace, "reduction trace")->check(CLI::ExistingFile);
    rep->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    rep->add_option("--budget", o.budget, "enumeration budget for valid counts");
    rep->add_option("-o,--output", o.output, "also write the JSON report here");

    auto* cfg = app.add_subcommand("configs", "Count, enumerate or validate configurations");
    cfg->add_option("-i,--input", o.input, "variability-model or product-line-model document")
        ->required()
        ->check(CLI::ExistingFile);
    auto* count = cfg->add_flag("--count", o.count, "print unconstrained and valid counts");
    auto* enumerate = cfg->add_flag("--enumerate", o.enumerate, "list valid configurations");
    auto* validate = cfg->add_option("--validate", o.validate_path, "configuration document to check")
                         ->check(CLI::ExistingFile);
    count->excludes(enumerate)->excludes(validate);
    enumerate->excludes(validate);
    cfg->add_option("--budget", o.budget, "enumeration budget");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*derive)
            return cmd_derive(o, out);
        if (*red)
            return cmd_reduce(o, out);
        if (*rep)
            return cmd_report(o, out);
        if (!o.count && !o.enumerate && o.validate_path.empty()) {
            err << "error: configs needs one of --count, --enumerate, --validate\n";
            return kExitUsage;
        }
        return cmd_configs(o, out, err);
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitModel;
    }
}

}  // namespace plse::cli
