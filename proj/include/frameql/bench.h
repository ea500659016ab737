#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frameql/connector.h"
#include "frameql/frame.h"
#include "frameql/json_io.h"
#include "frameql/pack_catalog.h"
#include "frameql/value.h"

namespace frameql::bench {

inline constexpr int kExpressionCount = 13;

/// Collection names a pack's benchmark queries use.
struct Naming {
    std::string ns;
    std::string collection;
    std::string left;   // left side of the self-join
    std::string right;  // right side of the self-join
};
Naming naming_for(std::string_view pack_name);

/// Operand values; symbolic when rendering reference texts.
struct ExprArgs {
    Literal x;   // ten (expr 3, 10) and lower onePercent bound (expr 11)
    Literal y3;  // twentyPercent (expr 3)
    Literal y11; // upper onePercent bound (expr 11)
    Literal z;   // two (expr 3)
};
ExprArgs symbolic_args();

struct Params {
    std::int64_t x = 0;    // 0..9
    std::int64_t y3 = 0;   // 0..4
    std::int64_t y11 = 0;  // x..99
    std::int64_t z = 0;    // 0..1
    static Params from_seed(std::uint64_t seed);
    ExprArgs args() const;
};

/// Short description of each expression, in dataframe notation.
std::string_view expression_text(int id);

struct ExprResult {
    std::variant<std::int64_t, Value, Table> value;
};

struct ExprRun {
    ExprResult result;
    double creation_ms = 0;
    double expression_ms = 0;
};

/// Builds expression `id` through the frame API and runs its action.
ExprRun run_expression(int id, const PackPtr& pack, const ConnectorPtr& connector, const Naming& naming,
                       const ExprArgs& args);

struct OracleResult {
    enum class Shape { Count, Scalar, Head, Groups, Ordered };
    Shape shape = Shape::Count;
    std::int64_t count = 0;
    Value scalar;
    // Head: every qualifying row (values of `columns` only when set).
    // Groups: one row per group, {key, value}. Ordered: expected rows in order.
    std::vector<std::vector<Value>> rows;
    std::vector<std::string> columns;  // empty: the row's single present field
    std::size_t expected_rows = 0;
    std::string key;
};

/// Direct eager evaluation of expression `id`; isna counts MISSING and NULL.
OracleResult oracle_eval(int id, const Table& data, const Params& params);

struct MatchReport {
    bool match = false;
    std::string detail;
};
MatchReport diff_results(const ExprResult& engine, const OracleResult& oracle, int id);

/// Stable short digest of a result.
std::string digest(const ExprResult& result);

struct Config {
    PackPtr pack;
    ConnectorPtr connector;
    std::string connector_name = "dryrun";
    Naming naming;
    Params params;
    bool symbolic = false;  // render x/y/z as symbols (dry runs)
    std::vector<int> exprs;
    int repeat = 1;
    std::optional<Table> oracle_data;
};

struct ExprReport {
    int id = 0;
    std::string name;
    double creation_ms = 0;
    double expression_ms = 0;
    double total_ms = 0;
    std::vector<std::string> queries;
    std::string digest;
    std::optional<bool> oracle_match;
    std::optional<bool> golden_match;
    std::string detail;
    std::string error;
};

struct Report {
    std::string pack;
    std::string connector;
    Params params;
    std::vector<ExprReport> exprs;

    json_io::Json to_json() const;
};

/// Runs each configured expression; failures are recorded, not thrown.
Report run_benchmark(const Config& config);

// Reference query texts.

struct Erratum {
    std::string file;  // path relative to the golden directory
    std::string from;
    std::string to;
    std::string reason;
};

class GoldenSet {
public:
    explicit GoldenSet(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<Erratum>& errata() const { return errata_; }

    /// File text as stored.
    std::string raw(const std::string& file) const;
    /// File text with its errata applied. Throws if an erratum's `from`
    /// text does not occur in the file.
    std::string corrected(const std::string& file) const;
    std::size_t errata_count(const std::string& file) const;

    static std::string benchmark_file(std::string_view pack, int id);

private:
    std::filesystem::path dir_;
    std::vector<Erratum> errata_;
};

/// Marks each expression's golden_match by comparing its last rendered query
/// with the corrected reference text. Missing files count as mismatches.
void check_goldens(Report& report, const GoldenSet& goldens, DialectKind kind);

/// "1-13", "3", "1,4,9-11". Ids must lie in 1..13.
std::vector<int> parse_id_list(std::string_view spec);

/// Whitespace-insensitive form used to compare query texts.
std::string normalize_query(std::string_view text, DialectKind kind);

/// Parses a chain file: "== N" headers, "@K" references to earlier steps.
/// Returns the fully expanded text of each step.
std::vector<std::string> expand_chain(std::string_view text);

}  // namespace frameql::bench
