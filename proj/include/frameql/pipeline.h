#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "frameql/catalog.h"
#include "frameql/value.h"

namespace frameql::pipeline {

/// Compiled aggregation expression.
struct Expr {
    enum class Kind { Literal, Field, Variable, Operator, Object };
    Kind kind = Kind::Literal;
    Value literal;
    std::string name;  // field path, variable name, or operator ("$eq")
    std::vector<Expr> args;
    std::vector<std::pair<std::string, Expr>> fields;  // Object
};

struct Accumulate {
    std::string output;
    std::string op;  // "$sum", "$min", ...
    Expr arg;
};

struct Stage;

struct Pipeline {
    std::vector<Stage> stages;
};

struct Stage {
    enum class Kind { Match, Project, Group, AddFields, Sort, Limit, Count, Lookup, Unwind, Out };
    Kind kind = Kind::Match;
    std::size_t index = 0;
    std::string name;  // "$match", ...

    // $match: predicate; $group: key (_id); $addFields / computed $project entries.
    Expr expr;
    std::vector<std::pair<std::string, Expr>> computed;
    // $project
    std::vector<std::string> include;
    std::vector<std::string> exclude;
    bool inclusion = false;
    bool exclude_id = false;
    std::vector<Accumulate> accumulators;
    std::vector<std::pair<std::string, int>> sort;
    std::int64_t limit = 0;
    std::string target;  // $count field, $out collection, $lookup from, $unwind path
    std::string as;      // $lookup
    std::string local_field, foreign_field;
    std::vector<std::pair<std::string, Expr>> let;
    std::shared_ptr<Pipeline> sub;
    bool preserve_empty = false;
};

/// Parses a JSON array of stages. Errors name the stage index.
Pipeline parse(std::string_view json_array);

/// A parsed `ns.coll.aggregate([...])` call.
struct AggregateCall {
    std::string ns;
    std::string collection;
    Pipeline pipeline;
};

AggregateCall parse_aggregate_call(std::string_view text);

/// Runs the pipeline over (ns, collection). Evaluation errors name the stage.
Table eval(const Pipeline& p, Catalog& catalog, const std::string& ns, const std::string& collection,
           const WriteOptions& options = {});

}  // namespace frameql::pipeline
