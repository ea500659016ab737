#include "frameql/frame.h"

#include <atomic>
#include <charconv>
#include <cmath>

#include "frameql/error.h"

namespace frameql {

namespace sec = section;

struct Frame::State {
    PackPtr pack;
    ConnectorPtr connector;
    QueryText query;
    std::string ns;
    std::string collection;
    std::uint64_t root_id = 0;
    FrameKind kind = FrameKind::Scan;
    std::vector<std::string> columns;

    // PROJECTED and EXPR frames: the query whose rows supply the columns.
    QueryText context;
    // EXPR frames.
    std::string snippet;
    Arity arity = Arity::Any;
    bool is_column = false;
    std::string attribute;
    QueryText over;

    bool bare_scan = false;
    bool terminal = false;
};

namespace {

constexpr std::string_view kSubqueryMarker = "@@subquery@@";

std::uint64_t next_root_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

std::string_view compare_key(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "eq";
        case CompareOp::Ne: return "ne";
        case CompareOp::Gt: return "gt";
        case CompareOp::Lt: return "lt";
        case CompareOp::Ge: return "ge";
        case CompareOp::Le: return "le";
    }
    return "eq";
}

std::string_view arith_key(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "add";
        case ArithOp::Sub: return "sub";
        case ArithOp::Mul: return "mul";
        case ArithOp::Div: return "div";
        case ArithOp::Mod: return "mod";
    }
    return "add";
}

std::string format_number(double d) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, end);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

// Text of a value when used inside a generated column name.
std::string name_text(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::String: return v.as_string();
        case Value::Kind::Int: return std::to_string(v.as_int());
        case Value::Kind::Float: return format_number(v.as_float());
        case Value::Kind::Bool: return v.as_bool() ? "True" : "False";
        default: return "nan";
    }
}

// Renders a rule whose $subquery (or another key) is a parent query.
// Text dialects substitute the parent text; pipeline dialects splice the
// parent's stage list in front of the new stages.
QueryText render_over(const LanguagePack& pack, std::string_view section, std::string_view key,
                      VarBindings bindings, const QueryText* parent, const std::string& var,
                      const std::string& ns, const std::string& collection) {
    if (pack.kind() == DialectKind::Text) {
        if (parent) bindings[var] = parent->fragment();
        return QueryText::text(build_rule(pack, section, key, bindings));
    }
    if (parent) bindings[var] = std::string(kSubqueryMarker);
    std::vector<std::string> stages = split_stages(build_rule(pack, section, key, bindings));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (stages[i] == kSubqueryMarker) {
            if (!parent || i != 0) throw Error("pipeline rule places $" + var + " after other stages");
            out = parent->stage_list();
            continue;
        }
        if (stages[i].find(kSubqueryMarker) != std::string::npos) {
            throw Error("pipeline rule nests $" + var + " inside a stage");
        }
        out.push_back(std::move(stages[i]));
    }
    return QueryText::stages(std::move(out), ns, collection);
}

// Escapes a string for the quote character that surrounds $value in the
// pack's string literal rule.
std::string escape_string(const std::string& s, const Template& tmpl) {
    const std::string& src = tmpl.source();
    const auto pos = src.find("$value");
    const char quote = pos != std::string::npos && pos > 0 ? src[pos - 1] : '\0';
    std::string out;
    for (char c : s) {
        if (quote == '\'' && c == '\'') {
            out += "''";
        } else if (quote == '"' && (c == '"' || c == '\\')) {
            out += '\\';
            out += c;
        } else {
            out += c;
        }
    }
    return out;
}

struct Term {
    std::string snippet;
    bool is_column = false;
    std::string attribute;
    QueryText over;
    QueryText context;
    Arity arity = Arity::Any;
    std::uint64_t root = 0;
};

}  // namespace

Literal Literal::symbol(std::string text) {
    Literal l(Value::null());
    l.raw = std::move(text);
    return l;
}

std::string_view frame_kind_name(FrameKind kind) {
    switch (kind) {
        case FrameKind::Scan: return "SCAN";
        case FrameKind::Projected: return "PROJECTED";
        case FrameKind::Expr: return "EXPR";
        case FrameKind::Filtered: return "FILTERED";
        case FrameKind::Grouped: return "GROUPED";
        case FrameKind::Sorted: return "SORTED";
        case FrameKind::Limited: return "LIMITED";
        case FrameKind::Joined: return "JOINED";
        case FrameKind::Aggregated: return "AGGREGATED";
    }
    return "?";
}

std::string render_literal(const Literal& literal, const LanguagePack& pack) {
    if (literal.raw) return *literal.raw;
    const Value& v = literal.value;
    switch (v.kind()) {
        case Value::Kind::Int: return std::to_string(v.as_int());
        case Value::Kind::Float: return format_number(v.as_float());
        case Value::Kind::Bool: return build_rule(pack, sec::kLiterals, v.as_bool() ? "true" : "false", {});
        case Value::Kind::String: {
            const Template& t = pack.at(sec::kLiterals, "string");
            return substitute(t, {{"value", escape_string(v.as_string(), t)}});
        }
        case Value::Kind::Null:
        case Value::Kind::Missing: return build_rule(pack, sec::kLiterals, "null", {});
    }
    return {};
}

namespace {

using StatePtr = std::shared_ptr<Frame::State>;

StatePtr derive(const Frame::State& parent, FrameKind kind) {
    auto s = std::make_shared<Frame::State>();
    s->pack = parent.pack;
    s->connector = parent.connector;
    s->ns = parent.ns;
    s->collection = parent.collection;
    s->root_id = parent.root_id;
    s->kind = kind;
    s->columns = parent.columns;
    return s;
}

void require_transformable(const Frame::State& s, std::string_view op) {
    if (s.terminal) {
        throw ShapeError(std::string(op) + ": an aggregate result cannot be transformed further");
    }
}

Term term_of(const Frame::State& s) {
    Term t;
    t.root = s.root_id;
    if (s.kind == FrameKind::Projected && s.columns.size() == 1) {
        t.attribute = s.columns.front();
        t.snippet = build_rule(*s.pack, sec::kAttributes, "single_attribute", {{"attribute", t.attribute}});
        t.is_column = true;
        t.over = s.query;
        t.context = s.context;
        return t;
    }
    if (s.kind == FrameKind::Expr) {
        t.snippet = s.snippet;
        t.attribute = s.attribute;
        t.over = s.over;
        t.context = s.context;
        t.arity = s.arity;
        return t;
    }
    throw ShapeError("expected a single column or an expression, got a " +
                     std::string(frame_kind_name(s.kind)) + " frame with " + std::to_string(s.columns.size()) +
                     " column(s)");
}

void require_same_root(std::uint64_t a, std::uint64_t b) {
    if (a != b) throw LineageError("operands come from different source frames");
}

void require_column_in_pipeline(const Frame::State& s, const Term& t, std::string_view op) {
    if (s.pack->kind() == DialectKind::Pipeline && !t.is_column) {
        throw ShapeError(std::string(op) + ": pipeline packs need a plain column as this operand");
    }
}

// Builds the EXPR frame for a snippet evaluated over `over`.
Frame::State make_expr(const Frame::State& parent, std::string snippet, Arity arity, const std::string& alias,
                       const QueryText& over, const QueryText& context, std::string attribute) {
    const LanguagePack& pack = *parent.pack;
    Frame::State s = *derive(parent, FrameKind::Expr);
    VarBindings b{{"statement", snippet},
                  {"attribute_alias", build_rule(pack, sec::kAttributes, "attribute_alias",
                                                 {{"alias", alias}, {"attribute", snippet}})}};
    s.query = render_over(pack, sec::kQueries, "q10", b, &over, "subquery", parent.ns, parent.collection);
    s.columns = {alias};
    s.snippet = std::move(snippet);
    s.arity = arity;
    s.attribute = std::move(attribute);
    s.over = over;
    s.context = context;
    return s;
}

std::string alias_for(const LanguagePack& pack, std::string_view kind, std::string_view op,
                      const std::string& attribute, const std::string& statement) {
    return build_rule(pack, sec::kAliases, kind,
                      {{"op", std::string(op)}, {"attribute", attribute}, {"statement", statement}});
}

}  // namespace

Frame Frame::scan(std::string ns, std::string collection, PackPtr pack, ConnectorPtr connector) {
    if (!pack) throw Error("scan: no language pack");
    if (collection.empty()) throw Error("scan: empty collection name");
    auto s = std::make_shared<State>();
    s->pack = std::move(pack);
    s->connector = std::move(connector);
    s->ns = std::move(ns);
    s->collection = std::move(collection);
    s->root_id = next_root_id();
    s->kind = FrameKind::Scan;
    s->bare_scan = true;
    VarBindings b{{"namespace", s->ns},
                  {"collection", s->collection},
                  {"source", qualified_name(s->ns, s->collection)}};
    s->query = render_over(*s->pack, sec::kQueries, "q1", b, nullptr, "subquery", s->ns, s->collection);
    return Frame(std::move(s));
}

FrameKind Frame::kind() const { return state_->kind; }
const QueryText& Frame::query() const { return state_->query; }
const std::string& Frame::ns() const { return state_->ns; }
const std::string& Frame::collection() const { return state_->collection; }
std::uint64_t Frame::root_id() const { return state_->root_id; }
const std::vector<std::string>& Frame::columns() const { return state_->columns; }
const std::string& Frame::snippet() const { return state_->snippet; }
Arity Frame::arity() const { return state_->arity; }
const LanguagePack& Frame::pack() const { return *state_->pack; }
const ConnectorPtr& Frame::connector() const { return state_->connector; }

Frame Frame::project(std::vector<std::string> columns) const {
    require_transformable(*state_, "project");
    if (columns.empty()) throw Error("project: empty column list");
    const LanguagePack& pack = *state_->pack;
    std::vector<std::string> items;
    for (const auto& c : columns) {
        if (c.empty()) throw Error("project: empty column name");
        items.push_back(build_rule(pack, sec::kAttributes, "project_attribute", {{"attribute", c}}));
    }
    auto s = derive(*state_, FrameKind::Projected);
    s->query = render_over(pack, sec::kQueries, "q2", {{"attribute_alias", chain_attributes(items, pack)}},
                           &state_->query, "subquery", state_->ns, state_->collection);
    s->columns = std::move(columns);
    s->context = state_->query;
    return Frame(std::move(s));
}

Frame Frame::compare(CompareOp op, const Operand& rhs) const {
    const LanguagePack& pack = *state_->pack;
    Term left = term_of(*state_);
    require_column_in_pipeline(*state_, left, "compare");
    std::string right;
    QueryText over = left.over;
    if (const auto* lit = std::get_if<Literal>(&rhs)) {
        right = render_literal(*lit, pack);
    } else {
        const Frame& rf = std::get<Frame>(rhs);
        Term r = term_of(*rf.state_);
        require_same_root(left.root, r.root);
        if (r.is_column && pack.find(sec::kAttributes, "right_attribute")) {
            right = build_rule(pack, sec::kAttributes, "right_attribute", {{"attribute", r.attribute}});
        } else if (!r.is_column && pack.find(sec::kAttributes, "right_expression")) {
            right = build_rule(pack, sec::kAttributes, "right_expression", {{"statement", r.snippet}});
        } else {
            right = r.snippet;
        }
        if (!(r.over == left.over)) over = left.context;
    }
    const std::string key(compare_key(op));
    std::string snippet = build_rule(pack, sec::kComparison, key, {{"left", left.snippet}, {"right", right}});
    const std::string alias = alias_for(pack, "compare", key, left.attribute, snippet);
    return Frame(std::make_shared<State>(
        make_expr(*state_, std::move(snippet), Arity::Boolean, alias, over, left.context, left.attribute)));
}

Frame Frame::arith(ArithOp op, const Operand& rhs) const {
    const LanguagePack& pack = *state_->pack;
    Term left = term_of(*state_);
    require_column_in_pipeline(*state_, left, "arithmetic");
    std::string right;
    QueryText over = left.over;
    if (const auto* lit = std::get_if<Literal>(&rhs)) {
        right = render_literal(*lit, pack);
    } else {
        const Frame& rf = std::get<Frame>(rhs);
        Term r = term_of(*rf.state_);
        require_same_root(left.root, r.root);
        if (r.is_column && pack.find(sec::kAttributes, "right_attribute")) {
            right = build_rule(pack, sec::kAttributes, "right_attribute", {{"attribute", r.attribute}});
        } else if (!r.is_column && pack.find(sec::kAttributes, "right_expression")) {
            right = build_rule(pack, sec::kAttributes, "right_expression", {{"statement", r.snippet}});
        } else {
            right = r.snippet;
        }
        if (!(r.over == left.over)) over = left.context;
    }
    const std::string key(arith_key(op));
    std::string snippet = build_rule(pack, sec::kArithmetic, key, {{"left", left.snippet}, {"right", right}});
    const std::string alias = alias_for(pack, "arithmetic", key, left.attribute, snippet);
    return Frame(std::make_shared<State>(
        make_expr(*state_, std::move(snippet), Arity::Numeric, alias, over, left.context, left.attribute)));
}

namespace {

Frame::State logical(const Frame::State& a, const Frame::State* b, std::string_view key) {
    if (a.kind != FrameKind::Expr || a.arity != Arity::Boolean) {
        throw ShapeError(std::string(key) + ": operands must be boolean expressions");
    }
    const LanguagePack& pack = *a.pack;
    VarBindings bind{{"left", a.snippet}};
    QueryText over = a.over;
    if (b) {
        if (b->kind != FrameKind::Expr || b->arity != Arity::Boolean) {
            throw ShapeError(std::string(key) + ": operands must be boolean expressions");
        }
        require_same_root(a.root_id, b->root_id);
        bind["right"] = b->snippet;
        if (!(b->over == a.over)) over = a.context;
    }
    std::string snippet = build_rule(pack, sec::kLogical, key, bind);
    const std::string alias = alias_for(pack, "logical", key, a.attribute, snippet);
    return make_expr(a, std::move(snippet), Arity::Boolean, alias, over, a.context, a.attribute);
}

}  // namespace

Frame Frame::logical_and(const Frame& rhs) const {
    return Frame(std::make_shared<State>(logical(*state_, rhs.state_.get(), "and")));
}
Frame Frame::logical_or(const Frame& rhs) const {
    return Frame(std::make_shared<State>(logical(*state_, rhs.state_.get(), "or")));
}
Frame Frame::logical_not() const { return Frame(std::make_shared<State>(logical(*state_, nullptr, "not"))); }

namespace {

Frame::State unary(const Frame::State& s, std::string_view section, std::string_view key,
                   std::string_view alias_kind, Arity arity, bool needs_column) {
    Term t = term_of(s);
    if (needs_column) require_column_in_pipeline(s, t, key);
    const LanguagePack& pack = *s.pack;
    std::string snippet = build_rule(pack, section, key, {{"statement", t.snippet}});
    const std::string alias = alias_for(pack, alias_kind, key, t.attribute, snippet);
    return make_expr(s, std::move(snippet), arity, alias, t.over, t.context, t.attribute);
}

}  // namespace

Frame Frame::isna() const {
    return Frame(std::make_shared<State>(unary(*state_, sec::kNullCheck, "isna", "null_check", Arity::Boolean, true)));
}
Frame Frame::notna() const {
    return Frame(
        std::make_shared<State>(unary(*state_, sec::kNullCheck, "notna", "null_check", Arity::Boolean, true)));
}
Frame Frame::astype(Conversion to) const {
    const bool to_int = to == Conversion::ToInt;
    return Frame(std::make_shared<State>(unary(*state_, sec::kConversion, to_int ? "to_int" : "to_str", "convert",
                                               to_int ? Arity::Numeric : Arity::String, false)));
}
Frame Frame::upper() const {
    return Frame(
        std::make_shared<State>(unary(*state_, sec::kScalarFunctions, "upper", "scalar", Arity::String, true)));
}

Frame Frame::filter(const Frame& mask) const {
    require_transformable(*state_, "filter");
    const State& m = *mask.state_;
    if (m.kind != FrameKind::Expr || m.arity != Arity::Boolean) {
        throw ShapeError("filter: mask must be a boolean expression");
    }
    if (m.root_id != state_->root_id) {
        throw LineageError("filter: mask was built from a different source frame");
    }
    auto s = derive(*state_, FrameKind::Filtered);
    s->query = render_over(*state_->pack, sec::kQueries, "q6", {{"statement", m.snippet}}, &state_->query,
                           "subquery", state_->ns, state_->collection);
    return Frame(std::move(s));
}

Frame Frame::groupby_agg(const std::string& key, const std::string& func, const std::string& col) const {
    require_transformable(*state_, "groupby");
    const LanguagePack& pack = *state_->pack;
    if (!pack.find(sec::kGroupAggregates, func) || !pack.find(sec::kFunctions, func)) {
        throw Error("groupby: unknown aggregate function '" + func + "'");
    }
    VarBindings b{{"group_attr", build_rule(pack, sec::kAttributes, "group_attribute", {{"attribute", key}})},
                  {"group_key", key},
                  {"agg_expr", build_rule(pack, sec::kGroupAggregates, func, {{"attribute", col}})}};
    auto s = derive(*state_, FrameKind::Grouped);
    s->query = render_over(pack, sec::kQueries, "q8", b, &state_->query, "subquery", state_->ns, state_->collection);
    s->root_id = next_root_id();
    s->columns = {key, func + "_" + col};
    return Frame(std::move(s));
}

Frame Frame::sort(const std::string& col, bool descending) const {
    require_transformable(*state_, "sort");
    const LanguagePack& pack = *state_->pack;
    const char* attr_key = descending ? "sort_desc_attr" : "sort_asc_attr";
    VarBindings b{{attr_key, build_rule(pack, sec::kAttributes, attr_key, {{"attribute", col}})}};
    auto s = derive(*state_, FrameKind::Sorted);
    s->query = render_over(pack, sec::kQueries, descending ? "q4" : "q5", b, &state_->query, "subquery", state_->ns,
                           state_->collection);
    return Frame(std::move(s));
}

Frame Frame::join(const Frame& right, const std::string& left_on, const std::string& right_on,
                  const std::string& how) const {
    if (how != "inner") throw Error("join: only inner joins are supported, got '" + how + "'");
    require_transformable(*state_, "join");
    require_transformable(*right.state_, "join");
    const LanguagePack& pack = *state_->pack;
    const State& r = *right.state_;
    if (r.pack.get() != state_->pack.get() && !(*r.pack == pack)) {
        throw Error("join: both frames must use the same language pack");
    }
    if (pack.kind() == DialectKind::Pipeline && r.ns != state_->ns) {
        throw Error("join: pipeline joins need both collections in the same namespace");
    }
    auto source_of = [](const State& s) {
        return s.bare_scan ? qualified_name(s.ns, s.collection) : "(" + s.query.fragment() + ")";
    };
    VarBindings b{{"right_subquery", r.query.fragment()},
                  {"left_source", source_of(*state_)},
                  {"right_source", source_of(r)},
                  {"left_collection", state_->collection},
                  {"right_collection", r.collection},
                  {"left_on", left_on},
                  {"right_on", right_on},
                  {"lookup_var", "left"},
                  {"namespace", state_->ns}};
    auto s = derive(*state_, FrameKind::Joined);
    s->query = render_over(pack, sec::kQueries, "q9", b, &state_->query, "left_subquery", state_->ns,
                           state_->collection);
    s->root_id = next_root_id();
    s->columns.clear();
    return Frame(std::move(s));
}

Frame Frame::describe(const std::vector<std::string>& columns) const {
    require_transformable(*state_, "describe");
    if (columns.empty()) throw Error("describe: empty column list");
    const LanguagePack& pack = *state_->pack;
    static const char* const kFuncs[] = {"min", "max", "avg", "count", "std"};
    std::vector<std::string> items;
    std::vector<std::string> names;
    for (const auto& col : columns) {
        for (const char* f : kFuncs) {
            const std::string alias =
                build_rule(pack, sec::kAliases, "aggregate", {{"agg_name", f}, {"attribute", col}});
            const std::string agg = build_rule(pack, sec::kFunctions, f, {{"attribute", col}});
            items.push_back(build_rule(pack, sec::kAttributes, "aggregate_alias", {{"alias", alias}, {"agg_func", agg}}));
            names.push_back(alias);
        }
    }
    auto s = derive(*state_, FrameKind::Aggregated);
    s->query = render_over(pack, sec::kQueries, "q7", {{"agg_func", chain_attributes(items, pack)}}, &state_->query,
                           "subquery", state_->ns, state_->collection);
    s->root_id = next_root_id();
    s->columns = std::move(names);
    s->terminal = true;
    return Frame(std::move(s));
}

Frame Frame::get_dummies(const std::string& col, std::size_t max_distinct) const {
    require_transformable(*state_, "get_dummies");
    const LanguagePack& pack = *state_->pack;
    if (!state_->connector) throw Error("get_dummies: frame has no connector");
    VarBindings b{{"group_attr", build_rule(pack, sec::kAttributes, "group_attribute", {{"attribute", col}})},
                  {"group_key", col}};
    const QueryText distinct =
        render_over(pack, sec::kQueries, "q11", b, &state_->query, "subquery", state_->ns, state_->collection);
    const Table rows = run_query(*state_->connector, distinct);

    std::vector<Value> values;
    for (const Record& r : rows.rows) {
        const Value& v = r.get(col);
        if (v.is_unknown()) continue;
        bool seen = false;
        for (const Value& w : values) seen = seen || w == v;
        if (!seen) values.push_back(v);
        if (values.size() > max_distinct) {
            throw ShapeError("get_dummies: column '" + col + "' has more than " + std::to_string(max_distinct) +
                             " distinct values");
        }
    }
    if (values.empty()) throw ShapeError("get_dummies: column '" + col + "' has no values");

    const std::string column = build_rule(pack, sec::kAttributes, "single_attribute", {{"attribute", col}});
    std::vector<std::string> items;
    std::vector<std::string> names;
    for (const Value& v : values) {
        const std::string eq =
            build_rule(pack, sec::kComparison, "eq", {{"left", column}, {"right", render_literal(Literal(v), pack)}});
        const std::string as_int = build_rule(pack, sec::kConversion, "to_int", {{"statement", eq}});
        const std::string name = col + "_" + name_text(v);
        items.push_back(build_rule(pack, sec::kAttributes, "attribute_alias", {{"alias", name}, {"attribute", as_int}}));
        names.push_back(name);
    }
    auto s = derive(*state_, FrameKind::Projected);
    s->query = render_over(pack, sec::kQueries, "q2", {{"attribute_alias", chain_attributes(items, pack)}},
                           &state_->query, "subquery", state_->ns, state_->collection);
    s->columns = std::move(names);
    s->context = state_->query;
    return Frame(std::move(s));
}

QueryText Frame::head_query(std::size_t n) const {
    if (n == 0) throw Error("head: n must be at least 1");
    if (state_->terminal) return state_->query;
    return render_over(*state_->pack, sec::kLimit, "limit", {{"num", std::to_string(n)}}, &state_->query, "subquery",
                       state_->ns, state_->collection);
}

QueryText Frame::count_query() const {
    if (state_->terminal) throw ShapeError("count: an aggregate result cannot be counted");
    const LanguagePack& pack = *state_->pack;
    if (state_->kind == FrameKind::Scan && pack.find(sec::kQueries, "count_scan")) {
        VarBindings b{{"namespace", state_->ns},
                      {"collection", state_->collection},
                      {"source", qualified_name(state_->ns, state_->collection)}};
        return render_over(pack, sec::kQueries, "count_scan", b, nullptr, "subquery", state_->ns, state_->collection);
    }
    return render_over(pack, sec::kQueries, "q3", {}, &state_->query, "subquery", state_->ns, state_->collection);
}

QueryText Frame::agg_value_query(const std::string& func, const std::string& col) const {
    const LanguagePack& pack = *state_->pack;
    if (!pack.find(sec::kFunctions, func)) throw Error("agg_value: unknown aggregate function '" + func + "'");
    const Frame inner = project({col});
    const std::string alias = build_rule(pack, sec::kAliases, "value", {{"agg_name", func}, {"attribute", col}});
    const std::string agg = build_rule(pack, sec::kFunctions, func, {{"attribute", col}});
    const std::string item =
        build_rule(pack, sec::kAttributes, "single_aggregate", {{"alias", alias}, {"agg_func", agg}});
    return render_over(pack, sec::kQueries, "q7", {{"agg_func", item}}, &inner.query(), "subquery", state_->ns,
                       state_->collection);
}

QueryText Frame::collect_query() const {
    if (state_->terminal) return state_->query;
    return render_over(*state_->pack, sec::kLimit, "return_all", {}, &state_->query, "subquery", state_->ns,
                       state_->collection);
}

QueryText Frame::persist_query(const std::string& target) const {
    if (target.empty()) throw Error("persist: empty target name");
    VarBindings b{{"namespace", state_->ns},
                  {"collection", target},
                  {"source", qualified_name(state_->ns, target)}};
    return render_over(*state_->pack, sec::kSave, "to_collection", b, &state_->query, "subquery", state_->ns,
                       state_->collection);
}

namespace {

Table execute(const Frame::State& s, const QueryText& q) {
    if (!s.connector) throw Error("frame has no connector");
    return run_query(*s.connector, q);
}

// The single present cell of a one-row, one-column result.
std::optional<Value> scalar_of(const Table& t, std::string_view what) {
    if (t.rows.empty()) return std::nullopt;
    if (t.rows.size() != 1) {
        throw ShapeError(std::string(what) + ": expected one row, got " + std::to_string(t.rows.size()));
    }
    const Value* found = nullptr;
    std::size_t present = 0;
    for (const auto& [name, v] : t.rows.front().fields()) {
        if (v.is_missing()) continue;
        ++present;
        found = &v;
    }
    if (present == 0) return Value::null();
    if (present != 1) {
        throw ShapeError(std::string(what) + ": expected one column, got " + std::to_string(present));
    }
    return *found;
}

}  // namespace

Table Frame::head(std::size_t n) const {
    Table t = execute(*state_, head_query(n));
    if (t.rows.size() > n) t.rows.resize(n);
    return t;
}

std::int64_t Frame::count() const {
    const auto v = scalar_of(execute(*state_, count_query()), "count");
    if (!v) return 0;
    if (v->is_int()) return v->as_int();
    if (v->is_float() && std::floor(v->as_float()) == v->as_float()) return static_cast<std::int64_t>(v->as_float());
    throw ShapeError("count: backend returned " + v->to_string());
}

Value Frame::agg_value(const std::string& func, const std::string& col) const {
    const auto v = scalar_of(execute(*state_, agg_value_query(func, col)), "agg_value");
    return v ? *v : Value::null();
}

Table Frame::collect() const { return execute(*state_, collect_query()); }

void Frame::persist(const std::string& target) const { execute(*state_, persist_query(target)); }

Frame operator==(const Frame& a, const Operand& b) { return a.compare(CompareOp::Eq, b); }
Frame operator!=(const Frame& a, const Operand& b) { return a.compare(CompareOp::Ne, b); }
Frame operator>(const Frame& a, const Operand& b) { return a.compare(CompareOp::Gt, b); }
Frame operator<(const Frame& a, const Operand& b) { return a.compare(CompareOp::Lt, b); }
Frame operator>=(const Frame& a, const Operand& b) { return a.compare(CompareOp::Ge, b); }
Frame operator<=(const Frame& a, const Operand& b) { return a.compare(CompareOp::Le, b); }
Frame operator+(const Frame& a, const Operand& b) { return a.arith(ArithOp::Add, b); }
Frame operator-(const Frame& a, const Operand& b) { return a.arith(ArithOp::Sub, b); }
Frame operator*(const Frame& a, const Operand& b) { return a.arith(ArithOp::Mul, b); }
Frame operator/(const Frame& a, const Operand& b) { return a.arith(ArithOp::Div, b); }
Frame operator%(const Frame& a, const Operand& b) { return a.arith(ArithOp::Mod, b); }
Frame operator&(const Frame& a, const Frame& b) { return a.logical_and(b); }
Frame operator|(const Frame& a, const Frame& b) { return a.logical_or(b); }
Frame operator~(const Frame& a) { return a.logical_not(); }

}  // namespace frameql
