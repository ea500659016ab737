#include "frameql/pipeline.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

#include "frameql/error.h"
#include "frameql/json_io.h"
#include "util.h"

namespace frameql::pipeline {
namespace {

using json_io::Json;

const std::set<std::string>& operators() {
    static const std::set<std::string> ops = {
        "$eq",       "$ne",       "$gt",     "$gte",    "$lt",      "$lte",    "$and",     "$or",
        "$not",      "$add",      "$subtract", "$multiply", "$divide", "$mod", "$abs",     "$toUpper",
        "$toLower",  "$toInt",    "$toString", "$ifNull"};
    return ops;
}

const std::set<std::string>& accumulators() {
    static const std::set<std::string> ops = {"$sum", "$min", "$max", "$avg", "$stdDevPop"};
    return ops;
}

struct StageError {
    std::size_t index;
    std::string name;
    std::string prefix() const { return "stage " + std::to_string(index) + " (" + name + "): "; }
};

Expr compile(const Json& j, const StageError& where) {
    Expr e;
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s.rfind("$$", 0) == 0) {
            e.kind = Expr::Kind::Variable;
            e.name = s.substr(2);
            if (e.name.empty()) throw ParseError(where.prefix() + "empty variable name");
        } else if (!s.empty() && s[0] == '$') {
            e.kind = Expr::Kind::Field;
            e.name = s.substr(1);
            if (e.name.empty()) throw ParseError(where.prefix() + "empty field path");
        } else {
            e.literal = Value::string(s);
        }
        return e;
    }
    if (j.is_array()) throw ParseError(where.prefix() + "array literals are not supported in expressions");
    if (j.is_object()) {
        if (j.size() == 1 && j.begin().key().rfind("$", 0) == 0) {
            const std::string& op = j.begin().key();
            if (!operators().count(op)) throw ParseError(where.prefix() + "unknown operator '" + op + "'");
            e.kind = Expr::Kind::Operator;
            e.name = op;
            const Json& args = j.begin().value();
            if (args.is_array()) {
                for (const auto& a : args) e.args.push_back(compile(a, where));
            } else {
                e.args.push_back(compile(args, where));
            }
            std::size_t n = e.args.size();
            bool binary = op != "$and" && op != "$or" && op != "$not" && op != "$abs" && op != "$toUpper" &&
                          op != "$toLower" && op != "$toInt" && op != "$toString" && op != "$add" &&
                          op != "$multiply";
            bool unary = op == "$not" || op == "$abs" || op == "$toUpper" || op == "$toLower" || op == "$toInt" ||
                         op == "$toString";
            if ((binary && n != 2) || (unary && n != 1) || n == 0) {
                throw ParseError(where.prefix() + "wrong number of arguments for " + op);
            }
            return e;
        }
        e.kind = Expr::Kind::Object;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key().rfind("$", 0) == 0) throw ParseError(where.prefix() + "unknown operator '" + it.key() + "'");
            e.fields.emplace_back(it.key(), compile(it.value(), where));
        }
        return e;
    }
    e.literal = json_io::to_value(j);
    return e;
}

// Plain query form of $match: {field: literal}, {field: {"$op": literal}}, $and/$or lists, $expr.
Expr compile_query(const Json& j, const StageError& where) {
    if (!j.is_object()) throw ParseError(where.prefix() + "$match expects an object");
    Expr all;
    all.kind = Expr::Kind::Operator;
    all.name = "$and";
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "$expr") {
            Expr truthy;
            truthy.kind = Expr::Kind::Operator;
            truthy.name = "$?truthy";
            truthy.args.push_back(compile(it.value(), where));
            all.args.push_back(std::move(truthy));
            continue;
        }
        if (key == "$and" || key == "$or") {
            if (!it.value().is_array() || it.value().empty()) {
                throw ParseError(where.prefix() + key + " expects a non-empty array");
            }
            Expr list;
            list.kind = Expr::Kind::Operator;
            list.name = key;
            for (const auto& sub : it.value()) list.args.push_back(compile_query(sub, where));
            all.args.push_back(std::move(list));
            continue;
        }
        if (key.rfind("$", 0) == 0) throw ParseError(where.prefix() + "unknown query operator '" + key + "'");
        Expr field;
        field.kind = Expr::Kind::Field;
        field.name = key;
        auto add_cond = [&](const std::string& op, const Json& operand) {
            Expr cond;
            cond.kind = Expr::Kind::Operator;
            cond.name = "$?" + op;
            cond.args.push_back(field);
            Expr lit;
            if (!operand.is_primitive()) throw ParseError(where.prefix() + "query operands must be literals");
            lit.literal = json_io::to_value(operand);
            cond.args.push_back(std::move(lit));
            all.args.push_back(std::move(cond));
        };
        const Json& v = it.value();
        if (v.is_object() && !v.empty() && v.begin().key().rfind("$", 0) == 0) {
            for (auto c = v.begin(); c != v.end(); ++c) {
                static const std::set<std::string> ops = {"$eq", "$ne", "$gt", "$gte", "$lt", "$lte"};
                if (!ops.count(c.key())) throw ParseError(where.prefix() + "unknown query operator '" + c.key() + "'");
                add_cond(c.key().substr(1), c.value());
            }
        } else {
            add_cond("eq", v);
        }
    }
    return all;
}

struct Doc {
    Record fields;
    std::vector<std::pair<std::string, std::vector<Doc>>> arrays;

    const std::vector<Doc>* array(const std::string& name) const {
        for (const auto& [k, v] : arrays) {
            if (k == name) return &v;
        }
        return nullptr;
    }
};

using Vars = std::vector<std::pair<std::string, Value>>;

bool truthy(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::Missing:
        case Value::Kind::Null:
            return false;
        case Value::Kind::Bool:
            return v.as_bool();
        case Value::Kind::Int:
            return v.as_int() != 0;
        case Value::Kind::Float:
            return v.as_float() != 0.0;
        case Value::Kind::String:
            return true;
    }
    return false;
}

bool same_bracket(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.kind() == b.kind();
}

bool query_compare(const std::string& op, const Value& field, const Value& lit) {
    if (lit.is_null()) {
        bool unknown = field.is_unknown();
        if (op == "eq" || op == "gte" || op == "lte") return unknown;
        if (op == "ne") return !unknown;
        return false;
    }
    if (!same_bracket(field, lit)) return op == "ne";
    Ordering o = mongo_total_order(field, lit);
    if (op == "eq") return o == Ordering::Equal;
    if (op == "ne") return o != Ordering::Equal;
    if (op == "gt") return o == Ordering::Greater;
    if (op == "gte") return o != Ordering::Less;
    if (op == "lt") return o == Ordering::Less;
    return o != Ordering::Greater;
}

std::string change_case(std::string s, bool up) {
    for (char& c : s) {
        c = static_cast<char>(up ? std::toupper(static_cast<unsigned char>(c)) : std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

Value eval(const Expr& e, const Doc& doc, const Vars& vars) {
    switch (e.kind) {
        case Expr::Kind::Literal:
            return e.literal;
        case Expr::Kind::Field:
            return doc.fields.get(e.name);
        case Expr::Kind::Variable:
            for (const auto& [k, v] : vars) {
                if (k == e.name) return v;
            }
            throw EvalError("undefined variable '$$" + e.name + "'");
        case Expr::Kind::Object:
            throw EvalError("object expressions are only supported as a $group key");
        case Expr::Kind::Operator:
            break;
    }
    const std::string& op = e.name;
    if (op == "$and") {
        for (const auto& a : e.args) {
            if (!truthy(eval(a, doc, vars))) return Value::boolean(false);
        }
        return Value::boolean(true);
    }
    if (op == "$or") {
        for (const auto& a : e.args) {
            if (truthy(eval(a, doc, vars))) return Value::boolean(true);
        }
        return Value::boolean(false);
    }
    if (op == "$not") return Value::boolean(!truthy(eval(e.args[0], doc, vars)));
    if (op == "$?truthy") return Value::boolean(truthy(eval(e.args[0], doc, vars)));
    if (op.rfind("$?", 0) == 0) {
        return Value::boolean(query_compare(op.substr(2), eval(e.args[0], doc, vars), e.args[1].literal));
    }
    if (op == "$eq" || op == "$ne" || op == "$gt" || op == "$gte" || op == "$lt" || op == "$lte") {
        Ordering o = mongo_total_order(eval(e.args[0], doc, vars), eval(e.args[1], doc, vars));
        bool r = op == "$eq"    ? o == Ordering::Equal
                 : op == "$ne"  ? o != Ordering::Equal
                 : op == "$gt"  ? o == Ordering::Greater
                 : op == "$gte" ? o != Ordering::Less
                 : op == "$lt"  ? o == Ordering::Less
                                : o != Ordering::Greater;
        return Value::boolean(r);
    }
    if (op == "$add" || op == "$multiply") {
        Value acc = eval(e.args[0], doc, vars);
        if (acc.is_missing()) acc = Value::null();
        for (std::size_t i = 1; i < e.args.size(); ++i) {
            Value next = eval(e.args[i], doc, vars);
            if (acc.is_unknown() || next.is_unknown()) return Value::null();
            acc = exec::arithmetic(op == "$add" ? '+' : '*', acc, next, false);
        }
        if (!acc.is_unknown() && !acc.is_number()) throw EvalError(op + " expects numbers, got " + acc.to_string());
        return acc;
    }
    if (op == "$subtract" || op == "$divide" || op == "$mod") {
        Value a = eval(e.args[0], doc, vars);
        Value b = eval(e.args[1], doc, vars);
        if (a.is_unknown() || b.is_unknown()) return Value::null();
        char c = op == "$subtract" ? '-' : op == "$divide" ? '/' : '%';
        return exec::arithmetic(c, a, b, true);
    }
    if (op == "$abs") {
        Value a = eval(e.args[0], doc, vars);
        if (a.is_unknown()) return Value::null();
        if (a.is_int()) return Value::integer(a.as_int() < 0 ? -a.as_int() : a.as_int());
        if (a.is_float()) return Value::real(std::fabs(a.as_float()));
        throw EvalError("$abs expects a number, got " + a.to_string());
    }
    if (op == "$toUpper" || op == "$toLower") {
        Value a = eval(e.args[0], doc, vars);
        if (a.is_unknown()) return Value::string("");
        Value s = exec::to_text(a);
        return Value::string(change_case(s.as_string(), op == "$toUpper"));
    }
    if (op == "$toInt") {
        Value a = eval(e.args[0], doc, vars);
        if (a.is_unknown()) return Value::null();
        return exec::to_integer(a);
    }
    if (op == "$toString") {
        Value a = eval(e.args[0], doc, vars);
        if (a.is_unknown()) return Value::null();
        return exec::to_text(a);
    }
    if (op == "$ifNull") {
        for (const auto& a : e.args) {
            Value v = eval(a, doc, vars);
            if (!v.is_unknown()) return v;
        }
        return Value::null();
    }
    throw EvalError("unsupported operator " + op);
}

bool uses_variable(const Expr& e, const std::set<std::string>& names) {
    if (e.kind == Expr::Kind::Variable) return names.count(e.name) != 0;
    for (const auto& a : e.args) {
        if (uses_variable(a, names)) return true;
    }
    for (const auto& [k, f] : e.fields) {
        if (uses_variable(f, names)) return true;
    }
    return false;
}

bool stage_uses_variable(const Stage& s, const std::set<std::string>& names) {
    if (uses_variable(s.expr, names)) return true;
    for (const auto& [k, c] : s.computed) {
        if (uses_variable(c, names)) return true;
    }
    for (const auto& a : s.accumulators) {
        if (uses_variable(a.arg, names)) return true;
    }
    for (const auto& [k, l] : s.let) {
        if (uses_variable(l, names)) return true;
    }
    return s.kind == Stage::Kind::Lookup && s.sub;  // nested pipelines may see outer variables
}

Stage compile_stage(const Json& j, std::size_t index);

Pipeline compile_pipeline(const Json& j, std::size_t outer_index, bool nested) {
    if (!j.is_array()) {
        throw ParseError(nested ? "stage " + std::to_string(outer_index) + ": pipeline must be an array"
                                : "pipeline must be a JSON array");
    }
    Pipeline p;
    for (std::size_t i = 0; i < j.size(); ++i) {
        p.stages.push_back(compile_stage(j[i], i));
        if (p.stages.back().kind == Stage::Kind::Out && (nested || i + 1 != j.size())) {
            throw ParseError("stage " + std::to_string(i) + " ($out): must be the last stage of the top-level pipeline");
        }
    }
    return p;
}

bool flag_value(const Json& v, bool& out) {
    if (v.is_boolean()) {
        out = v.get<bool>();
        return true;
    }
    if (v.is_number()) {
        out = v.get<double>() != 0;
        return true;
    }
    return false;
}

Stage compile_stage(const Json& j, std::size_t index) {
    if (!j.is_object() || j.size() != 1) {
        throw ParseError("stage " + std::to_string(index) + ": a stage is an object with exactly one key");
    }
    Stage s;
    s.index = index;
    s.name = j.begin().key();
    const Json& spec = j.begin().value();
    StageError where{index, s.name};
    auto need_object = [&] {
        if (!spec.is_object()) throw ParseError(where.prefix() + "expects an object");
    };
    if (s.name == "$match") {
        s.kind = Stage::Kind::Match;
        s.expr = compile_query(spec, where);
    } else if (s.name == "$project") {
        s.kind = Stage::Kind::Project;
        need_object();
        if (spec.empty()) throw ParseError(where.prefix() + "empty projection");
        for (auto it = spec.begin(); it != spec.end(); ++it) {
            bool on = false;
            if (flag_value(it.value(), on)) {
                if (it.key() == "_id" && !on) {
                    s.exclude_id = true;
                } else if (on) {
                    s.include.push_back(it.key());
                } else {
                    s.exclude.push_back(it.key());
                }
            } else {
                s.computed.emplace_back(it.key(), compile(it.value(), where));
            }
        }
        s.inclusion = !s.include.empty() || !s.computed.empty();
        if (s.inclusion && !s.exclude.empty()) {
            throw ParseError(where.prefix() + "cannot mix inclusion and exclusion");
        }
    } else if (s.name == "$addFields" || s.name == "$set") {
        s.kind = Stage::Kind::AddFields;
        need_object();
        for (auto it = spec.begin(); it != spec.end(); ++it) s.computed.emplace_back(it.key(), compile(it.value(), where));
    } else if (s.name == "$group") {
        s.kind = Stage::Kind::Group;
        need_object();
        if (!spec.contains("_id")) throw ParseError(where.prefix() + "missing _id");
        for (auto it = spec.begin(); it != spec.end(); ++it) {
            if (it.key() == "_id") {
                s.expr = compile(it.value(), where);
                continue;
            }
            const Json& acc = it.value();
            if (!acc.is_object() || acc.size() != 1) {
                throw ParseError(where.prefix() + "accumulator '" + it.key() + "' must be a one-key object");
            }
            const std::string& op = acc.begin().key();
            if (!accumulators().count(op)) throw ParseError(where.prefix() + "unknown accumulator '" + op + "'");
            s.accumulators.push_back({it.key(), op, compile(acc.begin().value(), where)});
        }
    } else if (s.name == "$sort") {
        s.kind = Stage::Kind::Sort;
        need_object();
        if (spec.empty()) throw ParseError(where.prefix() + "empty sort specification");
        for (auto it = spec.begin(); it != spec.end(); ++it) {
            if (!it.value().is_number_integer() || (it.value() != 1 && it.value() != -1)) {
                throw ParseError(where.prefix() + "sort direction must be 1 or -1");
            }
            s.sort.emplace_back(it.key(), it.value().get<int>());
        }
    } else if (s.name == "$limit") {
        s.kind = Stage::Kind::Limit;
        if (!spec.is_number_integer() || spec.get<std::int64_t>() <= 0) {
            throw ParseError(where.prefix() + "expects a positive integer");
        }
        s.limit = spec.get<std::int64_t>();
    } else if (s.name == "$count") {
        s.kind = Stage::Kind::Count;
        if (!spec.is_string() || spec.get<std::string>().empty() || spec.get<std::string>()[0] == '$') {
            throw ParseError(where.prefix() + "expects a non-empty field name");
        }
        s.target = spec.get<std::string>();
    } else if (s.name == "$lookup") {
        s.kind = Stage::Kind::Lookup;
        need_object();
        if (!spec.contains("from") || !spec["from"].is_string() || !spec.contains("as") || !spec["as"].is_string()) {
            throw ParseError(where.prefix() + "requires string 'from' and 'as'");
        }
        s.target = spec["from"].get<std::string>();
        s.as = spec["as"].get<std::string>();
        if (spec.contains("let")) {
            if (!spec["let"].is_object()) throw ParseError(where.prefix() + "'let' must be an object");
            for (auto it = spec["let"].begin(); it != spec["let"].end(); ++it) {
                s.let.emplace_back(it.key(), compile(it.value(), where));
            }
        }
        if (spec.contains("pipeline")) {
            s.sub = std::make_shared<Pipeline>(compile_pipeline(spec["pipeline"], index, true));
        }
        if (spec.contains("localField") || spec.contains("foreignField")) {
            if (!spec.value("localField", Json()).is_string() || !spec.value("foreignField", Json()).is_string()) {
                throw ParseError(where.prefix() + "localField and foreignField must both be strings");
            }
            s.local_field = spec["localField"].get<std::string>();
            s.foreign_field = spec["foreignField"].get<std::string>();
        } else if (!s.sub) {
            throw ParseError(where.prefix() + "needs either a pipeline or localField/foreignField");
        }
    } else if (s.name == "$unwind") {
        s.kind = Stage::Kind::Unwind;
        Json path = spec;
        if (spec.is_object()) {
            path = spec.value("path", Json());
            if (spec.contains("preserveNullAndEmptyArrays")) {
                if (!spec["preserveNullAndEmptyArrays"].is_boolean()) {
                    throw ParseError(where.prefix() + "preserveNullAndEmptyArrays must be a boolean");
                }
                s.preserve_empty = spec["preserveNullAndEmptyArrays"].get<bool>();
            }
        }
        if (!path.is_string() || path.get<std::string>().size() < 2 || path.get<std::string>()[0] != '$') {
            throw ParseError(where.prefix() + "path must be a '$field' string");
        }
        s.target = path.get<std::string>().substr(1);
    } else if (s.name == "$out") {
        s.kind = Stage::Kind::Out;
        if (!spec.is_string() || spec.get<std::string>().empty()) {
            throw ParseError(where.prefix() + "expects a collection name");
        }
        s.target = spec.get<std::string>();
    } else {
        throw ParseError("stage " + std::to_string(index) + ": unknown stage '" + s.name + "'");
    }
    return s;
}

bool under(const std::string& field, const std::string& root) {
    return field == root || (field.size() > root.size() && field.compare(0, root.size(), root) == 0 &&
                             field[root.size()] == '.');
}

class Runner {
public:
    Runner(Catalog& catalog, std::string ns, const WriteOptions& options)
        : catalog_(catalog), ns_(std::move(ns)), options_(options) {}

    std::vector<Doc> load(const std::string& collection) {
        const Table& t = catalog_.get(ns_, collection);
        std::vector<Doc> docs;
        docs.reserve(t.rows.size());
        for (const auto& r : t.rows) docs.push_back(Doc{r, {}});
        return docs;
    }

    std::vector<Doc> run(const Pipeline& p, std::size_t from, std::vector<Doc> docs, const Vars& vars,
                         std::size_t to = static_cast<std::size_t>(-1)) {
        for (std::size_t i = from; i < p.stages.size() && i < to; ++i) {
            const Stage& s = p.stages[i];
            try {
                docs = apply(s, std::move(docs), vars);
            } catch (const EvalError& e) {
                std::string msg = e.what();
                if (msg.rfind("stage ", 0) == 0) throw;
                throw EvalError(StageError{s.index, s.name}.prefix() + msg);
            }
        }
        return docs;
    }

private:
    std::vector<Doc> apply(const Stage& s, std::vector<Doc> docs, const Vars& vars);
    std::vector<Doc> group(const Stage& s, const std::vector<Doc>& docs, const Vars& vars);
    std::vector<Doc> lookup(const Stage& s, std::vector<Doc> docs, const Vars& vars);

    Catalog& catalog_;
    std::string ns_;
    WriteOptions options_;
};

std::vector<Doc> Runner::group(const Stage& s, const std::vector<Doc>& docs, const Vars& vars) {
    struct Group {
        std::vector<std::pair<std::string, Value>> key;
        std::vector<std::vector<Value>> values;
    };
    std::vector<Group> groups;
    std::unordered_map<std::string, std::size_t> slot;
    for (const Doc& d : docs) {
        std::vector<std::pair<std::string, Value>> key;
        if (s.expr.kind == Expr::Kind::Object) {
            for (const auto& [name, ex] : s.expr.fields) {
                Value v = eval(ex, d, vars);
                if (!v.is_missing()) key.emplace_back("_id." + name, std::move(v));
            }
        } else {
            Value v = eval(s.expr, d, vars);
            key.emplace_back("_id", v.is_missing() ? Value::null() : std::move(v));
        }
        std::string k;
        for (const auto& [n, v] : key) k += n + '\x1e' + exec::equality_key(v) + '\x1f';
        auto [it, fresh] = slot.emplace(std::move(k), groups.size());
        if (fresh) {
            groups.push_back({std::move(key), std::vector<std::vector<Value>>(s.accumulators.size())});
        }
        Group& g = groups[it->second];
        for (std::size_t a = 0; a < s.accumulators.size(); ++a) {
            Value v = eval(s.accumulators[a].arg, d, vars);
            if (v.is_unknown()) continue;
            if (s.accumulators[a].op != "$min" && s.accumulators[a].op != "$max" && !v.is_number()) continue;
            g.values[a].push_back(std::move(v));
        }
    }
    std::vector<Doc> out;
    out.reserve(groups.size());
    for (auto& g : groups) {
        Doc d;
        for (auto& [n, v] : g.key) d.fields.set(n, std::move(v));
        for (std::size_t a = 0; a < s.accumulators.size(); ++a) {
            const std::string& op = s.accumulators[a].op;
            exec::Accumulator acc = op == "$sum"   ? exec::Accumulator::Sum
                                    : op == "$min" ? exec::Accumulator::Min
                                    : op == "$max" ? exec::Accumulator::Max
                                    : op == "$avg" ? exec::Accumulator::Avg
                                                   : exec::Accumulator::StdDevPop;
            d.fields.set(s.accumulators[a].output, exec::accumulate(acc, g.values[a], /*empty_sum_is_null=*/false));
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Doc> Runner::lookup(const Stage& s, std::vector<Doc> docs, const Vars& vars) {
    std::vector<Doc> foreign = load(s.target);
    auto attach = [&](Doc& d, std::vector<Doc> matched) {
        d.arrays.erase(std::remove_if(d.arrays.begin(), d.arrays.end(), [&](const auto& a) { return a.first == s.as; }),
                       d.arrays.end());
        d.fields.erase(s.as);
        d.arrays.emplace_back(s.as, std::move(matched));
    };
    if (!s.local_field.empty()) {
        if (s.sub) foreign = run(*s.sub, 0, std::move(foreign), vars);
        std::unordered_map<std::string, std::vector<std::size_t>> index;
        for (std::size_t i = 0; i < foreign.size(); ++i) {
            index[exec::equality_key(foreign[i].fields.get(s.foreign_field))].push_back(i);
        }
        for (Doc& d : docs) {
            std::vector<Doc> matched;
            auto it = index.find(exec::equality_key(d.fields.get(s.local_field)));
            if (it != index.end()) {
                for (std::size_t i : it->second) matched.push_back(foreign[i]);
            }
            attach(d, std::move(matched));
        }
        return docs;
    }

    std::set<std::string> let_names;
    for (const auto& [k, e] : s.let) let_names.insert(k);

    // Stages before the first correlated one run once.
    std::size_t first = 0;
    std::vector<Doc> prefix = std::move(foreign);
    if (s.sub) {
        while (first < s.sub->stages.size() && !stage_uses_variable(s.sub->stages[first], let_names)) ++first;
        prefix = run(*s.sub, 0, std::move(prefix), vars, first);
    }

    // An equality $match against a let variable becomes a hash probe.
    const Expr* probe_field = nullptr;
    std::string probe_var;
    if (s.sub && first < s.sub->stages.size()) {
        const Stage& m = s.sub->stages[first];
        if (m.kind == Stage::Kind::Match && m.expr.args.size() == 1 && m.expr.args[0].name == "$?truthy") {
            const Expr& cond = m.expr.args[0].args[0];
            if (cond.kind == Expr::Kind::Operator && cond.name == "$eq") {
                const Expr& a = cond.args[0];
                const Expr& b = cond.args[1];
                if (a.kind == Expr::Kind::Field && b.kind == Expr::Kind::Variable && let_names.count(b.name)) {
                    probe_field = &a;
                    probe_var = b.name;
                } else if (b.kind == Expr::Kind::Field && a.kind == Expr::Kind::Variable && let_names.count(a.name)) {
                    probe_field = &b;
                    probe_var = a.name;
                }
            }
        }
    }
    std::unordered_map<std::string, std::vector<std::size_t>> index;
    if (probe_field) {
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            index[exec::equality_key(prefix[i].fields.get(probe_field->name))].push_back(i);
        }
    }

    for (Doc& d : docs) {
        std::vector<Doc> matched;
        Vars inner = vars;
        for (const auto& [k, e] : s.let) inner.emplace_back(k, eval(e, d, vars));
        if (probe_field) {
            Value v;
            for (const auto& [k, val] : inner) {
                if (k == probe_var) v = val;
            }
            auto it = index.find(exec::equality_key(v));
            if (it != index.end()) {
                for (std::size_t i : it->second) matched.push_back(prefix[i]);
            }
            matched = run(*s.sub, first + 1, std::move(matched), inner);
        } else if (s.sub) {
            matched = run(*s.sub, first, prefix, inner);
        } else {
            matched = prefix;
        }
        attach(d, std::move(matched));
    }
    return docs;
}

std::vector<Doc> Runner::apply(const Stage& s, std::vector<Doc> docs, const Vars& vars) {
    switch (s.kind) {
        case Stage::Kind::Match: {
            std::vector<Doc> out;
            out.reserve(docs.size());
            for (auto& d : docs) {
                if (truthy(eval(s.expr, d, vars))) out.push_back(std::move(d));
            }
            return out;
        }
        case Stage::Kind::Project: {
            for (auto& d : docs) {
                if (!s.inclusion) {
                    Record r;
                    for (const auto& [k, v] : d.fields.fields()) {
                        bool drop = s.exclude_id && under(k, "_id");
                        for (const auto& x : s.exclude) drop = drop || under(k, x);
                        if (!drop) r.set(k, v);
                    }
                    d.fields = std::move(r);
                    d.arrays.erase(std::remove_if(d.arrays.begin(), d.arrays.end(),
                                                  [&](const auto& a) {
                                                      return std::find(s.exclude.begin(), s.exclude.end(), a.first) !=
                                                             s.exclude.end();
                                                  }),
                                   d.arrays.end());
                    continue;
                }
                Doc next;
                if (!s.exclude_id) {
                    for (const auto& [k, v] : d.fields.fields()) {
                        if (under(k, "_id")) next.fields.set(k, v);
                    }
                }
                for (const auto& name : s.include) {
                    for (const auto& [k, v] : d.fields.fields()) {
                        if (under(k, name)) next.fields.set(k, v);
                    }
                    if (const auto* arr = d.array(name)) next.arrays.emplace_back(name, *arr);
                }
                for (const auto& [name, ex] : s.computed) {
                    Value v = eval(ex, d, vars);
                    if (!v.is_missing()) next.fields.set(name, std::move(v));
                }
                d = std::move(next);
            }
            return docs;
        }
        case Stage::Kind::AddFields:
            for (auto& d : docs) {
                for (const auto& [name, ex] : s.computed) {
                    Value v = eval(ex, d, vars);
                    if (v.is_missing()) {
                        d.fields.erase(name);
                    } else {
                        d.fields.set(name, std::move(v));
                    }
                }
            }
            return docs;
        case Stage::Kind::Group:
            return group(s, docs, vars);
        case Stage::Kind::Sort:
            std::stable_sort(docs.begin(), docs.end(), [&](const Doc& a, const Doc& b) {
                for (const auto& [field, dir] : s.sort) {
                    Ordering o = mongo_total_order(a.fields.get(field), b.fields.get(field));
                    if (o == Ordering::Equal) continue;
                    return (o == Ordering::Less) == (dir == 1);
                }
                return false;
            });
            return docs;
        case Stage::Kind::Limit:
            if (docs.size() > static_cast<std::size_t>(s.limit)) docs.resize(static_cast<std::size_t>(s.limit));
            return docs;
        case Stage::Kind::Count: {
            if (docs.empty()) return {};
            Doc d;
            d.fields.set(s.target, Value::integer(static_cast<std::int64_t>(docs.size())));
            return {std::move(d)};
        }
        case Stage::Kind::Lookup:
            return lookup(s, std::move(docs), vars);
        case Stage::Kind::Unwind: {
            std::vector<Doc> out;
            for (auto& d : docs) {
                const auto* arr = d.array(s.target);
                if (!arr) {
                    Value v = d.fields.get(s.target);
                    if (!v.is_unknown() || s.preserve_empty) out.push_back(std::move(d));
                    continue;
                }
                if (arr->empty()) {
                    if (s.preserve_empty) {
                        Doc kept = d;
                        kept.arrays.erase(std::remove_if(kept.arrays.begin(), kept.arrays.end(),
                                                         [&](const auto& a) { return a.first == s.target; }),
                                          kept.arrays.end());
                        out.push_back(std::move(kept));
                    }
                    continue;
                }
                for (const Doc& element : *arr) {
                    Doc flat;
                    flat.fields = d.fields;
                    for (const auto& [k, v] : element.fields.fields()) flat.fields.set(s.target + "." + k, v);
                    for (const auto& a : d.arrays) {
                        if (a.first != s.target) flat.arrays.push_back(a);
                    }
                    out.push_back(std::move(flat));
                }
            }
            return out;
        }
        case Stage::Kind::Out: {
            Table t;
            t.rows.reserve(docs.size());
            for (auto& d : docs) t.rows.push_back(std::move(d.fields));
            write_collection(catalog_, ns_, s.target, std::move(t), options_);
            return {};
        }
    }
    return docs;
}

}  // namespace

Pipeline parse(std::string_view json_array) {
    Json j;
    try {
        j = Json::parse(json_array);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("pipeline is not valid JSON: ") + e.what());
    }
    return compile_pipeline(j, 0, false);
}

AggregateCall parse_aggregate_call(std::string_view text) {
    static const std::string_view marker = ".aggregate(";
    std::size_t at = text.find(marker);
    if (at == std::string_view::npos) throw ParseError("expected <namespace>.<collection>.aggregate([...])");
    std::string_view target = text.substr(0, at);
    while (!target.empty() && std::isspace(static_cast<unsigned char>(target.front()))) target.remove_prefix(1);
    AggregateCall call;
    std::size_t dot = target.rfind('.');
    if (dot == std::string_view::npos) {
        call.collection = std::string(target);
    } else {
        call.ns = std::string(target.substr(0, dot));
        call.collection = std::string(target.substr(dot + 1));
    }
    if (call.collection.empty()) throw ParseError("missing collection name before .aggregate(");
    std::string_view rest = text.substr(at + marker.size());
    while (!rest.empty() && (std::isspace(static_cast<unsigned char>(rest.back())) || rest.back() == ';')) {
        rest.remove_suffix(1);
    }
    if (rest.empty() || rest.back() != ')') throw ParseError("unterminated aggregate( call");
    rest.remove_suffix(1);
    call.pipeline = parse(rest);
    return call;
}

Table eval(const Pipeline& p, Catalog& catalog, const std::string& ns, const std::string& collection,
           const WriteOptions& options) {
    Runner runner(catalog, ns, options);
    std::vector<Doc> docs = runner.run(p, 0, runner.load(collection), {});
    Table out;
    out.rows.reserve(docs.size());
    for (auto& d : docs) out.rows.push_back(std::move(d.fields));
    return out;
}

}  // namespace frameql::pipeline
