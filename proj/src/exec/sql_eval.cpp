#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "frameql/error.h"
#include "frameql/sql.h"
#include "util.h"

namespace frameql::sql {
namespace {

struct Binding {
    std::string_view alias;
    const Record* record;
};

using Env = std::vector<Binding>;

/// Rows of one source, kept alive together with the bindings that point into them.
struct Relation {
    std::vector<std::shared_ptr<const Table>> keep;
    std::vector<Env> rows;
    std::vector<std::string_view> aliases;  // views into the statement
};

bool is_aggregate_name(const std::string& name) {
    return name == "COUNT" || name == "MIN" || name == "MAX" || name == "AVG" || name == "SUM" ||
           name == "STDDEV_POP";
}

bool contains_aggregate(const Expr& e) {
    if (e.kind == Expr::Kind::CountStar) return true;
    if (e.kind == Expr::Kind::Call && is_aggregate_name(e.name)) return true;
    for (const auto& a : e.args) {
        if (contains_aggregate(*a)) return true;
    }
    return false;
}

const Binding* find_alias(const Env& env, std::string_view alias) {
    for (const auto& b : env) {
        if (b.alias == alias) return &b;
    }
    return nullptr;
}

Tristate truth(const Value& v, const char* where) {
    if (v.is_unknown()) return Tristate::Unknown;
    if (!v.is_bool()) throw EvalError(std::string(where) + " expects a boolean, got " + v.to_string());
    return v.as_bool() ? Tristate::True : Tristate::False;
}

Value from_tristate(Tristate t) {
    if (t == Tristate::Unknown) return Value::null();
    return Value::boolean(t == Tristate::True);
}

class Evaluator {
public:
    Evaluator(const Catalog& catalog, Dialect dialect) : catalog_(catalog), dialect_(dialect) {}

    Table select(const Select& sel);

private:
    Relation source(const Source& src);
    Value eval(const Expr& e, const Env& env, const std::vector<const Env*>* group);
    Value aggregate(const Expr& e, const std::vector<const Env*>& group);
    Value column(const Expr& e, const Env& env);
    Value scalar_call(const std::string& name, const Value& v);
    void project(const Select& sel, const Env& env, const std::vector<const Env*>* group, Record& out);

    const Catalog& catalog_;
    Dialect dialect_;
};

Value Evaluator::column(const Expr& e, const Env& env) {
    if (!e.qualifier.empty()) {
        const Binding* b = find_alias(env, e.qualifier);
        if (!b) return Value::missing();
        return b->record->get(e.name);
    }
    for (const auto& b : env) {
        if (b.record->has(e.name)) return b.record->get(e.name);
    }
    return Value::missing();
}

Value Evaluator::scalar_call(const std::string& name, const Value& v) {
    if (name == "UPPER" || name == "LOWER") {
        if (v.is_unknown()) return v;
        if (!v.is_string()) throw EvalError(name + " expects a string, got " + v.to_string());
        std::string s = v.as_string();
        for (char& c : s) {
            c = static_cast<char>(name == "UPPER" ? std::toupper(static_cast<unsigned char>(c))
                                                  : std::tolower(static_cast<unsigned char>(c)));
        }
        return Value::string(std::move(s));
    }
    if (name == "TO_BIGINT") return exec::to_integer(v);
    if (name == "TO_STRING") return exec::to_text(v);
    if (name == "ABS") {
        if (v.is_unknown()) return v;
        if (v.is_int()) return Value::integer(v.as_int() < 0 ? -v.as_int() : v.as_int());
        if (v.is_float()) return Value::real(std::fabs(v.as_float()));
        throw EvalError("ABS expects a number, got " + v.to_string());
    }
    throw EvalError("unknown function " + name);
}

Value Evaluator::aggregate(const Expr& e, const std::vector<const Env*>& group) {
    if (e.kind == Expr::Kind::CountStar) return Value::integer(static_cast<std::int64_t>(group.size()));
    std::vector<Value> values;
    values.reserve(group.size());
    for (const Env* env : group) {
        Value v = eval(*e.args[0], *env, nullptr);
        if (!v.is_unknown()) values.push_back(std::move(v));
    }
    if (e.name == "COUNT") return Value::integer(static_cast<std::int64_t>(values.size()));
    return exec::accumulate(e.name == "MIN"   ? exec::Accumulator::Min
                            : e.name == "MAX" ? exec::Accumulator::Max
                            : e.name == "AVG" ? exec::Accumulator::Avg
                            : e.name == "SUM" ? exec::Accumulator::Sum
                                              : exec::Accumulator::StdDevPop,
                            values, /*empty_sum_is_null=*/true);
}

Value Evaluator::eval(const Expr& e, const Env& env, const std::vector<const Env*>* group) {
    switch (e.kind) {
        case Expr::Kind::Literal:
            return e.literal;
        case Expr::Kind::Column:
            return column(e, env);
        case Expr::Kind::CountStar:
            if (!group) throw EvalError("COUNT(*) outside an aggregate context");
            return aggregate(e, *group);
        case Expr::Kind::Call:
            if (is_aggregate_name(e.name)) {
                if (!group) throw EvalError(e.name + " outside an aggregate context");
                return aggregate(e, *group);
            }
            return scalar_call(e.name, eval(*e.args[0], env, group));
        case Expr::Kind::Compare: {
            Value a = eval(*e.args[0], env, group);
            Value b = eval(*e.args[1], env, group);
            if (dialect_ == Dialect::SqlPlusPlus && (a.is_missing() || b.is_missing())) return Value::missing();
            return from_tristate(sql_tristate_compare(a, e.compare, b));
        }
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            Tristate a = truth(eval(*e.args[0], env, group), e.kind == Expr::Kind::And ? "AND" : "OR");
            if (e.kind == Expr::Kind::And && a == Tristate::False) return Value::boolean(false);
            if (e.kind == Expr::Kind::Or && a == Tristate::True) return Value::boolean(true);
            Tristate b = truth(eval(*e.args[1], env, group), e.kind == Expr::Kind::And ? "AND" : "OR");
            return from_tristate(e.kind == Expr::Kind::And ? tri_and(a, b) : tri_or(a, b));
        }
        case Expr::Kind::Not:
            return from_tristate(tri_not(truth(eval(*e.args[0], env, group), "NOT")));
        case Expr::Kind::Arith: {
            Value a = eval(*e.args[0], env, group);
            Value b = eval(*e.args[1], env, group);
            return exec::arithmetic(e.arith, a, b, /*int_division_is_real=*/true);
        }
        case Expr::Kind::Negate: {
            Value a = eval(*e.args[0], env, group);
            if (a.is_unknown()) return a;
            if (a.is_int()) return Value::integer(-a.as_int());
            if (a.is_float()) return Value::real(-a.as_float());
            throw EvalError("cannot negate " + a.to_string());
        }
        case Expr::Kind::Is: {
            Value a = eval(*e.args[0], env, group);
            bool hit = e.is_what == Expr::IsWhat::Missing ? a.is_missing() : a.is_unknown();
            return Value::boolean(hit != e.negated);
        }
        case Expr::Kind::Cast: {
            Value a = eval(*e.args[0], env, group);
            const std::string& t = e.name;
            if (t == "INTEGER" || t == "INT" || t == "BIGINT") return exec::to_integer(a);
            if (t == "TEXT" || t == "VARCHAR" || t == "STRING") return exec::to_text(a);
            if (t == "BOOLEAN") {
                if (a.is_unknown() || a.is_bool()) return a;
                if (a.is_number()) return Value::boolean(a.as_number() != 0);
                throw EvalError("cannot cast " + a.to_string() + " to BOOLEAN");
            }
            if (a.is_unknown()) return a;
            if (a.is_number()) return Value::real(a.as_number());
            if (a.is_string()) {
                try {
                    return Value::real(std::stod(a.as_string()));
                } catch (const std::exception&) {
                }
            }
            throw EvalError("cannot cast " + a.to_string() + " to " + t);
        }
    }
    return Value::missing();
}

Relation Evaluator::source(const Source& src) {
    Relation rel;
    switch (src.kind) {
        case Source::Kind::Table: {
            auto table = catalog_.get_shared(src.ns, src.name);
            rel.keep.push_back(table);
            rel.aliases = {src.alias};
            rel.rows.reserve(table->rows.size());
            for (const auto& r : table->rows) rel.rows.push_back(Env{{src.alias, &r}});
            return rel;
        }
        case Source::Kind::Subquery: {
            auto table = std::make_shared<const Table>(select(*src.subquery));
            rel.keep.push_back(table);
            rel.aliases = {src.alias};
            rel.rows.reserve(table->rows.size());
            for (const auto& r : table->rows) rel.rows.push_back(Env{{src.alias, &r}});
            return rel;
        }
        case Source::Kind::Join: {
            Relation left = source(*src.left);
            Relation right = source(*src.right);
            rel.keep = left.keep;
            rel.keep.insert(rel.keep.end(), right.keep.begin(), right.keep.end());
            rel.aliases = left.aliases;
            rel.aliases.insert(rel.aliases.end(), right.aliases.begin(), right.aliases.end());
            auto owns = [](const Relation& r, std::string_view q) {
                return std::find(r.aliases.begin(), r.aliases.end(), q) != r.aliases.end();
            };
            const Expr& on = *src.on;
            bool equi = on.kind == Expr::Kind::Compare && on.compare == CompareOp::Eq &&
                        on.args[0]->kind == Expr::Kind::Column && on.args[1]->kind == Expr::Kind::Column;
            const Expr* lcol = equi ? on.args[0].get() : nullptr;
            const Expr* rcol = equi ? on.args[1].get() : nullptr;
            if (equi && owns(right, lcol->qualifier) && owns(left, rcol->qualifier)) std::swap(lcol, rcol);
            equi = equi && owns(left, lcol->qualifier) && owns(right, rcol->qualifier);
            if (equi) {
                std::unordered_map<std::string, std::vector<std::size_t>> index;
                for (std::size_t i = 0; i < right.rows.size(); ++i) {
                    Value k = column(*rcol, right.rows[i]);
                    if (k.is_unknown()) continue;
                    index[exec::equality_key(k)].push_back(i);
                }
                for (const auto& lenv : left.rows) {
                    Value k = column(*lcol, lenv);
                    if (k.is_unknown()) continue;
                    auto it = index.find(exec::equality_key(k));
                    if (it == index.end()) continue;
                    for (std::size_t i : it->second) {
                        Env env = lenv;
                        env.insert(env.end(), right.rows[i].begin(), right.rows[i].end());
                        rel.rows.push_back(std::move(env));
                    }
                }
            } else {
                for (const auto& lenv : left.rows) {
                    for (const auto& renv : right.rows) {
                        Env env = lenv;
                        env.insert(env.end(), renv.begin(), renv.end());
                        if (truth(eval(on, env, nullptr), "ON") == Tristate::True) rel.rows.push_back(std::move(env));
                    }
                }
            }
            return rel;
        }
    }
    return rel;
}

std::string item_name(const SelectItem& item, std::size_t index, Dialect dialect) {
    if (!item.alias.empty()) return item.alias;
    const Expr& e = *item.expr;
    if (e.kind == Expr::Kind::Column) return e.name;
    if (dialect == Dialect::Sql) {
        if (e.kind == Expr::Kind::Call || e.kind == Expr::Kind::CountStar) {
            std::string lower = e.name;
            for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return lower;
        }
        return "?column?";
    }
    return "$" + std::to_string(index + 1);
}

void append_flat(Record& out, const Record& rec, const std::string& prefix) {
    for (const auto& [k, v] : rec.fields()) {
        std::string name = prefix.empty() ? k : prefix + "." + k;
        if (out.has(name) && prefix.empty()) continue;  // first source wins on a name clash
        out.set(std::move(name), v);
    }
}

void Evaluator::project(const Select& sel, const Env& env, const std::vector<const Env*>* group, Record& out) {
    if (sel.value_mode) {
        const Expr& e = *sel.items[0].expr;
        if (e.kind == Expr::Kind::Column && e.qualifier.empty()) {
            if (const Binding* b = find_alias(env, e.name)) {
                out = *b->record;
                return;
            }
        }
        out.set("value", eval(e, env, group));
        return;
    }
    for (std::size_t i = 0; i < sel.items.size(); ++i) {
        const SelectItem& item = sel.items[i];
        switch (item.kind) {
            case SelectItem::Kind::Star:
                for (const auto& b : env) append_flat(out, *b.record, "");
                break;
            case SelectItem::Kind::QualifiedStar: {
                const Binding* b = find_alias(env, item.qualifier);
                if (!b) throw EvalError("unknown alias '" + item.qualifier + "'");
                append_flat(out, *b->record, "");
                break;
            }
            case SelectItem::Kind::Expr: {
                const Expr& e = *item.expr;
                if (e.kind == Expr::Kind::Column && e.qualifier.empty()) {
                    if (const Binding* b = find_alias(env, e.name); b && !b->record->has(e.name)) {
                        append_flat(out, *b->record, item.alias.empty() ? e.name : item.alias);
                        break;
                    }
                }
                Value v = eval(e, env, group);
                if (v.is_missing()) break;
                out.set(item_name(item, i, dialect_), std::move(v));
                break;
            }
        }
    }
}

Table Evaluator::select(const Select& sel) {
    Relation rel = source(sel.from);
    std::vector<const Env*> kept;
    kept.reserve(rel.rows.size());
    for (const auto& env : rel.rows) {
        if (sel.where && truth(eval(*sel.where, env, nullptr), "WHERE") != Tristate::True) continue;
        kept.push_back(&env);
    }

    bool aggregating = !sel.group_by.empty();
    for (const auto& item : sel.items) {
        if (item.expr && contains_aggregate(*item.expr)) aggregating = true;
    }
    for (const auto& key : sel.order_by) {
        if (contains_aggregate(*key.expr)) aggregating = true;
    }

    // A unit is one output row: a single input row, or a group of them.
    struct Unit {
        const Env* env;
        std::vector<const Env*> group;
        std::vector<Value> sort_keys;
    };
    static const Env empty_env;
    std::vector<Unit> units;
    if (!aggregating) {
        units.reserve(kept.size());
        for (const Env* env : kept) units.push_back({env, {}, {}});
    } else if (sel.group_by.empty()) {
        units.push_back({kept.empty() ? &empty_env : kept.front(), kept, {}});
    } else {
        std::unordered_map<std::string, std::size_t> slot;
        for (const Env* env : kept) {
            std::string key;
            for (const auto& g : sel.group_by) {
                key += exec::equality_key(eval(*g, *env, nullptr));
                key += '\x1f';
            }
            auto [it, fresh] = slot.emplace(std::move(key), units.size());
            if (fresh) units.push_back({env, {}, {}});
            units[it->second].group.push_back(env);
        }
    }

    if (!sel.order_by.empty()) {
        for (auto& u : units) {
            for (const auto& key : sel.order_by) {
                u.sort_keys.push_back(eval(*key.expr, *u.env, aggregating ? &u.group : nullptr));
            }
        }
        std::stable_sort(units.begin(), units.end(), [&](const Unit& a, const Unit& b) {
            for (std::size_t k = 0; k < sel.order_by.size(); ++k) {
                Ordering o = mongo_total_order(a.sort_keys[k], b.sort_keys[k]);
                if (o == Ordering::Equal) continue;
                bool less = o == Ordering::Less;
                return sel.order_by[k].descending ? !less : less;
            }
            return false;
        });
    }
    if (sel.limit && *sel.limit >= 0 && units.size() > static_cast<std::size_t>(*sel.limit)) {
        units.resize(static_cast<std::size_t>(*sel.limit));
    }

    Table out;
    out.rows.reserve(units.size());
    for (const auto& u : units) {
        Record rec;
        project(sel, *u.env, aggregating ? &u.group : nullptr, rec);
        out.rows.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

Table eval_select(const Select& select, const Catalog& catalog, Dialect dialect) {
    return Evaluator(catalog, dialect).select(select);
}

Table eval(const Statement& statement, Catalog& catalog, const WriteOptions& options) {
    Table result = eval_select(*statement.select, catalog, statement.dialect);
    if (statement.kind == Statement::Kind::Query) return result;
    write_collection(catalog, statement.target_ns, statement.target_name, std::move(result), options);
    return Table{};
}

}  // namespace frameql::sql
