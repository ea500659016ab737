#include <chrono>

#include "frameql/bench.h"
#include "frameql/error.h"
#include "frameql/random.h"

namespace frameql::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

Naming naming_for(std::string_view pack_name) {
    if (pack_name == "sqlpp") return {"", "data", "leftData", "rightData"};
    if (pack_name == "sql") return {"", "data", "left", "right"};
    if (pack_name == "cypher") return {"", "data", "data", "wisconsin2"};
    if (pack_name == "mongo") return {"namespace", "collection", "collection", "collection2"};
    return {"", "data", "data", "data2"};
}

ExprArgs symbolic_args() {
    return {Literal::symbol("x"), Literal::symbol("y"), Literal::symbol("y"), Literal::symbol("z")};
}

Params Params::from_seed(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Params p;
    p.x = static_cast<std::int64_t>(uniform_below(rng, 10));
    p.y3 = static_cast<std::int64_t>(uniform_below(rng, 5));
    p.z = static_cast<std::int64_t>(uniform_below(rng, 2));
    p.y11 = p.x + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(100 - p.x)));
    return p;
}

ExprArgs Params::args() const {
    return {Literal(static_cast<long long>(x)), Literal(static_cast<long long>(y3)),
            Literal(static_cast<long long>(y11)), Literal(static_cast<long long>(z))};
}

std::string_view expression_text(int id) {
    switch (id) {
        case 1: return "len(df)";
        case 2: return "df[['two','four']].head()";
        case 3: return "len(df[(df['ten']==x) & (df['twentyPercent']==y) & (df['two']==z)])";
        case 4: return "df.groupby('oddOnePercent').agg('count')";
        case 5: return "df['stringu1'].map(str.upper).head()";
        case 6: return "df['unique1'].max()";
        case 7: return "df['unique1'].min()";
        case 8: return "df.groupby('twenty')['four'].agg('max')";
        case 9: return "df.sort_values('unique1', ascending=False).head()";
        case 10: return "df[df['ten']==x].head()";
        case 11: return "len(df[(df['onePercent']>=x) & (df['onePercent']<=y)])";
        case 12: return "len(pd.merge(df, df2, left_on='unique1', right_on='unique1'))";
        case 13: return "len(df[df['tenPercent'].isna()])";
        default: return "";
    }
}

ExprRun run_expression(int id, const PackPtr& pack, const ConnectorPtr& connector, const Naming& naming,
                       const ExprArgs& a) {
    if (id < 1 || id > kExpressionCount) throw Error("no benchmark expression " + std::to_string(id));
    ExprRun run;
    auto t0 = Clock::now();
    if (id == 12) {
        const Frame left = Frame::scan(naming.ns, naming.left, pack, connector);
        const Frame right = Frame::scan(naming.ns, naming.right, pack, connector);
        run.creation_ms = ms_since(t0);
        t0 = Clock::now();
        run.result.value = left.join(right, "unique1", "unique1").count();
        run.expression_ms = ms_since(t0);
        return run;
    }
    const Frame df = Frame::scan(naming.ns, naming.collection, pack, connector);
    run.creation_ms = ms_since(t0);
    t0 = Clock::now();
    auto& out = run.result.value;
    switch (id) {
        case 1: out = df.count(); break;
        case 2: out = df[std::vector<std::string>{"two", "four"}].head(5); break;
        case 3: out = df[((df["ten"] == a.x) & (df["twentyPercent"] == a.y3)) & (df["two"] == a.z)].count(); break;
        case 4: out = df.groupby_agg("oddOnePercent", "count", "oddOnePercent").collect(); break;
        case 5: out = df["stringu1"].upper().head(5); break;
        case 6: out = df.agg_value("max", "unique1"); break;
        case 7: out = df.agg_value("min", "unique1"); break;
        case 8: out = df.groupby_agg("twenty", "max", "four").collect(); break;
        case 9: out = df.sort("unique1", true).head(5); break;
        case 10: out = df[df["ten"] == a.x].head(5); break;
        case 11: out = df[(df["onePercent"] >= a.x) & (df["onePercent"] <= a.y11)].count(); break;
        case 13: out = df[df["tenPercent"].isna()].count(); break;
        default: break;
    }
    run.expression_ms = ms_since(t0);
    return run;
}

}  // namespace frameql::bench
