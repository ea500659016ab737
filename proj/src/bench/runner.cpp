#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "frameql/bench.h"
#include "frameql/error.h"

namespace frameql::bench {

namespace {

// Forwards to another connector and keeps the text of every executed query.
class RecordingConnector : public Connector {
public:
    explicit RecordingConnector(ConnectorPtr inner) : inner_(std::move(inner)) {}

    QueryText pre_process(const QueryText& q) const override { return inner_->pre_process(q); }
    RawResult execute(const QueryText& q) override {
        queries.push_back(q.render());
        return inner_->execute(q);
    }
    Table post_process(RawResult raw) const override { return inner_->post_process(std::move(raw)); }

    std::vector<std::string> queries;

private:
    ConnectorPtr inner_;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

Report run_benchmark(const Config& cfg) {
    if (!cfg.pack) throw Error("benchmark: no pack");
    if (!cfg.connector) throw Error("benchmark: no connector");
    Report report;
    report.pack = cfg.pack->name();
    report.connector = cfg.connector_name;
    report.params = cfg.params;
    const ExprArgs args = cfg.symbolic ? symbolic_args() : cfg.params.args();
    std::vector<int> ids = cfg.exprs;
    if (ids.empty())
        for (int i = 1; i <= kExpressionCount; ++i) ids.push_back(i);

    for (int id : ids) {
        ExprReport er;
        er.id = id;
        er.name = std::string(expression_text(id));
        std::vector<double> creation, expression;
        std::optional<ExprResult> last;
        try {
            for (int k = 0; k < std::max(1, cfg.repeat); ++k) {
                auto rec = std::make_shared<RecordingConnector>(cfg.connector);
                ExprRun run = run_expression(id, cfg.pack, rec, cfg.naming, args);
                creation.push_back(run.creation_ms);
                expression.push_back(run.expression_ms);
                er.queries = rec->queries;
                last = std::move(run.result);
            }
            er.creation_ms = median(creation);
            er.expression_ms = median(expression);
            er.total_ms = er.creation_ms + er.expression_ms;
            er.digest = digest(*last);
            if (cfg.oracle_data) {
                const MatchReport m = diff_results(*last, oracle_eval(id, *cfg.oracle_data, cfg.params), id);
                er.oracle_match = m.match;
                er.detail = m.detail;
            }
        } catch (const std::exception& e) {
            er.error = e.what();
            if (cfg.oracle_data) er.oracle_match = false;
        }
        report.exprs.push_back(std::move(er));
    }
    return report;
}

json_io::Json Report::to_json() const {
    using json_io::Json;
    Json out;
    out["pack"] = pack;
    out["connector"] = connector;
    out["params"] = {{"x", params.x}, {"y3", params.y3}, {"y11", params.y11}, {"z", params.z}};
    Json list = Json::array();
    for (const auto& e : exprs) {
        Json j;
        j["id"] = e.id;
        j["expression"] = e.name;
        j["creation_ms"] = e.creation_ms;
        j["expression_ms"] = e.expression_ms;
        j["total_ms"] = e.total_ms;
        j["queries"] = e.queries;
        j["digest"] = e.digest;
        j["oracle_match"] = e.oracle_match ? Json(*e.oracle_match) : Json(nullptr);
        j["golden_match"] = e.golden_match ? Json(*e.golden_match) : Json(nullptr);
        if (!e.detail.empty()) j["detail"] = e.detail;
        if (!e.error.empty()) j["error"] = e.error;
        list.push_back(std::move(j));
    }
    out["expressions"] = std::move(list);
    return out;
}

void check_goldens(Report& report, const GoldenSet& goldens, DialectKind kind) {
    for (auto& e : report.exprs) {
        if (e.queries.empty()) {
            e.golden_match = false;
            continue;
        }
        try {
            const std::string want = goldens.corrected(GoldenSet::benchmark_file(report.pack, e.id));
            e.golden_match = normalize_query(want, kind) == normalize_query(e.queries.back(), kind);
            if (!*e.golden_match) {
                if (!e.detail.empty()) e.detail += "; ";
                e.detail += "rendered query differs from the reference text";
            }
        } catch (const Error& err) {
            e.golden_match = false;
            if (!e.detail.empty()) e.detail += "; ";
            e.detail += err.what();
        }
    }
}

std::vector<int> parse_id_list(std::string_view spec) {
    std::vector<int> out;
    auto number = [&](std::string_view s) {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v < 1 || v > kExpressionCount) {
            throw Error("bad expression id '" + std::string(s) + "'");
        }
        return v;
    };
    while (!spec.empty()) {
        std::size_t comma = spec.find(',');
        std::string_view part = spec.substr(0, comma);
        spec = comma == std::string_view::npos ? std::string_view() : spec.substr(comma + 1);
        std::size_t dash = part.find('-');
        if (dash == std::string_view::npos) {
            out.push_back(number(part));
            continue;
        }
        int lo = number(part.substr(0, dash));
        int hi = number(part.substr(dash + 1));
        if (lo > hi) throw Error("bad expression range '" + std::string(part) + "'");
        for (int i = lo; i <= hi; ++i) out.push_back(i);
    }
    if (out.empty()) throw Error("empty expression list");
    return out;
}

std::string normalize_query(std::string_view text, DialectKind kind) {
    return kind == DialectKind::Pipeline ? strip_json_whitespace(text) : normalize_whitespace(text);
}

GoldenSet::GoldenSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    const auto path = dir_ / "errata.json";
    std::ifstream in(path);
    if (!in) return;
    const json_io::Json j = json_io::Json::parse(in);
    for (const auto& e : j.at("errata")) {
        errata_.push_back({e.at("file").get<std::string>(), e.at("from").get<std::string>(),
                           e.at("to").get<std::string>(), e.value("reason", "")});
    }
}

std::string GoldenSet::raw(const std::string& file) const {
    std::ifstream in(dir_ / file, std::ios::binary);
    if (!in) throw Error("cannot read reference file " + (dir_ / file).string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string GoldenSet::corrected(const std::string& file) const {
    std::string text = raw(file);
    for (const auto& e : errata_) {
        if (e.file != file) continue;
        const auto pos = text.find(e.from);
        if (pos == std::string::npos) {
            throw Error("erratum for " + file + " does not apply: '" + e.from + "' not found");
        }
        text.replace(pos, e.from.size(), e.to);
    }
    return text;
}

std::size_t GoldenSet::errata_count(const std::string& file) const {
    return static_cast<std::size_t>(
        std::count_if(errata_.begin(), errata_.end(), [&](const Erratum& e) { return e.file == file; }));
}

std::string GoldenSet::benchmark_file(std::string_view pack, int id) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", id);
    return "benchmark/" + std::string(pack) + "/" + buf + ".txt";
}

std::vector<std::string> expand_chain(std::string_view text) {
    std::vector<std::string> steps;
    std::istringstream in{std::string(text)};
    std::string line;
    bool open = false;
    while (std::getline(in, line)) {
        if (line.rfind("== ", 0) == 0) {
            const int n = std::stoi(line.substr(3));
            if (n != static_cast<int>(steps.size()) + 1) throw ParseError("chain steps must be numbered 1, 2, ...");
            steps.emplace_back();
            open = true;
            continue;
        }
        if (!open) continue;
        steps.back() += line + "\n";
    }
    for (auto& s : steps)
        while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    // Resolve @N references, highest numbers first so @1 never matches @10.
    for (std::size_t i = 0; i < steps.size(); ++i) {
        for (std::size_t k = i; k-- > 0;) {
            const std::string ref = "@" + std::to_string(k + 1);
            std::size_t pos;
            while ((pos = steps[i].find(ref)) != std::string::npos) steps[i].replace(pos, ref.size(), steps[k]);
        }
    }
    return steps;
}

}  // namespace frameql::bench
