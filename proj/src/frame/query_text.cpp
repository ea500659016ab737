#include "frameql/query_text.h"

#include <cctype>

#include "frameql/error.h"

namespace frameql {

QueryText QueryText::text(std::string body) {
    QueryText q;
    q.kind_ = Kind::Text;
    q.body_ = std::move(body);
    return q;
}

QueryText QueryText::stages(std::vector<std::string> stages, std::string ns, std::string collection) {
    QueryText q;
    q.kind_ = Kind::Stages;
    q.stages_ = std::move(stages);
    q.ns_ = std::move(ns);
    q.collection_ = std::move(collection);
    return q;
}

std::string QueryText::fragment() const {
    if (is_text()) return body_;
    std::string out;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        if (i) out += ",\n";
        out += stages_[i];
    }
    return out;
}

std::string QueryText::render() const {
    if (is_text()) return body_;
    std::string out = qualified_name(ns_, collection_) + ".aggregate([\n";
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        out += "    " + stages_[i];
        out += i + 1 < stages_.size() ? ",\n" : "\n";
    }
    return out + "])";
}

std::vector<std::string> split_stages(std::string_view text) {
    std::vector<std::string> out;
    int depth = 0;
    bool in_string = false;
    std::size_t start = 0;
    auto push = [&](std::size_t end) {
        std::string_view piece = text.substr(start, end - start);
        const auto b = piece.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos) {
            throw ParseError("empty pipeline stage");
        }
        const auto e = piece.find_last_not_of(" \t\r\n");
        out.emplace_back(piece.substr(b, e - b + 1));
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '{': case '[': ++depth; break;
            case '}': case ']': --depth; break;
            case ',':
                if (depth == 0) {
                    push(i);
                    start = i + 1;
                }
                break;
            default: break;
        }
        if (depth < 0) throw ParseError("unbalanced pipeline text");
    }
    if (depth != 0 || in_string) throw ParseError("unbalanced pipeline text");
    push(text.size());
    return out;
}

std::string qualified_name(std::string_view ns, std::string_view collection) {
    if (ns.empty()) return std::string(collection);
    return std::string(ns) + "." + std::string(collection);
}

}  // namespace frameql
