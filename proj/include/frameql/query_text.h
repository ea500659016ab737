#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace frameql {

/// Rendered query: flat text, or an ordered list of pipeline stages together
/// with the collection the pipeline starts from.
class QueryText {
public:
    enum class Kind { Text, Stages };

    QueryText() = default;
    static QueryText text(std::string body);
    static QueryText stages(std::vector<std::string> stages, std::string ns, std::string collection);

    Kind kind() const noexcept { return kind_; }
    bool is_text() const noexcept { return kind_ == Kind::Text; }
    const std::string& body() const noexcept { return body_; }
    const std::vector<std::string>& stage_list() const noexcept { return stages_; }
    const std::string& ns() const noexcept { return ns_; }
    const std::string& collection() const noexcept { return collection_; }

    /// Text as substituted into a parent rule: the body, or the stages
    /// joined with ",\n".
    std::string fragment() const;
    /// `<ns>.<coll>.aggregate([...])` for stage lists, the body otherwise.
    std::string render() const;

    friend bool operator==(const QueryText&, const QueryText&) = default;

private:
    Kind kind_ = Kind::Text;
    std::string body_;
    std::vector<std::string> stages_;
    std::string ns_;
    std::string collection_;
};

/// Splits comma-separated pipeline text into top-level stage objects.
/// Commas inside braces, brackets and string literals are not separators.
std::vector<std::string> split_stages(std::string_view text);

/// "ns.coll", or just "coll" when ns is empty.
std::string qualified_name(std::string_view ns, std::string_view collection);

}  // namespace frameql
