#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "frameql/value.h"

namespace frameql::datagen {

/// Column order of generated rows.
const std::vector<std::string>& wisconsin_attributes();

struct GeneratorSpec {
    std::int64_t max = 10000;
    std::uint64_t seed = 1;
    double missing_rate = 0.0;
    std::vector<std::string> missing_attrs = {"tenPercent"};

    /// Throws Error when max < 1 or the rate is outside [0, 1].
    void validate() const;
};

enum class StringRole { StringU, String4 };

/// stringu: 7 base-26 letters (most significant first, 'A'-padded) plus 45
/// 'x'. string4: A/H/O/V picked by cycle_index, plus 51 'x'. Throws Error
/// when u >= 26^7 or u < 0.
std::string derive_string(std::int64_t u, StringRole role, std::int64_t cycle_index = 0);

/// Rows before missing-value injection.
Table generate_complete(std::int64_t max, std::uint64_t seed);

/// Removes each listed attribute from exactly round(rate * rows) rows,
/// chosen per (seed, attribute). Unknown attribute names throw Error.
void inject_missing(Table& table, const std::vector<std::string>& attrs, double rate, std::uint64_t seed);

Table generate(const GeneratorSpec& spec);

/// Streams JSON lines without holding the whole table.
void write_jsonl(const GeneratorSpec& spec, std::ostream& out);

}  // namespace frameql::datagen
