#pragma once

#include <string>
#include <vector>

#include "frameql/value.h"

namespace frameql::exec {

/// Hash key under which values that compare equal collide: numbers by
/// numeric value, MISSING and NULL as distinct tags.
std::string equality_key(const Value& v);

/// Integer conversion shared by CAST/TO_BIGINT/$toInt. Unknown passes
/// through as NULL (MISSING stays MISSING).
Value to_integer(const Value& v);
Value to_text(const Value& v);

/// + - * / % with unknown propagation. Division by zero is an EvalError.
Value arithmetic(char op, const Value& a, const Value& b, bool int_division_is_real);

enum class Accumulator { Sum, Min, Max, Avg, StdDevPop };

/// `values` holds known values only. Non-numeric values are errors for the
/// numeric accumulators.
Value accumulate(Accumulator acc, const std::vector<Value>& values, bool empty_sum_is_null);

}  // namespace frameql::exec
