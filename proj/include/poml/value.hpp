#pragma once

#include <string>

#include <json.hpp>

namespace poml {

/// Dynamic template value: null, boolean, number, string, array or object.
/// Objects keep insertion order so rendered data follows the author's order.
using Value = nlohmann::ordered_json;

/// Shortest round-trip decimal form: plain digits for magnitudes in
/// [1e-7, 1e21), exponent form outside ("3", "0.1", "100000", "1e+21").
std::string format_number(double d);

/// String form used by `{{ }}` interpolation: strings verbatim, numbers in
/// shortest form, booleans as true/false, null as "", arrays and objects
/// as compact JSON.
std::string display_string(const Value& v);

/// Compact JSON text with numbers in shortest form.
std::string compact_json(const Value& v);

/// false, null, 0, NaN, "" and [] are falsy; everything else is truthy.
bool truthy(const Value& v);

/// Converts every integer in `v` to a double so arithmetic and equality
/// only ever see one number representation.
Value normalize_numbers(const Value& v);

/// Block-style YAML document for `v`, without a trailing newline.
std::string to_yaml(const Value& v);

/// Human name of the value's type, for error messages.
std::string type_name(const Value& v);

} // namespace poml
