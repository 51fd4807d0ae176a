#include "poml/value.hpp"

#include <charconv>
#include <cmath>

namespace poml {

std::string format_number(double d)
{
    if (std::isnan(d))
        return "NaN";
    if (std::isinf(d))
        return d > 0 ? "Infinity" : "-Infinity";
    if (d == 0)
        return "0"; // also folds -0
    char buf[400];
    double magnitude = std::fabs(d);
    auto format = magnitude >= 1e-7 && magnitude < 1e21 ? std::chars_format::fixed : std::chars_format::scientific;
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d, format);
    if (ec != std::errc{})
        return "0";
    return std::string(buf, end);
}

namespace {

void dump_compact(const Value& v, std::string& out)
{
    switch (v.type()) {
    case Value::value_t::null:
        out += "null";
        break;
    case Value::value_t::boolean:
        out += v.get<bool>() ? "true" : "false";
        break;
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned:
    case Value::value_t::number_float:
        out += format_number(v.get<double>());
        break;
    case Value::value_t::string:
        out += Value(v.get<std::string>()).dump();
        break;
    case Value::value_t::array: {
        out += '[';
        bool first = true;
        for (const auto& e : v) {
            if (!first)
                out += ',';
            first = false;
            dump_compact(e, out);
        }
        out += ']';
        break;
    }
    case Value::value_t::object: {
        out += '{';
        bool first = true;
        for (const auto& [k, e] : v.items()) {
            if (!first)
                out += ',';
            first = false;
            out += Value(k).dump();
            out += ':';
            dump_compact(e, out);
        }
        out += '}';
        break;
    }
    default:
        out += "null";
        break;
    }
}

} // namespace

std::string compact_json(const Value& v)
{
    std::string out;
    dump_compact(v, out);
    return out;
}

std::string display_string(const Value& v)
{
    switch (v.type()) {
    case Value::value_t::null:
        return {};
    case Value::value_t::string:
        return v.get<std::string>();
    default:
        return compact_json(v);
    }
}

bool truthy(const Value& v)
{
    switch (v.type()) {
    case Value::value_t::null:
    case Value::value_t::discarded:
        return false;
    case Value::value_t::boolean:
        return v.get<bool>();
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned:
    case Value::value_t::number_float: {
        double d = v.get<double>();
        return d != 0 && !std::isnan(d);
    }
    case Value::value_t::string:
        return !v.get_ref<const std::string&>().empty();
    case Value::value_t::array:
        return !v.empty();
    default:
        return true;
    }
}

Value normalize_numbers(const Value& v)
{
    switch (v.type()) {
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned:
        return Value(v.get<double>());
    case Value::value_t::array: {
        Value out = Value::array();
        for (const auto& e : v)
            out.push_back(normalize_numbers(e));
        return out;
    }
    case Value::value_t::object: {
        Value out = Value::object();
        for (const auto& [k, e] : v.items())
            out[k] = normalize_numbers(e);
        return out;
    }
    default:
        return v;
    }
}

std::string type_name(const Value& v)
{
    switch (v.type()) {
    case Value::value_t::null: return "null";
    case Value::value_t::boolean: return "boolean";
    case Value::value_t::string: return "string";
    case Value::value_t::array: return "array";
    case Value::value_t::object: return "object";
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned:
    case Value::value_t::number_float: return "number";
    default: return "unknown";
    }
}

} // namespace poml
