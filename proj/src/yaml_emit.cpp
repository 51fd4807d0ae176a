#include "poml/value.hpp"

#include <yaml-cpp/yaml.h>

namespace poml {

namespace {

void emit(YAML::Emitter& out, const Value& v)
{
    switch (v.type()) {
    case Value::value_t::null:
        out << YAML::Null;
        break;
    case Value::value_t::boolean:
        out << v.get<bool>();
        break;
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned:
    case Value::value_t::number_float:
        out << format_number(v.get<double>());
        break;
    case Value::value_t::string:
        out << v.get_ref<const std::string&>();
        break;
    case Value::value_t::array:
        out << YAML::BeginSeq;
        for (const auto& item : v)
            emit(out, item);
        out << YAML::EndSeq;
        break;
    case Value::value_t::object:
        out << YAML::BeginMap;
        for (const auto& [key, item] : v.items()) {
            out << YAML::Key << key << YAML::Value;
            emit(out, item);
        }
        out << YAML::EndMap;
        break;
    default:
        out << YAML::Null;
        break;
    }
}

} // namespace

std::string to_yaml(const Value& v)
{
    YAML::Emitter out;
    out.SetNullFormat(YAML::LowerNull);
    out.SetIndent(2);
    emit(out, v);
    return out.c_str();
}

} // namespace poml
