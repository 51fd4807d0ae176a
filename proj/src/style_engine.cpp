#include "poml/style.hpp"

#include "poml/components.hpp"

#include <cctype>

namespace poml {

std::string_view to_string(StyleLayer layer)
{
    switch (layer) {
    case StyleLayer::registry_default: return "default";
    case StyleLayer::element_rule: return "element-rule";
    case StyleLayer::class_rule: return "class-rule";
    case StyleLayer::inline_attribute: return "inline";
    case StyleLayer::inherited: return "inherited";
    }
    return "default";
}

const Value* ComputedStyle::get(std::string_view name) const
{
    auto it = attributes.find(name);
    return it == attributes.end() ? nullptr : &it->second;
}

void ComputedStyle::set(const std::string& name, Value value, StyleLayer layer)
{
    attributes[name] = std::move(value);
    provenance[name] = layer;
}

namespace {

bool valid_component_name(std::string_view s)
{
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])))
        return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
            return false;
    return true;
}

bool valid_class_name(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
            return false;
    return true;
}

Value scalar_for(const Value& v)
{
    if (v.is_number())
        return Value(v.get<double>());
    return v;
}

} // namespace

StylesheetResult parse_stylesheet(std::string_view json_text)
{
    StylesheetResult out;
    Value doc = Value::parse(json_text.begin(), json_text.end(), nullptr, false);
    if (doc.is_discarded()) {
        out.diagnostics.push_back(make_error("malformed-json", "stylesheet is not valid JSON"));
        return out;
    }
    if (!doc.is_object()) {
        out.diagnostics.push_back(make_error("not-an-object", "stylesheet must be a JSON object, got " + type_name(doc)));
        return out;
    }
    for (const auto& [key, body] : doc.items()) {
        StyleRule rule;
        if (!key.empty() && key[0] == '.') {
            rule.selector = {StyleSelector::Kind::class_name, key.substr(1)};
            if (!valid_class_name(rule.selector.name)) {
                out.diagnostics.push_back(make_error("bad-selector", "'" + key + "' is not a valid class selector"));
                continue;
            }
        } else {
            std::string name = key;
            for (auto& c : name)
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (!valid_component_name(name)) {
                out.diagnostics.push_back(make_error("bad-selector", "'" + key + "' is not a component name or .class selector"));
                continue;
            }
            if (const ComponentSpec* spec = find_component(name))
                name = spec->name;
            rule.selector = {StyleSelector::Kind::element, name};
        }
        if (!body.is_object()) {
            out.diagnostics.push_back(make_error("bad-rule", "rule for '" + key + "' must be an object"));
            continue;
        }
        for (const auto& [attr, value] : body.items()) {
            if (!value.is_string() && !value.is_number() && !value.is_boolean()) {
                out.diagnostics.push_back(
                    make_error("bad-rule-value", "'" + key + "." + attr + "' must be a string, number or boolean"));
                continue;
            }
            rule.attributes[normalize_attribute_name(attr)] = scalar_for(value);
        }
        out.rules.rules.push_back(std::move(rule));
    }
    return out;
}

ComputedStyle resolve_style(const SourceNode& element, std::span<const StyleRuleSet> sheets, const StyleMap& registry_defaults)
{
    ComputedStyle style;
    for (const auto& [k, v] : registry_defaults)
        style.set(k, v, StyleLayer::registry_default);

    std::string name = element.name;
    if (const ComponentSpec* spec = find_component(name))
        name = spec->name;

    for (const auto& sheet : sheets)
        for (const auto& rule : sheet.rules)
            if (rule.selector.kind == StyleSelector::Kind::element && rule.selector.name == name)
                for (const auto& [k, v] : rule.attributes)
                    style.set(k, v, StyleLayer::element_rule);

    const SourceAttribute* cls = element.attribute("className");
    if (cls && !cls->value.empty())
        for (const auto& sheet : sheets)
            for (const auto& rule : sheet.rules)
                if (rule.selector.kind == StyleSelector::Kind::class_name && rule.selector.name == cls->value)
                    for (const auto& [k, v] : rule.attributes)
                        style.set(k, v, StyleLayer::class_rule);

    for (const auto& a : element.attributes) {
        Value v = a.typed ? *a.typed : (a.has_value ? Value(a.value) : Value(true));
        style.set(a.name, std::move(v), StyleLayer::inline_attribute);
    }
    return style;
}

namespace {

void collect_stylesheets(const SourceNode& node, std::vector<StyleRuleSet>& sheets, Diagnostics& diags)
{
    for (const auto& c : node.children) {
        if (c.is_element("stylesheet")) {
            std::string body;
            for (const auto& t : c.children)
                if (t.kind == SourceKind::text)
                    body += t.text;
            StylesheetResult r = parse_stylesheet(body);
            for (auto& d : r.diagnostics) {
                d.span = c.span;
                d.file = c.origin;
                diags.push_back(std::move(d));
            }
            sheets.push_back(std::move(r.rules));
            continue;
        }
        if (c.kind == SourceKind::element)
            collect_stylesheets(c, sheets, diags);
    }
}

class Styler {
public:
    Styler(std::vector<StyleRuleSet> sheets, Diagnostics& diags) : sheets_(std::move(sheets)), diags_(diags) {}

    ComponentNode style(const SourceNode& n, const ComputedStyle* parent)
    {
        ComponentNode out;
        out.span = n.span;
        out.origin = n.origin;
        if (n.kind != SourceKind::element) {
            out.is_text = true;
            out.text = n.text;
            return out;
        }
        out.name = n.name;
        const ComponentSpec* spec = find_component(n.name);
        if (spec)
            out.name = spec->name;
        out.style = resolve_style(n, sheets_, spec ? spec->defaults() : StyleMap{});

        if (spec) {
            for (const auto& a : n.attributes) {
                if (!spec->find(a.name)) {
                    Diagnostic d = make_warning("unknown-attribute", "<" + n.name + "> does not use attribute '" + a.name + "'", a.span);
                    d.file = n.origin;
                    diags_.push_back(std::move(d));
                }
            }
        }
        if (parent) {
            for (const char* inherit : {"syntax", "speaker"}) {
                if (!out.style.get(inherit))
                    if (const Value* v = parent->get(inherit))
                        out.style.set(inherit, *v, StyleLayer::inherited);
            }
        }
        for (const auto& c : n.children) {
            if (c.kind == SourceKind::comment || c.is_element("stylesheet"))
                continue;
            out.children.push_back(style(c, &out.style));
        }
        return out;
    }

private:
    std::vector<StyleRuleSet> sheets_;
    Diagnostics& diags_;
};

} // namespace

StyledTree apply_styles(const SourceNode& root, std::vector<StyleRuleSet> sheets)
{
    StyledTree out;
    collect_stylesheets(root, sheets, out.diagnostics);
    if (root.is_element("stylesheet")) {
        out.root.name = "poml";
        out.root.span = root.span;
        return out;
    }
    Styler styler(std::move(sheets), out.diagnostics);
    out.root = styler.style(root, nullptr);
    return out;
}

} // namespace poml
