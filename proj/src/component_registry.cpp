#include "poml/components.hpp"
#include "poml/source.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

namespace poml {

namespace {

AttributeSpec str(std::string name, std::optional<Value> def = std::nullopt)
{
    return {std::move(name), AttrType::string, {}, std::move(def)};
}

AttributeSpec boolean(std::string name, std::optional<bool> def = std::nullopt)
{
    AttributeSpec a{std::move(name), AttrType::boolean, {}, std::nullopt};
    if (def)
        a.default_value = Value(*def);
    return a;
}

AttributeSpec integer(std::string name, std::optional<double> def = std::nullopt)
{
    AttributeSpec a{std::move(name), AttrType::integer, {}, std::nullopt};
    if (def)
        a.default_value = Value(*def);
    return a;
}

AttributeSpec choice(std::string name, std::vector<std::string> choices, std::optional<std::string> def = std::nullopt)
{
    AttributeSpec a{std::move(name), AttrType::enumeration, std::move(choices), std::nullopt};
    if (def)
        a.default_value = Value(*def);
    return a;
}

AttributeSpec data(std::string name)
{
    return {std::move(name), AttrType::json, {}, std::nullopt};
}

const std::vector<std::string> caption_styles = {"header", "bold", "plain", "hidden"};

std::vector<AttributeSpec> caption_attributes(std::string caption, std::string style, std::string ending)
{
    return {
        str("caption", Value(std::move(caption))),
        choice("captionStyle", caption_styles, std::move(style)),
        choice("captionTextTransform", {"none", "upper"}, "none"),
        choice("captionEnding", {"colon", "none"}, std::move(ending)),
        boolean("blankLine", true),
    };
}

ComponentSpec intention(std::string name, std::string style, std::string ending, std::vector<AttributeSpec> extra = {})
{
    ComponentSpec spec{name, ComponentCategory::intention, caption_attributes(title_case(name), std::move(style), std::move(ending)),
                       "captioned", {}};
    spec.attributes.insert(spec.attributes.end(), extra.begin(), extra.end());
    return spec;
}

ComponentSpec simple(std::string name, ComponentCategory cat, std::string lowering, std::vector<AttributeSpec> attrs = {},
                     std::vector<std::string> aliases = {})
{
    return {std::move(name), cat, std::move(attrs), std::move(lowering), std::move(aliases)};
}

std::vector<ComponentSpec> build_catalog()
{
    using C = ComponentCategory;
    std::vector<ComponentSpec> c;
    c.push_back(simple("poml", C::structural, "root"));
    c.push_back(simple("p", C::structural, "paragraph", {boolean("blankLine", true)}));
    c.push_back(simple("div", C::structural, "paragraph", {boolean("blankLine", true)}));
    for (const char* n : {"span", "b", "i", "u", "s"})
        c.push_back(simple(n, C::structural, "inline"));
    c.push_back(simple("code", C::structural, "code", {boolean("inline", true), str("lang"), boolean("blankLine", true)}));
    c.push_back(simple("h", C::structural, "header", {integer("level")}));
    c.push_back(simple("br", C::structural, "newline", {integer("count", 1)}));
    c.push_back(simple("list", C::structural, "list", {choice("listStyle", {"dash", "star", "plus", "decimal", "latin"}, "dash")}));
    c.push_back(simple("item", C::structural, "item"));

    c.push_back(intention("role", "bold", "colon"));
    c.push_back(intention("task", "bold", "colon"));
    c.push_back(intention("hint", "bold", "colon"));
    c.push_back(intention("output-format", "bold", "colon"));
    c.push_back(intention("stepwise-instructions", "bold", "colon"));
    c.push_back(intention("input", "bold", "none"));
    c.push_back(intention("output", "bold", "none"));
    c.push_back(intention("example", "hidden", "none", {boolean("chat")}));
    c.push_back(intention("examples", "header", "none", {boolean("chat", true), str("introducer", Value(""))}));
    {
        ComponentSpec cp = intention("cp", "header", "none");
        cp.attributes[0].default_value = Value("");
        c.push_back(std::move(cp));
    }
    c.push_back(simple("introducer", C::intention, "introducer", {boolean("blankLine", true)}));

    c.push_back(simple("let", C::template_, "template", {str("name"), str("value"), str("src")}));
    c.push_back(simple("include", C::template_, "template", {str("src")}));
    c.push_back(simple("stylesheet", C::meta, "meta"));

    c.push_back(simple("table", C::data, "table",
                       {str("src"), choice("parser", {"auto", "csv", "tsv", "json"}, "auto"), data("records"), data("columns"),
                        str("selectedRecords"), data("selectedColumns"), boolean("includeHeader", true), boolean("includeIndex", false),
                        boolean("pretty", true)}));
    c.push_back(simple("document", C::data, "document", {str("src"), str("selectedPages")}, {"doc"}));
    c.push_back(simple("folder", C::data, "folder", {str("src"), integer("maxDepth", 3), str("filter"), boolean("showSize", false)}));
    c.push_back(simple("img", C::data, "image",
                       {str("src"), str("base64"), str("type"), str("alt", Value("")), choice("position", {"here", "top", "bottom"}, "here"),
                        integer("maxWidth"), integer("maxHeight")}));
    c.push_back(simple("conversation", C::data, "conversation", {str("src"), data("messages")}));
    return c;
}

std::string fold(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return out;
}

} // namespace

const std::vector<AttributeSpec>& universal_attributes()
{
    static const std::vector<AttributeSpec> attrs = {
        choice("speaker", {"ai", "human", "system"}),
        str("className"),
        str("syntax"),
        choice("whiteSpace", {"pre", "filter"}),
        str("for"),
        str("if"),
        str("else"),
    };
    return attrs;
}

const AttributeSpec* ComponentSpec::find(std::string_view attr) const
{
    for (const auto& a : attributes)
        if (a.name == attr)
            return &a;
    for (const auto& a : universal_attributes())
        if (a.name == attr)
            return &a;
    return nullptr;
}

StyleMap ComponentSpec::defaults() const
{
    StyleMap out;
    for (const auto& a : attributes)
        if (a.default_value)
            out[a.name] = *a.default_value;
    return out;
}

const std::vector<ComponentSpec>& component_catalog()
{
    static const std::vector<ComponentSpec> catalog = build_catalog();
    return catalog;
}

const ComponentSpec* find_component(std::string_view name)
{
    static const std::unordered_map<std::string, const ComponentSpec*> index = [] {
        std::unordered_map<std::string, const ComponentSpec*> m;
        for (const auto& spec : component_catalog()) {
            m.emplace(spec.name, &spec);
            for (const auto& alias : spec.aliases)
                m.emplace(alias, &spec);
        }
        return m;
    }();
    auto it = index.find(std::string(name));
    return it == index.end() ? nullptr : it->second;
}

const std::vector<std::string>& attribute_catalog()
{
    static const std::vector<std::string> names = [] {
        std::set<std::string> all;
        for (const auto& a : universal_attributes())
            all.insert(a.name);
        for (const auto& spec : component_catalog())
            for (const auto& a : spec.attributes)
                all.insert(a.name);
        return std::vector<std::string>(all.begin(), all.end());
    }();
    return names;
}

std::string normalize_attribute_name(std::string_view name)
{
    static const std::unordered_map<std::string, std::string> folded = [] {
        std::unordered_map<std::string, std::string> m;
        for (const auto& n : attribute_catalog())
            m.emplace(fold(n), n);
        return m;
    }();
    auto it = folded.find(fold(name));
    return it == folded.end() ? std::string(name) : it->second;
}

std::string title_case(std::string_view component_name)
{
    std::string out;
    bool start = true;
    for (char ch : component_name) {
        if (ch == '-' || ch == '_') {
            out += ' ';
            start = true;
            continue;
        }
        out += start ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch;
        start = false;
    }
    return out;
}

} // namespace poml
