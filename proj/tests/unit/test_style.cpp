#include <doctest.h>

#include <algorithm>
#include <array>

#include "helpers.hpp"
#include "poml/components.hpp"
#include "poml/style.hpp"
#include "poml/template.hpp"

using namespace poml;

namespace {

StyleRuleSet sheet(const std::string& json)
{
    StylesheetResult r = parse_stylesheet(json);
    REQUIRE_MESSAGE(r.diagnostics.empty(), json);
    return r.rules;
}

SourceNode element(const std::string& markup)
{
    ParseResult r = parse(markup);
    REQUIRE(r.root.children.size() == 1);
    return r.root.children.front();
}

StyledTree styled(const std::string& markup, std::vector<StyleRuleSet> sheets = {})
{
    MemoryLoader none;
    ParseResult p = parse(markup);
    ExpandResult e = expand(p.root, Scope(), none);
    return apply_styles(e.root, std::move(sheets));
}

const ComponentNode* find(const ComponentNode& n, std::string_view name)
{
    if (!n.is_text && n.name == name)
        return &n;
    for (const auto& c : n.children)
        if (const ComponentNode* hit = find(c, name))
            return hit;
    return nullptr;
}

void text_leaves(const ComponentNode& n, std::vector<std::string>& out)
{
    if (n.is_text) {
        out.push_back(n.text);
        return;
    }
    for (const auto& c : n.children)
        text_leaves(c, out);
}

std::string json_text(const Value& v)
{
    return v.is_string() ? Value(v.get<std::string>()).dump() : v.dump();
}

/// Source tree whose inline attributes are the computed style of `n`.
SourceNode as_source(const ComponentNode& n)
{
    SourceNode s;
    if (n.is_text) {
        s.kind = SourceKind::text;
        s.text = n.text;
        return s;
    }
    s.name = n.name;
    for (const auto& [k, v] : n.style.attributes) {
        SourceAttribute a;
        a.name = k;
        a.value = v.is_string() ? v.get<std::string>() : v.dump();
        a.typed = v;
        s.attributes.push_back(std::move(a));
    }
    for (const auto& c : n.children)
        s.children.push_back(as_source(c));
    return s;
}

bool same_styles(const ComponentNode& a, const ComponentNode& b)
{
    if (a.is_text != b.is_text || a.children.size() != b.children.size())
        return false;
    if (!a.is_text && a.style.attributes != b.style.attributes)
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!same_styles(a.children[i], b.children[i]))
            return false;
    return true;
}

} // namespace

TEST_SUITE("style") {

TEST_CASE("stylesheet parsing")
{
    StyleRuleSet one = sheet(R"({"table": {"syntax": "csv"}})");
    REQUIRE(one.rules.size() == 1);
    CHECK(one.rules[0].selector == StyleSelector{StyleSelector::Kind::element, "table"});
    CHECK(one.rules[0].attributes.at("syntax") == Value("csv"));

    CHECK(sheet("{}").rules.empty());

    StyleRuleSet cls = sheet(R"({".qa": {"captionStyle": "plain"}})");
    REQUIRE(cls.rules.size() == 1);
    CHECK(cls.rules[0].selector.kind == StyleSelector::Kind::class_name);
    CHECK(cls.rules[0].selector.name == "qa");
}

TEST_CASE("attribute names in sheets are normalized")
{
    StyleRuleSet r = sheet(R"({"list": {"LISTSTYLE": "decimal"}})");
    CHECK(r.rules[0].attributes.count("listStyle") == 1);
}

TEST_CASE("rejected sheets and entries")
{
    for (const char* bad : {"[1,2]", "\"x\"", "{not json"}) {
        StylesheetResult r = parse_stylesheet(bad);
        CHECK(r.rules.rules.empty());
        CHECK(r.diagnostics.size() == 1);
    }
    StylesheetResult partial = parse_stylesheet(R"({"p": 3, "": {"a": 1}, ".": {}, "hint": {"caption": [1]}, "task": {"caption": "T"}})");
    CHECK(partial.diagnostics.size() == 4);
    REQUIRE(partial.rules.rules.size() == 2);
    CHECK(partial.rules.rules[0].selector.name == "hint");
    CHECK(partial.rules.rules[0].attributes.empty());
    CHECK(partial.rules.rules[1].selector.name == "task");
}

TEST_CASE("later keys in one sheet win")
{
    StyleRuleSet r = sheet(R"({"hint": {"caption": "A"}, "hint": {"caption": "B"}})");
    SourceNode hint = element("<hint>x</hint>");
    std::vector<StyleRuleSet> sheets = {r};
    CHECK(resolve_style(hint, sheets, {}).get("caption")->get<std::string>() == "B");
}

TEST_CASE("precedence example")
{
    std::vector<StyleRuleSet> sheets = {sheet(R"({"hint": {"captionStyle": "bold"}})")};
    SourceNode hint = element("<hint captionStyle=\"plain\">x</hint>");
    StyleMap defaults = {{"captionStyle", Value("header")}};
    ComputedStyle s = resolve_style(hint, sheets, defaults);
    CHECK(s.get("captionStyle")->get<std::string>() == "plain");
    CHECK(s.provenance.at("captionStyle") == StyleLayer::inline_attribute);

    ComputedStyle bare = resolve_style(element("<hint>x</hint>"), {}, defaults);
    CHECK(bare.get("captionStyle")->get<std::string>() == "header");
    CHECK(bare.provenance.at("captionStyle") == StyleLayer::registry_default);
}

TEST_CASE("precedence holds for every layer combination and attribute")
{
    std::vector<std::string> attributes;
    for (const auto& a : attribute_catalog())
        if (a != "className")
            attributes.push_back(a);
    REQUIRE(attributes.size() > 10);

    const std::array<StyleLayer, 4> layers = {StyleLayer::registry_default, StyleLayer::element_rule, StyleLayer::class_rule,
                                              StyleLayer::inline_attribute};
    std::size_t checked = 0;
    for (const auto& attr : attributes) {
        for (unsigned mask = 1; mask < 16; ++mask) {
            StyleMap defaults;
            std::string element_rules = "{}";
            std::string class_rules = "{}";
            std::string markup = "<hint className=\"qa\"";
            if (mask & 1)
                defaults[attr] = Value("v0");
            if (mask & 2)
                element_rules = "{\"hint\": {\"" + attr + "\": \"v1\"}}";
            if (mask & 4)
                class_rules = "{\".qa\": {\"" + attr + "\": \"v2\"}}";
            if (mask & 8)
                markup += " " + attr + "=\"v3\"";
            markup += ">x</hint>";

            // Class rules come first in sheet order so precedence, not
            // position, decides.
            std::vector<StyleRuleSet> sheets = {sheet(class_rules), sheet(element_rules)};
            ComputedStyle s = resolve_style(element(markup), sheets, defaults);

            int top = 3;
            while (!(mask & (1u << top)))
                --top;
            const Value* got = s.get(attr);
            REQUIRE(got != nullptr);
            CHECK_MESSAGE(got->get<std::string>() == "v" + std::to_string(top), attr, " mask ", mask);
            CHECK(s.provenance.at(attr) == layers[static_cast<std::size_t>(top)]);
            CHECK(s.provenance.size() == s.attributes.size());
            ++checked;
        }
    }
    CHECK(checked == attributes.size() * 15);
}

TEST_CASE("later sheets override earlier ones")
{
    std::vector<StyleRuleSet> sheets = {sheet(R"({"hint": {"caption": "A"}, ".c": {"caption": "C1"}})"),
                                        sheet(R"({"hint": {"caption": "B"}, ".c": {"caption": "C2"}})")};
    CHECK(resolve_style(element("<hint>x</hint>"), sheets, {}).get("caption")->get<std::string>() == "B");
    CHECK(resolve_style(element("<hint className=\"c\">x</hint>"), sheets, {}).get("caption")->get<std::string>() == "C2");
}

TEST_CASE("syntax and speaker inherit, other attributes do not")
{
    StyledTree t = styled("<poml syntax=\"json\" speaker=\"ai\" caption=\"outer\"><table/><p syntax=\"xml\"><b>x</b></p></poml>");
    const ComponentNode* table = find(t.root, "table");
    REQUIRE(table != nullptr);
    CHECK(table->style.get("syntax")->get<std::string>() == "json");
    CHECK(table->style.provenance.at("syntax") == StyleLayer::inherited);
    CHECK(table->style.get("speaker")->get<std::string>() == "ai");
    CHECK(table->style.get("caption") == nullptr);
    const ComponentNode* b = find(t.root, "b");
    CHECK(b->style.get("syntax")->get<std::string>() == "xml");
}

TEST_CASE("embedded stylesheet wins over external sheets and is removed")
{
    std::vector<StyleRuleSet> external = {sheet(R"({"hint": {"caption": "External"}})")};
    StyledTree t = styled("<poml><stylesheet>{\"hint\": {\"caption\": \"Embedded\"}}</stylesheet><hint>x</hint></poml>", external);
    CHECK(find(t.root, "stylesheet") == nullptr);
    CHECK(find(t.root, "hint")->style.get("caption")->get<std::string>() == "Embedded");
    CHECK(testing::render("<poml><stylesheet>{\"hint\": {\"caption\": \"Tip\"}}</stylesheet><hint>x</hint></poml>").output
          == "**Tip:** x\n");
}

TEST_CASE("unknown attributes warn and are kept")
{
    StyledTree t = styled("<p wibble=\"1\">x</p>");
    CHECK(t.diagnostics.size() == 1);
    CHECK(t.diagnostics[0].code == "unknown-attribute");
    CHECK(find(t.root, "p")->style.get("wibble") != nullptr);
}

TEST_CASE("stylesheets never change authored text")
{
    const std::string markup =
        "<poml><role>analyst</role><task className=\"t\">Summarize <b>this</b>.</task><examples><example><input>q</input>"
        "<output>a</output></example></examples><hint>h</hint><table records='[{\"a\":1}]'/></poml>";
    std::vector<std::string> baseline;
    text_leaves(styled(markup).root, baseline);
    const std::vector<std::string> sheets = {
        R"({"role": {"captionStyle": "hidden"}, "task": {"caption": "Job"}})",
        R"({".t": {"syntax": "json"}, "examples": {"chat": false}})",
        R"({"poml": {"syntax": "xml"}, "hint": {"captionTextTransform": "upper", "captionEnding": "colon"}})",
        R"({"table": {"syntax": "csv"}, "input": {"caption": "Q:"}})"};
    for (const auto& s : sheets) {
        std::vector<std::string> leaves;
        text_leaves(styled(markup, {sheet(s)}).root, leaves);
        CHECK(leaves == baseline);
    }
}

TEST_CASE("resolving a resolved tree is a no-op")
{
    std::vector<StyleRuleSet> sheets = {sheet(R"({"hint": {"captionStyle": "plain"}, ".k": {"caption": "K"}})")};
    StyledTree once = styled("<poml syntax=\"markdown\"><hint className=\"k\">x</hint><list><item>i</item></list></poml>", sheets);
    SourceNode again = as_source(once.root);
    StyledTree twice = apply_styles(again, sheets);
    CHECK(same_styles(once.root, twice.root));
    CHECK(json_text(find(twice.root, "hint")->style.attributes.at("caption")) == "\"K\"");
}

}
