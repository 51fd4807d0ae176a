#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "poml/components.hpp"

using namespace poml;

namespace {

void collect(const IRNode& n, IRKind kind, std::vector<const IRNode*>& out)
{
    if (n.kind == kind)
        out.push_back(&n);
    for (const auto& c : n.children)
        collect(c, kind, out);
}

std::vector<const IRNode*> all_of(const IRNode& root, IRKind kind)
{
    std::vector<const IRNode*> out;
    collect(root, kind, out);
    return out;
}

bool spans_nest(const IRNode& n, std::size_t limit)
{
    long long start = n.get_int("original-start-index", -1);
    long long end = n.get_int("original-end-index", -1);
    if (start < 0 || end < start || static_cast<std::size_t>(end) > limit)
        return false;
    for (const auto& c : n.children) {
        if (c.get_int("original-start-index", -1) < start || c.get_int("original-end-index", -1) > end)
            return false;
        if (!spans_nest(c, limit))
            return false;
    }
    return true;
}

} // namespace

TEST_SUITE("components") {

TEST_CASE("catalog lookups")
{
    CHECK(find_component("document") != nullptr);
    CHECK(find_component("doc") == find_component("document"));
    CHECK(find_component("nope") == nullptr);
    std::set<std::string> names;
    for (const auto& spec : component_catalog()) {
        CHECK(names.insert(spec.name).second);
        CHECK_FALSE(spec.lowering.empty());
        for (const auto& [attr, value] : spec.defaults())
            CHECK_MESSAGE(spec.find(attr) != nullptr, spec.name, ".", attr);
    }
    for (const char* required : {"role", "task", "output-format", "hint", "examples", "example", "input", "output", "table",
                                 "document", "img", "folder", "conversation", "let", "include", "stylesheet", "list", "item",
                                 "p", "b", "i", "cp", "h", "code"})
        CHECK_MESSAGE(names.count(required) == 1, required);
    const auto& catalog = attribute_catalog();
    CHECK(std::is_sorted(catalog.begin(), catalog.end()));
}

TEST_CASE("title case captions")
{
    CHECK(title_case("output-format") == "Output Format");
    CHECK(title_case("role") == "Role");
}

TEST_CASE("caption blocks")
{
    std::vector<IRNode> bold = caption_block("Question", {"bold", "upper", "colon"}, 1);
    REQUIRE(bold.size() == 1);
    CHECK(bold[0].kind == IRKind::b);
    CHECK(plain_text(bold[0]) == "QUESTION:");

    CHECK(caption_block("Question", {"hidden", "none", "none"}, 1).empty());

    std::vector<IRNode> header = caption_block("Task", {"header", "none", "none"}, 2);
    REQUIRE(header.size() == 1);
    CHECK(header[0].kind == IRKind::h);
    CHECK(header[0].get_int("level", 0) == 2);
    CHECK(plain_text(header[0]) == "Task");

    std::vector<IRNode> plain = caption_block("Note", {"plain", "none", "colon"}, 1);
    REQUIRE(plain.size() == 1);
    CHECK(plain[0].kind == IRKind::text);
    CHECK(plain[0].text == "Note:");

    CHECK(caption_block("x", {"header", "none", "none"}, 9)[0].get_int("level", 0) == 6);
}

TEST_CASE("intention components render with bold captions")
{
    CHECK(testing::render("<role>Data analyst</role>").output == "**Role:** Data analyst\n");
    CHECK(testing::render("<output-format>JSON</output-format>").output == "**Output Format:** JSON\n");
    CHECK(testing::render("<task caption=\"Job\">x</task>").output == "**Job:** x\n");
    CHECK(testing::render("<task captionStyle=\"hidden\">x</task>").output == "x\n");
}

TEST_CASE("header captions nest to depth six")
{
    std::string src;
    const int depth = 8;
    for (int k = 0; k < depth; ++k)
        src += "<cp caption=\"L" + std::to_string(k) + "\" captionStyle=\"header\">";
    src += "body";
    for (int k = 0; k < depth; ++k)
        src += "</cp>";
    testing::Rendered r = testing::render(src);
    CHECK(r.diagnostics.empty());
    std::vector<const IRNode*> heads = all_of(r.ir, IRKind::h);
    REQUIRE(heads.size() == depth);
    for (int k = 0; k < depth; ++k) {
        CHECK(heads[static_cast<std::size_t>(k)]->get_int("level", 0) == std::min(k + 1, 6));
        CHECK(plain_text(*heads[static_cast<std::size_t>(k)]) == "L" + std::to_string(k));
    }
    CHECK(r.output.find("###### L7") != std::string::npos);
}

TEST_CASE("speakers inherit down the tree")
{
    testing::Rendered r = testing::render("<poml><p>h</p><p speaker=\"ai\"><b>x</b><span speaker=\"system\">s</span></p></poml>");
    CHECK(r.diagnostics.empty());
    CHECK(r.ir.get_string("speaker") == "human");
    const IRNode& ai = r.ir.children.at(1);
    CHECK(ai.get_string("speaker") == "ai");
    CHECK(ai.children.at(0).get_string("speaker") == "ai");
    CHECK(ai.children.at(0).children.at(0).get_string("speaker") == "ai");
    CHECK(ai.children.at(1).get_string("speaker") == "system");
}

TEST_CASE("role and task stay with the human speaker")
{
    testing::Rendered r = testing::render("<poml><role>r</role><task>t</task></poml>");
    for (const auto& c : r.ir.children)
        CHECK(c.get_string("speaker") == "human");
}

TEST_CASE("unknown components keep their content")
{
    testing::Rendered r = testing::render("<zzz>kept <b>bold</b></zzz>");
    CHECK(testing::count_code(r.diagnostics, "unknown-component") == 1);
    CHECK(r.output == "kept **bold**\n");
}

TEST_CASE("invalid attribute values fall back to the default")
{
    testing::Rendered r = testing::render("<list listStyle=\"zigzag\"><item>a</item></list>");
    CHECK(testing::count_code(r.diagnostics, "invalid-attribute-value") == 1);
    CHECK(r.output == "- a\n");
    testing::Rendered h = testing::render("<h level=\"nine\">x</h>");
    CHECK(h.diagnostics.size() == 1);
    CHECK(h.output == "# x\n");
}

TEST_CASE("items outside a list")
{
    testing::Rendered r = testing::render("<item>x</item>");
    CHECK(testing::count_code(r.diagnostics, "item-outside-list") == 1);
    CHECK(r.output == "x\n");
    CHECK(validate(r.ir).empty());
}

TEST_CASE("list styles")
{
    CHECK(testing::render("<list listStyle=\"decimal\"><item>a</item><item>b</item></list>").output == "1. a\n2. b\n");
    CHECK(testing::render("<list listStyle=\"star\"><item>a</item></list>").output == "* a\n");
    CHECK(testing::render("<list listStyle=\"latin\"><item>a</item><item>b</item></list>").output == "a. a\nb. b\n");
}

TEST_CASE("examples render as chat turns by default")
{
    const std::string src =
        "<examples><example><input>What is the capital of France?</input><output>Paris</output></example></examples>";
    testing::Rendered chat = testing::render(src);
    CHECK(chat.diagnostics.empty());
    std::vector<const IRNode*> ps = all_of(chat.ir, IRKind::p);
    std::vector<std::string> speakers;
    for (const IRNode* p : ps)
        if (plain_text(*p) == "What is the capital of France?" || plain_text(*p) == "Paris")
            speakers.push_back(p->get_string("speaker"));
    CHECK(speakers == std::vector<std::string>{"human", "ai"});

    testing::Rendered inline_form = testing::render(
        "<examples chat=\"false\" introducer=\"Here are some examples:\"><example><input>q</input><output>a</output></example>"
        "</examples>");
    CHECK(inline_form.diagnostics.empty());
    CHECK(inline_form.output == "# Examples\n\nHere are some examples:\n\n**Input** q\n\n**Output** a\n");
    for (const IRNode* p : all_of(inline_form.ir, IRKind::p))
        CHECK(p->get_string("speaker") == "human");
}

TEST_CASE("spans stay inside their parents")
{
    std::mt19937 rng(5);
    std::size_t checked = 0;
    for (int i = 0; i < 400; ++i) {
        std::string src = testing::random_markup(rng, 25);
        testing::Rendered r = testing::render(src);
        if (r.ir.children.empty() && r.ir.attributes.empty())
            continue;
        CHECK_MESSAGE(spans_nest(r.ir, src.size()), src);
        ++checked;
    }
    CHECK(checked > 300);
}

TEST_CASE("lowering preserves the order of authored text")
{
    testing::Rendered r = testing::render("<poml><task>alpha <b>beta</b> gamma</task><p>delta</p><hint>epsilon</hint></poml>");
    std::string text = plain_text(r.ir);
    std::size_t at = 0;
    for (const char* word : {"alpha", "beta", "gamma", "delta", "epsilon"}) {
        std::size_t found = text.find(word, at);
        REQUIRE_MESSAGE(found != std::string::npos, word);
        at = found;
    }
}

TEST_CASE("lowered trees validate")
{
    std::mt19937 rng(9);
    for (int i = 0; i < 400; ++i) {
        std::string src = testing::random_markup(rng, 25);
        testing::Rendered r = testing::render(src);
        CHECK_MESSAGE(validate(r.ir).empty(), src);
    }
}

TEST_CASE("syntax switches produce env nodes")
{
    testing::Rendered r = testing::render("<p>a<div syntax=\"html\"><b>x</b></div></p>");
    std::vector<const IRNode*> envs = all_of(r.ir, IRKind::env);
    REQUIRE(envs.size() == 1);
    CHECK(envs[0]->get_string("markup-lang") == "html");
    CHECK(r.output.find("<b>x</b>") != std::string::npos);

    testing::Rendered json = testing::render("<poml syntax=\"json\"><task>x</task></poml>");
    CHECK(json.diagnostics.empty());
    CHECK(Value::parse(json.output) == Value::parse(R"({"Task": "x"})"));
}

TEST_CASE("pre-formatted text keeps whitespace")
{
    testing::Rendered r = testing::render("<code inline=\"false\">a  b\n  c</code>");
    CHECK(r.output == "```\na  b\n  c\n```\n");
    CHECK(testing::render("<p>a   b\n\n c</p>").output == "a b c\n");
}

}
