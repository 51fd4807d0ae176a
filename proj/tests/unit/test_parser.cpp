#include <doctest.h>

#include "helpers.hpp"
#include "poml/source.hpp"

using namespace poml;

namespace {

const SourceNode& only_child(const SourceNode& n)
{
    REQUIRE(n.children.size() == 1);
    return n.children.front();
}

std::size_t count_elements(const SourceNode& n, std::string_view name, std::string_view text)
{
    std::size_t hits = 0;
    testing::walk(n, [&](const SourceNode& e) {
        if (e.is_element(name) && e.children.size() == 1 && e.children[0].text == text)
            ++hits;
    });
    return hits;
}

struct Generated {
    std::string markup;
    std::vector<std::string> raw_elements; // pre-order
};

void generate_element(std::mt19937& rng, int depth, std::string& out, std::vector<std::string>& raws)
{
    static const std::vector<std::string> names = {"p", "b", "i", "task", "role", "list", "item", "span", "cp"};
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    std::uniform_int_distribution<int> coin(0, 3);
    std::string name = names[pick(rng)];
    std::size_t slot = raws.size();
    raws.emplace_back();
    std::string el = "<" + name;
    if (coin(rng) == 0)
        el += " caption=\"c&amp;d\"";
    if (coin(rng) == 0) {
        el += "/>";
        raws[slot] = el;
        out += el;
        return;
    }
    el += ">";
    int kids = depth > 3 ? 0 : coin(rng);
    for (int k = 0; k < kids; ++k) {
        if (coin(rng) < 2) {
            el += "text " + std::to_string(k) + " &lt;ok&gt; ";
        } else {
            std::string child;
            generate_element(rng, depth + 1, child, raws);
            el += child;
        }
    }
    el += "</" + name + ">";
    raws[slot] = el;
    out += el;
}

Generated generate_document(std::mt19937& rng)
{
    Generated g;
    std::uniform_int_distribution<int> count(1, 4);
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
        g.markup += "lead ";
        generate_element(rng, 0, g.markup, g.raw_elements);
    }
    return g;
}

} // namespace

TEST_SUITE("parser") {

TEST_CASE("minimal element")
{
    ParseResult r = parse("<p>hi</p>");
    CHECK(r.diagnostics.empty());
    const SourceNode& p = only_child(r.root);
    CHECK(p.is_element("p"));
    const SourceNode& t = only_child(p);
    CHECK(t.kind == SourceKind::text);
    CHECK(t.text == "hi");
}

TEST_CASE("plain text is kept verbatim")
{
    ParseResult r = parse("Hello world");
    CHECK(r.diagnostics.empty());
    CHECK(r.root.synthetic);
    const SourceNode& t = only_child(r.root);
    CHECK(t.kind == SourceKind::text);
    CHECK(t.text == "Hello world");
    CHECK(testing::render("Hello world", "text").output == "Hello world\n");
}

TEST_CASE("unclosed tags are closed at end of input")
{
    ParseResult r = parse("<b>unclosed <i>x");
    CHECK(r.diagnostics.size() == 2);
    for (const auto& d : r.diagnostics)
        CHECK(d.code == "unclosed-tag");
    const SourceNode& b = only_child(r.root);
    REQUIRE(b.is_element("b"));
    REQUIRE(b.children.size() == 2);
    CHECK(b.children[0].text == "unclosed ");
    CHECK(b.children[1].is_element("i"));
    CHECK(only_child(b.children[1]).text == "x");
}

TEST_CASE("mismatched close tag closes the nearest matching element")
{
    ParseResult r = parse("<p><b>x</p>y");
    REQUIRE(r.diagnostics.size() == 1);
    const SourceNode& p = r.root.children.at(0);
    CHECK(p.is_element("p"));
    CHECK(p.children.at(0).is_element("b"));
    CHECK(r.root.children.at(1).text == "y");
}

TEST_CASE("stray close tag is reported once")
{
    ParseResult r = parse("<p>a</i>b</p>");
    CHECK(r.diagnostics.size() == 1);
    CHECK(testing::dump(r.root).find("T\"a\"") != std::string::npos);
}

TEST_CASE("single poml element becomes the root")
{
    ParseResult r = parse("  <poml><p>x</p></poml>\n");
    CHECK(r.root.is_element("poml"));
    CHECK_FALSE(r.root.synthetic);
    ParseResult two = parse("<p>a</p><p>b</p>");
    CHECK(two.root.synthetic);
    CHECK(two.root.children.size() == 2);
}

TEST_CASE("comments are kept as comment nodes")
{
    ParseResult r = parse("a<!-- note -->b");
    REQUIRE(r.root.children.size() == 3);
    CHECK(r.root.children[1].kind == SourceKind::comment);
    CHECK(testing::render("a<!-- note -->b", "text").output == "ab\n");
}

TEST_CASE("attribute names are case-insensitive")
{
    CHECK(normalize_attribute_name("selectedPages") == "selectedPages");
    CHECK(normalize_attribute_name("SELECTEDPAGES") == "selectedPages");
    CHECK(normalize_attribute_name("listStyle") == "listStyle");
    CHECK(normalize_attribute_name("liststyle") == "listStyle");
    CHECK(normalize_attribute_name("dataTag") == "dataTag");
    ParseResult r = parse("<list LISTSTYLE=\"decimal\"/>");
    CHECK(only_child(r.root).attribute("listStyle") != nullptr);
}

TEST_CASE("duplicate attributes keep the first")
{
    ParseResult r = parse("<p caption=\"a\" CAPTION=\"b\">x</p>");
    REQUIRE(r.diagnostics.size() == 1);
    const SourceNode& p = only_child(r.root);
    CHECK(p.attributes.size() == 1);
    CHECK(p.attribute("caption")->value == "a");
}

TEST_CASE("unquoted attribute values are accepted with a warning")
{
    ParseResult r = parse("<p caption=hello>x</p>");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].severity == Severity::warning);
    CHECK(only_child(r.root).attribute("caption")->value == "hello");
}

TEST_CASE("valueless attributes")
{
    ParseResult r = parse("<p else>x</p>");
    CHECK(r.diagnostics.empty());
    const SourceAttribute* a = only_child(r.root).attribute("else");
    REQUIRE(a != nullptr);
    CHECK_FALSE(a->has_value);
}

TEST_CASE("entities")
{
    ParseResult r = parse("&lt;&gt;&amp;&quot;&apos;&#65;&#x42;");
    CHECK(r.diagnostics.empty());
    CHECK(only_child(r.root).text == "<>&\"'AB");

    ParseResult unknown = parse("a &nope; b");
    REQUIRE(unknown.diagnostics.size() == 1);
    CHECK(unknown.diagnostics[0].severity == Severity::warning);
    CHECK(only_child(unknown.root).text == "a &nope; b");

    ParseResult attr = parse("<p caption=\"x &amp; y\"/>");
    CHECK(only_child(attr.root).attribute("caption")->value == "x & y");
}

TEST_CASE("self-closing elements")
{
    ParseResult r = parse("<br/><p/>");
    CHECK(r.diagnostics.empty());
    REQUIRE(r.root.children.size() == 2);
    CHECK(r.root.children[0].children.empty());
}

TEST_CASE("whitespace is preserved in text nodes")
{
    ParseResult r = parse("<p>  a \n\n b  </p>");
    CHECK(only_child(only_child(r.root)).text == "  a \n\n b  ");
}

TEST_CASE("expression holes")
{
    ParseResult r = parse("a {{ x + 1 }} b");
    REQUIRE(r.root.children.size() == 3);
    CHECK(r.root.children[1].kind == SourceKind::expression_hole);
    CHECK(r.root.children[1].text == "x + 1");
}

TEST_CASE("invalid UTF-8 runs become one replacement each")
{
    std::string src = "a\xff\xfe b \xc3";
    ParseResult r = parse(src);
    CHECK(r.diagnostics.size() == 2);
    CHECK(only_child(r.root).text == "a\xEF\xBF\xBD b \xEF\xBF\xBD");
    CHECK(sanitize_utf8("ok \xE2\x82\xAC") == "ok \xE2\x82\xAC");
}

TEST_CASE("nesting beyond the depth limit is dropped with an error")
{
    std::string deep;
    for (int i = 0; i < 300; ++i)
        deep += "<p>";
    deep += "x";
    ParseResult r = parse(deep);
    CHECK(testing::count_code(r.diagnostics, "max-depth-exceeded") == 1);
    std::size_t depth = 0;
    const SourceNode* n = &r.root;
    while (!n->children.empty() && n->children.front().kind == SourceKind::element) {
        n = &n->children.front();
        ++depth;
    }
    CHECK(depth <= 256);
}

TEST_CASE("three independent problems are all reported")
{
    ParseResult r = parse("<p a=1>x &zz; <b>y");
    CHECK(r.diagnostics.size() >= 3);
}

TEST_CASE("totality and span bounds on random bytes")
{
    std::mt19937 rng(7);
    for (int i = 0; i < 1500; ++i) {
        std::string src = i % 2 ? testing::random_bytes(rng, 200) : testing::random_markup(rng, 40);
        ParseResult r = parse(src);
        bool ok = true;
        std::function<void(const SourceNode&)> check = [&](const SourceNode& n) {
            if (n.span.start > n.span.end || n.span.end > src.size())
                ok = false;
            for (const auto& c : n.children) {
                if (!n.span.contains(c.span))
                    ok = false;
                check(c);
            }
        };
        check(r.root);
        for (const auto& d : r.diagnostics)
            if (d.span.start > d.span.end || d.span.end > src.size())
                ok = false;
        REQUIRE_MESSAGE(ok, "input #", i);
    }
}

TEST_CASE("spans reconstruct the raw element text")
{
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        Generated g = generate_document(rng);
        ParseResult r = parse(g.markup);
        REQUIRE_MESSAGE(r.diagnostics.empty(), g.markup);
        std::vector<std::string> seen;
        testing::walk(r.root, [&](const SourceNode& n) {
            if (n.kind == SourceKind::element && !n.synthetic && &n != &r.root)
                seen.push_back(g.markup.substr(n.span.start, n.span.end - n.span.start));
        });
        if (!r.root.synthetic)
            seen.insert(seen.begin(), g.markup.substr(r.root.span.start, r.root.span.end - r.root.span.start));
        CHECK(seen == g.raw_elements);
        testing::walk(r.root, [&](const SourceNode& n) {
            if (n.kind == SourceKind::text && n.text.find('<') == std::string::npos && n.text.find('&') == std::string::npos)
                CHECK(g.markup.substr(n.span.start, n.span.end - n.span.start) == n.text);
        });
    }
}

TEST_CASE("parsing is deterministic")
{
    std::mt19937 rng(3);
    for (int i = 0; i < 200; ++i) {
        std::string src = testing::random_markup(rng, 30);
        ParseResult a = parse(src);
        ParseResult b = parse(src);
        CHECK(testing::dump(a.root) == testing::dump(b.root));
        CHECK(a.diagnostics == b.diagnostics);
    }
}

TEST_CASE("well-formed markup after a broken prefix still parses")
{
    const std::vector<std::string> prefixes = {"<b>unclosed <i>x", "<p a=1>", "</x></y>", "<p>{{ 1 + ", "&bogus; <", "<!-- open",
                                               "<task><role>", "\xff\xfe<p"};
    for (const auto& prefix : prefixes) {
        std::string src = prefix;
        std::size_t previous = 0;
        for (int k = 1; k <= 4; ++k) {
            src += "<p>t" + std::to_string(k) + "</p>";
            ParseResult r = parse(src);
            std::size_t found = 0;
            for (int j = 1; j <= k; ++j)
                found += count_elements(r.root, "p", "t" + std::to_string(j));
            CHECK_MESSAGE(found >= previous, prefix);
            previous = found;
        }
        if (prefix.find("<!--") == std::string::npos)
            CHECK_MESSAGE(previous == 4, prefix);
    }
}

}
