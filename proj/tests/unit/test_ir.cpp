#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "poml/ir.hpp"
#include "poml/writers.hpp"

using namespace poml;

namespace {

IRNode text(std::string s)
{
    return IRNode::make_text(std::move(s));
}

IRNode sample(IRKind kind)
{
    switch (kind) {
    case IRKind::any: return IRNode::make(kind).set("type", "integer").set("name", "count");
    case IRKind::code: return IRNode::make(kind, {text("x = 1")}).set("inline", false).set("lang", "python");
    case IRKind::env: return IRNode::make(kind, {IRNode::make(IRKind::p, {text("e")})}).set("presentation", "markup").set("markup-lang", "html");
    case IRKind::h: return IRNode::make(kind, {text("Head")}).set("level", 3);
    case IRKind::img: return IRNode::make(kind).set("base64", "iVBORw0KGgo=").set("type", "image/png").set("alt", "pic");
    case IRKind::item: return IRNode::make(IRKind::list, {IRNode::make(kind, {text("i")})});
    case IRKind::list: return IRNode::make(kind, {IRNode::make(IRKind::item, {text("a")})}).set("list-style", "decimal");
    case IRKind::nl: return IRNode::make(kind).set("count", 2);
    case IRKind::obj: return IRNode::make(kind).set("data", Value::parse(R"({"b": [1, 2], "a": null})"));
    case IRKind::table:
    case IRKind::thead:
    case IRKind::tbody:
    case IRKind::trow:
    case IRKind::tcell: {
        IRNode head = IRNode::make(IRKind::thead, {IRNode::make(IRKind::trow, {IRNode::make(IRKind::tcell, {text("h")})})});
        IRNode body = IRNode::make(IRKind::tbody, {IRNode::make(IRKind::trow, {IRNode::make(IRKind::tcell, {text("v")})})});
        return IRNode::make(IRKind::table, {head, body});
    }
    case IRKind::text: return text("x").set("speaker", "ai");
    default: return IRNode::make(kind, {text("inner")}).set("original-start-index", 0).set("original-end-index", 4);
    }
}

IRNode random_tree(std::mt19937& rng, int depth)
{
    std::uniform_int_distribution<int> roll(0, 11);
    auto pick_text = [&] {
        static const std::vector<std::string> words = {"a", "b c", "x<y", "&amp;", "é", "|", "*", "line\nbreak", "\"q\""};
        return words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
    };
    if (depth > 3)
        return text(pick_text());
    std::vector<IRNode> kids;
    int n = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int k = 0; k < n; ++k)
        kids.push_back(random_tree(rng, depth + 1));
    switch (roll(rng)) {
    case 0: return IRNode::make(IRKind::p, std::move(kids));
    case 1: return IRNode::make(IRKind::b, std::move(kids));
    case 2: return IRNode::make(IRKind::h, std::move(kids)).set("level", std::uniform_int_distribution<int>(1, 6)(rng));
    case 3: {
        std::vector<IRNode> items;
        for (auto& k : kids)
            items.push_back(IRNode::make(IRKind::item, {std::move(k)}));
        return IRNode::make(IRKind::list, std::move(items));
    }
    case 4: return sample(IRKind::table);
    case 5: return IRNode::make(IRKind::span, std::move(kids)).set("speaker", "ai");
    case 6: return IRNode::make(IRKind::i, std::move(kids));
    case 7: return sample(IRKind::obj);
    case 8: return IRNode::make(IRKind::env, std::move(kids)).set("presentation", "markup").set("markup-lang", "xml");
    case 9: return IRNode::make(IRKind::code, {text(pick_text())}).set("inline", false);
    case 10: return sample(IRKind::nl);
    default: return text(pick_text());
    }
}

} // namespace

TEST_SUITE("ir") {

TEST_CASE("kind names round-trip")
{
    for (IRKind k : all_ir_kinds)
        CHECK(ir_kind_from_string(to_string(k)) == k);
    CHECK_FALSE(ir_kind_from_string("video").has_value());
}

TEST_CASE("text node serialization")
{
    CHECK(serialize_ir(text("x")) == R"({"kind":"text","text":"x"})");
}

TEST_CASE("every kind validates, round-trips and is canonical")
{
    for (IRKind k : all_ir_kinds) {
        IRNode n = sample(k);
        INFO(to_string(k));
        CHECK(validate(n).empty());
        std::string json = serialize_ir(n);
        DeserializeResult back = deserialize_ir(json);
        REQUIRE(back.node.has_value());
        CHECK(back.diagnostics.empty());
        CHECK(*back.node == n);
        CHECK(serialize_ir(*back.node) == json);
    }
}

TEST_CASE("deserialization canonicalizes key order and whitespace")
{
    DeserializeResult r = deserialize_ir(R"( { "text" : "x", "kind" : "text", "attributes": {"speaker": "ai", "original-end-index": 1} } )");
    REQUIRE(r.node);
    CHECK(serialize_ir(*r.node) == R"({"attributes":{"original-end-index":1,"speaker":"ai"},"kind":"text","text":"x"})");
}

TEST_CASE("heading level out of range")
{
    IRNode h = IRNode::make(IRKind::h, {text("x")}).set("level", 7);
    Diagnostics d = validate(h);
    CHECK(d.size() == 1);
    CHECK(d[0].code == "ir-invalid");
}

TEST_CASE("table cell directly under table")
{
    IRNode t = IRNode::make(IRKind::table, {IRNode::make(IRKind::tcell, {text("x")})});
    CHECK(validate(t).size() == 1);
}

TEST_CASE("other invariants")
{
    CHECK(validate(IRNode::make(IRKind::item, {text("x")})).size() == 1);
    CHECK(validate(IRNode::make(IRKind::env)).size() == 1);
    CHECK(validate(IRNode::make(IRKind::nl).set("count", 0)).size() == 1);
    CHECK(validate(IRNode::make(IRKind::p).set("wibble", 1)).size() == 1);
    CHECK(validate(IRNode::make(IRKind::list).set("list-style", "zigzag")).size() == 1);
    CHECK(validate(IRNode::make(IRKind::nl, {text("x")})).size() == 1);
    CHECK(validate(IRNode::make(IRKind::p).set("original-start-index", 5).set("original-end-index", 2)).size() == 1);
}

TEST_CASE("unknown kinds and malformed input are rejected")
{
    DeserializeResult video = deserialize_ir(R"({"kind":"video"})");
    CHECK_FALSE(video.node);
    REQUIRE(video.diagnostics.size() == 1);
    CHECK(video.diagnostics[0].code == "unknown-kind");

    DeserializeResult bad = deserialize_ir("{");
    CHECK_FALSE(bad.node);
    CHECK(bad.diagnostics.at(0).code == "malformed-json");

    for (const char* broken : {R"({"kind":"h","attributes":{"level":9},"children":[{"kind":"text","text":"x"}]})",
                               R"({"kind":"p","children":{}})", R"({"kind":"p","extra":1})", R"([1])"}) {
        DeserializeResult r = deserialize_ir(broken);
        CHECK_MESSAGE(!r.node, broken);
        REQUIRE_FALSE(r.diagnostics.empty());
        CHECK(r.diagnostics[0].code == "invariant-violation");
    }
}

TEST_CASE("syntax errors win over structural ones")
{
    DeserializeResult r = deserialize_ir(R"({"kind":"video","children":[1, )");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].code == "malformed-json");
}

TEST_CASE("nested attribute values keep their key order")
{
    const std::string json = R"({"attributes":{"data":{"zeta":1,"alpha":{"b":[true,null],"a":2.5}}},"kind":"obj"})";
    DeserializeResult r = deserialize_ir(json);
    REQUIRE(r.node);
    CHECK(r.node->attributes["data"].begin().key() == "zeta");
    CHECK(serialize_ir(*r.node) == json);
}

TEST_CASE("overly deep input is rejected without crashing")
{
    std::string json;
    for (int i = 0; i < 5000; ++i)
        json += R"({"kind":"span","children":[)";
    json += R"({"kind":"text","text":"x"})";
    for (int i = 0; i < 5000; ++i)
        json += "]}";
    DeserializeResult r = deserialize_ir(json);
    CHECK_FALSE(r.node);
    CHECK(r.diagnostics.at(0).code == "invariant-violation");
}

TEST_CASE("random valid trees round-trip and every writer accepts them")
{
    std::mt19937 rng(21);
    for (int i = 0; i < 500; ++i) {
        IRNode tree = random_tree(rng, 0);
        REQUIRE(validate(tree).empty());
        std::string json = serialize_ir(tree);
        DeserializeResult back = deserialize_ir(json);
        REQUIRE(back.node);
        CHECK(*back.node == tree);
        CHECK(serialize_ir(*back.node) == json);
        for (const char* lang : {"markdown", "html", "xml", "text"}) {
            WriteResult w = write(tree, {lang, "", true});
            CHECK_MESSAGE(w.diagnostics.empty(), lang, " ", json);
        }
        for (const char* ser : {"json", "yaml"}) {
            WriteResult w = write(tree, {"markdown", ser, true});
            for (const auto& d : w.diagnostics)
                CHECK(d.severity == Severity::warning);
        }
    }
}

TEST_CASE("plain text concatenates payloads")
{
    IRNode n = IRNode::make(IRKind::p, {text("a"), IRNode::make(IRKind::b, {text("b")}), text("c")});
    CHECK(plain_text(n) == "abc");
}

}
