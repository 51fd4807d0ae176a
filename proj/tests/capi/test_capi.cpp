#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstring>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "poml/poml.h"

namespace {

struct Engine {
    poml_engine* handle = poml_engine_create();
    ~Engine() { poml_engine_destroy(handle); }
};

struct Result {
    poml_result* handle = nullptr;
    ~Result() { poml_result_destroy(handle); }

    std::string output() const
    {
        size_t len = 0;
        const char* s = poml_result_output(handle, &len);
        return std::string(s, len);
    }
};

poml_status render(Engine& e, const std::string& src, const char* format, Result& r)
{
    return poml_render_source(e.handle, src.data(), src.size(), "/", format, &r.handle);
}

} // namespace

TEST_CASE("version and status strings")
{
    CHECK(std::strlen(poml_version()) > 0);
    CHECK(std::string(poml_status_string(POML_OK)) != std::string(poml_status_string(POML_ERR_IO)));
}

TEST_CASE("render from memory")
{
    Engine e;
    Result r;
    REQUIRE(render(e, "<role>Data analyst</role>", "markdown", r) == POML_OK);
    CHECK(r.output() == "**Role:** Data analyst\n");
    CHECK(poml_result_error_count(r.handle) == 0);
    CHECK(poml_result_warning_count(r.handle) == 0);
    CHECK(std::string(poml_result_diagnostics_json(r.handle)) == "[]");
}

TEST_CASE("diagnostics are reported through the result")
{
    Engine e;
    Result r;
    REQUIRE(render(e, "<p>a</i>b</p><zzz/>", "markdown", r) == POML_OK);
    CHECK(poml_result_error_count(r.handle) == 2);
    auto diags = nlohmann::json::parse(poml_result_diagnostics_json(r.handle));
    REQUIRE(diags.size() == 2);
    for (const auto& d : diags) {
        CHECK(d.contains("severity"));
        CHECK(d.contains("code"));
        CHECK(d["span"]["start"].get<int>() <= d["span"]["end"].get<int>());
    }
    std::string text = poml_result_diagnostics_text(r.handle);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("invalid arguments")
{
    Engine e;
    poml_result* out = nullptr;
    CHECK(poml_render_source(nullptr, "x", 1, "/", "markdown", &out) == POML_ERR_INVALID_ARGUMENT);
    CHECK(poml_render_source(e.handle, "x", 1, "/", "pdf", &out) == POML_ERR_INVALID_ARGUMENT);
    CHECK(poml_render_source(e.handle, "x", 1, "/", "markdown", nullptr) == POML_ERR_INVALID_ARGUMENT);
    CHECK(poml_engine_set_context_json(e.handle, "[1]") == POML_ERR_UNUSABLE_INPUT);
    CHECK(poml_engine_set_context_json(e.handle, "{") == POML_ERR_UNUSABLE_INPUT);
    CHECK(poml_render_file(e.handle, "/nonexistent/x.poml", "markdown", &out) == POML_ERR_IO);
    CHECK(out == nullptr);
    poml_engine_destroy(nullptr);
    poml_result_destroy(nullptr);
}

TEST_CASE("variables and context")
{
    Engine e;
    REQUIRE(poml_engine_set_var(e.handle, "name", "Ada") == POML_OK);
    REQUIRE(poml_engine_set_context_json(e.handle, R"({"items": [1, 2, 3]})") == POML_OK);
    Result r;
    REQUIRE(render(e, "<p>{{ name }} has {{ items.length }}</p>", "markdown", r) == POML_OK);
    CHECK(r.output() == "Ada has 3\n");
}

TEST_CASE("stylesheets apply in order")
{
    Engine e;
    REQUIRE(poml_engine_add_stylesheet_json(e.handle, R"({"hint": {"caption": "A"}})", "a.json") == POML_OK);
    REQUIRE(poml_engine_add_stylesheet_json(e.handle, R"({"hint": {"caption": "B"}})", "b.json") == POML_OK);
    Result r;
    REQUIRE(render(e, "<hint>x</hint>", "markdown", r) == POML_OK);
    CHECK(r.output() == "**B:** x\n");
}

TEST_CASE("IR round trip")
{
    Engine e;
    Result ir;
    REQUIRE(render(e, "<task>Summarize <b>this</b></task>", "ir-json", ir) == POML_OK);
    std::string json = ir.output();
    Result md;
    REQUIRE(poml_render_ir(e.handle, json.data(), json.size(), "markdown", &md.handle) == POML_OK);
    Result direct;
    REQUIRE(render(e, "<task>Summarize <b>this</b></task>", "markdown", direct) == POML_OK);
    CHECK(md.output() == direct.output());

    Result bad;
    CHECK(poml_render_ir(e.handle, "{\"kind\":\"video\"}", 16, "markdown", &bad.handle) == POML_ERR_UNUSABLE_INPUT);
    REQUIRE(bad.handle != nullptr);
    CHECK(poml_result_error_count(bad.handle) == 1);
}

TEST_CASE("files resolve relative resources")
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "poml-capi-test";
    fs::create_directories(dir);
    std::ofstream(dir / "notes.txt") << "hello from a file\n";
    std::ofstream(dir / "main.poml") << "<poml><document src=\"notes.txt\"/></poml>";
    Engine e;
    Result r;
    REQUIRE(poml_render_file(e.handle, (dir / "main.poml").c_str(), "text", &r.handle) == POML_OK);
    CHECK(r.output() == "hello from a file\n");
    Result lint;
    REQUIRE(poml_render_file(e.handle, (dir / "main.poml").c_str(), nullptr, &lint.handle) == POML_OK);
    CHECK(lint.output().empty());
    fs::remove_all(dir);
}

TEST_CASE("chat messages")
{
    Engine e;
    Result r;
    REQUIRE(render(e, "<examples><example><input>q</input><output>a</output></example></examples>", "chat-json", r) == POML_OK);
    auto msgs = nlohmann::json::parse(r.output());
    REQUIRE(msgs.size() == 2);
    CHECK(msgs[0]["speaker"] == "human");
    CHECK(msgs[1]["speaker"] == "ai");
    CHECK(msgs[1]["content"][0]["text"] == "a");
}
