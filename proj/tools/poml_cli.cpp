#include "poml/poml.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_errors = 1;
constexpr int exit_unusable = 2;

struct Options {
    std::string input;
    std::vector<std::string> stylesheets;
    std::vector<std::string> vars;
    std::string context;
    std::string format = "markdown";
    bool strict = false;
    bool from_ir = false;
    bool json = false;
};

bool use_color()
{
    return std::getenv("POML_NO_COLOR") == nullptr && isatty(fileno(stderr));
}

void print_diagnostics(const char* text)
{
    bool color = use_color();
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!color) {
            std::cerr << line << '\n';
            continue;
        }
        auto space = line.find(' ');
        std::string severity = line.substr(0, space);
        const char* code = severity == "error" ? "\033[31m" : "\033[33m";
        std::cerr << code << severity << "\033[0m" << (space == std::string::npos ? "" : line.substr(space)) << '\n';
    }
}

bool read_stdin(std::string& out)
{
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    out = ss.str();
    return !std::cin.bad();
}

bool read_file(const std::string& path, std::string& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return true;
}

struct EngineGuard {
    poml_engine* engine = poml_engine_create();
    ~EngineGuard() { poml_engine_destroy(engine); }
};

struct ResultGuard {
    poml_result* result = nullptr;
    ~ResultGuard() { poml_result_destroy(result); }
};

int fail(const std::string& message)
{
    std::cerr << "poml: " << message << '\n';
    return exit_unusable;
}

/// Applies stylesheets, variables and context. Returns an exit code on
/// failure, or -1.
int configure(poml_engine* engine, const Options& opts)
{
    for (const auto& path : opts.stylesheets) {
        poml_status st = poml_engine_add_stylesheet_file(engine, path.c_str());
        if (st != POML_OK)
            return fail("cannot read stylesheet '" + path + "': " + poml_status_string(st));
    }
    if (!opts.context.empty()) {
        poml_status st = poml_engine_set_context_file(engine, opts.context.c_str());
        if (st != POML_OK)
            return fail("cannot use context '" + opts.context + "': " + poml_status_string(st));
    }
    for (const auto& kv : opts.vars) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            return fail("--var expects name=value, got '" + kv + "'");
        std::string name = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (poml_engine_set_var(engine, name.c_str(), value.c_str()) != POML_OK)
            return fail("cannot bind variable '" + name + "'");
    }
    return -1;
}

/// Runs the pipeline; `format` null means lint.
int run(const Options& opts, const char* format, bool emit_output)
{
    EngineGuard guard;
    if (!guard.engine)
        return fail("out of memory");
    if (int code = configure(guard.engine, opts); code >= 0)
        return code;

    ResultGuard res;
    poml_status st;
    if (opts.from_ir) {
        std::string ir;
        bool ok = opts.input == "-" ? read_stdin(ir) : read_file(opts.input, ir);
        if (!ok)
            return fail("cannot read '" + opts.input + "'");
        st = poml_render_ir(guard.engine, ir.data(), ir.size(), format, &res.result);
    } else if (opts.input == "-") {
        std::string source;
        if (!read_stdin(source))
            return fail("cannot read standard input");
        st = poml_render_source(guard.engine, source.data(), source.size(), nullptr, format, &res.result);
    } else {
        st = poml_render_file(guard.engine, opts.input.c_str(), format, &res.result);
    }

    if (res.result) {
        if (opts.json)
            std::cout << poml_result_diagnostics_json(res.result) << '\n';
        else
            print_diagnostics(poml_result_diagnostics_text(res.result));
    }
    if (st != POML_OK) {
        if (st == POML_ERR_IO)
            return fail("cannot read '" + opts.input + "'");
        return fail(poml_status_string(st));
    }
    if (emit_output) {
        size_t length = 0;
        const char* out = poml_result_output(res.result, &length);
        std::cout.write(out, static_cast<std::streamsize>(length));
        std::cout.flush();
    }
    bool failed = poml_result_error_count(res.result) > 0 || (opts.strict && poml_result_warning_count(res.result) > 0);
    return failed ? exit_errors : exit_ok;
}

void common_flags(CLI::App* cmd, Options& opts)
{
    cmd->add_option("input", opts.input, "POML file, or - for standard input")->required();
    cmd->add_option("--stylesheet", opts.stylesheets, "JSON stylesheet; repeatable, later ones win")->allow_extra_args(false);
    cmd->add_option("--var", opts.vars, "String variable name=value; repeatable")->allow_extra_args(false);
    cmd->add_option("--context", opts.context, "JSON file holding an object merged into the template scope");
    cmd->add_flag("--strict", opts.strict, "Treat warnings as failures");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Render, lint and inspect POML prompt files"};
    app.set_version_flag("--version", poml_version());
    app.require_subcommand(1);

    Options render_opts;
    CLI::App* render = app.add_subcommand("render", "Render a file to markdown, text, html, xml or chat messages");
    common_flags(render, render_opts);
    render->add_option("--format", render_opts.format, "Output format")
        ->check(CLI::IsMember({"markdown", "text", "html", "xml", "chat-json", "ir-json"}));
    render->add_flag("--from-ir", render_opts.from_ir, "Input is canonical IR JSON (as printed by `poml ir`)");

    Options lint_opts;
    CLI::App* lint = app.add_subcommand("lint", "Report every diagnostic without writing output");
    common_flags(lint, lint_opts);
    lint->add_flag("--json", lint_opts.json, "Print diagnostics as a JSON array on stdout");

    Options ir_opts;
    CLI::App* ir = app.add_subcommand("ir", "Print the canonical IR JSON");
    common_flags(ir, ir_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_unusable;
    }

    if (render->parsed())
        return run(render_opts, render_opts.format.c_str(), true);
    if (lint->parsed())
        return run(lint_opts, nullptr, false);
    return run(ir_opts, "ir-json", true);
}
