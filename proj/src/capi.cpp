#include "poml/poml.h"

#include "poml/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

struct poml_engine {
    std::vector<poml::NamedStylesheet> stylesheets;
    poml::Value context = poml::Value::object();
    std::vector<std::string> allowed;
};

struct poml_result {
    std::string output;
    std::string diagnostics_text;
    std::string diagnostics_json;
    std::size_t errors = 0;
    std::size_t warnings = 0;
};

namespace {

bool read_file(const std::string& path, std::string& bytes)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    bytes = ss.str();
    return true;
}

std::string canonical(const std::string& path)
{
    std::error_code ec;
    auto p = std::filesystem::weakly_canonical(std::filesystem::absolute(path, ec), ec);
    return ec ? path : p.string();
}

poml_result* make_result(const poml::PipelineResult& r, std::string_view default_file)
{
    auto* out = new poml_result;
    out->output = r.output;
    for (const auto& d : r.diagnostics) {
        out->diagnostics_text += poml::format_diagnostic(d, default_file) + "\n";
        if (d.severity == poml::Severity::error)
            ++out->errors;
        else
            ++out->warnings;
    }
    out->diagnostics_json = poml::diagnostics_to_json(r.diagnostics, default_file).dump(-1, ' ', false, poml::Value::error_handler_t::replace);
    return out;
}

bool format_ok(const char* format)
{
    return !format || poml::is_output_format(format);
}

poml_status render(poml_engine* engine, std::string source, std::string source_path, std::string base_dir, const char* format,
                   poml_result** out)
{
    std::vector<std::string> roots = engine->allowed;
    roots.push_back(base_dir);
    poml::FilesystemLoader loader(roots);

    poml::RenderRequest req;
    req.source = std::move(source);
    req.source_path = source_path;
    req.base_dir = base_dir;
    req.stylesheets = engine->stylesheets;
    req.context = engine->context;
    req.format = format ? format : "";
    req.loader = &loader;
    poml::PipelineResult r = poml::run_pipeline(req);
    *out = make_result(r, source_path.empty() ? "<stdin>" : source_path);
    return POML_OK;
}

} // namespace

extern "C" {

const char* poml_version(void)
{
    return "0.1.0";
}

const char* poml_status_string(poml_status status)
{
    switch (status) {
    case POML_OK: return "ok";
    case POML_ERR_INVALID_ARGUMENT: return "invalid argument";
    case POML_ERR_IO: return "i/o error";
    case POML_ERR_UNUSABLE_INPUT: return "unusable input";
    case POML_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

poml_engine* poml_engine_create(void)
{
    try {
        return new poml_engine;
    } catch (...) {
        return nullptr;
    }
}

void poml_engine_destroy(poml_engine* engine)
{
    delete engine;
}

poml_status poml_engine_add_stylesheet_file(poml_engine* engine, const char* path)
{
    if (!engine || !path)
        return POML_ERR_INVALID_ARGUMENT;
    try {
        std::string bytes;
        if (!read_file(path, bytes))
            return POML_ERR_IO;
        engine->stylesheets.push_back({path, std::move(bytes)});
        return POML_OK;
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

poml_status poml_engine_add_stylesheet_json(poml_engine* engine, const char* json, const char* name)
{
    if (!engine || !json)
        return POML_ERR_INVALID_ARGUMENT;
    try {
        engine->stylesheets.push_back({name ? name : "<stylesheet>", json});
        return POML_OK;
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

poml_status poml_engine_set_var(poml_engine* engine, const char* name, const char* value)
{
    if (!engine || !name || !*name || !value)
        return POML_ERR_INVALID_ARGUMENT;
    try {
        engine->context[name] = value;
        return POML_OK;
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

poml_status poml_engine_set_context_json(poml_engine* engine, const char* json)
{
    if (!engine || !json)
        return POML_ERR_INVALID_ARGUMENT;
    try {
        poml::Value v = poml::Value::parse(json, nullptr, false);
        if (v.is_discarded() || !v.is_object())
            return POML_ERR_UNUSABLE_INPUT;
        for (auto& [k, item] : v.items())
            engine->context[k] = item;
        return POML_OK;
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

poml_status poml_engine_set_context_file(poml_engine* engine, const char* path)
{
    if (!engine || !path)
        return POML_ERR_INVALID_ARGUMENT;
    std::string bytes;
    if (!read_file(path, bytes))
        return POML_ERR_IO;
    return poml_engine_set_context_json(engine, bytes.c_str());
}

poml_status poml_engine_allow_path(poml_engine* engine, const char* path)
{
    if (!engine || !path)
        return POML_ERR_INVALID_ARGUMENT;
    try {
        engine->allowed.push_back(canonical(path));
        return POML_OK;
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

poml_status poml_render_file(poml_engine* engine, const char* path, const char* format, poml_result** out)
{
    if (!engine || !path || !out || !format_ok(format))
        return POML_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    try {
        std::string bytes;
        if (!read_file(path, bytes))
            return POML_ERR_IO;
        std::string canon = canonical(path);
        return render(engine, std::move(bytes), canon, std::filesystem::path(canon).parent_path().string(), format, out);
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

poml_status poml_render_source(poml_engine* engine, const char* source, size_t length, const char* base_dir, const char* format,
                               poml_result** out)
{
    if (!engine || (!source && length) || !out || !format_ok(format))
        return POML_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    try {
        std::string base = canonical(base_dir ? base_dir : std::filesystem::current_path().string());
        return render(engine, std::string(source ? source : "", length), "", base, format, out);
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

poml_status poml_render_ir(poml_engine* engine, const char* ir_json, size_t length, const char* format, poml_result** out)
{
    if (!engine || (!ir_json && length) || !out || !format_ok(format))
        return POML_ERR_INVALID_ARGUMENT;
    *out = nullptr;
    try {
        poml::PipelineResult r = poml::render_ir_json(std::string_view(ir_json ? ir_json : "", length), format ? format : "");
        *out = make_result(r, "<ir>");
        return r.ir ? POML_OK : POML_ERR_UNUSABLE_INPUT;
    } catch (...) {
        return POML_ERR_INTERNAL;
    }
}

const char* poml_result_output(const poml_result* result, size_t* length)
{
    if (!result) {
        if (length)
            *length = 0;
        return "";
    }
    if (length)
        *length = result->output.size();
    return result->output.c_str();
}

size_t poml_result_error_count(const poml_result* result)
{
    return result ? result->errors : 0;
}

size_t poml_result_warning_count(const poml_result* result)
{
    return result ? result->warnings : 0;
}

const char* poml_result_diagnostics_text(const poml_result* result)
{
    return result ? result->diagnostics_text.c_str() : "";
}

const char* poml_result_diagnostics_json(const poml_result* result)
{
    return result ? result->diagnostics_json.c_str() : "[]";
}

void poml_result_destroy(poml_result* result)
{
    delete result;
}

} // extern "C"
