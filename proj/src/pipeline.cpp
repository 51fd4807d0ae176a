#include "poml/pipeline.hpp"

#include "poml/components.hpp"
#include "poml/source.hpp"
#include "poml/style.hpp"
#include "poml/template.hpp"
#include "poml/writers.hpp"

namespace poml {

bool is_output_format(std::string_view format)
{
    for (std::string_view f : {"markdown", "text", "html", "xml", "chat-json", "ir-json"})
        if (f == format)
            return true;
    return false;
}

std::string write_format(const IRNode& ir, std::string_view format, Diagnostics& diags)
{
    if (format == "ir-json")
        return serialize_ir(ir) + "\n";
    if (format == "chat-json") {
        WriterOptions opts;
        return messages_to_json(split_messages(ir, opts));
    }
    WriterOptions opts;
    opts.markup_lang = std::string(format);
    WriteResult r = write(ir, opts);
    append(diags, r.diagnostics);
    return std::move(r.output);
}

PipelineResult run_pipeline(const RenderRequest& request)
{
    PipelineResult out;
    MemoryLoader no_files;
    const ResourceLoader& loader = request.loader ? *request.loader : no_files;

    std::vector<StyleRuleSet> sheets;
    for (const auto& sheet : request.stylesheets) {
        StylesheetResult parsed = parse_stylesheet(sheet.json);
        for (auto& d : parsed.diagnostics) {
            d.file = sheet.name;
            out.diagnostics.push_back(std::move(d));
        }
        sheets.push_back(std::move(parsed.rules));
    }

    ParseResult parsed = parse(request.source);
    append(out.diagnostics, parsed.diagnostics);

    ExpandOptions expand_opts;
    expand_opts.base_dir = request.base_dir;
    expand_opts.source_path = request.source_path;
    Value globals = request.context.is_object() ? normalize_numbers(request.context) : Value::object();
    ExpandResult expanded = expand(parsed.root, Scope(globals), loader, expand_opts);
    append(out.diagnostics, expanded.diagnostics);

    StyledTree styled = apply_styles(expanded.root, std::move(sheets));
    append(out.diagnostics, styled.diagnostics);

    LowerResult lowered = lower(styled.root, LoweringEnv{&loader, request.base_dir});
    append(out.diagnostics, lowered.diagnostics);

    Diagnostics problems = validate(lowered.root);
    append(out.diagnostics, problems);

    if (!request.format.empty())
        out.output = write_format(lowered.root, request.format, out.diagnostics);
    out.ir = std::move(lowered.root);
    return out;
}

PipelineResult render_ir_json(std::string_view ir_json, std::string_view format)
{
    PipelineResult out;
    DeserializeResult d = deserialize_ir(ir_json);
    out.diagnostics = std::move(d.diagnostics);
    if (!d.node)
        return out;
    if (!format.empty())
        out.output = write_format(*d.node, format, out.diagnostics);
    out.ir = std::move(d.node);
    return out;
}

std::string format_diagnostic(const Diagnostic& d, std::string_view default_file)
{
    std::string file = d.file.empty() ? std::string(default_file) : d.file;
    return std::string(to_string(d.severity)) + " " + d.code + " " + file + ":" + std::to_string(d.span.start) + "-"
           + std::to_string(d.span.end) + " " + d.message;
}

Value diagnostics_to_json(const Diagnostics& diags, std::string_view default_file)
{
    Value arr = Value::array();
    for (const auto& d : diags) {
        Value o = Value::object();
        o["severity"] = to_string(d.severity);
        o["code"] = d.code;
        o["file"] = d.file.empty() ? std::string(default_file) : d.file;
        o["span"] = Value::object({{"start", d.span.start}, {"end", d.span.end}});
        o["message"] = d.message;
        arr.push_back(std::move(o));
    }
    return arr;
}

} // namespace poml
