#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/ir.hpp"
#include "poml/loader.hpp"
#include "poml/value.hpp"

namespace poml {

/// Output formats accepted by render: markdown, text, html, xml,
/// chat-json and ir-json.
bool is_output_format(std::string_view format);

struct NamedStylesheet {
    /// Shown as the file of its diagnostics.
    std::string name;
    std::string json;
};

struct RenderRequest {
    std::string source;
    /// Canonical path of the source; empty for stdin or in-memory input.
    std::string source_path;
    /// Directory that relative `src` attributes resolve against.
    std::string base_dir;
    std::vector<NamedStylesheet> stylesheets;
    /// Root template scope; must be an object.
    Value context = Value::object();
    /// Empty runs every pass except writing (lint).
    std::string format = "markdown";
    const ResourceLoader* loader = nullptr;
};

struct PipelineResult {
    std::string output;
    Diagnostics diagnostics;
    std::optional<IRNode> ir;
};

/// parse -> expand -> style -> lower -> validate -> write.
PipelineResult run_pipeline(const RenderRequest& request);

/// Writes an IR tree given as canonical JSON. Without a tree in the
/// result the input was unusable.
PipelineResult render_ir_json(std::string_view ir_json, std::string_view format);

/// Writes an IR tree in one of the output formats.
std::string write_format(const IRNode& ir, std::string_view format, Diagnostics& diags);

/// `severity code file:start-end message`
std::string format_diagnostic(const Diagnostic& d, std::string_view default_file);

/// Array of {severity, code, file, span: {start, end}, message}.
Value diagnostics_to_json(const Diagnostics& diags, std::string_view default_file);

} // namespace poml
