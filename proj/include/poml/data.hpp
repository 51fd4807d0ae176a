#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/ir.hpp"
#include "poml/loader.hpp"
#include "poml/value.hpp"

namespace poml {

/// 0-based half-open `start:end`; either side may be omitted.
struct Slice {
    std::optional<std::size_t> start;
    std::optional<std::size_t> end;

    /// Clamps to [0, size] and returns the resolved bounds.
    std::pair<std::size_t, std::size_t> resolve(std::size_t size) const;
};

/// Accepts "a:b", "a:", ":b", ":" and a bare index "a" (same as "a:a+1").
/// Returns nullopt for anything else, including start > end.
std::optional<Slice> parse_slice(std::string_view text);

// ---- tables ---------------------------------------------------------------

struct TableData {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> records;
    std::string source_format;
};

struct TableParse {
    TableData table;
    Diagnostics diagnostics;
};

/// `format` is csv, tsv or json. The first csv/tsv row is the header.
TableParse parse_table_source(std::string_view bytes, std::string_view format);

/// csv, tsv or json from the file extension; csv when unknown.
std::string table_format_for_path(std::string_view path);

/// Table from an in-memory JSON array of objects (or of arrays, in which
/// case `columns` names them).
TableParse table_from_value(const Value& records, const Value* columns);

/// RFC-4180 style reader for one delimiter. Rows keep their own widths.
std::vector<std::vector<std::string>> read_delimited(std::string_view bytes, char delimiter);
std::string write_delimited(const std::vector<std::vector<std::string>>& rows, char delimiter);

struct TableOptions {
    bool include_header = true;
    bool include_index = false;
    std::optional<Slice> records;
    /// Empty selects every column.
    std::vector<std::string> columns;
};

struct TableRender {
    IRNode node;
    Diagnostics diagnostics;
};

/// Applies selection, then builds a table/thead/tbody subtree for
/// markdown, html, xml and text, or a block `code` node holding csv, tsv
/// or json text. With `serialize` set, json becomes an `obj` node instead.
TableRender render_table(const TableData& table, std::string_view syntax, const TableOptions& options, bool serialize = false);

/// Rows after record/column selection and optional index column; row 0
/// is the header.
std::vector<std::vector<std::string>> select_table(const TableData& table, const TableOptions& options, Diagnostics& diags);

// ---- folders --------------------------------------------------------------

struct FolderTree {
    std::string name;
    bool is_dir = false;
    std::uint64_t size = 0;
    std::vector<FolderTree> children;
};

struct FolderScan {
    FolderTree tree;
    Diagnostics diagnostics;
    bool ok = true;
};

/// Walks `path` up to `max_depth` levels. Files are kept when their name
/// matches `filter` (ECMAScript regex, search semantics; empty keeps all);
/// directories are kept when they hold a kept file within the depth limit.
FolderScan scan_folder(std::string_view path, std::string_view base_dir, int max_depth, std::string_view filter,
                       const ResourceLoader& loader);

/// `tree` uses box-drawing prefixes; `yaml` and `json` serialize nested
/// objects. Always a block `code` node.
IRNode render_folder(const FolderTree& tree, std::string_view syntax, bool show_size);

/// Nested object form: directories map to objects, files to null (or their
/// size when `show_size`).
Value folder_value(const FolderTree& tree, bool show_size);

// ---- documents ------------------------------------------------------------

struct DocumentContent {
    std::vector<std::string> pages;
    std::string source_path;
};

struct DocumentRead {
    DocumentContent content;
    Diagnostics diagnostics;
    bool ok = false;
};

/// Reads .txt and .md as one page; other extensions are unsupported.
DocumentRead read_document(std::string_view path, std::string_view base_dir, const ResourceLoader& loader,
                           std::string_view selected_pages = {});

std::vector<std::string> select_pages(const std::vector<std::string>& pages, const Slice& slice);

// ---- images ---------------------------------------------------------------

struct ImageRef {
    std::string base64;
    std::string media_type;
    std::string alt;
    std::string position = "here";
    std::optional<long long> max_width;
    std::optional<long long> max_height;
};

std::string base64_encode(std::string_view bytes);
std::optional<std::string> base64_decode(std::string_view text);

/// image/png or image/jpeg from magic bytes; empty when neither.
std::string sniff_media_type(std::string_view bytes);

IRNode image_node(const ImageRef& image);

// ---- conversations --------------------------------------------------------

struct ConversationLowering {
    std::vector<IRNode> nodes;
    Diagnostics diagnostics;
};

/// Each {speaker, content} message becomes a `p` with that speaker and
/// its content as verbatim text.
ConversationLowering lower_conversation(const Value& messages);

} // namespace poml
