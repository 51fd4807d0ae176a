#include "poml/data.hpp"

#include <algorithm>
#include <charconv>

namespace poml {

namespace {

std::string_view trim(std::string_view s)
{
    auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos)
        return {};
    auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::optional<std::size_t> parse_index(std::string_view s)
{
    s = trim(s);
    if (s.empty())
        return std::nullopt;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::string cell_string(const Value& v)
{
    if (v.is_number_integer() || v.is_number_unsigned())
        return std::to_string(v.get<long long>());
    return display_string(v);
}

} // namespace

std::pair<std::size_t, std::size_t> Slice::resolve(std::size_t size) const
{
    std::size_t a = std::min(start.value_or(0), size);
    std::size_t b = std::min(end.value_or(size), size);
    return {a, std::max(a, b)};
}

std::optional<Slice> parse_slice(std::string_view text)
{
    text = trim(text);
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        auto i = parse_index(text);
        if (!i)
            return std::nullopt;
        return Slice{*i, *i + 1};
    }
    Slice s;
    std::string_view lhs = trim(text.substr(0, colon));
    std::string_view rhs = trim(text.substr(colon + 1));
    if (!lhs.empty()) {
        s.start = parse_index(lhs);
        if (!s.start)
            return std::nullopt;
    }
    if (!rhs.empty()) {
        s.end = parse_index(rhs);
        if (!s.end)
            return std::nullopt;
    }
    if (s.start && s.end && *s.start > *s.end)
        return std::nullopt;
    return s;
}

std::vector<std::vector<std::string>> read_delimited(std::string_view bytes, char delimiter)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    bool row_open = false;
    std::size_t i = 0;
    auto end_row = [&] {
        bool blank_line = row.empty() && cell.empty() && !was_quoted;
        was_quoted = false;
        row_open = false;
        if (blank_line)
            return;
        row.push_back(std::move(cell));
        cell.clear();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < bytes.size()) {
        char c = bytes[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
                    cell += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                continue;
            }
            cell += c;
            ++i;
            continue;
        }
        row_open = true;
        if (c == '"' && cell.empty()) {
            quoted = true;
            was_quoted = true;
            ++i;
        } else if (c == delimiter) {
            row.push_back(std::move(cell));
            cell.clear();
            was_quoted = false;
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_row();
            i += (c == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') ? 2 : 1;
        } else {
            cell += c;
            ++i;
        }
    }
    if (row_open || quoted)
        end_row();
    return rows;
}

std::string write_delimited(const std::vector<std::vector<std::string>>& rows, char delimiter)
{
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += delimiter;
            const std::string& cell = row[c];
            bool needs_quotes = cell.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string::npos
                                || (row.size() == 1 && cell.empty());
            if (!needs_quotes) {
                out += cell;
                continue;
            }
            out += '"';
            for (char ch : cell) {
                if (ch == '"')
                    out += '"';
                out += ch;
            }
            out += '"';
        }
        out += '\n';
    }
    return out;
}

std::string table_format_for_path(std::string_view path)
{
    std::string ext = file_extension(path);
    if (ext == "tsv" || ext == "tab")
        return "tsv";
    if (ext == "json")
        return "json";
    return "csv";
}

namespace {

void rectangularize(TableData& t, Diagnostics& diags)
{
    const std::size_t width = t.columns.size();
    std::size_t padded = 0;
    std::size_t truncated = 0;
    for (auto& r : t.records) {
        if (r.size() < width) {
            r.resize(width);
            ++padded;
        } else if (r.size() > width) {
            r.resize(width);
            ++truncated;
        }
    }
    if (padded)
        diags.push_back(make_warning("short-row", std::to_string(padded) + " row(s) had fewer cells than the header and were padded"));
    if (truncated)
        diags.push_back(make_warning("long-row", std::to_string(truncated) + " row(s) had more cells than the header and were truncated"));
}

} // namespace

TableParse table_from_value(const Value& records, const Value* columns)
{
    TableParse out;
    out.table.source_format = "json";
    if (!records.is_array()) {
        out.diagnostics.push_back(make_error("json-not-array", "table data must be a JSON array"));
        return out;
    }
    if (columns && columns->is_array())
        for (const auto& c : *columns)
            out.table.columns.push_back(display_string(c));
    bool explicit_columns = !out.table.columns.empty();
    for (const auto& rec : records) {
        if (rec.is_object()) {
            for (const auto& [k, v] : rec.items()) {
                (void)v;
                if (!explicit_columns && std::find(out.table.columns.begin(), out.table.columns.end(), k) == out.table.columns.end())
                    out.table.columns.push_back(k);
            }
        }
    }
    for (const auto& rec : records) {
        std::vector<std::string> row;
        if (rec.is_object()) {
            for (const auto& col : out.table.columns) {
                auto it = rec.find(col);
                row.push_back(it == rec.end() ? std::string() : cell_string(*it));
            }
        } else if (rec.is_array()) {
            for (const auto& v : rec)
                row.push_back(cell_string(v));
        } else {
            out.diagnostics.push_back(make_error("bad-record", "table records must be objects or arrays, got " + type_name(rec)));
            continue;
        }
        out.table.records.push_back(std::move(row));
    }
    if (out.table.columns.empty() && !out.table.records.empty()) {
        for (std::size_t i = 0; i < out.table.records.front().size(); ++i)
            out.table.columns.push_back(std::to_string(i));
    }
    rectangularize(out.table, out.diagnostics);
    return out;
}

TableParse parse_table_source(std::string_view bytes, std::string_view format)
{
    TableParse out;
    if (trim(bytes).find_first_not_of("\r\n") == std::string_view::npos) {
        out.table.source_format = std::string(format);
        out.diagnostics.push_back(make_warning("empty-input", "table source is empty"));
        return out;
    }
    if (format == "json") {
        Value doc = Value::parse(bytes.begin(), bytes.end(), nullptr, false);
        if (doc.is_discarded()) {
            out.table.source_format = "json";
            out.diagnostics.push_back(make_error("malformed-json", "table source is not valid JSON"));
            return out;
        }
        return table_from_value(doc, nullptr);
    }
    out.table.source_format = std::string(format);
    auto rows = read_delimited(bytes, format == "tsv" ? '\t' : ',');
    if (rows.empty()) {
        out.diagnostics.push_back(make_warning("empty-input", "table source is empty"));
        return out;
    }
    out.table.columns = std::move(rows.front());
    out.table.records.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
    rectangularize(out.table, out.diagnostics);
    return out;
}

std::vector<std::vector<std::string>> select_table(const TableData& table, const TableOptions& options, Diagnostics& diags)
{
    std::vector<std::size_t> picked;
    if (options.columns.empty()) {
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            picked.push_back(i);
    } else {
        for (const auto& name : options.columns) {
            auto it = std::find(table.columns.begin(), table.columns.end(), name);
            if (it == table.columns.end()) {
                diags.push_back(make_error("unknown-column", "table has no column '" + name + "'"));
                continue;
            }
            picked.push_back(static_cast<std::size_t>(it - table.columns.begin()));
        }
    }
    auto [first, last] = options.records ? options.records->resolve(table.records.size()) : std::pair{std::size_t{0}, table.records.size()};

    std::vector<std::vector<std::string>> rows;
    rows.reserve(last - first + 1);
    std::vector<std::string> header;
    if (options.include_index)
        header.emplace_back("index");
    for (auto c : picked)
        header.push_back(table.columns[c]);
    rows.push_back(std::move(header));
    for (std::size_t r = first; r < last; ++r) {
        std::vector<std::string> row;
        row.reserve(picked.size() + 1);
        if (options.include_index)
            row.push_back(std::to_string(r));
        for (auto c : picked)
            row.push_back(table.records[r][c]);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

IRNode cell_row(const std::vector<std::string>& cells)
{
    IRNode row = IRNode::make(IRKind::trow);
    row.children.reserve(cells.size());
    for (const auto& c : cells) {
        IRNode cell = IRNode::make(IRKind::tcell);
        if (!c.empty())
            cell.children.push_back(IRNode::make_text(c));
        row.children.push_back(std::move(cell));
    }
    return row;
}

Value rows_as_objects(const std::vector<std::vector<std::string>>& rows)
{
    Value arr = Value::array();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        Value obj = Value::object();
        for (std::size_t c = 0; c < rows[0].size(); ++c)
            obj[rows[0][c]] = rows[r][c];
        arr.push_back(std::move(obj));
    }
    return arr;
}

IRNode code_block(std::string lang, std::string body)
{
    IRNode code = IRNode::make(IRKind::code, {IRNode::make_text(std::move(body))});
    code.set("inline", false);
    code.set("lang", std::move(lang));
    return code;
}

} // namespace

TableRender render_table(const TableData& table, std::string_view syntax, const TableOptions& options, bool serialize)
{
    TableRender out;
    auto rows = select_table(table, options, out.diagnostics);

    if (syntax == "json") {
        Value data = rows_as_objects(rows);
        if (serialize) {
            out.node = IRNode::make(IRKind::obj);
            out.node.set("data", std::move(data));
        } else {
            out.node = code_block("json", data.dump(2, ' ', false, Value::error_handler_t::replace));
        }
        return out;
    }
    if (syntax == "csv" || syntax == "tsv") {
        if (!options.include_header)
            rows.erase(rows.begin());
        std::string body = write_delimited(rows, syntax == "csv" ? ',' : '\t');
        if (!body.empty() && body.back() == '\n')
            body.pop_back();
        out.node = code_block(std::string(syntax), std::move(body));
        return out;
    }

    IRNode node = IRNode::make(IRKind::table);
    if (options.include_header)
        node.children.push_back(IRNode::make(IRKind::thead, {cell_row(rows[0])}));
    IRNode body = IRNode::make(IRKind::tbody);
    body.children.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r)
        body.children.push_back(cell_row(rows[r]));
    node.children.push_back(std::move(body));
    out.node = std::move(node);
    return out;
}

} // namespace poml
