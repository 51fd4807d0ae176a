#include "poml/components.hpp"
#include "poml/data.hpp"
#include "poml/source.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace poml {

std::vector<IRNode> caption_block(std::string_view caption, const CaptionStyle& style, int level)
{
    if (style.style == "hidden" || caption.empty())
        return {};
    std::string text(caption);
    if (style.transform == "upper")
        for (auto& c : text)
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (style.ending == "colon")
        text += ':';
    if (style.style == "header") {
        IRNode h = IRNode::make(IRKind::h, {IRNode::make_text(std::move(text))});
        h.set("level", std::clamp(level, 1, 6));
        return {std::move(h)};
    }
    if (style.style == "bold")
        return {IRNode::make(IRKind::b, {IRNode::make_text(std::move(text))})};
    return {IRNode::make_text(std::move(text))};
}

namespace {

bool is_markup(std::string_view s)
{
    return s == "markdown" || s == "html" || s == "xml" || s == "text";
}

bool is_serializer(std::string_view s)
{
    return s == "json" || s == "yaml";
}

bool is_block(const IRNode& n)
{
    switch (n.kind) {
    case IRKind::p:
    case IRKind::h:
    case IRKind::list:
    case IRKind::item:
    case IRKind::table:
    case IRKind::env:
    case IRKind::obj:
    case IRKind::any:
    case IRKind::nl:
        return true;
    case IRKind::code:
        return !n.get_bool("inline", true);
    default:
        return false;
    }
}

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string collapse(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (char c : s) {
        if (is_space(c)) {
            if (!in_space)
                out += ' ';
            in_space = true;
        } else {
            out += c;
            in_space = false;
        }
    }
    return out;
}

/// Collapses whitespace in text children and trims it next to block
/// boundaries. `block_edges` trims the first and last text as well.
void normalize_children(std::vector<IRNode>& kids, bool block_edges)
{
    for (auto& k : kids)
        if (k.kind == IRKind::text)
            k.text = collapse(k.text);
    // Removing an emptied text can expose another one to a block edge.
    std::size_t before = kids.size() + 1;
    while (kids.size() < before) {
        before = kids.size();
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (kids[i].kind != IRKind::text)
                continue;
            bool left_edge = i == 0 ? block_edges : is_block(kids[i - 1]);
            bool right_edge = i + 1 == kids.size() ? block_edges : is_block(kids[i + 1]);
            std::string& t = kids[i].text;
            if (left_edge && !t.empty() && t.front() == ' ')
                t.erase(0, 1);
            if (right_edge && !t.empty() && t.back() == ' ')
                t.pop_back();
        }
        // A space run split across two adjacent texts collapses as one.
        for (std::size_t i = 1; i < kids.size(); ++i)
            if (kids[i].kind == IRKind::text && kids[i - 1].kind == IRKind::text && !kids[i - 1].text.empty()
                && kids[i - 1].text.back() == ' ' && !kids[i].text.empty() && kids[i].text.front() == ' ')
                kids[i].text.erase(0, 1);
        std::erase_if(kids, [](const IRNode& k) { return k.kind == IRKind::text && k.text.empty(); });
    }
}

void stamp(IRNode& n, const Span& span, const std::string& speaker)
{
    if (n.get("original-start-index"))
        return;
    n.set("original-start-index", static_cast<std::int64_t>(span.start));
    n.set("original-end-index", static_cast<std::int64_t>(span.end));
    if (!n.get("speaker"))
        n.set("speaker", speaker);
    const std::string own = n.get_string("speaker");
    for (auto& c : n.children)
        stamp(c, span, own);
}

struct Context {
    std::string speaker = "human";
    /// Resolved syntax of the enclosing element; empty at the root.
    std::string syntax;
    int caption_depth = 0;
    bool pre = false;
    std::optional<bool> examples_chat;
    bool chat_example = false;

    bool serialize() const { return is_serializer(syntax); }
};

class Lowerer {
public:
    explicit Lowerer(const LoweringEnv& env) : env_(env) {}

    LowerResult run(const ComponentNode& root)
    {
        Context ctx;
        bool text_only = std::all_of(root.children.begin(), root.children.end(), [](const ComponentNode& c) { return c.is_text; });
        ctx.pre = text_only;
        std::vector<IRNode> nodes = lower_element(root, ctx);
        LowerResult out;
        if (nodes.size() == 1 && nodes.front().kind == IRKind::p) {
            out.root = std::move(nodes.front());
        } else {
            out.root = IRNode::make(IRKind::p, std::move(nodes));
            stamp(out.root, root.span, ctx.speaker);
        }
        out.diagnostics = std::move(diags_);
        return out;
    }

private:
    void warn(const ComponentNode& n, std::string code, std::string message)
    {
        Diagnostic d = make_warning(std::move(code), std::move(message), n.span);
        d.file = n.origin;
        diags_.push_back(std::move(d));
    }

    void error(const ComponentNode& n, std::string code, std::string message)
    {
        Diagnostic d = make_error(std::move(code), std::move(message), n.span);
        d.file = n.origin;
        diags_.push_back(std::move(d));
    }

    void absorb(const ComponentNode& n, Diagnostics diags)
    {
        for (auto& d : diags) {
            d.span = n.span;
            d.file = n.origin;
            diags_.push_back(std::move(d));
        }
    }

    // ---- attribute access with validation ----------------------------------

    static bool own(const ComponentNode& n, std::string_view name)
    {
        auto it = n.style.provenance.find(name);
        return it != n.style.provenance.end() && it->second != StyleLayer::inherited && it->second != StyleLayer::registry_default;
    }

    const AttributeSpec* spec_attr(const ComponentNode& n, std::string_view name) const
    {
        const ComponentSpec* spec = find_component(n.name);
        return spec ? spec->find(name) : nullptr;
    }

    std::optional<Value> default_of(const ComponentNode& n, std::string_view name) const
    {
        const AttributeSpec* a = spec_attr(n, name);
        return a ? a->default_value : std::nullopt;
    }

    std::string str(const ComponentNode& n, std::string_view name, std::string fallback = {}) const
    {
        const Value* v = n.style.get(name);
        if (!v || v->is_null())
            return fallback;
        return display_string(*v);
    }

    std::optional<bool> boolean(const ComponentNode& n, std::string_view name)
    {
        const Value* v = n.style.get(name);
        if (!v)
            return std::nullopt;
        if (v->is_boolean())
            return v->get<bool>();
        std::string s = display_string(*v);
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "true" || s == "1" || s.empty())
            return true;
        if (s == "false" || s == "0")
            return false;
        warn(n, "invalid-attribute-value", "'" + std::string(name) + "' on <" + n.name + "> expects true or false, got \"" + s + "\"");
        auto def = default_of(n, name);
        return def && def->is_boolean() ? std::optional<bool>(def->get<bool>()) : std::nullopt;
    }

    bool boolean(const ComponentNode& n, std::string_view name, bool fallback) { return boolean(n, name).value_or(fallback); }

    std::optional<long long> integer(const ComponentNode& n, std::string_view name)
    {
        const Value* v = n.style.get(name);
        if (!v)
            return std::nullopt;
        if (v->is_number()) {
            double d = v->get<double>();
            if (std::isfinite(d) && d == std::floor(d))
                return static_cast<long long>(d);
        } else if (v->is_string()) {
            const std::string& s = v->get_ref<const std::string&>();
            try {
                std::size_t used = 0;
                long long parsed = std::stoll(s, &used);
                if (used == s.size())
                    return parsed;
            } catch (const std::exception&) {
            }
        }
        warn(n, "invalid-attribute-value", "'" + std::string(name) + "' on <" + n.name + "> expects an integer, got " + compact_json(*v));
        auto def = default_of(n, name);
        return def && def->is_number() ? std::optional<long long>(def->get<long long>()) : std::nullopt;
    }

    std::string choice(const ComponentNode& n, std::string_view name, const std::vector<std::string>& choices, std::string fallback)
    {
        const Value* v = n.style.get(name);
        if (!v)
            return fallback;
        std::string s = display_string(*v);
        if (std::find(choices.begin(), choices.end(), s) != choices.end())
            return s;
        std::string allowed;
        for (const auto& c : choices)
            allowed += (allowed.empty() ? "" : ", ") + c;
        warn(n, "invalid-attribute-value", "'" + std::string(name) + "' on <" + n.name + "> must be one of " + allowed + ", got \"" + s + "\"");
        auto def = default_of(n, name);
        return def && def->is_string() ? def->get<std::string>() : fallback;
    }

    std::string choice(const ComponentNode& n, std::string_view name, std::string fallback)
    {
        const AttributeSpec* a = spec_attr(n, name);
        return a && !a->choices.empty() ? choice(n, name, a->choices, std::move(fallback)) : str(n, name, std::move(fallback));
    }

    /// Structured attribute: a typed value from `{{ }}` or JSON text.
    std::optional<Value> json_attr(const ComponentNode& n, std::string_view name)
    {
        const Value* v = n.style.get(name);
        if (!v)
            return std::nullopt;
        if (!v->is_string())
            return *v;
        Value parsed = Value::parse(v->get_ref<const std::string&>(), nullptr, false);
        if (parsed.is_discarded()) {
            error(n, "malformed-json", "'" + std::string(name) + "' on <" + n.name + "> is not valid JSON");
            return std::nullopt;
        }
        return parsed;
    }

    // ---- traversal -----------------------------------------------------------

    Context enter(const ComponentNode& n, const Context& parent)
    {
        Context ctx = parent;
        if (own(n, "speaker")) {
            std::string s = choice(n, "speaker", {"ai", "human", "system"}, parent.speaker);
            ctx.speaker = s;
        }
        if (n.style.get("whiteSpace"))
            ctx.pre = choice(n, "whiteSpace", {"pre", "filter"}, "filter") == "pre";
        return ctx;
    }

    std::vector<IRNode> lower_children(const ComponentNode& n, const Context& ctx, bool block_edges = true)
    {
        std::vector<IRNode> out;
        out.reserve(n.children.size());
        for (const auto& c : n.children) {
            if (c.is_text) {
                IRNode t = IRNode::make_text(c.text);
                stamp(t, c.span, ctx.speaker);
                out.push_back(std::move(t));
                continue;
            }
            auto nodes = lower_element(c, ctx);
            for (auto& node : nodes)
                out.push_back(std::move(node));
        }
        if (!ctx.pre)
            normalize_children(out, block_edges);
        return out;
    }

    /// Wraps `body` in an env node when `n` sets its own syntax that differs
    /// from the enclosing one, and returns the context for the body.
    std::optional<IRNode> syntax_env(const ComponentNode& n, Context& ctx, bool allow_tables = false)
    {
        if (!own(n, "syntax"))
            return std::nullopt;
        std::string syntax = str(n, "syntax");
        if (!is_markup(syntax) && !is_serializer(syntax)) {
            bool table_only = syntax == "csv" || syntax == "tsv";
            if (!(allow_tables && table_only))
                warn(n, "invalid-attribute-value",
                     "'syntax' on <" + n.name + "> must be markdown, html, xml, text, json or yaml, got \"" + syntax + "\"");
            return std::nullopt;
        }
        if (syntax == ctx.syntax)
            return std::nullopt;
        ctx.syntax = syntax;
        IRNode env = IRNode::make(IRKind::env);
        if (is_markup(syntax)) {
            env.set("presentation", "markup");
            env.set("markup-lang", syntax);
        } else {
            env.set("presentation", "serialize");
            env.set("serializer", syntax);
        }
        return env;
    }

    std::vector<IRNode> lower_element(const ComponentNode& n, const Context& parent)
    {
        Context ctx = enter(n, parent);
        const ComponentSpec* spec = find_component(n.name);
        std::vector<IRNode> nodes;
        if (!spec) {
            error(n, "unknown-component", "<" + n.name + "> is not a known component");
            nodes.push_back(IRNode::make(IRKind::p, lower_children(n, ctx)));
        } else if (spec->category == ComponentCategory::data) {
            nodes = lower_data(n, *spec, ctx);
        } else {
            std::optional<IRNode> env = syntax_env(n, ctx);
            nodes = lower_component(n, *spec, ctx);
            if (env) {
                for (auto& node : nodes)
                    stamp(node, n.span, ctx.speaker);
                env->children = std::move(nodes);
                nodes.clear();
                nodes.push_back(std::move(*env));
            }
        }
        for (auto& node : nodes)
            stamp(node, n.span, ctx.speaker);
        return nodes;
    }

    std::vector<IRNode> lower_component(const ComponentNode& n, const ComponentSpec& spec, Context& ctx)
    {
        const std::string& rule = spec.lowering;
        if (rule == "root" || rule == "paragraph" || rule == "introducer") {
            IRNode p = IRNode::make(IRKind::p, lower_children(n, ctx));
            if (!boolean(n, "blankLine", true))
                p.set("blank-line", false);
            return {std::move(p)};
        }
        if (rule == "inline") {
            IRKind kind = *ir_kind_from_string(spec.name);
            return {IRNode::make(kind, lower_children(n, ctx, false))};
        }
        if (rule == "code")
            return {lower_code(n, ctx)};
        if (rule == "header") {
            IRNode h = IRNode::make(IRKind::h, lower_children(n, ctx));
            long long level = integer(n, "level").value_or(std::min(ctx.caption_depth + 1, 6));
            if (level < 1 || level > 6) {
                warn(n, "invalid-attribute-value", "heading level must be between 1 and 6, got " + std::to_string(level));
                level = std::clamp(level, 1LL, 6LL);
            }
            h.set("level", level);
            return {std::move(h)};
        }
        if (rule == "newline") {
            IRNode nl = IRNode::make(IRKind::nl);
            long long count = integer(n, "count").value_or(1);
            if (count < 1) {
                warn(n, "invalid-attribute-value", "'count' on <br> must be at least 1");
                count = 1;
            }
            if (count != 1)
                nl.set("count", count);
            return {std::move(nl)};
        }
        if (rule == "list")
            return {lower_list(n, ctx)};
        if (rule == "item") {
            warn(n, "item-outside-list", "<item> outside <list> is rendered as a paragraph");
            return {IRNode::make(IRKind::p, lower_children(n, ctx))};
        }
        if (rule == "captioned")
            return lower_captioned(n, ctx);
        return {};
    }

    IRNode lower_code(const ComponentNode& n, Context& ctx)
    {
        Context inner = ctx;
        inner.pre = true;
        std::string body = plain_text(IRNode::make(IRKind::span, lower_children(n, inner)));
        bool is_inline = boolean(n, "inline", true);
        if (!is_inline) {
            auto first = body.find_first_not_of("\r\n");
            body.erase(0, first == std::string::npos ? body.size() : first);
            while (!body.empty() && is_space(body.back()))
                body.pop_back();
        }
        IRNode code = IRNode::make(IRKind::code);
        if (!body.empty())
            code.children.push_back(IRNode::make_text(std::move(body)));
        code.set("inline", is_inline);
        if (std::string lang = str(n, "lang"); !lang.empty())
            code.set("lang", lang);
        if (!is_inline && !boolean(n, "blankLine", true))
            code.set("blank-line", false);
        return code;
    }

    IRNode lower_list(const ComponentNode& n, Context& ctx)
    {
        IRNode list = IRNode::make(IRKind::list);
        std::string style = choice(n, "listStyle", "dash");
        if (style != "dash")
            list.set("list-style", style);
        for (const auto& c : n.children) {
            if (c.is_text) {
                if (ctx.pre || c.text.find_first_not_of(" \t\r\n") != std::string::npos) {
                    IRNode item = IRNode::make(IRKind::item, {IRNode::make_text(c.text)});
                    if (!ctx.pre)
                        normalize_children(item.children, true);
                    stamp(item, c.span, ctx.speaker);
                    list.children.push_back(std::move(item));
                }
                continue;
            }
            if (c.name == "item") {
                Context inner = enter(c, ctx);
                IRNode item = IRNode::make(IRKind::item, lower_children(c, inner));
                stamp(item, c.span, inner.speaker);
                list.children.push_back(std::move(item));
                continue;
            }
            for (auto& node : lower_element(c, ctx)) {
                IRNode item = IRNode::make(IRKind::item, {std::move(node)});
                stamp(item, c.span, ctx.speaker);
                list.children.push_back(std::move(item));
            }
        }
        return list;
    }

    std::vector<IRNode> lower_captioned(const ComponentNode& n, Context& ctx)
    {
        CaptionStyle cs;
        cs.style = choice(n, "captionStyle", "bold");
        cs.transform = choice(n, "captionTextTransform", "none");
        cs.ending = choice(n, "captionEnding", "none");
        std::string caption = str(n, "caption", title_case(n.name));
        int level = std::min(ctx.caption_depth + 1, 6);

        Context inner = ctx;
        inner.caption_depth = ctx.caption_depth + 1;
        std::string intro;
        if (n.name == "examples") {
            inner.examples_chat = boolean(n, "chat", true);
            intro = str(n, "introducer");
        } else if (n.name == "example") {
            auto chat = own(n, "chat") ? boolean(n, "chat") : std::nullopt;
            inner.chat_example = chat.value_or(ctx.examples_chat.value_or(false));
        } else if ((n.name == "input" || n.name == "output") && ctx.chat_example) {
            inner.speaker = n.name == "input" ? "human" : "ai";
            IRNode p = IRNode::make(IRKind::p, lower_children(n, inner));
            stamp(p, n.span, inner.speaker);
            return {std::move(p)};
        }

        std::vector<IRNode> body = lower_children(n, inner);

        if (ctx.serialize()) {
            IRNode any = IRNode::make(IRKind::any, std::move(body));
            if (cs.style != "hidden" && !caption.empty())
                any.set("name", caption);
            return {std::move(any)};
        }

        std::vector<IRNode> kids = caption_block(caption, cs, level);
        bool inline_caption = !kids.empty() && cs.style != "header";
        if (!intro.empty()) {
            IRNode p = IRNode::make(IRKind::p, {IRNode::make_text(intro)});
            stamp(p, n.span, ctx.speaker);
            body.insert(body.begin(), std::move(p));
        }
        if (inline_caption && !body.empty())
            kids.push_back(IRNode::make_text(" "));
        for (auto& b : body)
            kids.push_back(std::move(b));
        IRNode p = IRNode::make(IRKind::p, std::move(kids));
        if (!boolean(n, "blankLine", true))
            p.set("blank-line", false);
        return {std::move(p)};
    }

    // ---- data components ----------------------------------------------------

    std::vector<IRNode> lower_data(const ComponentNode& n, const ComponentSpec& spec, Context& ctx)
    {
        if (!env_.loader && (n.style.get("src"))) {
            error(n, "loader-failure", "<" + n.name + "> cannot read files without a resource loader");
            return {};
        }
        if (spec.name == "table")
            return lower_table(n, ctx);
        if (spec.name == "document")
            return lower_document(n, ctx);
        if (spec.name == "folder")
            return lower_folder(n, ctx);
        if (spec.name == "img")
            return lower_image(n, ctx);
        if (spec.name == "conversation")
            return lower_conversation_node(n, ctx);
        return {};
    }

    std::string base_dir_of(const ComponentNode& n) const
    {
        return n.origin.empty() ? env_.base_dir : parent_dir(n.origin);
    }

    std::vector<IRNode> lower_table(const ComponentNode& n, Context& ctx)
    {
        TableParse parsed;
        bool have_data = false;
        if (n.style.get("records")) {
            auto records = json_attr(n, "records");
            if (!records)
                return {};
            auto columns = json_attr(n, "columns");
            parsed = table_from_value(*records, columns ? &*columns : nullptr);
            have_data = true;
        } else if (std::string src = str(n, "src"); !src.empty()) {
            Resource res = env_.loader->load(src, base_dir_of(n));
            if (!res.ok()) {
                error(n, "loader-failure", res.error);
                return {};
            }
            std::string format = choice(n, "parser", "auto");
            if (format == "auto")
                format = table_format_for_path(res.path);
            parsed = parse_table_source(sanitize_utf8(res.bytes), format);
            have_data = true;
        } else {
            std::string raw;
            for (const auto& c : n.children)
                if (c.is_text)
                    raw += c.text;
            std::string body;
            std::size_t pos = 0;
            while (pos <= raw.size()) {
                std::size_t nl = raw.find('\n', pos);
                std::string_view line = std::string_view(raw).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
                auto first = line.find_first_not_of(" \t\r");
                if (first != std::string_view::npos) {
                    auto last = line.find_last_not_of(" \t\r");
                    body.append(line.substr(first, last - first + 1));
                    body += '\n';
                }
                if (nl == std::string::npos)
                    break;
                pos = nl + 1;
            }
            if (!body.empty()) {
                std::string format = choice(n, "parser", "auto");
                if (format == "auto")
                    format = body[0] == '[' ? "json" : (body.find('\t') != std::string::npos ? "tsv" : "csv");
                parsed = parse_table_source(body, format);
                have_data = true;
            }
        }
        if (!have_data) {
            error(n, "missing-attribute", "<table> needs 'src', 'records' or inline rows");
            return {};
        }
        absorb(n, std::move(parsed.diagnostics));

        TableOptions opts;
        opts.include_header = boolean(n, "includeHeader", true);
        opts.include_index = boolean(n, "includeIndex", false);
        if (std::string sel = str(n, "selectedRecords"); !sel.empty()) {
            opts.records = parse_slice(sel);
            if (!opts.records)
                error(n, "bad-slice", "selectedRecords \"" + sel + "\" is not a start:end slice");
        }
        if (const Value* cols = n.style.get("selectedColumns")) {
            if (cols->is_array()) {
                for (const auto& c : *cols)
                    opts.columns.push_back(display_string(c));
            } else {
                auto parsed_cols = json_attr(n, "selectedColumns");
                if (parsed_cols && parsed_cols->is_array()) {
                    for (const auto& c : *parsed_cols)
                        opts.columns.push_back(display_string(c));
                }
            }
        }

        std::string syntax = str(n, "syntax");
        bool own_syntax = own(n, "syntax");
        if (syntax.empty())
            syntax = ctx.syntax.empty() ? "markdown" : ctx.syntax;
        static const std::vector<std::string> table_syntaxes = {"markdown", "html", "xml", "text", "csv", "tsv", "json", "yaml"};
        if (std::find(table_syntaxes.begin(), table_syntaxes.end(), syntax) == table_syntaxes.end()) {
            warn(n, "invalid-attribute-value", "table syntax \"" + syntax + "\" is not supported; using markdown");
            syntax = "markdown";
        }
        bool serialize = ctx.serialize() && (!own_syntax || is_serializer(syntax));
        if (serialize || syntax == "yaml")
            syntax = "json";
        TableRender rendered = render_table(parsed.table, syntax, opts, serialize);
        absorb(n, std::move(rendered.diagnostics));
        IRNode node = std::move(rendered.node);
        if (node.kind == IRKind::table) {
            bool pretty = boolean(n, "pretty", true);
            std::string current = ctx.syntax.empty() ? "markdown" : ctx.syntax;
            if (syntax != current || (!pretty && syntax == "html")) {
                IRNode env = IRNode::make(IRKind::env, {std::move(node)});
                env.set("presentation", "markup");
                env.set("markup-lang", syntax);
                if (!pretty)
                    env.set("writer-options", Value::object({{"pretty", false}}));
                node = std::move(env);
            }
        }
        return {std::move(node)};
    }

    std::vector<IRNode> lower_document(const ComponentNode& n, Context& ctx)
    {
        std::string src = str(n, "src");
        if (src.empty()) {
            error(n, "missing-attribute", "<document> needs 'src'");
            return {};
        }
        DocumentRead doc = read_document(src, base_dir_of(n), *env_.loader, str(n, "selectedPages"));
        absorb(n, std::move(doc.diagnostics));
        if (!doc.ok)
            return {};
        std::string text;
        for (const auto& page : doc.content.pages) {
            if (!text.empty())
                text += "\n\n";
            text += page;
        }
        while (!text.empty() && is_space(text.back()))
            text.pop_back();
        if (ctx.serialize())
            return {IRNode::make_text(std::move(text))};
        return {IRNode::make(IRKind::p, {IRNode::make_text(std::move(text))})};
    }

    std::vector<IRNode> lower_folder(const ComponentNode& n, Context& ctx)
    {
        std::string src = str(n, "src");
        if (src.empty()) {
            error(n, "missing-attribute", "<folder> needs 'src'");
            return {};
        }
        long long depth = integer(n, "maxDepth").value_or(3);
        FolderScan scan = scan_folder(src, base_dir_of(n), static_cast<int>(std::clamp(depth, 0LL, 64LL)), str(n, "filter"), *env_.loader);
        absorb(n, std::move(scan.diagnostics));
        if (!scan.ok)
            return {};
        bool show_size = boolean(n, "showSize", false);
        if (ctx.serialize() && !own(n, "syntax")) {
            IRNode obj = IRNode::make(IRKind::obj);
            obj.set("data", folder_value(scan.tree, show_size));
            return {std::move(obj)};
        }
        std::string syntax = own(n, "syntax") ? str(n, "syntax") : "tree";
        if (syntax != "tree" && syntax != "yaml" && syntax != "json")
            syntax = "tree";
        return {render_folder(scan.tree, syntax, show_size)};
    }

    std::vector<IRNode> lower_image(const ComponentNode& n, Context&)
    {
        ImageRef img;
        img.alt = str(n, "alt");
        img.position = choice(n, "position", "here");
        img.max_width = integer(n, "maxWidth");
        img.max_height = integer(n, "maxHeight");
        std::string declared = str(n, "type");
        if (!declared.empty() && declared.find('/') == std::string::npos)
            declared = declared == "jpg" ? "image/jpeg" : "image/" + declared;
        if (std::string b64 = str(n, "base64"); !b64.empty()) {
            auto bytes = base64_decode(b64);
            if (!bytes) {
                error(n, "bad-base64", "<img> base64 payload does not decode");
                return {};
            }
            img.base64 = b64;
            img.media_type = declared.empty() ? sniff_media_type(*bytes) : declared;
        } else if (std::string src = str(n, "src"); !src.empty()) {
            Resource res = env_.loader->load(src, base_dir_of(n));
            if (!res.ok()) {
                error(n, "loader-failure", res.error);
                return {};
            }
            img.base64 = base64_encode(res.bytes);
            img.media_type = sniff_media_type(res.bytes);
            if (img.media_type.empty())
                img.media_type = declared;
        } else {
            error(n, "missing-attribute", "<img> needs 'src' or 'base64'");
            return {};
        }
        if (img.media_type != "image/png" && img.media_type != "image/jpeg") {
            error(n, "unsupported-format", "<img> must be PNG or JPEG");
            return {};
        }
        return {image_node(img)};
    }

    std::vector<IRNode> lower_conversation_node(const ComponentNode& n, Context&)
    {
        std::optional<Value> messages;
        if (n.style.get("messages")) {
            messages = json_attr(n, "messages");
        } else if (std::string src = str(n, "src"); !src.empty()) {
            Resource res = env_.loader->load(src, base_dir_of(n));
            if (!res.ok()) {
                error(n, "loader-failure", res.error);
                return {};
            }
            Value parsed = Value::parse(res.bytes, nullptr, false);
            if (parsed.is_discarded()) {
                error(n, "malformed-json", "cannot parse " + res.path + " as JSON");
                return {};
            }
            messages = std::move(parsed);
        } else {
            error(n, "missing-attribute", "<conversation> needs 'src' or 'messages'");
            return {};
        }
        if (!messages)
            return {};
        ConversationLowering lowered = lower_conversation(*messages);
        absorb(n, std::move(lowered.diagnostics));
        return std::move(lowered.nodes);
    }

    const LoweringEnv& env_;
    Diagnostics diags_;
};

} // namespace

LowerResult lower(const ComponentNode& root, const LoweringEnv& env)
{
    return Lowerer(env).run(root);
}

} // namespace poml
