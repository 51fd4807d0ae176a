#include "poml/writers.hpp"

#include <algorithm>

namespace poml {

std::string strip_control(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if ((u < 0x20 && c != '\n' && c != '\t') || u == 0x7F)
            continue;
        out += c;
    }
    return out;
}

std::string escape_markup(std::string_view text, bool attribute)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += attribute ? "&quot;" : "\""; break;
        case '\'': out += attribute ? "&apos;" : "'"; break;
        default: out += c;
        }
    }
    return out;
}

namespace {

std::string render_container(const IRNode& container, const WriterOptions& opts, Diagnostics& diags);
std::string render_env(const IRNode& env, const WriterOptions& outer, Diagnostics& diags);

WriterOptions env_options(const IRNode& env, const WriterOptions& outer)
{
    WriterOptions o = outer;
    std::string presentation = env.get_string("presentation", "markup");
    if (presentation == "serialize") {
        o.serializer = env.get_string("serializer", "json");
    } else if (presentation == "markup") {
        o.serializer.clear();
        o.markup_lang = env.get_string("markup-lang", "markdown");
    } else if (presentation == "free") {
        o.serializer.clear();
        o.markup_lang = "text";
    }
    if (const Value* wo = env.get("writer-options"); wo && wo->is_object()) {
        auto it = wo->find("pretty");
        if (it != wo->end() && it->is_boolean())
            o.pretty = it->get<bool>();
    }
    return o;
}

/// True when the env changes nothing for a writer already producing `opts`.
bool env_is_transparent(const IRNode& env, const WriterOptions& opts)
{
    if (env.get("writer-options"))
        return false;
    WriterOptions o = env_options(env, opts);
    return o.serializer == opts.serializer && o.markup_lang == opts.markup_lang;
}

std::size_t longest_run(std::string_view s, char ch)
{
    std::size_t best = 0;
    std::size_t cur = 0;
    for (char c : s) {
        cur = c == ch ? cur + 1 : 0;
        best = std::max(best, cur);
    }
    return best;
}

std::string latin_label(std::size_t i)
{
    std::string s;
    ++i;
    while (i > 0) {
        --i;
        s.insert(s.begin(), static_cast<char>('a' + i % 26));
        i /= 26;
    }
    return s;
}

std::string bullet_for(std::string_view style, std::size_t index)
{
    if (style == "star")
        return "* ";
    if (style == "plus")
        return "+ ";
    if (style == "decimal")
        return std::to_string(index + 1) + ". ";
    if (style == "latin")
        return latin_label(index) + ". ";
    return "- ";
}

// ---- markdown and plain text ------------------------------------------------

class MarkupWriter {
public:
    MarkupWriter(bool plain, const WriterOptions& opts, Diagnostics& diags, bool tight = false)
        : plain_(plain), opts_(opts), diags_(diags), tight_(tight)
    {
        opts_.markup_lang = plain ? "text" : "markdown";
        opts_.serializer.clear();
    }

    void children(const IRNode& n)
    {
        for (const auto& c : n.children)
            node(c);
    }

    void node(const IRNode& n)
    {
        switch (n.kind) {
        case IRKind::text:
            emit(n.text);
            break;
        case IRKind::p:
        case IRKind::item:
        case IRKind::any:
            separate(n);
            children(n);
            separate(n);
            break;
        case IRKind::h:
            blank();
            if (!plain_)
                emit(std::string(static_cast<std::size_t>(std::clamp(n.get_int("level", 1), 1LL, 6LL)), '#') + " ");
            children(n);
            blank();
            break;
        case IRKind::b:
            wrap(n, "**");
            break;
        case IRKind::i:
            wrap(n, "*");
            break;
        case IRKind::u:
            wrap(n, "__");
            break;
        case IRKind::s:
            wrap(n, "~~");
            break;
        case IRKind::span:
        case IRKind::thead:
        case IRKind::tbody:
        case IRKind::trow:
        case IRKind::tcell:
            children(n);
            break;
        case IRKind::code:
            if (n.get_bool("inline", true))
                inline_code(n);
            else
                code_block(n);
            break;
        case IRKind::list:
            list(n);
            break;
        case IRKind::table:
            table(n);
            break;
        case IRKind::nl:
            flush();
            out_.append(static_cast<std::size_t>(std::max(1LL, n.get_int("count", 1))), '\n');
            break;
        case IRKind::img:
            emit("![" + n.get_string("alt") + "]");
            break;
        case IRKind::env:
            if (env_is_transparent(n, opts_)) {
                children(n);
            } else {
                blank();
                emit(render_env(n, opts_, diags_));
                blank();
            }
            break;
        case IRKind::obj: {
            const Value* data = n.get("data");
            std::string body = data ? data->dump(2, ' ', false, Value::error_handler_t::replace) : "null";
            blank();
            emit(plain_ ? body : "```json\n" + body + "\n```");
            blank();
            break;
        }
        }
    }

    /// Output so far without trailing newlines.
    std::string take()
    {
        while (!out_.empty() && out_.back() == '\n')
            out_.pop_back();
        return std::move(out_);
    }

private:
    void blank() { pending_ = std::max(pending_, 2); }
    void newline() { pending_ = std::max(pending_, 1); }

    void separate(const IRNode& n)
    {
        if (n.get_bool("blank-line", true))
            blank();
        else
            newline();
    }

    void flush()
    {
        if (pending_ && !out_.empty()) {
            int have = 0;
            for (auto it = out_.rbegin(); it != out_.rend() && *it == '\n' && have < pending_; ++it)
                ++have;
            out_.append(static_cast<std::size_t>(pending_ - have), '\n');
        }
        pending_ = 0;
    }

    void emit(std::string_view s)
    {
        if (s.empty())
            return;
        flush();
        out_ += s;
    }

    std::string sub_render(const IRNode& n, bool tight)
    {
        MarkupWriter sub(plain_, opts_, diags_, tight);
        sub.children(n);
        std::string s = sub.take();
        auto first = s.find_first_not_of('\n');
        return first == std::string::npos ? std::string() : s.substr(first);
    }

    void wrap(const IRNode& n, std::string_view marker)
    {
        if (plain_) {
            children(n);
            return;
        }
        std::string s = sub_render(n, tight_);
        auto first = s.find_first_not_of(' ');
        if (first == std::string::npos) {
            emit(s);
            return;
        }
        auto last = s.find_last_not_of(' ');
        std::string out = s.substr(0, first);
        out += marker;
        out += s.substr(first, last - first + 1);
        out += marker;
        out += s.substr(last + 1);
        emit(out);
    }

    void inline_code(const IRNode& n)
    {
        std::string body = plain_text(n);
        if (body.empty())
            return;
        if (plain_) {
            emit(body);
            return;
        }
        std::string ticks(longest_run(body, '`') + 1, '`');
        std::string pad = body.front() == '`' || body.back() == '`' ? " " : "";
        emit(ticks + pad + body + pad + ticks);
    }

    void code_block(const IRNode& n)
    {
        std::string body = plain_text(n);
        separate(n);
        if (plain_) {
            emit(body);
        } else {
            std::string fence(std::max<std::size_t>(3, longest_run(body, '`') + 1), '`');
            emit(fence + n.get_string("lang") + "\n" + body + (body.empty() ? "" : "\n") + fence);
        }
        separate(n);
    }

    void list(const IRNode& n)
    {
        std::string style = n.get_string("list-style", "dash");
        if (tight_)
            newline();
        else
            blank();
        std::size_t index = 0;
        for (const auto& c : n.children) {
            std::string body;
            if (c.kind == IRKind::item) {
                body = sub_render(c, true);
            } else {
                IRNode wrapper = IRNode::make(IRKind::item, {c});
                body = sub_render(wrapper, true);
            }
            std::string bullet = bullet_for(style, index++);
            std::string indent(bullet.size(), ' ');
            std::string text = bullet;
            std::size_t pos = 0;
            bool first = true;
            while (true) {
                std::size_t nl = body.find('\n', pos);
                std::string_view line = std::string_view(body).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
                if (!first) {
                    text += '\n';
                    if (!line.empty())
                        text += indent;
                }
                text += line;
                first = false;
                if (nl == std::string::npos)
                    break;
                pos = nl + 1;
            }
            newline();
            emit(text);
        }
        if (tight_)
            newline();
        else
            blank();
    }

    std::string cell_text(const IRNode& cell)
    {
        std::string s = sub_render(cell, true);
        std::string out;
        out.reserve(s.size());
        for (char c : s) {
            if (plain_) {
                out += (c == '\n' || c == '\t' || c == '\r') ? ' ' : c;
            } else if (c == '|') {
                out += "\\|";
            } else if (c == '\n') {
                out += "<br>";
            } else if (c != '\r') {
                out += c;
            }
        }
        return out;
    }

    void table(const IRNode& n)
    {
        std::vector<std::vector<std::string>> head;
        std::vector<std::vector<std::string>> rows;
        auto collect = [&](const IRNode& row, std::vector<std::vector<std::string>>& into) {
            std::vector<std::string> cells;
            cells.reserve(row.children.size());
            for (const auto& cell : row.children)
                cells.push_back(cell_text(cell));
            into.push_back(std::move(cells));
        };
        for (const auto& section : n.children) {
            if (section.kind == IRKind::trow) {
                collect(section, rows);
                continue;
            }
            for (const auto& row : section.children)
                collect(row, section.kind == IRKind::thead ? head : rows);
        }
        std::size_t width = 0;
        for (const auto& r : head)
            width = std::max(width, r.size());
        for (const auto& r : rows)
            width = std::max(width, r.size());

        std::string text;
        auto line = [&](const std::vector<std::string>& cells) {
            if (!text.empty())
                text += '\n';
            if (plain_) {
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (i)
                        text += '\t';
                    text += cells[i];
                }
                return;
            }
            text += '|';
            for (std::size_t i = 0; i < width; ++i) {
                text += ' ';
                if (i < cells.size())
                    text += cells[i];
                text += " |";
            }
        };
        if (plain_) {
            for (const auto& r : head)
                line(r);
        } else {
            line(head.empty() ? std::vector<std::string>{} : head.front());
            text += "\n|";
            for (std::size_t i = 0; i < width; ++i)
                text += " --- |";
            for (std::size_t r = 1; r < head.size(); ++r)
                line(head[r]);
        }
        for (const auto& r : rows)
            line(r);
        blank();
        emit(text);
        blank();
    }

    bool plain_;
    WriterOptions opts_;
    Diagnostics& diags_;
    bool tight_;
    std::string out_;
    int pending_ = 0;
};

// ---- html and xml -----------------------------------------------------------

class TagWriter {
public:
    TagWriter(bool xml, const WriterOptions& opts, Diagnostics& diags) : xml_(xml), opts_(opts), diags_(diags)
    {
        opts_.markup_lang = xml ? "xml" : "html";
        opts_.serializer.clear();
    }

    void document(const IRNode& root)
    {
        if (root.kind == IRKind::p)
            children(root, 0);
        else
            node(root, 0);
    }

    void children(const IRNode& n, int depth)
    {
        for (const auto& c : n.children)
            node(c, depth);
    }

    std::string take()
    {
        while (!out_.empty() && out_.back() == '\n')
            out_.pop_back();
        return std::move(out_);
    }

private:
    static bool layout_block(const IRNode& n)
    {
        switch (n.kind) {
        case IRKind::p:
        case IRKind::h:
        case IRKind::list:
        case IRKind::item:
        case IRKind::table:
        case IRKind::thead:
        case IRKind::tbody:
        case IRKind::trow:
        case IRKind::tcell:
        case IRKind::env:
        case IRKind::obj:
        case IRKind::any:
            return true;
        case IRKind::code:
            return !n.get_bool("inline", true);
        default:
            return false;
        }
    }

    void line_start(int depth)
    {
        if (!opts_.pretty)
            return;
        if (!out_.empty() && out_.back() != '\n')
            out_ += '\n';
        out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    }

    void end_line()
    {
        if (opts_.pretty)
            out_ += '\n';
    }

    std::string attr_text(const Value& v) const
    {
        return v.is_string() ? v.get<std::string>() : v.dump(-1, ' ', false, Value::error_handler_t::replace);
    }

    std::string html_tag(const IRNode& n, bool has_block) const
    {
        switch (n.kind) {
        case IRKind::p: return has_block ? "div" : "p";
        case IRKind::h: return "h" + std::to_string(std::clamp(n.get_int("level", 1), 1LL, 6LL));
        case IRKind::list: {
            std::string style = n.get_string("list-style", "dash");
            return style == "decimal" || style == "latin" ? "ol" : "ul";
        }
        case IRKind::item: return "li";
        case IRKind::trow: return "tr";
        case IRKind::tcell: return in_head_ ? "th" : "td";
        case IRKind::code: return n.get_bool("inline", true) ? "code" : "pre";
        case IRKind::obj: return "pre";
        case IRKind::any: return "div";
        default: return std::string(to_string(n.kind));
        }
    }

    std::string open_tag(const IRNode& n, const std::string& tag) const
    {
        std::string s = "<" + tag;
        if (xml_) {
            for (const auto& [k, v] : n.attributes) {
                if (k == "speaker" || k == "original-start-index" || k == "original-end-index" || k == "data")
                    continue;
                s += " " + k + "=\"" + escape_markup(attr_text(v), true) + "\"";
            }
        } else if (n.kind == IRKind::list && n.get_string("list-style") == "latin") {
            s += " type=\"a\"";
        }
        return s + ">";
    }

    void leaf_content(const IRNode& n)
    {
        if (n.kind == IRKind::obj) {
            const Value* data = n.get("data");
            out_ += escape_markup(data ? data->dump(2, ' ', false, Value::error_handler_t::replace) : "null");
            return;
        }
        std::string body = escape_markup(plain_text(n));
        if (!xml_ && n.kind == IRKind::code && !n.get_bool("inline", true)) {
            std::string lang = n.get_string("lang");
            out_ += lang.empty() ? "<code>" : "<code class=\"language-" + escape_markup(lang, true) + "\">";
            out_ += body;
            out_ += "</code>";
            return;
        }
        out_ += body;
    }

    void node(const IRNode& n, int depth)
    {
        switch (n.kind) {
        case IRKind::text:
            out_ += escape_markup(n.text);
            return;
        case IRKind::nl: {
            auto count = static_cast<std::size_t>(std::max(1LL, n.get_int("count", 1)));
            for (std::size_t i = 0; i < count; ++i)
                out_ += xml_ ? "<nl/>" : "<br/>";
            return;
        }
        case IRKind::img:
            if (xml_) {
                std::string tag = open_tag(n, "img");
                tag.insert(tag.size() - 1, "/");
                out_ += tag;
            } else {
                out_ += "<img src=\"data:" + escape_markup(n.get_string("type", "image/png"), true) + ";base64,"
                        + escape_markup(n.get_string("base64"), true) + "\" alt=\"" + escape_markup(n.get_string("alt"), true) + "\"/>";
            }
            return;
        case IRKind::env:
            if (env_is_transparent(n, opts_)) {
                children(n, depth);
            } else {
                line_start(depth);
                out_ += render_env(n, opts_, diags_);
                end_line();
            }
            return;
        default:
            break;
        }

        bool has_block = std::any_of(n.children.begin(), n.children.end(), [](const IRNode& c) { return layout_block(c); });
        std::string tag = xml_ ? std::string(to_string(n.kind)) : html_tag(n, has_block);
        bool block = layout_block(n);
        bool head = n.kind == IRKind::thead;
        bool saved_head = in_head_;
        if (head)
            in_head_ = true;
        else if (n.kind == IRKind::tbody)
            in_head_ = false;

        if (block)
            line_start(depth);
        out_ += open_tag(n, tag);
        if (n.kind == IRKind::obj || n.kind == IRKind::code) {
            leaf_content(n);
        } else if (!block || !has_block) {
            children(n, depth + 1);
        } else {
            bool run = false;
            for (const auto& c : n.children) {
                if (layout_block(c)) {
                    run = false;
                    node(c, depth + 1);
                } else {
                    if (!run)
                        line_start(depth + 1);
                    run = true;
                    node(c, depth + 1);
                }
            }
            line_start(depth);
        }
        out_ += "</" + tag + ">";
        if (block)
            end_line();
        in_head_ = saved_head;
    }

    bool xml_;
    WriterOptions opts_;
    Diagnostics& diags_;
    std::string out_;
    bool in_head_ = false;
};

// ---- json and yaml ----------------------------------------------------------

class Serializer {
public:
    Serializer(const WriterOptions& opts, Diagnostics& diags) : opts_(opts), diags_(diags) {}

    Value value(const IRNode& n)
    {
        switch (n.kind) {
        case IRKind::text:
            return n.text;
        case IRKind::obj: {
            const Value* data = n.get("data");
            return data ? *data : Value(nullptr);
        }
        case IRKind::any:
            return any_value(n);
        case IRKind::list: {
            Value arr = Value::array();
            for (const auto& c : n.children)
                arr.push_back(c.kind == IRKind::item ? container(c) : value(c));
            return arr;
        }
        case IRKind::table:
            return table_value(n);
        case IRKind::env: {
            WriterOptions o = env_options(n, opts_);
            if (!o.serializer.empty())
                return container(n);
            return render_env(n, opts_, diags_);
        }
        case IRKind::img:
            diags_.push_back(make_warning("unsupported-kind-for-writer", "images cannot be serialized; using the alt text"));
            return n.get_string("alt");
        case IRKind::nl:
            return std::string(static_cast<std::size_t>(std::max(1LL, n.get_int("count", 1))), '\n');
        default:
            if (std::any_of(n.children.begin(), n.children.end(), structural))
                return container(n);
            return text_of(n);
        }
    }

    Value container(const IRNode& n)
    {
        std::vector<const IRNode*> kids;
        for (const auto& c : n.children)
            if (c.kind != IRKind::text || c.text.find_first_not_of(" \t\r\n") != std::string::npos)
                kids.push_back(&c);
        if (kids.empty())
            return "";
        bool all_named = std::all_of(kids.begin(), kids.end(), [](const IRNode* c) { return c->kind == IRKind::any && c->get("name"); });
        if (all_named) {
            Value obj = Value::object();
            bool unique = true;
            for (const IRNode* c : kids) {
                std::string name = c->get_string("name");
                if (obj.contains(name))
                    unique = false;
                obj[name] = value(*c);
            }
            if (unique)
                return obj;
        }
        if (kids.size() == 1)
            return value(*kids.front());

        Value arr = Value::array();
        IRNode run = IRNode::make(IRKind::span);
        auto flush = [&] {
            if (run.children.empty())
                return;
            std::string s = text_of(run);
            if (s.find_first_not_of(" \t\r\n") != std::string::npos)
                arr.push_back(std::move(s));
            run.children.clear();
        };
        for (const IRNode* c : kids) {
            if (!structural(*c)) {
                run.children.push_back(*c);
                continue;
            }
            flush();
            if (c->kind == IRKind::any && c->get("name")) {
                Value obj = Value::object();
                obj[c->get_string("name")] = value(*c);
                arr.push_back(std::move(obj));
            } else {
                arr.push_back(value(*c));
            }
        }
        flush();
        if (arr.size() == 1)
            return arr[0];
        return arr;
    }

private:
    static bool structural(const IRNode& n)
    {
        switch (n.kind) {
        case IRKind::any:
        case IRKind::obj:
        case IRKind::list:
        case IRKind::table:
        case IRKind::env:
        case IRKind::p:
        case IRKind::h:
        case IRKind::item:
            return true;
        case IRKind::code:
            return !n.get_bool("inline", true);
        default:
            return false;
        }
    }

    std::string text_of(const IRNode& n)
    {
        MarkupWriter w(true, opts_, diags_);
        if (n.kind == IRKind::span)
            w.children(n);
        else
            w.node(n);
        return w.take();
    }

    Value any_value(const IRNode& n)
    {
        std::string type = n.get_string("type");
        if (type == "null")
            return nullptr;
        if (n.children.empty())
            return "";
        bool textual = std::none_of(n.children.begin(), n.children.end(), structural);
        if (!textual || type.empty() || type == "string" || type == "undefined" || type == "buffer")
            return container(n);
        std::string s = text_of(IRNode::make(IRKind::span, n.children));
        if (type == "boolean")
            return s == "true";
        Value parsed = Value::parse(s, nullptr, false);
        if (parsed.is_discarded())
            return s;
        if ((type == "integer" || type == "float") && !parsed.is_number())
            return s;
        return parsed;
    }

    Value table_value(const IRNode& n)
    {
        std::vector<std::string> header;
        Value arr = Value::array();
        for (const auto& section : n.children) {
            for (const auto& row : section.children) {
                if (section.kind == IRKind::thead) {
                    if (header.empty())
                        for (const auto& cell : row.children)
                            header.push_back(text_of(cell));
                    continue;
                }
                Value obj = Value::object();
                for (std::size_t i = 0; i < row.children.size(); ++i)
                    obj[i < header.size() ? header[i] : std::to_string(i)] = text_of(row.children[i]);
                arr.push_back(std::move(obj));
            }
        }
        return arr;
    }

    WriterOptions opts_;
    Diagnostics& diags_;
};

std::string dump(const Value& v, std::string_view serializer)
{
    if (serializer == "yaml")
        return to_yaml(v);
    return v.dump(2, ' ', false, Value::error_handler_t::replace);
}

std::string render_container(const IRNode& container, const WriterOptions& opts, Diagnostics& diags)
{
    if (!opts.serializer.empty())
        return dump(Serializer(opts, diags).container(container), opts.serializer);
    if (opts.markup_lang == "html" || opts.markup_lang == "xml") {
        TagWriter w(opts.markup_lang == "xml", opts, diags);
        w.children(container, 0);
        return w.take();
    }
    MarkupWriter w(opts.markup_lang == "text", opts, diags);
    w.children(container);
    std::string s = w.take();
    auto first = s.find_first_not_of('\n');
    return first == std::string::npos ? std::string() : s.substr(first);
}

std::string render_env(const IRNode& env, const WriterOptions& outer, Diagnostics& diags)
{
    return render_container(env, env_options(env, outer), diags);
}

std::string finish(std::string s, bool trim_lines)
{
    if (trim_lines) {
        std::string out;
        out.reserve(s.size());
        std::size_t pos = 0;
        std::size_t fence = 0; // backtick count of the open code fence
        while (pos <= s.size()) {
            std::size_t nl = s.find('\n', pos);
            std::size_t end = nl == std::string::npos ? s.size() : nl;
            std::size_t ticks = 0;
            while (pos + ticks < end && s[pos + ticks] == '`')
                ++ticks;
            bool fence_line = ticks >= 3 && (fence == 0 || (ticks >= fence && s.find_first_not_of("` ", pos) >= end));
            std::size_t last = end;
            if (fence == 0 || fence_line)
                while (last > pos && (s[last - 1] == ' ' || s[last - 1] == '\t'))
                    --last;
            if (fence_line)
                fence = fence == 0 ? ticks : 0;
            out.append(s, pos, last - pos);
            if (nl == std::string::npos)
                break;
            out += '\n';
            pos = nl + 1;
        }
        s = std::move(out);
    }
    s = strip_control(s);
    auto first = s.find_first_not_of('\n');
    if (first == std::string::npos)
        return {};
    auto last = s.find_last_not_of('\n');
    return s.substr(first, last - first + 1) + "\n";
}

} // namespace

WriteResult write(const IRNode& root, const WriterOptions& options)
{
    WriteResult r;
    std::string out;
    bool trim_lines = false;
    if (!options.serializer.empty()) {
        Serializer s(options, r.diagnostics);
        Value v = root.kind == IRKind::p ? s.container(root) : s.value(root);
        out = dump(v, options.serializer);
    } else if (options.markup_lang == "html" || options.markup_lang == "xml") {
        TagWriter w(options.markup_lang == "xml", options, r.diagnostics);
        w.document(root);
        out = w.take();
    } else {
        MarkupWriter w(options.markup_lang == "text", options, r.diagnostics);
        w.node(root);
        out = w.take();
        trim_lines = true;
    }
    r.output = finish(std::move(out), trim_lines);
    return r;
}

} // namespace poml
