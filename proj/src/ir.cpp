#include "poml/ir.hpp"

#include <cmath>

namespace poml {

namespace {

constexpr std::array<std::string_view, 21> kind_names = {
    "any", "b", "code", "env", "h", "i", "img", "item", "list", "nl", "obj",
    "p", "s", "span", "table", "tbody", "tcell", "text", "thead", "trow", "u",
};

} // namespace

std::string_view to_string(IRKind kind)
{
    return kind_names[static_cast<std::size_t>(kind)];
}

std::optional<IRKind> ir_kind_from_string(std::string_view name)
{
    for (std::size_t i = 0; i < kind_names.size(); ++i)
        if (kind_names[i] == name)
            return static_cast<IRKind>(i);
    return std::nullopt;
}

IRNode IRNode::make_text(std::string text)
{
    IRNode n;
    n.kind = IRKind::text;
    n.text = std::move(text);
    return n;
}

IRNode IRNode::make(IRKind kind, std::vector<IRNode> children)
{
    IRNode n;
    n.kind = kind;
    n.children = std::move(children);
    return n;
}

IRNode& IRNode::set(std::string name, Value value)
{
    attributes[std::move(name)] = std::move(value);
    return *this;
}

const Value* IRNode::get(std::string_view name) const
{
    auto it = attributes.find(name);
    return it == attributes.end() ? nullptr : &it->second;
}

std::string IRNode::get_string(std::string_view name, std::string_view fallback) const
{
    const Value* v = get(name);
    return v && v->is_string() ? v->get<std::string>() : std::string(fallback);
}

bool IRNode::get_bool(std::string_view name, bool fallback) const
{
    const Value* v = get(name);
    return v && v->is_boolean() ? v->get<bool>() : fallback;
}

long long IRNode::get_int(std::string_view name, long long fallback) const
{
    const Value* v = get(name);
    return v && v->is_number() ? static_cast<long long>(v->get<double>()) : fallback;
}

namespace {

enum class AttrKind { string, boolean, integer, object, json };

struct AttrRule {
    std::string_view name;
    AttrKind kind;
    std::vector<std::string_view> choices = {};
};

const std::vector<AttrRule>& rules_for(IRKind kind)
{
    static const std::vector<AttrRule> none;
    static const std::vector<AttrRule> any = {
        {"type", AttrKind::string, {"string", "integer", "float", "boolean", "array", "object", "buffer", "null", "undefined"}},
        {"name", AttrKind::string},
    };
    static const std::vector<AttrRule> code = {{"inline", AttrKind::boolean}, {"lang", AttrKind::string}, {"blank-line", AttrKind::boolean}};
    static const std::vector<AttrRule> env = {
        {"presentation", AttrKind::string, {"markup", "serialize", "free", "multimedia"}},
        {"markup-lang", AttrKind::string, {"markdown", "html", "xml", "text"}},
        {"serializer", AttrKind::string, {"json", "yaml"}},
        {"writer-options", AttrKind::object},
    };
    static const std::vector<AttrRule> h = {{"level", AttrKind::integer}};
    static const std::vector<AttrRule> img = {
        {"base64", AttrKind::string}, {"alt", AttrKind::string}, {"position", AttrKind::string, {"here", "top", "bottom"}},
        {"type", AttrKind::string, {"image/png", "image/jpeg"}}, {"max-width", AttrKind::integer}, {"max-height", AttrKind::integer},
    };
    static const std::vector<AttrRule> list = {{"list-style", AttrKind::string, {"dash", "star", "plus", "decimal", "latin"}}};
    static const std::vector<AttrRule> nl = {{"count", AttrKind::integer}};
    static const std::vector<AttrRule> obj = {{"data", AttrKind::json}};
    static const std::vector<AttrRule> p = {{"blank-line", AttrKind::boolean}};
    switch (kind) {
    case IRKind::any: return any;
    case IRKind::code: return code;
    case IRKind::env: return env;
    case IRKind::h: return h;
    case IRKind::img: return img;
    case IRKind::list: return list;
    case IRKind::nl: return nl;
    case IRKind::obj: return obj;
    case IRKind::p: return p;
    default: return none;
    }
}

bool is_integer(const Value& v)
{
    if (!v.is_number())
        return false;
    double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d);
}

bool is_leaf(IRKind k)
{
    return k == IRKind::text || k == IRKind::nl || k == IRKind::img || k == IRKind::obj;
}

class Validator {
public:
    Diagnostics run(const IRNode& root)
    {
        visit(root, nullptr, std::string(to_string(root.kind)));
        return std::move(diags_);
    }

private:
    void fail(const std::string& path, const std::string& msg, const IRNode& n)
    {
        Span span;
        if (const Value* s = n.get("original-start-index"); s && is_integer(*s) && s->get<double>() >= 0)
            span.start = span.end = static_cast<std::size_t>(s->get<double>());
        if (const Value* e = n.get("original-end-index"); e && is_integer(*e) && e->get<double>() >= static_cast<double>(span.start))
            span.end = static_cast<std::size_t>(e->get<double>());
        diags_.push_back(make_error("ir-invalid", path + ": " + msg, span));
    }

    void check_attr(const std::string& path, const IRNode& n, const std::string& name, const Value& v, const AttrRule& rule)
    {
        bool ok = true;
        switch (rule.kind) {
        case AttrKind::string: ok = v.is_string(); break;
        case AttrKind::boolean: ok = v.is_boolean(); break;
        case AttrKind::integer: ok = is_integer(v); break;
        case AttrKind::object: ok = v.is_object(); break;
        case AttrKind::json: ok = true; break;
        }
        if (!ok) {
            fail(path, "attribute '" + name + "' has the wrong type", n);
            return;
        }
        if (!rule.choices.empty()) {
            const std::string& s = v.get_ref<const std::string&>();
            bool found = false;
            for (auto c : rule.choices)
                found |= c == s;
            if (!found)
                fail(path, "attribute '" + name + "' has unsupported value '" + s + "'", n);
        }
    }

    void visit(const IRNode& n, const IRNode* parent, const std::string& path)
    {
        static const std::vector<AttrRule> universal = {
            {"speaker", AttrKind::string, {"ai", "human", "system"}},
            {"original-start-index", AttrKind::integer},
            {"original-end-index", AttrKind::integer},
        };
        for (const auto& [name, value] : n.attributes) {
            const AttrRule* rule = nullptr;
            for (const auto& r : universal)
                if (r.name == name)
                    rule = &r;
            for (const auto& r : rules_for(n.kind))
                if (r.name == name)
                    rule = &r;
            if (!rule) {
                fail(path, "attribute '" + name + "' is not defined for <" + std::string(to_string(n.kind)) + ">", n);
                continue;
            }
            check_attr(path, n, name, value, *rule);
        }
        const Value* start = n.get("original-start-index");
        const Value* end = n.get("original-end-index");
        if (start && end && is_integer(*start) && is_integer(*end)) {
            if (start->get<double>() < 0 || start->get<double>() > end->get<double>())
                fail(path, "original-start-index must be >= 0 and <= original-end-index", n);
        }

        switch (n.kind) {
        case IRKind::h: {
            const Value* level = n.get("level");
            if (level && is_integer(*level) && (level->get<double>() < 1 || level->get<double>() > 6))
                fail(path, "heading level must be between 1 and 6", n);
            break;
        }
        case IRKind::nl: {
            const Value* count = n.get("count");
            if (count && is_integer(*count) && count->get<double>() < 1)
                fail(path, "newline count must be at least 1", n);
            break;
        }
        case IRKind::env: {
            std::string presentation = n.get_string("presentation");
            if (presentation.empty())
                fail(path, "env requires 'presentation'", n);
            else if (presentation == "markup" && !n.get("markup-lang"))
                fail(path, "markup env requires 'markup-lang'", n);
            else if (presentation == "serialize" && !n.get("serializer"))
                fail(path, "serialize env requires 'serializer'", n);
            break;
        }
        default:
            break;
        }

        if (n.kind != IRKind::text && !n.text.empty())
            fail(path, "only text nodes carry a text payload", n);
        if (is_leaf(n.kind) && !n.children.empty())
            fail(path, "<" + std::string(to_string(n.kind)) + "> cannot have children", n);

        auto require_children = [&](std::initializer_list<IRKind> allowed, const char* what) {
            for (const auto& c : n.children) {
                bool ok = false;
                for (auto k : allowed)
                    ok |= c.kind == k;
                if (!ok)
                    fail(path, "<" + std::string(to_string(c.kind)) + "> is not allowed directly under <" + std::string(to_string(n.kind))
                                   + "> (expected " + what + ")",
                         c);
            }
        };
        if (n.kind == IRKind::table)
            require_children({IRKind::thead, IRKind::tbody}, "thead or tbody");
        else if (n.kind == IRKind::thead || n.kind == IRKind::tbody)
            require_children({IRKind::trow}, "trow");
        else if (n.kind == IRKind::trow)
            require_children({IRKind::tcell}, "tcell");
        if (n.kind == IRKind::item && (!parent || parent->kind != IRKind::list))
            fail(path, "<item> must be a child of <list>", n);

        for (std::size_t i = 0; i < n.children.size(); ++i)
            visit(n.children[i], &n, path + "/" + std::to_string(i) + ":" + std::string(to_string(n.children[i].kind)));
    }

    Diagnostics diags_;
};

void escape_json(std::string_view s, std::string& out)
{
    static constexpr char hex[] = "0123456789abcdef";
    out += '"';
    for (char ch : s) {
        auto c = static_cast<unsigned char>(ch);
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default:
            if (c < 0x20) {
                out += "\\u00";
                out += hex[c >> 4];
                out += hex[c & 0xF];
            } else {
                out += ch;
            }
        }
    }
    out += '"';
}

void write_node(const IRNode& n, std::string& out)
{
    out += '{';
    if (!n.attributes.empty()) {
        out += "\"attributes\":{";
        bool first = true;
        for (const auto& [k, v] : n.attributes) {
            if (!first)
                out += ',';
            first = false;
            escape_json(k, out);
            out += ':';
            out += v.dump(-1, ' ', false, Value::error_handler_t::replace);
        }
        out += "},";
    }
    if (!n.children.empty()) {
        out += "\"children\":[";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i)
                out += ',';
            write_node(n.children[i], out);
        }
        out += "],";
    }
    out += "\"kind\":";
    escape_json(to_string(n.kind), out);
    if (n.kind == IRKind::text) {
        out += ",\"text\":";
        escape_json(n.text, out);
    }
    out += '}';
}

struct ReadError {
    std::string code;
    std::string message;
};

constexpr std::size_t max_ir_depth = 2048;

/// SAX handler that builds the tree directly, so large documents never
/// materialize as a JSON DOM. Attribute values are built as Values to keep
/// their key order. Structural problems are recorded and parsing continues,
/// so malformed JSON anywhere still takes precedence.
class Reader {
public:
    std::optional<IRNode> root;
    std::optional<ReadError> error;
    bool malformed = false;

    bool null() { return scalar(Value(nullptr)); }
    bool boolean(bool b) { return scalar(Value(b)); }
    bool number_integer(std::int64_t v) { return scalar(Value(v)); }
    bool number_unsigned(std::uint64_t v) { return scalar(Value(v)); }
    bool number_float(double v, const std::string&) { return scalar(Value(v)); }
    bool string(std::string& v) { return scalar(Value(std::move(v))); }
    bool binary(Value::binary_t&) { return scalar(Value(nullptr)); }

    bool start_object(std::size_t)
    {
        if (error)
            return true;
        switch (context()) {
        case Frame::top:
        case Frame::children:
            if (nodes_.size() >= max_ir_depth)
                return fail("invariant-violation", "IR nested too deeply");
            nodes_.emplace_back();
            frames_.push_back(Frame::node);
            return true;
        case Frame::node:
            if (nodes_.back().key != "attributes")
                return node_value_error();
            frames_.push_back(Frame::attributes);
            return true;
        case Frame::attributes:
            open_value(Value::object());
            return true;
        case Frame::value:
            open_value(Value::object());
            return true;
        }
        return true;
    }

    bool start_array(std::size_t)
    {
        if (error)
            return true;
        switch (context()) {
        case Frame::top:
        case Frame::children:
            return fail("invariant-violation", "IR node must be a JSON object");
        case Frame::node:
            if (nodes_.back().key != "children")
                return node_value_error();
            frames_.push_back(Frame::children);
            return true;
        case Frame::attributes:
        case Frame::value:
            open_value(Value::array());
            return true;
        }
        return true;
    }

    bool key(std::string& k)
    {
        if (error)
            return true;
        if (context() == Frame::node) {
            if (k != "kind" && k != "text" && k != "attributes" && k != "children")
                return fail("invariant-violation", "unexpected key '" + k + "' in IR node");
            nodes_.back().key = std::move(k);
        } else if (context() == Frame::attributes) {
            attribute_ = std::move(k);
        } else {
            values_.back().key = std::move(k);
        }
        return true;
    }

    bool end_object()
    {
        if (error)
            return true;
        switch (context()) {
        case Frame::value:
            close_value();
            return true;
        case Frame::attributes:
            frames_.pop_back();
            return true;
        default:
            break;
        }
        Pending done = std::move(nodes_.back());
        nodes_.pop_back();
        frames_.pop_back();
        if (!done.kind)
            return fail("invariant-violation", "IR node is missing a string 'kind'");
        auto kind = ir_kind_from_string(*done.kind);
        if (!kind)
            return fail("unknown-kind", "unknown IR kind '" + *done.kind + "'");
        done.node.kind = *kind;
        if (context() == Frame::top)
            root = std::move(done.node);
        else
            nodes_.back().node.children.push_back(std::move(done.node));
        return true;
    }

    bool end_array()
    {
        if (error)
            return true;
        if (context() == Frame::value)
            close_value();
        else
            frames_.pop_back();
        return true;
    }

    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&)
    {
        malformed = true;
        return false;
    }

private:
    enum class Frame { top, node, attributes, children, value };

    struct Pending {
        IRNode node;
        std::optional<std::string> kind;
        std::string key;
    };

    struct OpenValue {
        Value value;
        std::string key;
    };

    Frame context() const { return frames_.empty() ? Frame::top : frames_.back(); }

    bool fail(std::string code, std::string message)
    {
        error = ReadError{std::move(code), std::move(message)};
        return true;
    }

    bool node_value_error()
    {
        const std::string& k = nodes_.back().key;
        if (k == "kind")
            return fail("invariant-violation", "IR node is missing a string 'kind'");
        return fail("invariant-violation", "'" + k + "' must be " + (k == "attributes" ? "an object" : k == "children" ? "an array" : "a string"));
    }

    bool scalar(Value v)
    {
        if (error)
            return true;
        switch (context()) {
        case Frame::top:
        case Frame::children:
            return fail("invariant-violation", "IR node must be a JSON object");
        case Frame::node: {
            Pending& p = nodes_.back();
            if (!v.is_string() || (p.key != "kind" && p.key != "text"))
                return node_value_error();
            if (p.key == "kind")
                p.kind = v.get<std::string>();
            else
                p.node.text = std::move(v.get_ref<std::string&>());
            return true;
        }
        case Frame::attributes:
            nodes_.back().node.attributes[attribute_] = std::move(v);
            return true;
        case Frame::value:
            add_value(std::move(v));
            return true;
        }
        return true;
    }

    void open_value(Value container)
    {
        if (values_.empty())
            frames_.push_back(Frame::value);
        values_.push_back({std::move(container), {}});
    }

    void add_value(Value v)
    {
        OpenValue& top = values_.back();
        if (top.value.is_array())
            top.value.push_back(std::move(v));
        else
            top.value[top.key] = std::move(v);
    }

    void close_value()
    {
        Value done = std::move(values_.back().value);
        values_.pop_back();
        if (!values_.empty()) {
            add_value(std::move(done));
            return;
        }
        frames_.pop_back();
        nodes_.back().node.attributes[attribute_] = std::move(done);
    }

    std::vector<Frame> frames_;
    std::vector<Pending> nodes_;
    std::vector<OpenValue> values_;
    std::string attribute_;
};

void collect_text(const IRNode& n, std::string& out)
{
    out += n.text;
    for (const auto& c : n.children)
        collect_text(c, out);
}

} // namespace

Diagnostics validate(const IRNode& node)
{
    return Validator().run(node);
}

std::string serialize_ir(const IRNode& node)
{
    std::string out;
    write_node(node, out);
    return out;
}

DeserializeResult deserialize_ir(std::string_view json_text)
{
    DeserializeResult out;
    Reader reader;
    Value::sax_parse(json_text.begin(), json_text.end(), &reader);
    if (reader.malformed) {
        out.diagnostics.push_back(make_error("malformed-json", "IR input is not valid JSON"));
        return out;
    }
    if (reader.error) {
        out.diagnostics.push_back(make_error(reader.error->code, reader.error->message));
        return out;
    }
    if (!reader.root) {
        out.diagnostics.push_back(make_error("invariant-violation", "IR node must be a JSON object"));
        return out;
    }
    Diagnostics problems = validate(*reader.root);
    if (!problems.empty()) {
        for (auto& d : problems) {
            d.code = "invariant-violation";
            out.diagnostics.push_back(std::move(d));
        }
        return out;
    }
    out.node = std::move(reader.root);
    return out;
}

std::string plain_text(const IRNode& node)
{
    std::string out;
    collect_text(node, out);
    return out;
}

} // namespace poml
