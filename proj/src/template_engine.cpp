#include "poml/template.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace poml {

namespace {

std::string_view trim(std::string_view s)
{
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

/// `{{ expr }}` -> `expr` when the whole string is one hole, else as-is.
std::string_view strip_braces(std::string_view s)
{
    std::string_view t = trim(s);
    if (t.size() >= 4 && t.substr(0, 2) == "{{" && t.substr(t.size() - 2) == "}}"
        && t.find("{{", 2) == std::string_view::npos)
        return trim(t.substr(2, t.size() - 4));
    return t;
}

/// "x in items" -> {"x", "items"}.
std::optional<std::pair<std::string, std::string>> parse_for(std::string_view spec)
{
    auto is_ident = [](char c, bool first) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' || (!first && std::isdigit(static_cast<unsigned char>(c)));
    };
    spec = trim(spec);
    std::size_t i = 0;
    while (i < spec.size() && is_ident(spec[i], i == 0))
        ++i;
    if (i == 0 || i >= spec.size() || !std::isspace(static_cast<unsigned char>(spec[i])))
        return std::nullopt;
    std::string name(spec.substr(0, i));
    std::string_view rest = trim(spec.substr(i));
    if (rest.size() < 3 || rest.substr(0, 2) != "in" || !std::isspace(static_cast<unsigned char>(rest[2])))
        return std::nullopt;
    std::string_view expr = trim(rest.substr(2));
    if (expr.empty())
        return std::nullopt;
    return std::pair{std::move(name), std::string(expr)};
}

void remap_spans(SourceNode& node, Span span, const std::string& origin)
{
    node.span = span;
    if (node.kind == SourceKind::element && node.origin.empty())
        node.origin = origin;
    for (auto& a : node.attributes)
        a.span = span;
    for (auto& c : node.children)
        remap_spans(c, span, origin);
}

class Expander {
public:
    Expander(const ResourceLoader& loader, const ExpandOptions& opts, Scope scope)
        : loader_(loader), opts_(opts), scope_(std::move(scope)), base_dir_(opts.base_dir)
    {
        if (!opts.source_path.empty())
            include_stack_.push_back(opts.source_path);
    }

    ExpandResult run(const SourceNode& root)
    {
        SourceNode out = copy_shell(root);
        for (const auto& a : root.attributes) {
            SourceAttribute copy = a;
            if (interpolate_attribute(copy))
                out.attributes.push_back(std::move(copy));
        }
        expand_children(root.children, out.children);
        return {std::move(out), std::move(diags_)};
    }

private:
    void report(Diagnostic d)
    {
        d.file = current_file_;
        diags_.push_back(std::move(d));
    }

    SourceNode copy_shell(const SourceNode& n) const
    {
        SourceNode out;
        out.kind = n.kind;
        out.name = n.name;
        out.span = n.span;
        out.synthetic = n.synthetic;
        out.origin = n.origin.empty() ? origin_ : n.origin;
        return out;
    }

    void expand_children(const std::vector<SourceNode>& children, std::vector<SourceNode>& out)
    {
        scope_.push();
        std::optional<bool> last_if;
        for (const auto& child : children)
            expand_node(child, out, last_if);
        scope_.pop();
    }

    void expand_node(const SourceNode& n, std::vector<SourceNode>& out, std::optional<bool>& last_if)
    {
        switch (n.kind) {
        case SourceKind::comment:
            return;
        case SourceKind::text:
            out.push_back(n);
            if (!origin_.empty())
                out.back().origin = origin_;
            return;
        case SourceKind::expression_hole: {
            try {
                Value v = eval_expression(n.text, scope_);
                SourceNode t = copy_shell(n);
                t.kind = SourceKind::text;
                t.text = display_string(v);
                out.push_back(std::move(t));
            } catch (const ExpressionError& e) {
                report(make_error(e.code(), std::string(e.what()) + " in {{" + n.text + "}}", n.span));
            }
            return;
        }
        case SourceKind::element:
            break;
        }

        const SourceAttribute* if_attr = n.attribute("if");
        const SourceAttribute* else_attr = n.attribute("else");
        const SourceAttribute* for_attr = n.attribute("for");

        if (else_attr && if_attr) {
            report(make_warning("if-with-else", "<" + n.name + "> carries both 'if' and 'else'; 'else' ignored", else_attr->span));
            else_attr = nullptr;
        }
        if (else_attr) {
            if (!last_if) {
                report(make_error("orphan-else", "'else' on <" + n.name + "> has no preceding sibling with 'if'", else_attr->span));
                return;
            }
            bool keep = !*last_if;
            last_if.reset();
            if (!keep)
                return;
        }

        if (!for_attr) {
            bool kept = expand_instance(n, if_attr, out);
            if (if_attr)
                last_if = kept;
            return;
        }

        std::string spec(strip_braces(for_attr->value));
        auto loop_spec = parse_for(spec);
        if (!loop_spec) {
            report(make_error("parse-error", "'for' expects \"name in expression\", got \"" + spec + "\"", for_attr->span));
            return;
        }
        Value items;
        try {
            items = eval_expression(loop_spec->second, scope_);
        } catch (const ExpressionError& e) {
            report(make_error(e.code(), std::string(e.what()) + " in for=\"" + spec + "\"", for_attr->span));
            return;
        }
        if (!items.is_array()) {
            report(make_error("for-not-array", "'for' needs an array but got " + type_name(items), for_attr->span));
            return;
        }
        const std::string& var = loop_spec->first;
        bool any_kept = false;
        const double length = static_cast<double>(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            scope_.push();
            scope_.set(var, items[i]);
            Value loop = Value::object();
            loop["index"] = static_cast<double>(i);
            loop["length"] = length;
            loop["first"] = i == 0;
            loop["last"] = i + 1 == items.size();
            scope_.set("loop", std::move(loop));
            any_kept |= expand_instance(n, if_attr, out);
            scope_.pop();
        }
        if (if_attr)
            last_if = any_kept;
    }

    /// Returns false when an `if` condition removed the element.
    bool expand_instance(const SourceNode& n, const SourceAttribute* if_attr, std::vector<SourceNode>& sink)
    {
        if (if_attr) {
            try {
                if (!truthy(eval_expression(strip_braces(if_attr->value), scope_)))
                    return false;
            } catch (const ExpressionError& e) {
                report(make_error(e.code(), std::string(e.what()) + " in if=\"" + if_attr->value + "\"", if_attr->span));
                return false;
            }
        }

        SourceNode el = copy_shell(n);
        for (const auto& a : n.attributes) {
            if (a.name == "for" || a.name == "if" || a.name == "else")
                continue;
            SourceAttribute copy = a;
            bool raw = n.name == "let" && a.name == "value";
            if (!raw && !interpolate_attribute(copy))
                return true;
            el.attributes.push_back(std::move(copy));
        }

        if (n.name == "let") {
            bind_let(el, n);
            return true;
        }
        if (n.name == "include") {
            include(el, sink);
            return true;
        }
        expand_children(n.children, el.children);
        sink.push_back(std::move(el));
        return true;
    }

    bool interpolate_attribute(SourceAttribute& a)
    {
        if (a.value.find("{{") == std::string::npos)
            return true;
        std::string_view whole = strip_braces(a.value);
        bool single = whole.size() != trim(a.value).size();
        try {
            if (single) {
                Value v = eval_expression(whole, scope_);
                a.value = display_string(v);
                a.typed = std::move(v);
                return true;
            }
            std::string out;
            std::size_t pos = 0;
            while (pos < a.value.size()) {
                std::size_t open = a.value.find("{{", pos);
                if (open == std::string::npos) {
                    out.append(a.value, pos);
                    break;
                }
                std::size_t close = a.value.find("}}", open + 2);
                if (close == std::string::npos) {
                    out.append(a.value, pos);
                    break;
                }
                out.append(a.value, pos, open - pos);
                out += display_string(eval_expression(trim(std::string_view(a.value).substr(open + 2, close - open - 2)), scope_));
                pos = close + 2;
            }
            a.value = std::move(out);
            return true;
        } catch (const ExpressionError& e) {
            report(make_error(e.code(), std::string(e.what()) + " in attribute '" + a.name + "'", a.span));
            return false;
        }
    }

    void bind_let(const SourceNode& el, const SourceNode& original)
    {
        const SourceAttribute* name = el.attribute("name");
        const SourceAttribute* value = el.attribute("value");
        const SourceAttribute* src = el.attribute("src");
        Value bound;
        if (value) {
            try {
                bound = eval_expression(strip_braces(value->value), scope_);
            } catch (const ExpressionError& e) {
                report(make_error(e.code(), std::string(e.what()) + " in <let value>", value->span));
                return;
            }
        } else if (src) {
            Resource res = loader_.load(src->value, base_dir_);
            if (!res.ok()) {
                report(make_error("loader-failure", res.error, src->span));
                return;
            }
            if (file_extension(res.path) == "json") {
                bound = Value::parse(res.bytes, nullptr, false);
                if (bound.is_discarded()) {
                    report(make_error("malformed-json", "cannot parse " + res.path + " as JSON", src->span));
                    return;
                }
                bound = normalize_numbers(bound);
            } else {
                bound = res.bytes;
            }
        } else {
            std::string body;
            for (const auto& c : original.children)
                if (c.kind == SourceKind::text)
                    body += c.text;
            Value parsed = Value::parse(body, nullptr, false);
            bound = parsed.is_discarded() ? Value(std::string(trim(body))) : normalize_numbers(parsed);
        }

        if (name && !name->value.empty()) {
            scope_.set(name->value, std::move(bound));
        } else if (bound.is_object()) {
            for (auto& [k, v] : bound.items())
                scope_.set(k, v);
        } else {
            report(make_error("missing-attribute", "<let> needs a 'name' unless its value is an object", el.span));
        }
    }

    void include(const SourceNode& el, std::vector<SourceNode>& sink)
    {
        const SourceAttribute* src = el.attribute("src");
        if (!src || src->value.empty()) {
            report(make_error("missing-attribute", "<include> needs a 'src'", el.span));
            return;
        }
        if (include_stack_.size() > opts_.max_include_depth) {
            report(make_error("include-depth", "includes nested deeper than " + std::to_string(opts_.max_include_depth), el.span));
            return;
        }
        Resource res = loader_.load(src->value, base_dir_);
        if (!res.ok()) {
            report(make_error("loader-failure", res.error, src->span));
            return;
        }
        if (std::find(include_stack_.begin(), include_stack_.end(), res.path) != include_stack_.end()) {
            report(make_error("cyclic-include", "'" + res.path + "' includes itself", src->span));
            return;
        }

        ParseResult parsed = parse(res.bytes, opts_.parse);
        for (auto& d : parsed.diagnostics) {
            d.file = res.path;
            diags_.push_back(std::move(d));
        }

        std::string saved_file = std::move(current_file_);
        std::string saved_base = std::move(base_dir_);
        std::string saved_origin = std::move(origin_);
        current_file_ = res.path;
        base_dir_ = parent_dir(res.path);
        origin_ = res.path;
        include_stack_.push_back(res.path);

        std::vector<SourceNode> spliced;
        expand_children(parsed.root.children, spliced);

        include_stack_.pop_back();
        current_file_ = std::move(saved_file);
        base_dir_ = std::move(saved_base);
        origin_ = std::move(saved_origin);

        for (auto& node : spliced) {
            remap_spans(node, el.span, res.path);
            sink.push_back(std::move(node));
        }
    }

    const ResourceLoader& loader_;
    const ExpandOptions& opts_;
    Scope scope_;
    Diagnostics diags_;
    std::vector<std::string> include_stack_;
    std::string current_file_;
    std::string base_dir_;
    std::string origin_;
};

} // namespace

ExpandResult expand(const SourceNode& tree, Scope scope, const ResourceLoader& loader, const ExpandOptions& options)
{
    return Expander(loader, options, std::move(scope)).run(tree);
}

} // namespace poml
