#include "poml/data.hpp"

#include <regex>

namespace poml {

namespace {

std::string base_name(std::string_view path)
{
    while (path.size() > 1 && path.back() == '/')
        path.remove_suffix(1);
    auto slash = path.rfind('/');
    return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

class Scanner {
public:
    Scanner(const ResourceLoader& loader, int max_depth, const std::regex* filter, Diagnostics& diags)
        : loader_(loader), max_depth_(max_depth), filter_(filter), diags_(diags)
    {
    }

    /// Fills `dir.children`; false when nothing under it was kept.
    bool walk(const std::string& path, FolderTree& dir, int depth)
    {
        Listing listing = loader_.list(path, "");
        if (!listing.ok()) {
            diags_.push_back(make_warning("unreadable-dir", listing.error));
            return false;
        }
        for (const auto& entry : listing.entries) {
            FolderTree child;
            child.name = entry.name;
            child.is_dir = entry.is_dir;
            child.size = entry.size;
            if (entry.is_dir) {
                if (depth + 1 >= max_depth_)
                    continue;
                if (!walk(join_path(listing.path, entry.name), child, depth + 1))
                    continue;
            } else if (filter_ && !std::regex_search(entry.name, *filter_)) {
                continue;
            }
            dir.children.push_back(std::move(child));
        }
        return !dir.children.empty();
    }

private:
    const ResourceLoader& loader_;
    int max_depth_;
    const std::regex* filter_;
    Diagnostics& diags_;
};

std::string size_label(std::uint64_t size)
{
    return " (" + std::to_string(size) + " bytes)";
}

void tree_lines(const FolderTree& node, const std::string& prefix, bool show_size, std::string& out)
{
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const FolderTree& c = node.children[i];
        bool last = i + 1 == node.children.size();
        out += prefix;
        out += last ? "└── " : "├── ";
        out += c.name;
        if (c.is_dir)
            out += '/';
        else if (show_size)
            out += size_label(c.size);
        out += '\n';
        if (c.is_dir)
            tree_lines(c, prefix + (last ? "    " : "│   "), show_size, out);
    }
}

Value children_value(const FolderTree& node, bool show_size)
{
    Value obj = Value::object();
    for (const auto& c : node.children) {
        if (c.is_dir)
            obj[c.name] = children_value(c, show_size);
        else
            obj[c.name] = show_size ? Value(c.size) : Value(nullptr);
    }
    return obj;
}

} // namespace

FolderScan scan_folder(std::string_view path, std::string_view base_dir, int max_depth, std::string_view filter,
                       const ResourceLoader& loader)
{
    FolderScan out;
    std::optional<std::regex> re;
    if (!filter.empty()) {
        try {
            re.emplace(std::string(filter), std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            out.diagnostics.push_back(make_error("bad-filter", "folder filter is not a valid regular expression: " + std::string(e.what())));
            out.ok = false;
            return out;
        }
    }
    if (max_depth < 1) {
        out.diagnostics.push_back(make_warning("bad-depth", "maxDepth must be at least 1; using 1"));
        max_depth = 1;
    }
    Listing top = loader.list(path, base_dir);
    if (!top.ok()) {
        out.diagnostics.push_back(make_error("unreadable-dir", top.error));
        out.ok = false;
        return out;
    }
    out.tree.name = base_name(top.path);
    out.tree.is_dir = true;
    Scanner scanner(loader, max_depth, re ? &*re : nullptr, out.diagnostics);
    scanner.walk(top.path, out.tree, 0);
    return out;
}

Value folder_value(const FolderTree& tree, bool show_size)
{
    Value root = Value::object();
    root[tree.name] = children_value(tree, show_size);
    return root;
}

IRNode render_folder(const FolderTree& tree, std::string_view syntax, bool show_size)
{
    std::string body;
    std::string lang;
    if (syntax == "json") {
        body = folder_value(tree, show_size).dump(2, ' ', false, Value::error_handler_t::replace);
        lang = "json";
    } else if (syntax == "yaml") {
        body = to_yaml(folder_value(tree, show_size));
        lang = "yaml";
    } else {
        body = tree.name + (tree.is_dir ? "/" : "") + "\n";
        tree_lines(tree, "", show_size, body);
    }
    while (!body.empty() && body.back() == '\n')
        body.pop_back();
    IRNode code = IRNode::make(IRKind::code, {IRNode::make_text(std::move(body))});
    code.set("inline", false);
    if (!lang.empty())
        code.set("lang", lang);
    return code;
}

} // namespace poml
