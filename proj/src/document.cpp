#include "poml/data.hpp"

#include "poml/source.hpp"

namespace poml {

std::vector<std::string> select_pages(const std::vector<std::string>& pages, const Slice& slice)
{
    auto [first, last] = slice.resolve(pages.size());
    return {pages.begin() + static_cast<std::ptrdiff_t>(first), pages.begin() + static_cast<std::ptrdiff_t>(last)};
}

DocumentRead read_document(std::string_view path, std::string_view base_dir, const ResourceLoader& loader, std::string_view selected_pages)
{
    DocumentRead out;
    std::optional<Slice> slice;
    if (!selected_pages.empty()) {
        slice = parse_slice(selected_pages);
        if (!slice) {
            out.diagnostics.push_back(make_error("bad-slice", "selectedPages \"" + std::string(selected_pages) + "\" is not a start:end slice"));
            return out;
        }
    }
    std::string ext = file_extension(path);
    if (ext != "txt" && ext != "md" && ext != "markdown") {
        out.diagnostics.push_back(make_error("unsupported-format", "documents of type '." + ext + "' are not supported (only .txt and .md)"));
        return out;
    }
    Resource res = loader.load(path, base_dir);
    if (!res.ok()) {
        out.diagnostics.push_back(make_error("unreadable-file", res.error));
        return out;
    }
    out.content.source_path = res.path;
    out.content.pages.push_back(sanitize_utf8(res.bytes));
    if (slice && out.content.pages.size() > 1)
        out.content.pages = select_pages(out.content.pages, *slice);
    out.ok = true;
    return out;
}

} // namespace poml
