#include "poml/loader.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace poml {

std::string join_path(std::string_view base_dir, std::string_view path)
{
    fs::path p(path);
    if (p.is_relative() && !base_dir.empty())
        p = fs::path(base_dir) / p;
    return p.lexically_normal().generic_string();
}

std::string parent_dir(std::string_view path)
{
    return fs::path(path).parent_path().generic_string();
}

std::string file_extension(std::string_view path)
{
    std::string ext = fs::path(path).extension().string();
    if (!ext.empty() && ext.front() == '.')
        ext.erase(0, 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

namespace {

std::string canonical_of(const std::string& joined)
{
    std::error_code ec;
    fs::path abs = fs::absolute(joined, ec);
    if (ec)
        abs = joined;
    fs::path canon = fs::weakly_canonical(abs, ec);
    if (ec)
        canon = abs.lexically_normal();
    return canon.generic_string();
}

bool is_within(const std::string& path, const std::string& root)
{
    if (path == root)
        return true;
    if (path.size() <= root.size() || path.compare(0, root.size(), root) != 0)
        return false;
    return root.back() == '/' || path[root.size()] == '/';
}

} // namespace

FilesystemLoader::FilesystemLoader(std::vector<std::string> roots)
{
    for (auto& r : roots)
        allow(std::move(r));
}

void FilesystemLoader::allow(std::string path)
{
    roots_.push_back(canonical_of(path));
}

bool FilesystemLoader::permitted(const std::string& canonical) const
{
    if (roots_.empty())
        return true;
    return std::any_of(roots_.begin(), roots_.end(), [&](const std::string& r) { return is_within(canonical, r); });
}

Resource FilesystemLoader::load(std::string_view path, std::string_view base_dir) const
{
    Resource res;
    res.path = canonical_of(join_path(base_dir, path));
    if (!permitted(res.path)) {
        res.error = "access outside the permitted directories: " + res.path;
        return res;
    }
    std::error_code ec;
    if (fs::is_directory(res.path, ec)) {
        res.error = "is a directory: " + res.path;
        return res;
    }
    std::ifstream in(res.path, std::ios::binary);
    if (!in) {
        res.error = "cannot open " + res.path;
        return res;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    res.bytes = std::move(ss).str();
    return res;
}

Listing FilesystemLoader::list(std::string_view path, std::string_view base_dir) const
{
    Listing out;
    out.path = canonical_of(join_path(base_dir, path));
    if (!permitted(out.path)) {
        out.error = "access outside the permitted directories: " + out.path;
        return out;
    }
    std::error_code ec;
    fs::directory_iterator it(out.path, ec);
    if (ec) {
        out.error = "cannot read directory " + out.path + ": " + ec.message();
        return out;
    }
    for (const auto& entry : it) {
        DirEntry e;
        e.name = entry.path().filename().string();
        e.is_dir = entry.is_directory(ec);
        if (!e.is_dir)
            e.size = entry.file_size(ec);
        if (ec)
            e.size = 0;
        out.entries.push_back(std::move(e));
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const DirEntry& a, const DirEntry& b) { return a.name < b.name; });
    return out;
}

void MemoryLoader::add(std::string path, std::string bytes)
{
    files_[join_path("/", path)] = std::move(bytes);
}

Resource MemoryLoader::load(std::string_view path, std::string_view base_dir) const
{
    Resource res;
    res.path = join_path(base_dir.empty() ? std::string_view("/") : base_dir, path);
    auto it = files_.find(res.path);
    if (it == files_.end())
        res.error = "no such file: " + res.path;
    else
        res.bytes = it->second;
    return res;
}

Listing MemoryLoader::list(std::string_view path, std::string_view base_dir) const
{
    Listing out;
    out.path = join_path(base_dir.empty() ? std::string_view("/") : base_dir, path);
    std::string prefix = out.path;
    if (prefix.back() != '/')
        prefix += '/';
    std::map<std::string, DirEntry> seen;
    for (const auto& [p, bytes] : files_) {
        if (p.compare(0, prefix.size(), prefix) != 0)
            continue;
        std::string rest = p.substr(prefix.size());
        auto slash = rest.find('/');
        DirEntry e;
        e.name = rest.substr(0, slash);
        e.is_dir = slash != std::string::npos;
        e.size = e.is_dir ? 0 : bytes.size();
        seen.emplace(e.name, e);
    }
    if (seen.empty()) {
        out.error = "no such directory: " + out.path;
        return out;
    }
    for (auto& [name, e] : seen)
        out.entries.push_back(std::move(e));
    return out;
}

} // namespace poml
