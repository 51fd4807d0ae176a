#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace poml {

/// Result of reading one resource. `path` is the canonical path, used both
/// as the base for nested relative paths and for include-cycle detection.
struct Resource {
    std::string path;
    std::string bytes;
    std::string error;

    bool ok() const { return error.empty(); }
};

struct DirEntry {
    std::string name;
    bool is_dir = false;
    std::uint64_t size = 0;
};

struct Listing {
    std::string path;
    std::vector<DirEntry> entries;
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Read-only access to files referenced from markup. Implementations must
/// be safe to call from several threads at once.
class ResourceLoader {
public:
    virtual ~ResourceLoader() = default;

    virtual Resource load(std::string_view path, std::string_view base_dir) const = 0;
    virtual Listing list(std::string_view path, std::string_view base_dir) const = 0;
};

/// Lexically normalized `path` resolved against `base_dir`.
std::string join_path(std::string_view base_dir, std::string_view path);
std::string parent_dir(std::string_view path);
std::string file_extension(std::string_view path);

/// Reads the real filesystem. When `roots` is non-empty, only paths inside
/// one of those directories (or equal to one of the explicit files) load.
class FilesystemLoader final : public ResourceLoader {
public:
    FilesystemLoader() = default;
    explicit FilesystemLoader(std::vector<std::string> roots);

    void allow(std::string path);

    Resource load(std::string_view path, std::string_view base_dir) const override;
    Listing list(std::string_view path, std::string_view base_dir) const override;

private:
    bool permitted(const std::string& canonical) const;

    std::vector<std::string> roots_;
};

/// In-memory tree keyed by absolute path; directories are implied by the
/// file paths. Used by tests and by callers that pre-load resources.
class MemoryLoader final : public ResourceLoader {
public:
    void add(std::string path, std::string bytes);

    Resource load(std::string_view path, std::string_view base_dir) const override;
    Listing list(std::string_view path, std::string_view base_dir) const override;

private:
    std::map<std::string, std::string> files_;
};

} // namespace poml
