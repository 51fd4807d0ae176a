#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace poml {

/// Half-open byte range into a source buffer.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    bool contains(const Span& other) const { return start <= other.start && other.end <= end; }
    friend bool operator==(const Span&, const Span&) = default;
};

enum class Severity { error, warning };

std::string_view to_string(Severity s);

/// One problem found anywhere in the pipeline. Diagnostics accumulate; no
/// stage throws them past its boundary.
struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    std::string message;
    Span span;
    /// Source the span points into. Empty means the primary input.
    std::string file;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline Diagnostic make_error(std::string code, std::string message, Span span = {})
{
    return {Severity::error, std::move(code), std::move(message), span, {}};
}

inline Diagnostic make_warning(std::string code, std::string message, Span span = {})
{
    return {Severity::warning, std::move(code), std::move(message), span, {}};
}

std::size_t count_errors(const Diagnostics& diags);

inline void append(Diagnostics& into, const Diagnostics& from)
{
    into.insert(into.end(), from.begin(), from.end());
}

} // namespace poml
