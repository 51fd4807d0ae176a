#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/value.hpp"

namespace poml {

enum class SourceKind { element, text, comment, expression_hole };

struct SourceAttribute {
    std::string name;  ///< canonical name (see normalize_attribute_name)
    std::string value; ///< entity-decoded value text
    Span span;
    bool has_value = true;
    /// Set by template expansion when the value was exactly one `{{expr}}`,
    /// so structured data survives interpolation.
    std::optional<Value> typed;
};

/// Parse tree node. `text` holds the decoded content of text nodes, the
/// body of comments and the expression of expression holes.
struct SourceNode {
    SourceKind kind = SourceKind::element;
    std::string name;
    std::vector<SourceAttribute> attributes;
    std::vector<SourceNode> children;
    std::string text;
    Span span;
    /// Root inserted by the parser rather than written by the author.
    bool synthetic = false;
    /// Canonical path of the file this node came from when it was spliced
    /// in by `<include>`; empty for the primary document.
    std::string origin;

    const SourceAttribute* attribute(std::string_view canonical_name) const;
    SourceAttribute* attribute(std::string_view canonical_name);
    bool is_element(std::string_view n) const { return kind == SourceKind::element && name == n; }
};

struct ParseOptions {
    std::size_t max_depth = 256;
};

struct ParseResult {
    SourceNode root;
    Diagnostics diagnostics;
};

/// Error-tolerant parse. Always yields a root element; every recovery step
/// is reported as exactly one diagnostic.
ParseResult parse(std::string_view source, const ParseOptions& options = {});

/// Case-insensitive match against the attribute catalog, returning the
/// camelCase spelling. Unknown names come back unchanged.
std::string normalize_attribute_name(std::string_view name);

/// Replaces each maximal run of invalid UTF-8 with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

} // namespace poml
