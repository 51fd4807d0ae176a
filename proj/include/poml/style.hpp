#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/source.hpp"
#include "poml/value.hpp"

namespace poml {

using StyleMap = std::map<std::string, Value, std::less<>>;

struct StyleSelector {
    enum class Kind { element, class_name };
    Kind kind = Kind::element;
    std::string name; ///< component name, or class token without the dot

    friend bool operator==(const StyleSelector&, const StyleSelector&) = default;
};

struct StyleRule {
    StyleSelector selector;
    StyleMap attributes;
};

/// Rules of one stylesheet in file order.
struct StyleRuleSet {
    std::vector<StyleRule> rules;
};

/// Where a computed attribute came from, lowest precedence first.
enum class StyleLayer { registry_default, element_rule, class_rule, inline_attribute, inherited };

std::string_view to_string(StyleLayer layer);

struct ComputedStyle {
    StyleMap attributes;
    std::map<std::string, StyleLayer, std::less<>> provenance;

    const Value* get(std::string_view name) const;
    void set(const std::string& name, Value value, StyleLayer layer);
};

struct StylesheetResult {
    StyleRuleSet rules;
    Diagnostics diagnostics;
};

/// Parses a JSON stylesheet: an object keyed by `component` or `.class`
/// selectors whose values map attribute names to scalars. Bad entries are
/// skipped; a non-object sheet yields an empty rule set.
StylesheetResult parse_stylesheet(std::string_view json_text);

/// Cascade for one element: registry defaults, then element rules, then
/// class rules (sheets in order, later wins), then inline attributes.
/// Does not apply inheritance; see apply_styles.
ComputedStyle resolve_style(const SourceNode& element, std::span<const StyleRuleSet> sheets, const StyleMap& registry_defaults);

/// Post-template, style-resolved tree.
struct ComponentNode {
    bool is_text = false;
    std::string name;
    std::string text;
    ComputedStyle style;
    std::vector<ComponentNode> children;
    Span span;
    std::string origin;
};

struct StyledTree {
    ComponentNode root;
    Diagnostics diagnostics;
};

/// Resolves every element of an expanded tree. Embedded `<stylesheet>`
/// elements are parsed, appended after `sheets` and removed. `syntax` and
/// `speaker` inherit from the nearest ancestor that has them.
StyledTree apply_styles(const SourceNode& root, std::vector<StyleRuleSet> sheets);

} // namespace poml
