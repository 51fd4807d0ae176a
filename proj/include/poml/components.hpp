#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/ir.hpp"
#include "poml/loader.hpp"
#include "poml/style.hpp"
#include "poml/value.hpp"

namespace poml {

enum class ComponentCategory { structural, intention, data, template_, meta };

enum class AttrType { string, boolean, integer, enumeration, json };

struct AttributeSpec {
    std::string name;
    AttrType type = AttrType::string;
    std::vector<std::string> choices; ///< enumeration only
    std::optional<Value> default_value;
};

struct ComponentSpec {
    std::string name;
    ComponentCategory category = ComponentCategory::structural;
    std::vector<AttributeSpec> attributes;
    /// Identifier of the lowering rule (see lowering.cpp).
    std::string lowering;
    std::vector<std::string> aliases;

    /// Looks in the component's own attributes, then the universal ones.
    const AttributeSpec* find(std::string_view attr) const;
    /// Registry defaults fed to the bottom layer of the style cascade.
    StyleMap defaults() const;
};

/// Attributes accepted on every component.
const std::vector<AttributeSpec>& universal_attributes();
const std::vector<ComponentSpec>& component_catalog();
/// Lookup by name or alias (`doc` finds `document`).
const ComponentSpec* find_component(std::string_view name);
/// Every canonical attribute name, sorted.
const std::vector<std::string>& attribute_catalog();

/// "output-format" -> "Output Format".
std::string title_case(std::string_view component_name);

struct LoweringEnv {
    const ResourceLoader* loader = nullptr;
    /// Directory relative `src` attributes resolve against.
    std::string base_dir;
};

struct LowerResult {
    IRNode root;
    Diagnostics diagnostics;
};

/// Lowers a styled component tree to IR.
LowerResult lower(const ComponentNode& root, const LoweringEnv& env);

struct CaptionStyle {
    std::string style = "bold";       ///< header | bold | plain | hidden
    std::string transform = "none";   ///< none | upper
    std::string ending = "none";      ///< colon | none
};

/// Caption nodes for one captioned block. Header captions become an `h`
/// at `level`, bold a `b`, plain a `text`; hidden yields nothing.
std::vector<IRNode> caption_block(std::string_view caption, const CaptionStyle& style, int level);

} // namespace poml
