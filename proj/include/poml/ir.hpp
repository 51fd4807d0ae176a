#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/value.hpp"

namespace poml {

/// The 21 node kinds writers understand.
enum class IRKind {
    any, b, code, env, h, i, img, item, list, nl, obj, p, s, span, table, tbody, tcell, text, thead, trow, u
};

inline constexpr std::array<IRKind, 21> all_ir_kinds = {
    IRKind::any, IRKind::b, IRKind::code, IRKind::env, IRKind::h, IRKind::i, IRKind::img,
    IRKind::item, IRKind::list, IRKind::nl, IRKind::obj, IRKind::p, IRKind::s, IRKind::span,
    IRKind::table, IRKind::tbody, IRKind::tcell, IRKind::text, IRKind::thead, IRKind::trow, IRKind::u,
};

std::string_view to_string(IRKind kind);
std::optional<IRKind> ir_kind_from_string(std::string_view name);

/// Attribute names are kebab-case; the map keeps them sorted so the JSON
/// form is canonical.
using IRAttributes = std::map<std::string, Value, std::less<>>;

struct IRNode {
    IRKind kind = IRKind::text;
    IRAttributes attributes;
    /// Payload of `text` nodes; empty for every other kind.
    std::string text;
    std::vector<IRNode> children;

    static IRNode make_text(std::string text);
    static IRNode make(IRKind kind, std::vector<IRNode> children = {});

    IRNode& set(std::string name, Value value);
    const Value* get(std::string_view name) const;
    std::string get_string(std::string_view name, std::string_view fallback = {}) const;
    bool get_bool(std::string_view name, bool fallback) const;
    long long get_int(std::string_view name, long long fallback) const;

    friend bool operator==(const IRNode&, const IRNode&) = default;
};

/// One diagnostic per violated catalog rule; empty means the tree is valid.
Diagnostics validate(const IRNode& node);

/// Canonical JSON: sorted keys, no insignificant whitespace, empty
/// attribute and child lists omitted.
std::string serialize_ir(const IRNode& node);

struct DeserializeResult {
    std::optional<IRNode> node;
    Diagnostics diagnostics;
};

/// Fails with malformed-json, unknown-kind or invariant-violation.
DeserializeResult deserialize_ir(std::string_view json_text);

/// Concatenated text payloads in document order.
std::string plain_text(const IRNode& node);

} // namespace poml
