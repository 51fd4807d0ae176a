#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/loader.hpp"
#include "poml/source.hpp"
#include "poml/value.hpp"

namespace poml {

/// Stack of binding frames; lookups see the innermost binding.
class Scope {
public:
    Scope();
    /// Root frame populated from the members of `globals` (an object).
    explicit Scope(const Value& globals);

    void push();
    void pop();
    void set(std::string name, Value value);
    const Value* lookup(std::string_view name) const;
    std::size_t depth() const { return frames_.size(); }

private:
    std::vector<std::vector<std::pair<std::string, Value>>> frames_;
};

/// Thrown by eval_expression. `code` is one of parse-error,
/// unknown-identifier, type-error.
class ExpressionError : public std::runtime_error {
public:
    ExpressionError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

/// Evaluates one expression: literals, identifiers, `a.b`, `a[i]`, unary
/// `! -`, `+ - * / %`, comparisons, `&& ||` and `?:`.
Value eval_expression(std::string_view expr, const Scope& scope);

struct ExpandOptions {
    /// Directory for relative `src` paths in the primary document.
    std::string base_dir;
    /// Canonical path of the primary document, for include-cycle detection.
    std::string source_path;
    std::size_t max_include_depth = 32;
    ParseOptions parse;
};

struct ExpandResult {
    SourceNode root;
    Diagnostics diagnostics;
};

/// Runs `<let>`, `for`, `if`/`else`, `<include>` and `{{ }}` over a parsed
/// tree. Comments are dropped; the result has no expression holes left.
ExpandResult expand(const SourceNode& tree, Scope scope, const ResourceLoader& loader, const ExpandOptions& options = {});

} // namespace poml
