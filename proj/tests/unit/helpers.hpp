#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/loader.hpp"
#include "poml/pipeline.hpp"
#include "poml/source.hpp"

namespace testing {

struct Rendered {
    std::string output;
    poml::Diagnostics diagnostics;
    poml::IRNode ir;
};

inline Rendered render(const std::string& source, const std::string& format = "markdown",
                       const std::vector<std::string>& sheets = {}, const poml::Value& context = poml::Value::object(),
                       const poml::ResourceLoader* loader = nullptr, const std::string& base_dir = "/")
{
    poml::RenderRequest req;
    req.source = source;
    req.format = format;
    req.context = context;
    req.loader = loader;
    req.base_dir = base_dir;
    for (std::size_t i = 0; i < sheets.size(); ++i)
        req.stylesheets.push_back({"sheet" + std::to_string(i), sheets[i]});
    poml::PipelineResult r = poml::run_pipeline(req);
    return {std::move(r.output), std::move(r.diagnostics), r.ir ? std::move(*r.ir) : poml::IRNode{}};
}

inline std::size_t count_code(const poml::Diagnostics& diags, std::string_view code)
{
    std::size_t n = 0;
    for (const auto& d : diags)
        n += d.code == code;
    return n;
}

inline std::string codes(const poml::Diagnostics& diags)
{
    std::string s;
    for (const auto& d : diags)
        s += d.code + "(" + d.message + ") ";
    return s;
}

/// Pre-order visit of every node.
inline void walk(const poml::SourceNode& n, const std::function<void(const poml::SourceNode&)>& f)
{
    f(n);
    for (const auto& c : n.children)
        walk(c, f);
}

inline std::string dump(const poml::SourceNode& n)
{
    std::string s;
    switch (n.kind) {
    case poml::SourceKind::text: s = "T\"" + n.text + "\""; break;
    case poml::SourceKind::comment: s = "C\"" + n.text + "\""; break;
    case poml::SourceKind::expression_hole: s = "E\"" + n.text + "\""; break;
    case poml::SourceKind::element: s = "<" + n.name; break;
    }
    for (const auto& a : n.attributes)
        s += " " + a.name + "=" + a.value;
    s += "@" + std::to_string(n.span.start) + "-" + std::to_string(n.span.end);
    if (!n.children.empty()) {
        s += "[";
        for (const auto& c : n.children)
            s += dump(c) + ",";
        s += "]";
    }
    return s;
}

inline std::string random_bytes(std::mt19937& rng, std::size_t max_len)
{
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> byte(0, 255);
    std::string s(len(rng), '\0');
    for (auto& c : s)
        c = static_cast<char>(byte(rng));
    return s;
}

/// Random splice of markup fragments: tags, attributes, entities,
/// expressions and stray punctuation.
inline std::string random_markup(std::mt19937& rng, std::size_t pieces)
{
    static const std::vector<std::string> parts = {
        "<poml>", "</poml>", "<p>", "</p>", "<b>", "</b>", "<i", ">", "</i>", "<task>", "</task>", "<role ", "caption=\"x\"",
        "<list listStyle=\"decimal\">", "<item>", "</item>", "</list>", "<table records='[{\"a\":1}]'/>", "{{", "}}",
        "{{ x }}", "{{ 1 + }}", "&amp;", "&bogus;", "&#65;", "<!--", "-->", "<", "/>", "\"", "'", "=", "text ", "\n",
        "<examples>", "<example>", "<input>", "<output>", "</examples>", "<let name=\"x\" value=\"[1,2]\"/>",
        "<p for=\"v in x\">", "<p if=\"x\">", "<p else>", "<include src=\"self.poml\"/>", "<stylesheet>{\"p\":{}}</stylesheet>",
        "<h level=\"9\">", "<br/>", "<code>", "</code>", "<cp caption=\"c\">", "</cp>", "<img src=\"x.png\"/>",
        "<conversation messages='[{\"speaker\":\"ai\",\"content\":\"c\"}]'/>", "<folder src=\".\"/>", "\xff", "\xc3",
        "<doc src=\"a.txt\"/>", "<span syntax=\"json\">", "</span>", "<div syntax=\"html\">", "</div>", "é"};
    std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
    std::string s;
    for (std::size_t i = 0; i < pieces; ++i)
        s += parts[pick(rng)];
    return s;
}

} // namespace testing
