#include "poml/source.hpp"

#include <algorithm>
#include <cctype>

namespace poml {

const SourceAttribute* SourceNode::attribute(std::string_view canonical_name) const
{
    for (const auto& a : attributes)
        if (a.name == canonical_name)
            return &a;
    return nullptr;
}

SourceAttribute* SourceNode::attribute(std::string_view canonical_name)
{
    for (auto& a : attributes)
        if (a.name == canonical_name)
            return &a;
    return nullptr;
}

namespace {

/// Length of the valid UTF-8 sequence starting at `i`, or 0.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i)
{
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char c = byte(i);
    if (c < 0x80)
        return 1;
    std::size_t len;
    unsigned char lo = 0x80, hi = 0xBF;
    if (c >= 0xC2 && c <= 0xDF) {
        len = 2;
    } else if (c >= 0xE0 && c <= 0xEF) {
        len = 3;
        if (c == 0xE0)
            lo = 0xA0;
        else if (c == 0xED)
            hi = 0x9F;
    } else if (c >= 0xF0 && c <= 0xF4) {
        len = 4;
        if (c == 0xF0)
            lo = 0x90;
        else if (c == 0xF4)
            hi = 0x8F;
    } else {
        return 0;
    }
    if (i + len > s.size())
        return 0;
    if (byte(i + 1) < lo || byte(i + 1) > hi)
        return 0;
    for (std::size_t k = 2; k < len; ++k)
        if (byte(i + k) < 0x80 || byte(i + k) > 0xBF)
            return 0;
    return len;
}

void append_utf8(std::string& out, unsigned long cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

constexpr std::string_view replacement_char = "\xEF\xBF\xBD";

bool is_name_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.';
}

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_void_element(std::string_view name)
{
    return name == "br" || name == "img";
}

class Parser {
public:
    Parser(std::string_view src, const ParseOptions& opts) : src_(src), opts_(opts) {}

    ParseResult run();

private:
    struct Frame {
        SourceNode node;
        bool dropped = false;
    };

    void report_invalid_utf8();
    void parse_comment();
    void parse_markup_declaration();
    void parse_cdata();
    void parse_close_tag();
    void parse_open_tag();
    bool parse_attribute(SourceNode& element);
    void parse_text();

    std::string decode(std::string_view raw, std::size_t offset);
    void add_child(SourceNode node);
    void close_frame(std::size_t end);
    bool starts_markup(std::size_t at) const;
    bool starts_with(std::size_t at, std::string_view s) const { return src_.substr(at, s.size()) == s; }

    std::string_view src_;
    const ParseOptions& opts_;
    std::size_t pos_ = 0;
    std::vector<Frame> stack_;
    Diagnostics diags_;
};

void Parser::report_invalid_utf8()
{
    std::size_t i = 0;
    while (i < src_.size()) {
        std::size_t len = utf8_sequence_length(src_, i);
        if (len) {
            i += len;
            continue;
        }
        std::size_t start = i;
        while (i < src_.size() && utf8_sequence_length(src_, i) == 0)
            ++i;
        diags_.push_back(make_error("invalid-utf8", "invalid UTF-8 byte sequence replaced by U+FFFD", {start, i}));
    }
}

bool Parser::starts_markup(std::size_t at) const
{
    if (at + 1 >= src_.size() || src_[at] != '<')
        return false;
    char next = src_[at + 1];
    if (next == '!' || next == '?')
        return true;
    if (next == '/')
        return at + 2 < src_.size() && is_name_start(src_[at + 2]);
    return is_name_start(next);
}

std::string Parser::decode(std::string_view raw, std::size_t offset)
{
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        char c = raw[i];
        if (c == '&') {
            std::size_t semi = raw.find(';', i + 1);
            std::size_t limit = std::min(raw.size(), i + 34);
            bool shaped = semi != std::string_view::npos && semi < limit && semi > i + 1;
            if (shaped) {
                std::string_view body = raw.substr(i + 1, semi - i - 1);
                bool name_like = std::all_of(body.begin(), body.end(), [](char ch) {
                    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '#';
                });
                if (name_like) {
                    std::string_view rep;
                    if (body == "lt")
                        rep = "<";
                    else if (body == "gt")
                        rep = ">";
                    else if (body == "amp")
                        rep = "&";
                    else if (body == "quot")
                        rep = "\"";
                    else if (body == "apos")
                        rep = "'";
                    if (!rep.empty()) {
                        out += rep;
                        i = semi + 1;
                        continue;
                    }
                    if (body.size() > 1 && body[0] == '#') {
                        bool hex = body[1] == 'x' || body[1] == 'X';
                        std::string_view digits = body.substr(hex ? 2 : 1);
                        unsigned long cp = 0;
                        bool ok = !digits.empty() && digits.size() <= 8;
                        for (char d : digits) {
                            if (!ok)
                                break;
                            int v;
                            if (d >= '0' && d <= '9')
                                v = d - '0';
                            else if (hex && d >= 'a' && d <= 'f')
                                v = d - 'a' + 10;
                            else if (hex && d >= 'A' && d <= 'F')
                                v = d - 'A' + 10;
                            else {
                                ok = false;
                                break;
                            }
                            cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(v);
                        }
                        if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
                            append_utf8(out, cp);
                            i = semi + 1;
                            continue;
                        }
                    }
                    diags_.push_back(make_warning("unknown-entity", "unknown character reference '&" + std::string(body) + ";' kept literally",
                                                  {offset + i, offset + semi + 1}));
                    out.append(raw.substr(i, semi + 1 - i));
                    i = semi + 1;
                    continue;
                }
            }
            out += c;
            ++i;
            continue;
        }
        std::size_t len = utf8_sequence_length(raw, i);
        if (len == 0) {
            out += replacement_char;
            while (i < raw.size() && utf8_sequence_length(raw, i) == 0)
                ++i;
            continue;
        }
        out.append(raw.substr(i, len));
        i += len;
    }
    return out;
}

void Parser::add_child(SourceNode node)
{
    Frame& top = stack_.back();
    if (top.dropped)
        return;
    top.node.children.push_back(std::move(node));
}

void Parser::close_frame(std::size_t end)
{
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    if (frame.dropped)
        return;
    frame.node.span.end = end;
    add_child(std::move(frame.node));
}

void Parser::parse_comment()
{
    std::size_t start = pos_;
    std::size_t close = src_.find("-->", pos_ + 4);
    SourceNode node;
    node.kind = SourceKind::comment;
    if (close == std::string_view::npos) {
        diags_.push_back(make_error("unclosed-comment", "comment is never closed", {start, src_.size()}));
        node.text = sanitize_utf8(src_.substr(start + 4));
        pos_ = src_.size();
    } else {
        node.text = sanitize_utf8(src_.substr(start + 4, close - start - 4));
        pos_ = close + 3;
    }
    node.span = {start, pos_};
    add_child(std::move(node));
}

void Parser::parse_cdata()
{
    std::size_t start = pos_;
    std::size_t body = pos_ + 9;
    std::size_t close = src_.find("]]>", body);
    SourceNode node;
    node.kind = SourceKind::text;
    if (close == std::string_view::npos) {
        diags_.push_back(make_error("unclosed-cdata", "CDATA section is never closed", {start, src_.size()}));
        node.text = sanitize_utf8(src_.substr(body));
        pos_ = src_.size();
    } else {
        node.text = sanitize_utf8(src_.substr(body, close - body));
        pos_ = close + 3;
    }
    node.span = {start, pos_};
    add_child(std::move(node));
}

void Parser::parse_markup_declaration()
{
    // <!DOCTYPE ...>, <?xml ...?> and friends carry nothing for prompts.
    std::size_t start = pos_;
    std::size_t close = src_.find('>', pos_);
    SourceNode node;
    node.kind = SourceKind::comment;
    if (close == std::string_view::npos) {
        diags_.push_back(make_error("unterminated-declaration", "markup declaration is never closed", {start, src_.size()}));
        pos_ = src_.size();
    } else {
        pos_ = close + 1;
    }
    node.text = sanitize_utf8(src_.substr(start, pos_ - start));
    node.span = {start, pos_};
    add_child(std::move(node));
}

void Parser::parse_close_tag()
{
    std::size_t start = pos_;
    std::size_t i = pos_ + 2;
    std::size_t name_start = i;
    while (i < src_.size() && is_name_char(src_[i]))
        ++i;
    std::string name = lower(src_.substr(name_start, i - name_start));
    while (i < src_.size() && is_space(src_[i]))
        ++i;
    if (i < src_.size() && src_[i] == '>') {
        ++i;
    } else {
        diags_.push_back(make_error("malformed-close-tag", "close tag </" + name + "> is missing '>'", {start, i}));
        // Tolerate junk up to the next '>' unless a new tag starts first.
        while (i < src_.size() && src_[i] != '>' && !starts_markup(i))
            ++i;
        if (i < src_.size() && src_[i] == '>')
            ++i;
    }
    pos_ = i;

    std::size_t match = 0;
    for (std::size_t k = stack_.size(); k-- > 1;) {
        if (stack_[k].node.name == name) {
            match = k;
            break;
        }
    }
    if (match == 0) {
        diags_.push_back(make_error("stray-close-tag", "close tag </" + name + "> has no matching open tag", {start, pos_}));
        return;
    }
    while (stack_.size() - 1 > match) {
        const SourceNode& open = stack_.back().node;
        if (!stack_.back().dropped)
            diags_.push_back(make_error("unclosed-tag", "<" + open.name + "> auto-closed by </" + name + ">", {open.span.start, start}));
        close_frame(start);
    }
    close_frame(pos_);
}

bool Parser::parse_attribute(SourceNode& element)
{
    std::size_t start = pos_;
    while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '=' && src_[pos_] != '>' && src_[pos_] != '<'
           && src_[pos_] != '"' && src_[pos_] != '\'' && !starts_with(pos_, "/>"))
        ++pos_;
    if (pos_ == start) {
        diags_.push_back(make_error("unexpected-character", std::string("unexpected '") + src_[pos_] + "' in tag <" + element.name + ">",
                                    {pos_, pos_ + 1}));
        ++pos_;
        return false;
    }
    SourceAttribute attr;
    std::string raw_name = sanitize_utf8(src_.substr(start, pos_ - start));
    attr.name = normalize_attribute_name(raw_name);

    std::size_t after_name = pos_;
    while (pos_ < src_.size() && is_space(src_[pos_]))
        ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '=') {
        ++pos_;
        while (pos_ < src_.size() && is_space(src_[pos_]))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
            char quote = src_[pos_];
            std::size_t vstart = pos_ + 1;
            std::size_t close = src_.find(quote, vstart);
            if (close == std::string_view::npos) {
                std::size_t gt = src_.find('>', vstart);
                std::size_t vend = gt == std::string_view::npos ? src_.size() : gt;
                diags_.push_back(make_error("unterminated-attribute-value", "value of '" + raw_name + "' is missing its closing quote",
                                            {start, vend}));
                attr.value = decode(src_.substr(vstart, vend - vstart), vstart);
                pos_ = vend;
            } else {
                attr.value = decode(src_.substr(vstart, close - vstart), vstart);
                pos_ = close + 1;
            }
        } else {
            std::size_t vstart = pos_;
            while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>' && !starts_with(pos_, "/>"))
                ++pos_;
            if (pos_ == vstart)
                diags_.push_back(make_error("missing-attribute-value", "attribute '" + raw_name + "' has '=' but no value", {start, pos_}));
            else
                diags_.push_back(make_warning("unquoted-attribute-value", "value of '" + raw_name + "' should be quoted", {start, pos_}));
            attr.value = decode(src_.substr(vstart, pos_ - vstart), vstart);
        }
    } else {
        pos_ = after_name;
        attr.has_value = false;
    }
    attr.span = {start, pos_};

    if (element.attribute(attr.name)) {
        diags_.push_back(make_error("duplicate-attribute", "attribute '" + attr.name + "' repeated on <" + element.name + ">; first kept", attr.span));
        return true;
    }
    element.attributes.push_back(std::move(attr));
    return true;
}

void Parser::parse_open_tag()
{
    std::size_t start = pos_;
    std::size_t i = pos_ + 1;
    while (i < src_.size() && is_name_char(src_[i]))
        ++i;
    SourceNode element;
    element.kind = SourceKind::element;
    element.name = lower(src_.substr(start + 1, i - start - 1));
    element.span.start = start;
    pos_ = i;

    bool self_closing = false;
    bool terminated = false;
    while (pos_ < src_.size()) {
        while (pos_ < src_.size() && is_space(src_[pos_]))
            ++pos_;
        if (pos_ >= src_.size())
            break;
        if (src_[pos_] == '>') {
            ++pos_;
            terminated = true;
            break;
        }
        if (starts_with(pos_, "/>")) {
            pos_ += 2;
            self_closing = true;
            terminated = true;
            break;
        }
        if (src_[pos_] == '<')
            break;
        parse_attribute(element);
    }
    if (!terminated)
        diags_.push_back(make_error("unterminated-tag", "tag <" + element.name + "> is missing '>'", {start, pos_}));

    if (self_closing || is_void_element(element.name)) {
        element.span.end = pos_;
        add_child(std::move(element));
        return;
    }
    bool parent_dropped = stack_.back().dropped;
    bool too_deep = stack_.size() > opts_.max_depth;
    if (too_deep && !parent_dropped)
        diags_.push_back(make_error("max-depth-exceeded",
                                    "nesting deeper than " + std::to_string(opts_.max_depth) + " levels; <" + element.name + "> dropped",
                                    {start, pos_}));
    stack_.push_back(Frame{std::move(element), too_deep || parent_dropped});
}

void Parser::parse_text()
{
    std::size_t start = pos_;
    std::size_t i = pos_;
    while (i < src_.size() && !starts_markup(i) && !starts_with(i, "{{"))
        ++i;
    if (i > start) {
        SourceNode node;
        node.kind = SourceKind::text;
        node.text = decode(src_.substr(start, i - start), start);
        node.span = {start, i};
        add_child(std::move(node));
        pos_ = i;
        return;
    }
    if (starts_with(i, "{{")) {
        std::size_t close = src_.find("}}", i + 2);
        std::size_t next_tag = i + 2;
        while (next_tag < src_.size() && !starts_markup(next_tag))
            ++next_tag;
        if (close == std::string_view::npos || close > next_tag) {
            diags_.push_back(make_warning("unclosed-expression", "'{{' without matching '}}' kept as text", {i, i + 2}));
            SourceNode node;
            node.kind = SourceKind::text;
            node.text = "{{";
            node.span = {i, i + 2};
            add_child(std::move(node));
            pos_ = i + 2;
            return;
        }
        SourceNode node;
        node.kind = SourceKind::expression_hole;
        std::string_view expr = src_.substr(i + 2, close - i - 2);
        auto first = expr.find_first_not_of(" \t\r\n");
        auto last = expr.find_last_not_of(" \t\r\n");
        node.text = first == std::string_view::npos ? std::string() : sanitize_utf8(expr.substr(first, last - first + 1));
        node.span = {i, close + 2};
        add_child(std::move(node));
        pos_ = close + 2;
    }
}

ParseResult Parser::run()
{
    report_invalid_utf8();

    SourceNode root;
    root.kind = SourceKind::element;
    root.name = "poml";
    root.synthetic = true;
    root.span = {0, src_.size()};
    stack_.push_back(Frame{std::move(root), false});

    while (pos_ < src_.size()) {
        if (starts_with(pos_, "<!--"))
            parse_comment();
        else if (starts_with(pos_, "<![CDATA["))
            parse_cdata();
        else if (starts_markup(pos_) && (src_[pos_ + 1] == '!' || src_[pos_ + 1] == '?'))
            parse_markup_declaration();
        else if (starts_markup(pos_) && src_[pos_ + 1] == '/')
            parse_close_tag();
        else if (starts_markup(pos_))
            parse_open_tag();
        else
            parse_text();
    }
    while (stack_.size() > 1) {
        const Frame& f = stack_.back();
        if (!f.dropped)
            diags_.push_back(make_error("unclosed-tag", "<" + f.node.name + "> is never closed", {f.node.span.start, src_.size()}));
        close_frame(src_.size());
    }

    SourceNode result = std::move(stack_.back().node);
    stack_.clear();

    // A lone <poml> element (ignoring blank text and comments) is the root.
    const SourceNode* only = nullptr;
    std::size_t significant = 0;
    for (const auto& c : result.children) {
        if (c.kind == SourceKind::comment)
            continue;
        if (c.kind == SourceKind::text && c.text.find_first_not_of(" \t\r\n\f") == std::string::npos)
            continue;
        ++significant;
        only = &c;
    }
    if (significant == 1 && only->is_element("poml")) {
        SourceNode single = *only;
        return {std::move(single), std::move(diags_)};
    }
    return {std::move(result), std::move(diags_)};
}

} // namespace

std::string sanitize_utf8(std::string_view bytes)
{
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        std::size_t len = utf8_sequence_length(bytes, i);
        if (len == 0) {
            out += replacement_char;
            while (i < bytes.size() && utf8_sequence_length(bytes, i) == 0)
                ++i;
            continue;
        }
        out.append(bytes.substr(i, len));
        i += len;
    }
    return out;
}

ParseResult parse(std::string_view source, const ParseOptions& options)
{
    return Parser(source, options).run();
}

} // namespace poml
