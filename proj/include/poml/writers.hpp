#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "poml/diagnostic.hpp"
#include "poml/ir.hpp"

namespace poml {

struct WriterOptions {
    /// markdown, html, xml or text.
    std::string markup_lang = "markdown";
    /// json or yaml. When set it governs the output instead of markup_lang.
    std::string serializer;
    /// html/xml: newlines and indentation between block elements.
    bool pretty = true;
};

struct WriteResult {
    std::string output;
    Diagnostics diagnostics;
};

/// Serializes an IR tree. `env` nodes switch writer for their subtree.
/// Output uses `\n` line endings and ends with exactly one newline unless
/// it is empty.
WriteResult write(const IRNode& root, const WriterOptions& options = {});

/// Drops control characters other than `\n` and `\t`.
std::string strip_control(std::string_view text);

/// Escapes `& < >` (and `"` `'` when `attribute`).
std::string escape_markup(std::string_view text, bool attribute = false);

struct MessagePart {
    enum class Kind { text, image };
    Kind kind = Kind::text;
    std::string text;
    std::string base64;
    std::string media_type;
    std::string alt;

    friend bool operator==(const MessagePart&, const MessagePart&) = default;
};

struct Message {
    std::string speaker;
    std::vector<MessagePart> parts;

    friend bool operator==(const Message&, const Message&) = default;
};

/// Partitions the tree into maximal same-speaker runs of leaves, in
/// document order. Each run's text is rendered with the active writer;
/// images become image parts (position top/bottom moves them to the start
/// or end of their message).
std::vector<Message> split_messages(const IRNode& root, const WriterOptions& options = {});

/// `[{"speaker": ..., "content": [{"type": "text", "text": ...} |
/// {"type": "image", "base64": ..., "mediaType": ..., "alt": ...}]}]`
std::string messages_to_json(const std::vector<Message>& messages);

} // namespace poml
