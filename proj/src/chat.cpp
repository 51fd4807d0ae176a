#include "poml/writers.hpp"

namespace poml {

namespace {

struct Leaf {
    const IRNode* node;
    std::string speaker;
};

void collect_leaves(const IRNode& n, const std::string& inherited, std::vector<Leaf>& out)
{
    std::string speaker = n.get_string("speaker", inherited);
    if (n.children.empty()) {
        out.push_back({&n, speaker});
        return;
    }
    for (const auto& c : n.children)
        collect_leaves(c, speaker, out);
}

/// Copy of `n` keeping only leaves whose document-order index is in
/// [lo, hi) and that are not images.
std::optional<IRNode> prune(const IRNode& n, std::size_t& counter, std::size_t lo, std::size_t hi)
{
    if (n.children.empty()) {
        std::size_t idx = counter++;
        if (idx < lo || idx >= hi || n.kind == IRKind::img)
            return std::nullopt;
        return n;
    }
    IRNode copy;
    copy.kind = n.kind;
    copy.attributes = n.attributes;
    for (const auto& c : n.children) {
        if (counter >= hi)
            break;
        if (auto kept = prune(c, counter, lo, hi))
            copy.children.push_back(std::move(*kept));
    }
    if (copy.children.empty())
        return std::nullopt;
    return copy;
}

MessagePart image_part(const IRNode& img)
{
    MessagePart p;
    p.kind = MessagePart::Kind::image;
    p.base64 = img.get_string("base64");
    p.media_type = img.get_string("type");
    p.alt = img.get_string("alt");
    return p;
}

void add_text(std::vector<MessagePart>& parts, std::string text)
{
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return;
    if (!parts.empty() && parts.back().kind == MessagePart::Kind::text) {
        parts.back().text += "\n\n" + text;
        return;
    }
    MessagePart p;
    p.text = std::move(text);
    parts.push_back(std::move(p));
}

} // namespace

std::vector<Message> split_messages(const IRNode& root, const WriterOptions& options)
{
    std::vector<Leaf> leaves;
    collect_leaves(root, "human", leaves);

    auto render = [&](std::size_t lo, std::size_t hi) {
        std::size_t counter = 0;
        auto pruned = prune(root, counter, lo, hi);
        if (!pruned)
            return std::string();
        std::string s = write(*pruned, options).output;
        while (!s.empty() && s.back() == '\n')
            s.pop_back();
        return s;
    };

    std::vector<Message> messages;
    std::size_t i = 0;
    while (i < leaves.size()) {
        std::size_t j = i;
        while (j < leaves.size() && leaves[j].speaker == leaves[i].speaker)
            ++j;

        std::vector<MessagePart> top;
        std::vector<MessagePart> middle;
        std::vector<MessagePart> bottom;
        std::size_t seg = i;
        for (std::size_t k = i; k < j; ++k) {
            const IRNode& n = *leaves[k].node;
            if (n.kind != IRKind::img)
                continue;
            std::string position = n.get_string("position", "here");
            if (position == "top") {
                top.push_back(image_part(n));
            } else if (position == "bottom") {
                bottom.push_back(image_part(n));
            } else {
                add_text(middle, render(seg, k));
                middle.push_back(image_part(n));
                seg = k + 1;
            }
        }
        add_text(middle, render(seg, j));

        Message m;
        m.speaker = leaves[i].speaker;
        for (auto* group : {&top, &middle, &bottom})
            for (auto& p : *group)
                m.parts.push_back(std::move(p));
        if (!m.parts.empty()) {
            if (!messages.empty() && messages.back().speaker == m.speaker) {
                for (auto& p : m.parts) {
                    if (p.kind == MessagePart::Kind::text)
                        add_text(messages.back().parts, std::move(p.text));
                    else
                        messages.back().parts.push_back(std::move(p));
                }
            } else {
                messages.push_back(std::move(m));
            }
        }
        i = j;
    }
    return messages;
}

std::string messages_to_json(const std::vector<Message>& messages)
{
    Value arr = Value::array();
    for (const auto& m : messages) {
        Value content = Value::array();
        for (const auto& p : m.parts) {
            Value part = Value::object();
            if (p.kind == MessagePart::Kind::text) {
                part["type"] = "text";
                part["text"] = p.text;
            } else {
                part["type"] = "image";
                part["base64"] = p.base64;
                part["mediaType"] = p.media_type;
                part["alt"] = p.alt;
            }
            content.push_back(std::move(part));
        }
        Value msg = Value::object();
        msg["speaker"] = m.speaker;
        msg["content"] = std::move(content);
        arr.push_back(std::move(msg));
    }
    return arr.dump(2, ' ', false, Value::error_handler_t::replace) + "\n";
}

} // namespace poml
