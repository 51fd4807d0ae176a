#include "poml/data.hpp"

namespace poml {

ConversationLowering lower_conversation(const Value& messages)
{
    ConversationLowering out;
    if (!messages.is_array()) {
        out.diagnostics.push_back(make_error("bad-shape", "conversation must be a JSON array of messages"));
        return out;
    }
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const Value& m = messages[i];
        std::string where = "message " + std::to_string(i);
        if (!m.is_object() || !m.contains("speaker") || !m.contains("content") || !m["content"].is_string()) {
            out.diagnostics.push_back(make_error("bad-shape", where + " needs a speaker and a string content"));
            continue;
        }
        const Value& speaker = m["speaker"];
        if (!speaker.is_string() || (speaker != "ai" && speaker != "human" && speaker != "system")) {
            out.diagnostics.push_back(make_error("bad-speaker", where + " has speaker " + compact_json(speaker) + "; expected ai, human or system"));
            continue;
        }
        IRNode p = IRNode::make(IRKind::p, {IRNode::make_text(m["content"].get<std::string>())});
        p.set("speaker", speaker);
        out.nodes.push_back(std::move(p));
    }
    return out;
}

} // namespace poml
