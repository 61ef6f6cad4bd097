#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "labor/error.hpp"

namespace labor {

using nlohmann::json;

enum class Role { System, User, Assistant, Tool };

inline constexpr std::string_view role_name(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Tool: return "tool";
  }
  return "?";
}

inline std::optional<Role> role_from_name(std::string_view name) {
  for (Role r : {Role::System, Role::User, Role::Assistant, Role::Tool}) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

struct ToolCall {
  std::string id;
  std::string name;
  std::string arguments;  // raw JSON text as sent on the wire

  bool operator==(const ToolCall&) const = default;
};

struct Message {
  Role role = Role::User;
  std::string content;
  std::vector<ToolCall> tool_calls;
  std::optional<std::string> tool_call_id;

  static Message system(std::string text) { return {Role::System, std::move(text), {}, {}}; }
  static Message user(std::string text) { return {Role::User, std::move(text), {}, {}}; }
  static Message assistant(std::string text, std::vector<ToolCall> calls = {}) {
    return {Role::Assistant, std::move(text), std::move(calls), {}};
  }
  static Message tool(std::string call_id, std::string text) {
    return {Role::Tool, std::move(text), {}, std::move(call_id)};
  }

  bool operator==(const Message&) const = default;
};

/// String member of `j`, or "" when absent or not a string.
inline std::string string_field(const json& j, std::string_view key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string();
}

/// Chat-completions wire shape.
inline json message_to_json(const Message& m) {
  json j{{"role", role_name(m.role)}, {"content", m.content}};
  if (!m.tool_calls.empty()) {
    json calls = json::array();
    for (const auto& c : m.tool_calls) {
      calls.push_back(json{{"id", c.id},
                           {"type", "function"},
                           {"function", json{{"name", c.name}, {"arguments", c.arguments}}}});
    }
    j["tool_calls"] = std::move(calls);
  }
  if (m.tool_call_id) j["tool_call_id"] = *m.tool_call_id;
  return j;
}

inline Message message_from_json(const json& j) {
  if (!j.is_object()) throw TranscriptFormatError("message must be an object");
  Message m;
  auto role = role_from_name(string_field(j, "role"));
  if (!role) throw TranscriptFormatError("message has no valid role");
  m.role = *role;
  if (j.contains("content") && j["content"].is_string()) m.content = j["content"].get<std::string>();
  if (j.contains("tool_calls") && j["tool_calls"].is_array()) {
    for (const auto& c : j["tool_calls"]) {
      if (!c.is_object()) continue;
      ToolCall tc;
      tc.id = string_field(c, "id");
      if (c.contains("function") && c["function"].is_object()) {
        const json& f = c["function"];
        tc.name = string_field(f, "name");
        if (f.contains("arguments")) {
          tc.arguments = f["arguments"].is_string() ? f["arguments"].get<std::string>()
                                                    : f["arguments"].dump();
        }
      }
      m.tool_calls.push_back(std::move(tc));
    }
  }
  if (j.contains("tool_call_id") && j["tool_call_id"].is_string()) {
    m.tool_call_id = j["tool_call_id"].get<std::string>();
  }
  return m;
}

}  // namespace labor
