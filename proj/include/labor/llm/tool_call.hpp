#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "labor/coordination.hpp"
#include "labor/llm/message.hpp"

namespace labor {

inline constexpr std::string_view kBimanualControlTool = "bimanual_control";
inline constexpr std::string_view kGetInformationTool = "get_information";
inline constexpr std::string_view kContinuePrompt = "continue with the next bimanual_control call";

enum class InfoQuery { ArmState, ObjPosition };

inline constexpr std::string_view info_query_name(InfoQuery q) {
  return q == InfoQuery::ArmState ? "arm_state" : "obj_position";
}

struct InfoRequest {
  InfoQuery query = InfoQuery::ArmState;
  std::string para;

  bool operator==(const InfoRequest&) const = default;
};

struct Finish {
  std::string text;
};

struct ParseError {
  std::string message;
  /// False when the reply carried no tool call at all (the agent re-prompts
  /// instead of answering a call id).
  bool had_tool_call = false;
};

using ParsedReply = std::variant<BimanualCommand, InfoRequest, Finish, ParseError>;

struct ParseOptions {
  std::string completion_phrase = "done";
};

// ---------------------------------------------------------------------------
// Tool schemas

inline json tool_schemas() {
  json commands = json::array();
  for (Skill s : kSkills) commands.push_back(skill_name(s));
  auto side_props = [&](const char* side) {
    return json{{std::string(side) + "_command",
                 json{{"type", "string"},
                      {"enum", commands},
                      {"description", std::string("skill for the ") + side + " hand"}}},
                {std::string(side) + "_para",
                 json{{"type", "string"},
                      {"description",
                       "object name argument; two comma-separated names for push_to; empty "
                       "string for skills without parameters"}}}};
  };
  json props = side_props("left");
  props.update(side_props("right"));
  json bimanual{
      {"type", "function"},
      {"function",
       json{{"name", kBimanualControlTool},
            {"description",
             "Run one skill on each hand at the same time. Both commands are checked against "
             "the current state; a rejected command is reported back and leaves its hand as "
             "it was."},
            {"parameters",
             json{{"type", "object"},
                  {"properties", props},
                  {"required",
                   json::array({"left_command", "left_para", "right_command", "right_para"})}}}}}};
  json info{
      {"type", "function"},
      {"function",
       json{{"name", kGetInformationTool},
            {"description",
             "Query the robot or the scene. query=arm_state with para=left or right reports a "
             "hand's position, palm and fingers; query=obj_position with para=<object name> "
             "reports an object's position."},
            {"parameters",
             json{{"type", "object"},
                  {"properties",
                   json{{"query", json{{"type", "string"}, {"enum", {"arm_state", "obj_position"}}}},
                        {"para", json{{"type", "string"}}}}},
                  {"required", json::array({"query", "para"})}}}}}};
  return json::array({std::move(bimanual), std::move(info)});
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i];
  }
  return out;
}

/// Canonical bimanual_control arguments for `cmd`.
inline json render_command_args(const BimanualCommand& cmd) {
  return json{{"left_command", skill_name(cmd.left.skill)},
              {"left_para", join_args(cmd.left.args)},
              {"right_command", skill_name(cmd.right.skill)},
              {"right_para", join_args(cmd.right.args)}};
}

inline json render_info_args(const InfoRequest& req) {
  return json{{"query", info_query_name(req.query)}, {"para", req.para}};
}

/// One line of a plan file.
inline std::string render_plan_line(const BimanualCommand& cmd) {
  return render_command_args(cmd).dump();
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_names(std::string_view para) {
  std::vector<std::string> out;
  if (trim(para).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = para.find(',', start);
    out.push_back(trim(para.substr(start, comma == std::string_view::npos ? para.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Parses JSON without throwing; nullopt on malformed input. A JSON string
/// holding JSON (double-encoded arguments) is unwrapped once.
inline std::optional<json> parse_json(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  if (j.is_string()) {
    const std::string inner = j.get<std::string>();
    json k = json::parse(inner, nullptr, false);
    if (!k.is_discarded()) return k;
  }
  return j;
}

inline std::variant<SkillInvocation, ParseError> parse_side(const json& args, Side side) {
  const std::string prefix(side_name(side));
  auto cmd_it = args.find(prefix + "_command");
  if (cmd_it == args.end() || !cmd_it->is_string()) {
    return ParseError{"missing " + prefix + "_command; available: " + skill_name_list(), true};
  }
  const std::string name = cmd_it->get<std::string>();
  auto skill = skill_from_name(name);
  if (!skill) {
    return ParseError{"unknown command " + name + "; available: " + skill_name_list(), true};
  }
  std::vector<std::string> names;
  auto para_it = args.find(prefix + "_para");
  if (para_it != args.end() && !para_it->is_null()) {
    if (para_it->is_string()) {
      names = split_names(para_it->get<std::string>());
    } else if (para_it->is_array()) {
      for (const auto& e : *para_it) {
        if (!e.is_string()) return ParseError{prefix + "_para must contain object names", true};
        names.push_back(trim(e.get<std::string>()));
      }
    } else {
      return ParseError{prefix + "_para must be a string", true};
    }
  }
  const std::size_t arity = skill_arity(*skill);
  if (names.size() != arity) {
    return ParseError{name + " expects " + std::to_string(arity) + " object name(s) in " + prefix +
                          "_para but got " + std::to_string(names.size()) +
                          (arity == 0 ? "; pass an empty string" : ""),
                      true};
  }
  for (const auto& n : names) {
    if (n.empty()) return ParseError{prefix + "_para contains an empty object name", true};
  }
  return SkillInvocation{*skill, side, std::move(names)};
}

inline ParsedReply command_from_args(const json& args) {
  if (!args.is_object()) return ParseError{"bimanual_control arguments must be a JSON object", true};
  auto left = parse_side(args, Side::Left);
  if (auto* e = std::get_if<ParseError>(&left)) return *e;
  auto right = parse_side(args, Side::Right);
  if (auto* e = std::get_if<ParseError>(&right)) return *e;
  BimanualCommand cmd;
  cmd.left = std::get<SkillInvocation>(std::move(left));
  cmd.right = std::get<SkillInvocation>(std::move(right));
  return cmd;
}

inline ParsedReply info_from_args(const json& args) {
  if (!args.is_object()) return ParseError{"get_information arguments must be a JSON object", true};
  const std::string query = string_field(args, "query");
  const std::string para = trim(string_field(args, "para"));
  if (query == "arm_state") {
    if (!side_from_name(para)) return ParseError{"arm_state needs para = left or right", true};
    return InfoRequest{InfoQuery::ArmState, para};
  }
  if (query == "obj_position") {
    if (para.empty()) return ParseError{"obj_position needs an object name in para", true};
    return InfoRequest{InfoQuery::ObjPosition, para};
  }
  return ParseError{"unknown query '" + query + "'; available: arm_state, obj_position", true};
}

inline ParsedReply dispatch_call(std::string_view tool, const json& args) {
  if (tool == kBimanualControlTool) return command_from_args(args);
  if (tool == kGetInformationTool) return info_from_args(args);
  return ParseError{"unknown tool '" + std::string(tool) + "'; available: " +
                        std::string(kBimanualControlTool) + ", " + std::string(kGetInformationTool),
                    true};
}

/// Recognizes a bare arguments object or a {"name": ..., "arguments": ...}
/// wrapper written into message text.
inline std::optional<ParsedReply> from_text_object(const json& j) {
  if (!j.is_object()) return std::nullopt;
  if (j.contains("left_command")) return command_from_args(j);
  if (j.contains("query")) return info_from_args(j);
  auto name = j.find("name");
  auto args = j.find("arguments");
  if (name != j.end() && name->is_string() && args != j.end()) {
    json a = *args;
    if (a.is_string()) {
      auto parsed = parse_json(a.get<std::string>());
      if (!parsed) return ParseError{"arguments are not valid JSON", true};
      a = *parsed;
    }
    return dispatch_call(name->get<std::string>(), a);
  }
  return std::nullopt;
}

/// Fenced ``` blocks in order, language tag stripped.
inline std::vector<std::string_view> fenced_blocks(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    std::size_t body = text.find('\n', open + 3);
    if (body == std::string_view::npos) break;
    ++body;
    const std::size_t close = text.find("```", body);
    if (close == std::string_view::npos) break;
    out.push_back(text.substr(body, close - body));
    pos = close + 3;
  }
  return out;
}

inline bool contains_word(std::string_view text, std::string_view word) {
  if (word.empty()) return false;
  auto lower = [](char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  };
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; };
  for (std::size_t i = 0; i + word.size() <= text.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < word.size() && match; ++k) match = lower(text[i + k]) == lower(word[k]);
    if (!match) continue;
    const bool left_ok = i == 0 || !is_word(text[i - 1]);
    const bool right_ok = i + word.size() == text.size() || !is_word(text[i + word.size()]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace detail

/// Structured tool calls first (only the first call is used), then a JSON
/// object in a fenced block or as the whole content, then the completion
/// phrase. Never throws.
inline ParsedReply parse_tool_call(const Message& msg, const ParseOptions& opts = {}) {
  if (!msg.tool_calls.empty()) {
    const ToolCall& call = msg.tool_calls.front();
    auto args = detail::parse_json(call.arguments.empty() ? std::string_view("{}")
                                                          : std::string_view(call.arguments));
    if (!args) return ParseError{"arguments of " + call.name + " are not valid JSON", true};
    return detail::dispatch_call(call.name, *args);
  }
  for (std::string_view block : detail::fenced_blocks(msg.content)) {
    if (auto j = detail::parse_json(block)) {
      if (auto r = detail::from_text_object(*j)) return *r;
    }
  }
  const std::string trimmed = detail::trim(msg.content);
  if (!trimmed.empty() && trimmed.front() == '{') {
    if (auto j = detail::parse_json(trimmed)) {
      if (auto r = detail::from_text_object(*j)) return *r;
    }
  }
  if (detail::contains_word(msg.content, opts.completion_phrase)) return Finish{msg.content};
  return ParseError{"no tool call found; " + std::string(kContinuePrompt), false};
}

/// One plan-file line in the tool-call argument spelling.
inline std::variant<BimanualCommand, ParseError> parse_plan_line(std::string_view line) {
  auto j = detail::parse_json(line);
  if (!j) return ParseError{"line is not valid JSON", true};
  ParsedReply r = detail::command_from_args(*j);
  if (auto* cmd = std::get_if<BimanualCommand>(&r)) return *cmd;
  if (auto* e = std::get_if<ParseError>(&r)) return *e;
  return ParseError{"line is not a bimanual_control call", true};
}

inline std::string answer_info(const WorldState& w, const InfoRequest& req) {
  if (req.query == InfoQuery::ArmState) {
    auto side = side_from_name(req.para);
    return side ? get_arm_state(w, *side) : "error: para must be left or right";
  }
  return req.para + ": " + get_obj_position(w, req.para);
}

}  // namespace labor
