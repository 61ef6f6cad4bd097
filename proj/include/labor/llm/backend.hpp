#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "labor/error.hpp"
#include "labor/llm/message.hpp"
#include "labor/llm/tool_call.hpp"
#include "labor/oracle.hpp"

namespace labor {

/// Produces the next assistant message for a conversation. Throws
/// BackendError for transport failures or exhausted request budgets.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual Message chat(std::span<const Message> messages) = 0;
  virtual std::string id() const = 0;
};

inline Message command_message(const BimanualCommand& cmd, std::string call_id) {
  return Message::assistant(
      "", {ToolCall{std::move(call_id), std::string(kBimanualControlTool),
                    render_command_args(cmd).dump()}});
}

/// Emits a fixed command sequence as bimanual_control calls, then the
/// completion phrase. Ignores the conversation.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<BimanualCommand> plan, std::string id = "scripted",
                           std::string completion_phrase = "done")
      : plan_(std::move(plan)), id_(std::move(id)), finish_(std::move(completion_phrase)) {}

  Message chat(std::span<const Message>) override {
    if (next_ < plan_.size()) {
      const std::size_t k = next_++;
      return command_message(plan_[k], "call_" + std::to_string(k));
    }
    return Message::assistant(finish_);
  }

  std::string id() const override { return id_; }

 private:
  std::vector<BimanualCommand> plan_;
  std::string id_;
  std::string finish_;
  std::size_t next_ = 0;
};

/// Always asks both hands to wait.
class IdleBackend : public ChatBackend {
 public:
  Message chat(std::span<const Message>) override {
    return command_message(BimanualCommand{}, "call_" + std::to_string(n_++));
  }
  std::string id() const override { return "idle"; }

 private:
  std::size_t n_ = 0;
};

/// Returns recorded assistant messages in order. Running past the recording
/// throws a BackendError of `exhausted` kind, which is how recorded backend
/// failures reproduce.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(std::vector<Message> recorded, std::string id = "replay",
                         BackendError::Kind exhausted = BackendError::Kind::Network)
      : recorded_(std::move(recorded)), id_(std::move(id)), exhausted_(exhausted) {}

  Message chat(std::span<const Message>) override {
    if (next_ >= recorded_.size()) {
      throw BackendError(exhausted_, "replay exhausted after " +
                                                          std::to_string(recorded_.size()) +
                                                          " messages");
    }
    return recorded_[next_++];
  }

  std::string id() const override { return id_; }

 private:
  std::vector<Message> recorded_;
  std::string id_;
  BackendError::Kind exhausted_;
  std::size_t next_ = 0;
};

inline std::unique_ptr<ChatBackend> make_oracle_backend(const TaskSpec& spec,
                                                        const WorldState& initial,
                                                        std::string completion_phrase = "done") {
  return std::make_unique<ScriptedBackend>(oracle_plan(spec, initial), "oracle",
                                           std::move(completion_phrase));
}

}  // namespace labor
