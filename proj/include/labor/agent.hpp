#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "labor/coordination.hpp"
#include "labor/llm/backend.hpp"
#include "labor/llm/prompt.hpp"
#include "labor/llm/tool_call.hpp"
#include "labor/snapshot.hpp"
#include "labor/tasks.hpp"

namespace labor {

enum class Outcome { Success, BudgetExhausted, PrematureFinish, NetworkError };

inline constexpr std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::BudgetExhausted: return "budget_exhausted";
    case Outcome::PrematureFinish: return "premature_finish";
    case Outcome::NetworkError: return "network_error";
  }
  return "?";
}

inline std::optional<Outcome> outcome_from_name(std::string_view name) {
  for (auto o : {Outcome::Success, Outcome::BudgetExhausted, Outcome::PrematureFinish,
                 Outcome::NetworkError}) {
    if (outcome_name(o) == name) return o;
  }
  return std::nullopt;
}

/// What one LLM round trip turned into.
enum class StepKind { Command, Info, ParseError, Reprompt, Finish };

inline constexpr std::string_view step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Command: return "command";
    case StepKind::Info: return "info";
    case StepKind::ParseError: return "parse_error";
    case StepKind::Reprompt: return "reprompt";
    case StepKind::Finish: return "finish";
  }
  return "?";
}

inline std::optional<StepKind> step_kind_from_name(std::string_view name) {
  for (auto k : {StepKind::Command, StepKind::Info, StepKind::ParseError, StepKind::Reprompt,
                 StepKind::Finish}) {
    if (step_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

struct EpisodeOptions {
  PromptMode mode = PromptMode::Labor;
  int budget = kDefaultStepBudget;
  int max_rounds = 0;        // LLM round trips; 0 means 4 x budget
  int context_messages = 0;  // 0 keeps the full history
  std::string completion_phrase = "done";
  std::string config_hash;
  std::string started_at;
  /// Called with each transcript record (header, steps, footer) as it is
  /// produced.
  std::function<void(const json&)> on_record;

  int effective_max_rounds() const { return max_rounds > 0 ? max_rounds : 4 * budget; }
};

struct TranscriptHeader {
  TaskSpec task;
  std::string mode;
  std::string backend;
  std::string config_hash;
  std::string started_at;
  int budget = kDefaultStepBudget;
  int max_rounds = 0;
  int context_messages = 0;
  std::string completion_phrase = "done";
  json initial_world;
};

struct StepRecord {
  int round = 0;
  Message assistant;
  StepKind kind = StepKind::Command;
  std::optional<BimanualCommand> command;
  std::optional<InfoRequest> info;
  std::optional<StepResult> result;
  std::string error;
  std::string reply;  // text fed back to the model, if any
  json world;         // snapshot after this round
};

struct TranscriptFooter {
  Outcome outcome = Outcome::BudgetExhausted;
  int steps = 0;   // bimanual commands executed
  int rounds = 0;  // LLM round trips
  std::string detail;
};

struct EpisodeTranscript {
  TranscriptHeader header;
  std::vector<StepRecord> steps;
  TranscriptFooter footer;
};

// ---------------------------------------------------------------------------
// Serialization

inline json outcome_to_json(const SkillOutcome& o) {
  return json{{"status", o.ok() ? "ok" : "rejected"},
              {"reason", o.reason ? json(reason_name(*o.reason)) : json(nullptr)},
              {"message", o.message},
              {"delta", o.world_delta}};
}

inline SkillOutcome outcome_from_json(const json& j) {
  SkillOutcome o;
  o.status = j.at("status").get<std::string>() == "ok" ? SkillOutcome::Status::Ok
                                                        : SkillOutcome::Status::Rejected;
  if (!j.at("reason").is_null()) o.reason = reason_from_name(j.at("reason").get<std::string>());
  o.message = j.at("message").get<std::string>();
  o.world_delta = j.at("delta").get<std::string>();
  return o;
}

inline json header_to_json(const TranscriptHeader& h) {
  return json{{"type", "header"},
              {"task", task_to_json(h.task)},
              {"mode", h.mode},
              {"backend", h.backend},
              {"config_hash", h.config_hash},
              {"started_at", h.started_at},
              {"budget", h.budget},
              {"max_rounds", h.max_rounds},
              {"context_messages", h.context_messages},
              {"completion_phrase", h.completion_phrase},
              {"initial_world", h.initial_world}};
}

inline json step_to_json(const StepRecord& s) {
  json j{{"type", "step"},
         {"round", s.round},
         {"assistant", message_to_json(s.assistant)},
         {"kind", step_kind_name(s.kind)},
         {"error", s.error},
         {"reply", s.reply},
         {"world", s.world}};
  j["command"] = s.command ? render_command_args(*s.command) : json(nullptr);
  j["info"] = s.info ? render_info_args(*s.info) : json(nullptr);
  if (s.result) {
    j["result"] = json{{"left", outcome_to_json(s.result->left)},
                       {"right", outcome_to_json(s.result->right)},
                       {"pattern", pattern_name(s.result->pattern)},
                       {"observation", s.result->observation}};
  } else {
    j["result"] = nullptr;
  }
  return j;
}

inline json footer_to_json(const TranscriptFooter& f) {
  return json{{"type", "footer"},
              {"outcome", outcome_name(f.outcome)},
              {"steps", f.steps},
              {"rounds", f.rounds},
              {"detail", f.detail}};
}

inline std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

/// Line-delimited JSON: header, one line per round, footer.
inline std::string to_jsonl(const EpisodeTranscript& t) {
  std::string out = dump_line(header_to_json(t.header)) + "\n";
  for (const auto& s : t.steps) out += dump_line(step_to_json(s)) + "\n";
  out += dump_line(footer_to_json(t.footer)) + "\n";
  return out;
}

inline EpisodeTranscript parse_jsonl(std::istream& in) {
  EpisodeTranscript t;
  bool have_header = false, have_footer = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw TranscriptFormatError("line " + std::to_string(lineno) + " is not a JSON object");
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        TranscriptHeader& h = t.header;
        h.task = task_from_json(j.at("task"));
        h.mode = j.at("mode").get<std::string>();
        h.backend = j.at("backend").get<std::string>();
        h.config_hash = j.at("config_hash").get<std::string>();
        h.started_at = j.at("started_at").get<std::string>();
        h.budget = j.at("budget").get<int>();
        h.max_rounds = j.at("max_rounds").get<int>();
        h.context_messages = j.at("context_messages").get<int>();
        h.completion_phrase = j.at("completion_phrase").get<std::string>();
        h.initial_world = j.at("initial_world");
        have_header = true;
      } else if (type == "step") {
        StepRecord s;
        s.round = j.at("round").get<int>();
        s.assistant = message_from_json(j.at("assistant"));
        auto kind = step_kind_from_name(j.at("kind").get<std::string>());
        if (!kind) throw TranscriptFormatError("unknown step kind");
        s.kind = *kind;
        s.error = j.at("error").get<std::string>();
        s.reply = j.at("reply").get<std::string>();
        s.world = j.at("world");
        if (!j.at("command").is_null()) {
          auto cmd = parse_plan_line(j.at("command").dump());
          if (auto* c = std::get_if<BimanualCommand>(&cmd)) s.command = *c;
        }
        if (!j.at("info").is_null()) {
          auto info = detail::info_from_args(j.at("info"));
          if (auto* i = std::get_if<InfoRequest>(&info)) s.info = *i;
        }
        if (!j.at("result").is_null()) {
          const json& r = j.at("result");
          StepResult res;
          res.left = outcome_from_json(r.at("left"));
          res.right = outcome_from_json(r.at("right"));
          res.pattern = pattern_from_name(r.at("pattern").get<std::string>())
                            .value_or(Pattern::Uncoordinated);
          res.observation = r.at("observation").get<std::string>();
          s.result = std::move(res);
        }
        t.steps.push_back(std::move(s));
      } else if (type == "footer") {
        auto o = outcome_from_name(j.at("outcome").get<std::string>());
        if (!o) throw TranscriptFormatError("unknown outcome");
        t.footer.outcome = *o;
        t.footer.steps = j.at("steps").get<int>();
        t.footer.rounds = j.at("rounds").get<int>();
        t.footer.detail = j.at("detail").get<std::string>();
        have_footer = true;
      } else {
        throw TranscriptFormatError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw TranscriptFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw TranscriptFormatError("transcript has no header");
  if (!have_footer) throw TranscriptFormatError("transcript has no footer");
  return t;
}

inline EpisodeTranscript parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

/// `<class>_<variant>_<seed>_<mode>.jsonl`
inline std::string transcript_filename(const TaskSpec& spec, std::string_view mode) {
  return std::string(class_cli_name(spec.task_class)) + "_" +
         std::string(variant_cli_name(spec.variant)) + "_" + std::to_string(spec.seed) + "_" +
         std::string(mode) + ".jsonl";
}

// ---------------------------------------------------------------------------
// Episode loop

namespace detail {

/// System prompt plus the newest `cap` messages, never starting on an
/// orphaned tool reply.
inline std::vector<Message> context_window(const std::vector<Message>& history, int cap) {
  if (cap <= 0 || history.size() <= static_cast<std::size_t>(cap) + 1) return history;
  std::size_t start = history.size() - static_cast<std::size_t>(cap);
  while (start < history.size() && history[start].role == Role::Tool) ++start;
  std::vector<Message> out;
  out.push_back(history.front());
  out.insert(out.end(), history.begin() + static_cast<std::ptrdiff_t>(start), history.end());
  return out;
}

}  // namespace detail

/// Drives one episode: ask the backend, parse its reply, execute commands or
/// answer queries, feed the result back, until success, budget exhaustion,
/// a finish message or a network failure. Failures are recorded, not thrown.
inline EpisodeTranscript run_episode(const TaskSpec& task, const WorldState& initial,
                                     ChatBackend& backend, const EpisodeOptions& opts) {
  EpisodeTranscript t;
  t.header.task = task;
  t.header.mode = std::string(mode_name(opts.mode));
  t.header.backend = backend.id();
  t.header.config_hash = opts.config_hash;
  t.header.started_at = opts.started_at;
  t.header.budget = opts.budget;
  t.header.max_rounds = opts.max_rounds;
  t.header.context_messages = opts.context_messages;
  t.header.completion_phrase = opts.completion_phrase;
  t.header.initial_world = world_to_json(initial);
  if (opts.on_record) opts.on_record(header_to_json(t.header));

  WorldState w = initial;
  PromptConfig pc{opts.mode, w.constants, task.description, opts.completion_phrase};
  std::vector<Message> history{Message::system(build_system_prompt(pc)),
                               Message::user("Current state:\n" + observe(w))};
  const ParseOptions parse_opts{opts.completion_phrase};

  auto finish = [&](Outcome o, std::string detail) {
    t.footer.outcome = o;
    t.footer.steps = w.step;
    t.footer.rounds = static_cast<int>(t.steps.size());
    t.footer.detail = std::move(detail);
    if (opts.on_record) opts.on_record(footer_to_json(t.footer));
    return t;
  };

  bool reprompted = false;
  while (true) {
    if (w.step >= opts.budget) return finish(Outcome::BudgetExhausted, "step budget reached");
    if (static_cast<int>(t.steps.size()) >= opts.effective_max_rounds()) {
      return finish(Outcome::BudgetExhausted, "round trip budget reached");
    }

    Message reply;
    try {
      reply = backend.chat(detail::context_window(history, opts.context_messages));
    } catch (const BackendError& e) {
      return finish(e.kind() == BackendError::Kind::Network ? Outcome::NetworkError
                                                            : Outcome::BudgetExhausted,
                    e.what());
    }
    reply.role = Role::Assistant;
    history.push_back(reply);

    StepRecord rec;
    rec.round = static_cast<int>(t.steps.size());
    rec.assistant = reply;
    std::optional<Outcome> stop;

    ParsedReply parsed = parse_tool_call(reply, parse_opts);
    if (auto* cmd = std::get_if<BimanualCommand>(&parsed)) {
      rec.kind = StepKind::Command;
      rec.command = *cmd;
      rec.result = execute(w, *cmd);
      rec.reply = rec.result->observation;
      if (is_success(task, w)) stop = Outcome::Success;
    } else if (auto* info = std::get_if<InfoRequest>(&parsed)) {
      rec.kind = StepKind::Info;
      rec.info = *info;
      rec.reply = answer_info(w, *info);
    } else if (auto* err = std::get_if<ParseError>(&parsed)) {
      rec.error = err->message;
      if (err->had_tool_call) {
        rec.kind = StepKind::ParseError;
        rec.reply = "error: " + err->message;
      } else if (!reprompted) {
        rec.kind = StepKind::Reprompt;
        rec.reply = std::string(kContinuePrompt);
      } else {
        rec.kind = StepKind::Finish;
        stop = Outcome::PrematureFinish;
      }
    } else {
      rec.kind = StepKind::Finish;
      stop = is_success(task, w) ? Outcome::Success : Outcome::PrematureFinish;
    }

    reprompted = rec.kind == StepKind::Reprompt;
    if (rec.kind == StepKind::Reprompt) {
      history.push_back(Message::user(rec.reply));
    } else if (!reply.tool_calls.empty()) {
      history.push_back(Message::tool(reply.tool_calls.front().id, rec.reply));
      for (std::size_t i = 1; i < reply.tool_calls.size(); ++i) {
        history.push_back(Message::tool(reply.tool_calls[i].id,
                                        "ignored: only the first tool call of a reply runs"));
      }
    } else if (rec.kind != StepKind::Finish) {
      // Command or query written in the message text rather than as a call.
      history.push_back(Message::user(rec.reply));
    }

    rec.world = world_to_json(w);
    if (opts.on_record) opts.on_record(step_to_json(rec));
    t.steps.push_back(std::move(rec));

    if (stop) {
      return finish(*stop, *stop == Outcome::Success ? "goal reached" : "model finished early");
    }
  }
}

inline EpisodeTranscript run_episode(const GeneratedTask& task, ChatBackend& backend,
                                     const EpisodeOptions& opts) {
  return run_episode(task.spec, task.world, backend, opts);
}

inline EpisodeOptions options_from_header(const TranscriptHeader& h) {
  EpisodeOptions o;
  o.mode = mode_from_name(h.mode).value_or(PromptMode::Labor);
  o.budget = h.budget;
  o.max_rounds = h.max_rounds;
  o.context_messages = h.context_messages;
  o.completion_phrase = h.completion_phrase;
  o.config_hash = h.config_hash;
  o.started_at = h.started_at;
  return o;
}

/// Re-executes a transcript's recorded replies from its initial world and
/// checks that every recomputed record matches. Throws DivergenceError on the
/// first mismatch; returns the recomputed transcript otherwise.
inline EpisodeTranscript replay(const EpisodeTranscript& recorded,
                                const WorldConstants& constants = kDefaultConstants) {
  std::vector<Message> replies;
  for (const auto& s : recorded.steps) replies.push_back(s.assistant);
  ReplayBackend backend(std::move(replies), recorded.header.backend,
                        recorded.footer.outcome == Outcome::BudgetExhausted
                            ? BackendError::Kind::BudgetExceeded
                            : BackendError::Kind::Network);
  const WorldState initial = world_from_json(recorded.header.initial_world, constants);
  EpisodeTranscript again =
      run_episode(recorded.header.task, initial, backend, options_from_header(recorded.header));

  const std::size_t n = std::min(again.steps.size(), recorded.steps.size());
  for (std::size_t i = 0; i < n; ++i) {
    const json a = step_to_json(again.steps[i]);
    const json b = step_to_json(recorded.steps[i]);
    if (a == b) continue;
    for (const auto& [key, value] : b.items()) {
      if (a.at(key) != value) throw DivergenceError(static_cast<int>(i), "field '" + key + "' differs");
    }
    throw DivergenceError(static_cast<int>(i), "record differs");
  }
  if (again.steps.size() != recorded.steps.size()) {
    throw DivergenceError(static_cast<int>(n), "recorded " + std::to_string(recorded.steps.size()) +
                                                   " rounds, recomputed " +
                                                   std::to_string(again.steps.size()));
  }
  // The footer detail carries backend error text, which a replay cannot
  // reproduce.
  if (again.footer.outcome != recorded.footer.outcome || again.footer.steps != recorded.footer.steps ||
      again.footer.rounds != recorded.footer.rounds) {
    throw DivergenceError(static_cast<int>(n), "footer differs");
  }
  return again;
}

}  // namespace labor
