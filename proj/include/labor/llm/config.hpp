#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "json.hpp"

namespace labor {

using nlohmann::json;

/// Settings for talking to a chat-completions endpoint. The credential is
/// never stored here; it is read from the environment variable named by
/// `api_key_env` when a request is made.
struct LlmConfig {
  std::string endpoint;  // e.g. https://api.openai.com/v1
  std::string model = "gpt-4o";
  double temperature = 0.0;
  int timeout_seconds = 60;
  int max_retries = 3;
  int step_budget = 30;
  int max_requests = 0;  // per episode; 0 means 4 x step_budget
  long max_tokens = 0;   // per episode; 0 means unlimited
  int context_messages = 0;  // 0 keeps the full history
  std::string completion_phrase = "done";
  std::string api_key_env = "OPENAI_API_KEY";

  int effective_max_requests() const { return max_requests > 0 ? max_requests : 4 * step_budget; }
};

inline json config_to_json(const LlmConfig& c) {
  return json{{"endpoint", c.endpoint},
              {"model", c.model},
              {"temperature", c.temperature},
              {"timeout_seconds", c.timeout_seconds},
              {"max_retries", c.max_retries},
              {"step_budget", c.step_budget},
              {"max_requests", c.max_requests},
              {"max_tokens", c.max_tokens},
              {"context_messages", c.context_messages},
              {"completion_phrase", c.completion_phrase},
              {"api_key_env", c.api_key_env}};
}

/// FNV-1a over the canonical JSON of the config, as 16 hex digits.
inline std::string config_hash(const LlmConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// LABOR_ENDPOINT and LABOR_MODEL override whatever the file provided.
inline void apply_env_overrides(LlmConfig& c) {
  if (const char* e = std::getenv("LABOR_ENDPOINT"); e && *e) c.endpoint = e;
  if (const char* m = std::getenv("LABOR_MODEL"); m && *m) c.model = m;
}

inline std::string read_api_key(const LlmConfig& c) {
  const char* k = std::getenv(c.api_key_env.c_str());
  return k ? std::string(k) : std::string();
}

}  // namespace labor
