#pragma once

// Chat-completions client over HTTP(S). Kept out of labor.hpp so that only
// targets that talk to a real endpoint pay for httplib. Define
// CPPHTTPLIB_OPENSSL_SUPPORT (and link OpenSSL) for https endpoints.

#include <algorithm>
#include <chrono>
#include <span>
#include <string>
#include <thread>

#include "httplib.h"
#include "labor/llm/backend.hpp"
#include "labor/llm/config.hpp"

namespace labor {

struct EndpointUrl {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // without trailing slash, may be empty
};

inline EndpointUrl split_endpoint(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint must start with http:// or https://");
  const std::size_t path_start = url.find('/', scheme_end + 3);
  EndpointUrl e;
  e.origin = url.substr(0, path_start);
  e.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

class LiveBackend : public ChatBackend {
 public:
  LiveBackend(LlmConfig cfg, std::string api_key,
              std::chrono::milliseconds retry_backoff = std::chrono::milliseconds(500))
      : cfg_(std::move(cfg)), key_(std::move(api_key)), backoff_(retry_backoff) {}

  Message chat(std::span<const Message> messages) override {
    if (requests_ >= cfg_.effective_max_requests()) {
      throw BackendError(BackendError::Kind::BudgetExceeded,
                         "request cap of " + std::to_string(cfg_.effective_max_requests()) +
                             " reached");
    }
    if (cfg_.max_tokens > 0 && tokens_ >= cfg_.max_tokens) {
      throw BackendError(BackendError::Kind::BudgetExceeded,
                         "token cap of " + std::to_string(cfg_.max_tokens) + " reached");
    }
    ++requests_;

    const EndpointUrl ep = split_endpoint(cfg_.endpoint);
    httplib::Client client(ep.origin);
    if (!client.is_valid()) {
      throw BackendError(BackendError::Kind::Network,
                         "cannot create a client for " + ep.origin +
                             " (https needs a build with OpenSSL support)");
    }
    const auto timeout = std::chrono::seconds(cfg_.timeout_seconds);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);
    const std::string body = request_body(messages).dump(-1, ' ', false, json::error_handler_t::replace);
    const std::string path = ep.base_path + "/chat/completions";

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(backoff_ * (1 << std::min(attempt - 1, 4)));
      auto res = client.Post(path, headers, body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) return parse_response(res->body);
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300);
      if (res->status != 429 && res->status < 500) break;  // not retryable
    }
    throw BackendError(BackendError::Kind::Network, "chat request to " + ep.origin + path +
                                                        " failed: " + last_error);
  }

  std::string id() const override { return "live:" + cfg_.model; }

  json request_body(std::span<const Message> messages) const {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back(message_to_json(m));
    return json{{"model", cfg_.model},
                {"temperature", cfg_.temperature},
                {"messages", std::move(msgs)},
                {"tools", tool_schemas()},
                {"tool_choice", "auto"}};
  }

 private:
  Message parse_response(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty() || !j["choices"][0].is_object() ||
        !j["choices"][0].contains("message")) {
      throw BackendError(BackendError::Kind::Network, "malformed chat completion response");
    }
    if (j.contains("usage") && j["usage"].is_object() && j["usage"].contains("total_tokens") &&
        j["usage"]["total_tokens"].is_number_integer()) {
      tokens_ += j["usage"]["total_tokens"].get<long>();
    }
    try {
      Message m = message_from_json(j["choices"][0]["message"]);
      m.role = Role::Assistant;
      return m;
    } catch (const TranscriptFormatError& e) {
      throw BackendError(BackendError::Kind::Network, std::string("bad message: ") + e.what());
    }
  }

  LlmConfig cfg_;
  std::string key_;
  std::chrono::milliseconds backoff_;
  int requests_ = 0;
  long tokens_ = 0;
};

}  // namespace labor
