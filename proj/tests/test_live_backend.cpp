#include <gtest/gtest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include "labor/labor.hpp"
#include "labor/llm/live_backend.hpp"

using namespace labor;

namespace {

/// Minimal chat-completions endpoint on localhost.
class MockServer {
 public:
  using Handler = std::function<void(const json& request, httplib::Response&)>;

  explicit MockServer(Handler h) : handler_(std::move(h)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        ++hits_;
        auth_ = req.get_header_value("Authorization");
        bodies_.push_back(req.body);
      }
      handler_(json::parse(req.body), res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int hits() {
    std::lock_guard lock(mu_);
    return hits_;
  }
  std::string auth() {
    std::lock_guard lock(mu_);
    return auth_;
  }
  std::vector<std::string> bodies() {
    std::lock_guard lock(mu_);
    return bodies_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  int hits_ = 0;
  std::string auth_;
  std::vector<std::string> bodies_;
};

json completion(const Message& m, int tokens = 10) {
  return json{{"id", "x"},
              {"object", "chat.completion"},
              {"choices", json::array({json{{"index", 0}, {"message", message_to_json(m)}}})},
              {"usage", json{{"total_tokens", tokens}}}};
}

LlmConfig config_for(const std::string& endpoint) {
  LlmConfig c;
  c.endpoint = endpoint;
  c.model = "mock-model";
  c.timeout_seconds = 2;
  c.max_retries = 2;
  return c;
}

constexpr std::chrono::milliseconds kFast{1};

}  // namespace

TEST(Endpoint, Split) {
  EXPECT_EQ(split_endpoint("https://api.example.com/v1/").origin, "https://api.example.com");
  EXPECT_EQ(split_endpoint("https://api.example.com/v1/").base_path, "/v1");
  EXPECT_EQ(split_endpoint("http://127.0.0.1:8080").base_path, "");
  EXPECT_THROW(split_endpoint("api.example.com"), Error);
}

TEST(Live, ParsesToolCallAndSendsWireShape) {
  const BimanualCommand cmd(Skill::MoveAndGrasp, {"apple"}, Skill::Wait, {});
  MockServer server([&](const json&, httplib::Response& res) {
    res.set_content(completion(command_message(cmd, "call_a")).dump(), "application/json");
  });
  LiveBackend b(config_for(server.endpoint()), "sk-test", kFast);
  const std::vector<Message> msgs{Message::system("sys"), Message::user("hi")};
  const Message reply = b.chat(msgs);
  EXPECT_EQ(reply.role, Role::Assistant);
  const ParsedReply p = parse_tool_call(reply);
  ASSERT_TRUE(std::holds_alternative<BimanualCommand>(p));
  EXPECT_EQ(std::get<BimanualCommand>(p), cmd);
  EXPECT_EQ(server.auth(), "Bearer sk-test");
  const json req = json::parse(server.bodies().at(0));
  EXPECT_EQ(req["model"], "mock-model");
  EXPECT_EQ(req["temperature"], 0.0);
  EXPECT_EQ(req["tool_choice"], "auto");
  EXPECT_EQ(req["tools"], tool_schemas());
  ASSERT_EQ(req["messages"].size(), 2u);
  EXPECT_EQ(req["messages"][0]["role"], "system");
}

TEST(Live, RetriesServerErrorsThenSucceeds) {
  std::atomic<int> n{0};
  MockServer server([&](const json&, httplib::Response& res) {
    if (n++ < 2) {
      res.status = n == 1 ? 500 : 429;
      return;
    }
    res.set_content(completion(Message::assistant("done")).dump(), "application/json");
  });
  LiveBackend b(config_for(server.endpoint()), "", kFast);
  EXPECT_EQ(b.chat({}).content, "done");
  EXPECT_EQ(server.hits(), 3);
}

TEST(Live, ClientErrorIsNotRetried) {
  MockServer server([](const json&, httplib::Response& res) { res.status = 400; });
  LiveBackend b(config_for(server.endpoint()), "", kFast);
  try {
    b.chat({});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::Network);
    EXPECT_NE(std::string(e.what()).find("HTTP 400"), std::string::npos);
  }
  EXPECT_EQ(server.hits(), 1);
}

TEST(Live, MalformedBodyIsNetworkError) {
  MockServer server([](const json&, httplib::Response& res) { res.set_content("{\"nope\":1}", "application/json"); });
  LiveBackend b(config_for(server.endpoint()), "", kFast);
  EXPECT_THROW(b.chat({}), BackendError);
}

TEST(Live, UnreachableEndpointAfterRetries) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  LlmConfig c = config_for("http://127.0.0.1:" + std::to_string(port) + "/v1");
  c.timeout_seconds = 1;
  LiveBackend b(c, "", kFast);
  try {
    b.chat({});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::Network);
  }
}

TEST(Live, RequestCap) {
  MockServer server([](const json&, httplib::Response& res) {
    res.set_content(completion(Message::assistant("hm")).dump(), "application/json");
  });
  LlmConfig c = config_for(server.endpoint());
  c.max_requests = 2;
  LiveBackend b(c, "", kFast);
  b.chat({});
  b.chat({});
  try {
    b.chat({});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::BudgetExceeded);
  }
  EXPECT_EQ(server.hits(), 2);
}

TEST(Live, TokenCap) {
  MockServer server([](const json&, httplib::Response& res) {
    res.set_content(completion(Message::assistant("hm"), 600).dump(), "application/json");
  });
  LlmConfig c = config_for(server.endpoint());
  c.max_tokens = 1000;
  LiveBackend b(c, "", kFast);
  b.chat({});
  b.chat({});
  EXPECT_THROW(b.chat({}), BackendError);
}

TEST(Live, EpisodeAgainstMockPlayingTheOracle) {
  const auto t = generate(TaskClass::ServeWater, Variant::DiffYellowRight, 4);
  const auto plan = oracle_plan(t.spec, t.world);
  std::atomic<std::size_t> k{0};
  MockServer server([&](const json& req, httplib::Response& res) {
    // Every follow-up request answers the previous call.
    const json& last = req["messages"].back();
    if (k > 0) {
      EXPECT_EQ(last["role"], "tool");
      EXPECT_EQ(last["tool_call_id"], "call_" + std::to_string(k - 1));
    }
    const std::size_t i = k++;
    const Message m = i < plan.size() ? command_message(plan[i], "call_" + std::to_string(i))
                                      : Message::assistant("done");
    res.set_content(completion(m).dump(), "application/json");
  });
  const std::string secret = "sk-very-secret-value";
  LiveBackend b(config_for(server.endpoint()), secret, kFast);
  const auto tr = run_episode(t, b, EpisodeOptions{});
  EXPECT_EQ(tr.footer.outcome, Outcome::Success);
  EXPECT_EQ(to_jsonl(tr).find(secret), std::string::npos);
  EXPECT_NO_THROW(replay(parse_jsonl(to_jsonl(tr))));
}

TEST(Live, EpisodeRecordsNetworkError) {
  MockServer server([](const json&, httplib::Response& res) { res.status = 503; });
  const auto t = generate(TaskClass::ServeWater, Variant::SameLeft, 4);
  LiveBackend b(config_for(server.endpoint()), "", kFast);
  const auto tr = run_episode(t, b, EpisodeOptions{});
  EXPECT_EQ(tr.footer.outcome, Outcome::NetworkError);
  EXPECT_EQ(server.hits(), 3);
}

TEST(Live, ConcurrentEpisodesUseIndependentConnections) {
  MockServer server([](const json&, httplib::Response& res) {
    res.set_content(completion(command_message(BimanualCommand{}, "w")).dump(), "application/json");
  });
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] {
      const auto t = generate(TaskClass::ServeFruit, Variant::FruitsSameBowlLeft, static_cast<std::uint64_t>(i));
      LiveBackend b(config_for(server.endpoint()), "", kFast);
      EpisodeOptions o;
      o.budget = 3;
      if (run_episode(t, b, o).footer.outcome == Outcome::BudgetExhausted) ++ok;
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok, 4);
  EXPECT_EQ(server.hits(), 12);
}
