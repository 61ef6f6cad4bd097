// labor_cli: run, eval, replay, validate and describe episodes.
//
// Exit codes: 0 success, 1 failed outcome or check, 2 usage or config error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "labor/labor.hpp"
#include "labor/llm/live_backend.hpp"

using namespace labor;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

struct Settings {
  std::string task_class;
  std::string variant = "random";
  std::string seed = "0";
  std::string mode = "labor";
  std::string backend = "oracle";
  int budget = kDefaultStepBudget;
  std::string out = "transcripts";
  bool distractor = false;
  LlmConfig llm;

  int episodes = 40;
  int parallel = 1;
  std::string path;
  bool oracle_plan = false;
};

std::string help_footer() {
  std::string s = "Task classes and variants:\n";
  for (TaskClass c : kTaskClasses) {
    s += "  " + std::string(class_cli_name(c)) + ":";
    for (Variant v : variants_for(c)) s += " " + std::string(variant_cli_name(v));
    s += "\n";
  }
  s += "Skills: " + skill_name_list() + "\n";
  s += "Backends: oracle, live, replay:<transcript.jsonl>\n";
  s += "The API key is read from the environment variable named by --api-key-env.\n";
  s += "Exit codes: 0 success, 1 failure outcome, 2 usage or config error.";
  return s;
}

std::uint64_t parse_seed(const std::string& s) {
  if (s == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
  }
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--seed must be a non-negative integer or 'random', got '" + s + "'");
}

PromptMode parse_mode(const std::string& s) {
  if (auto m = mode_from_name(s)) return *m;
  throw UsageError("--mode must be labor or baseline, got '" + s + "'");
}

TaskClass resolve_class(const Settings& st) {
  std::optional<TaskClass> c;
  if (!st.task_class.empty()) {
    c = class_from_name(st.task_class);
    if (!c) throw UsageError("unknown task class '" + st.task_class + "'");
  }
  if (st.variant != "random") {
    const auto v = variant_from_name(st.variant);
    if (!v) throw UsageError("unknown variant '" + st.variant + "'");
    if (!c) c = class_of(*v);
  }
  if (!c) throw UsageError("--class is required");
  return *c;
}

GeneratedTask resolve_task(const Settings& st) {
  const TaskClass c = resolve_class(st);
  const std::uint64_t seed = parse_seed(st.seed);
  Variant v;
  if (st.variant == "random") {
    std::mt19937_64 rng(seed);
    const auto vs = variants_for(c);
    v = vs[rng() % vs.size()];
  } else {
    v = *variant_from_name(st.variant);
    if (!variant_belongs_to(c, v)) {
      throw UsageError("variant '" + st.variant + "' does not belong to " + std::string(class_cli_name(c)));
    }
  }
  return generate(c, v, seed, kDefaultConstants, st.distractor);
}

LlmConfig live_config(const Settings& st) {
  LlmConfig c = st.llm;
  c.step_budget = st.budget;
  apply_env_overrides(c);
  if (c.endpoint.empty()) {
    throw UsageError("the live backend needs an endpoint (--endpoint, config file or LABOR_ENDPOINT)");
  }
  split_endpoint(c.endpoint);
  return c;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

EpisodeOptions episode_options(const Settings& st, const LlmConfig& llm, bool live) {
  EpisodeOptions o;
  o.mode = parse_mode(st.mode);
  o.budget = st.budget;
  o.context_messages = llm.context_messages;
  o.completion_phrase = llm.completion_phrase;
  o.config_hash = config_hash(llm);
  if (live) o.started_at = utc_now();
  return o;
}

EpisodeTranscript load_transcript(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return parse_jsonl(in);
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

int cmd_run(const Settings& st) {
  if (st.budget < 1) throw UsageError("--budget must be at least 1");
  const bool live = st.backend == "live";
  std::unique_ptr<ChatBackend> backend;
  GeneratedTask task;
  EpisodeOptions opts;
  if (st.backend.rfind("replay:", 0) == 0) {
    const std::string path = st.backend.substr(7);
    if (path.empty()) throw UsageError("replay backend needs a transcript path: replay:<path>");
    const EpisodeTranscript rec = load_transcript(path);
    std::vector<Message> replies;
    for (const auto& s : rec.steps) replies.push_back(s.assistant);
    backend = std::make_unique<ReplayBackend>(std::move(replies), rec.header.backend,
                                              rec.footer.outcome == Outcome::BudgetExhausted
                                                  ? BackendError::Kind::BudgetExceeded
                                                  : BackendError::Kind::Network);
    task.spec = rec.header.task;
    task.world = world_from_json(rec.header.initial_world);
    opts = options_from_header(rec.header);
  } else if (st.backend == "oracle" || live) {
    task = resolve_task(st);
    const LlmConfig llm = live ? live_config(st) : st.llm;
    opts = episode_options(st, llm, live);
    if (live) {
      const std::string key = read_api_key(llm);
      if (key.empty()) std::cerr << "warning: " << llm.api_key_env << " is not set; sending no credential\n";
      backend = std::make_unique<LiveBackend>(llm, key);
    } else {
      backend = make_oracle_backend(task.spec, task.world, llm.completion_phrase);
    }
  } else {
    throw UsageError("unknown backend '" + st.backend + "'");
  }

  const fs::path file = fs::path(st.out) / transcript_filename(task.spec, mode_name(opts.mode));
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  opts.on_record = [&out](const json& j) { out << dump_line(j) << '\n' << std::flush; };

  const EpisodeTranscript t = run_episode(task, *backend, opts);
  std::cout << class_name(task.spec.task_class) << " " << variant_name(task.spec.variant) << " seed "
            << task.spec.seed << ": " << outcome_name(t.footer.outcome) << " after " << t.footer.steps
            << " steps, " << t.footer.rounds << " rounds\n";
  if (!t.footer.detail.empty()) std::cout << "detail: " << t.footer.detail << "\n";
  std::cout << "transcript: " << file.string() << "\n";
  return t.footer.outcome == Outcome::Success ? kOk : kFailed;
}

int cmd_eval(const Settings& st) {
  if (st.episodes < 1) throw UsageError("-n must be at least 1");
  if (st.parallel < 1) throw UsageError("--parallel must be at least 1");
  if (st.budget < 1) throw UsageError("--budget must be at least 1");
  if (st.variant != "random") throw UsageError("eval draws variants uniformly; drop --variant");
  const TaskClass cls = resolve_class(st);
  const std::uint64_t seed0 = parse_seed(st.seed);
  const bool live = st.backend == "live";
  if (!live && st.backend != "oracle") throw UsageError("eval supports the oracle and live backends");

  const LlmConfig llm = live ? live_config(st) : st.llm;
  const std::string key = live ? read_api_key(llm) : std::string();
  if (live && key.empty()) std::cerr << "warning: " << llm.api_key_env << " is not set; sending no credential\n";

  BatchOptions o;
  o.label = live ? st.mode : "oracle";
  o.episode = episode_options(st, llm, live);
  o.parallel = st.parallel;
  o.distractor = st.distractor;
  const std::string phrase = llm.completion_phrase;
  const BackendFactory factory = [&](const GeneratedTask& t) -> std::unique_ptr<ChatBackend> {
    if (live) return std::make_unique<LiveBackend>(llm, key);
    return make_oracle_backend(t.spec, t.world, phrase);
  };

  const EvalReport r = evaluate_batch(cls, factory, st.episodes, seed0, o);
  const RenderedReport rendered = render_report(r);
  const fs::path dir = fs::path(st.out);
  for (const auto& e : r.episodes) {
    write_file(dir / transcript_filename(e.task, mode_name(o.episode.mode)), to_jsonl(e.transcript));
  }
  const fs::path csv = dir / ("report_" + std::string(class_cli_name(cls)) + "_" + o.label + ".csv");
  write_file(csv, rendered.csv);
  std::cout << rendered.table;
  std::cout << "report: " << csv.string() << "\n";
  return kOk;
}

int cmd_replay(const Settings& st) {
  const EpisodeTranscript rec = load_transcript(st.path);
  try {
    const EpisodeTranscript again = replay(rec);
    std::cout << "replay matches: " << again.steps.size() << " rounds, outcome "
              << outcome_name(again.footer.outcome) << "\n";
    return kOk;
  } catch (const DivergenceError& e) {
    std::cout << e.what() << "\n";
    return kFailed;
  }
}

int cmd_validate(const Settings& st) {
  const GeneratedTask task = resolve_task(st);
  std::ifstream in(st.path);
  if (!in) throw UsageError("cannot open " + st.path);
  WorldState w = task.world;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto parsed = parse_plan_line(line);
    if (const auto* err = std::get_if<ParseError>(&parsed)) {
      std::cout << "line " << number << ": " << err->message << "\n";
      return kFailed;
    }
    const auto& cmd = std::get<BimanualCommand>(parsed);
    const auto violations = validate(w, cmd);
    if (!violations.empty()) {
      const Violation& v = violations.front();
      std::cout << "line " << number << ": " << side_name(v.side) << " hand: " << reason_name(v.reason) << ": "
                << v.message << "\n";
      return kFailed;
    }
    execute(w, cmd);
  }
  const bool reached = is_success(task.spec, w);
  std::cout << (reached ? "valid, goal reached" : "valid, goal not reached") << "\n";
  return reached ? kOk : kFailed;
}

int cmd_describe(const Settings& st) {
  const GeneratedTask task = resolve_task(st);
  if (st.oracle_plan) {
    for (const auto& c : oracle_plan(task.spec, task.world)) std::cout << render_plan_line(c) << "\n";
    return kOk;
  }
  const PromptConfig pc{parse_mode(st.mode), task.world.constants, task.spec.description,
                        st.llm.completion_phrase};
  std::cout << "# task\n" << task_to_json(task.spec).dump(2) << "\n\n";
  std::cout << "# system prompt (" << mode_name(pc.mode) << ")\n" << build_system_prompt(pc) << "\n\n";
  std::cout << "# initial state\n" << observe(task.world) << "\n";
  return kOk;
}

void add_task_options(CLI::App* app, Settings& st) {
  app->add_option("--class", st.task_class, "Task class");
  app->add_option("--variant", st.variant, "Variant name or 'random'")->capture_default_str();
  app->add_option("--seed", st.seed, "Task seed or 'random'")->capture_default_str();
  app->add_flag("--distractor", st.distractor, "Add the scissors distractor");
}

void add_episode_options(CLI::App* app, Settings& st) {
  app->add_option("--mode", st.mode, "Prompt mode: labor or baseline")->capture_default_str();
  app->add_option("--backend", st.backend, "oracle, live or replay:<path>")->capture_default_str();
  app->add_option("--budget", st.budget, "Step budget per episode")->capture_default_str();
  app->add_option("--out", st.out, "Output directory")->capture_default_str();
  app->add_option("--endpoint", st.llm.endpoint, "Chat-completions base URL");
  app->add_option("--model", st.llm.model, "Model name")->capture_default_str();
  app->add_option("--temperature", st.llm.temperature)->capture_default_str();
  app->add_option("--timeout", st.llm.timeout_seconds, "Request timeout in seconds")->capture_default_str();
  app->add_option("--max-retries", st.llm.max_retries)->capture_default_str();
  app->add_option("--max-requests", st.llm.max_requests, "Per episode; 0 means 4 x budget")
      ->capture_default_str();
  app->add_option("--max-tokens", st.llm.max_tokens, "Per episode; 0 means unlimited")->capture_default_str();
  app->add_option("--context", st.llm.context_messages, "Messages kept besides the system prompt; 0 keeps all")
      ->capture_default_str();
  app->add_option("--completion-phrase", st.llm.completion_phrase)->capture_default_str();
  app->add_option("--api-key-env", st.llm.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimanual task planning episodes: run, evaluate, replay, validate, describe."};
  app.footer(help_footer());
  app.set_config("--config", "", "INI or TOML file; flags override it");
  app.require_subcommand(1);

  Settings st;
  int (*handler)(const Settings&) = nullptr;

  auto* run = app.add_subcommand("run", "Run one episode and write its transcript");
  add_task_options(run, st);
  add_episode_options(run, st);
  run->callback([&] { handler = cmd_run; });

  auto* eval = app.add_subcommand("eval", "Run a batch and report success and failure types");
  add_task_options(eval, st);
  add_episode_options(eval, st);
  eval->add_option("-n,--episodes", st.episodes, "Episodes")->capture_default_str();
  eval->add_option("--parallel", st.parallel, "Episodes run concurrently")->capture_default_str();
  eval->callback([&] { handler = cmd_eval; });

  auto* rep = app.add_subcommand("replay", "Re-execute a transcript and check it reproduces");
  rep->add_option("transcript", st.path, "Transcript .jsonl")->required();
  rep->callback([&] { handler = cmd_replay; });

  auto* val = app.add_subcommand("validate", "Check a plan file, one command per line, against a task");
  val->add_option("plan", st.path, "Plan file")->required();
  add_task_options(val, st);
  val->callback([&] { handler = cmd_validate; });

  auto* desc = app.add_subcommand("describe", "Print a task, its prompt and initial state");
  add_task_options(desc, st);
  desc->add_option("--mode", st.mode, "Prompt mode: labor or baseline")->capture_default_str();
  desc->add_option("--completion-phrase", st.llm.completion_phrase)->capture_default_str();
  desc->add_flag("--oracle-plan", st.oracle_plan, "Print only the oracle plan, one command per line");
  desc->callback([&] { handler = cmd_describe; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return handler(st);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const UnknownVariant& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TranscriptFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
