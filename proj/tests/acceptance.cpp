// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "labor/labor.hpp"
#include "random_world.hpp"

using namespace labor;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// 1. Oracle solves 40/40 per class, every episode within 30 steps, under 10 s.
Verdict oracle_solvability() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  std::string counts;
  for (TaskClass c : kTaskClasses) {
    BatchOptions o;
    o.label = "oracle";
    const EvalReport r = evaluate_batch(
        c, [](const GeneratedTask& t) { return make_oracle_backend(t.spec, t.world); }, 40, 0, o);
    const EvalRow& total = r.rows.back();
    counts += std::string(class_name(c)) + " " + std::to_string(total.successes) + "/" +
              std::to_string(total.episodes) + " ";
    if (total.episodes != 40 || total.successes != 40) v.fail(std::string(class_name(c)) + " not 40/40");
    for (const auto& e : r.episodes) {
      if (e.transcript.footer.steps > kDefaultStepBudget) v.fail("episode over 30 steps");
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 10.0) v.fail("took " + std::to_string(secs) + " s");
  if (v.pass) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "in %.2f s", secs);
    v.detail = counts + buf;
  }
  return v;
}

// 2. 10,000 randomized steps with zero invariant violations.
Verdict invariant_suite() {
  Verdict v;
  int executed = 0;
  const auto failures = randomized::random_walk(20240601, 10000, &executed);
  if (executed != 10000) v.fail("executed " + std::to_string(executed) + " steps");
  if (!failures.empty()) v.fail(std::to_string(failures.size()) + "+ violations, first: " + failures.front());
  if (v.pass) v.detail = std::to_string(executed) + " steps, 0 violations";
  return v;
}

Pattern expected_pattern(const BimanualCommand& c) {
  const int waits = (c.left.skill == Skill::Wait) + (c.right.skill == Skill::Wait);
  if (waits == 1) return Pattern::AsyncCoordinated;
  if (c.left.skill == c.right.skill && c.left.args == c.right.args) return Pattern::SyncCoordinated;
  return Pattern::Uncoordinated;
}

// 3. Pattern grid, two-hand bowl sequence, tearing rule.
Verdict coordination_semantics() {
  Verdict v;
  const std::vector<std::vector<std::string>> arg_sets{{}, {"bowl"}, {"apple"}, {"bowl", "apple"}, {"apple", "bowl"}};
  int cells = 0;
  for (Skill l : kSkills) {
    for (Skill r : kSkills) {
      for (const auto& la : arg_sets) {
        for (const auto& ra : arg_sets) {
          const BimanualCommand c(l, la, r, ra);
          ++cells;
          if (classify(c) != expected_pattern(c)) v.fail("classify mismatch at " + render_plan_line(c));
        }
      }
    }
  }

  int sequences = 0;
  for (Variant var : variants_for(TaskClass::ServeFruit)) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const GeneratedTask t = generate(TaskClass::ServeFruit, var, seed);
      WorldState w = t.world;
      const auto plan = oracle_plan(t.spec, t.world);
      for (const auto& c : plan) {
        const StepResult r = execute(w, c);
        if (!r.left.ok() || !r.right.ok()) v.fail("oracle step rejected: " + r.observation);
        if (two_hand_held(w)) {
          for (Side s : kSides) {
            for (Skill m : {Skill::MoveTo, Skill::MoveAbove}) {
              for (const auto& [name, obj] : w.objects) {
                BimanualCommand single;
                (s == Side::Left ? single.left : single.right) = SkillInvocation{m, s, {name}};
                WorldState probe = w;
                const StepResult pr = execute(probe, single);
                if (pr.of(s).ok()) v.fail("single-sided move during two-hand hold accepted");
                WorldState expected = w;
                expected.step += 1;
                if (probe != expected) v.fail("rejected single-sided move changed the world");
              }
            }
          }
        }
      }
      ++sequences;
      if (!is_success(t.spec, w)) v.fail("bowl sequence missed the goal for " + std::string(variant_name(var)));
      if (two_hand_held(w) != std::string(kBowl)) v.fail("bowl not two-hand held at the end");
    }
  }
  if (v.pass) {
    v.detail = std::to_string(cells) + " grid cells, " + std::to_string(sequences) + " bowl sequences";
  }
  return v;
}

// 4. Six fault-injected transcripts classified correctly.
Verdict classifier_fixtures() {
  Verdict v;
  int right = 0;
  const auto fx = fixtures::fault_fixtures();
  for (const auto& f : fx) {
    const FailureLabel l = classify_failure(f.task_class, f.transcript);
    if (f.transcript.footer.outcome != Outcome::Success && l.tag == f.expected) {
      ++right;
    } else {
      v.fail(f.name + " labelled " + std::string(failure_tag_name(l.tag)));
    }
  }
  if (fx.size() != 6) v.fail("expected 6 fixtures");
  if (v.pass) v.detail = std::to_string(right) + "/" + std::to_string(fx.size()) + " fixtures";
  return v;
}

// 5. Byte-identical reruns and divergence-free replay.
Verdict determinism_and_replay() {
  Verdict v;
  int transcripts = 0;
  for (TaskClass c : kTaskClasses) {
    for (Variant var : variants_for(c)) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::string first;
        for (int run = 0; run < 2; ++run) {
          const GeneratedTask t = generate(c, var, seed);
          auto b = make_oracle_backend(t.spec, t.world);
          const std::string text = to_jsonl(run_episode(t, *b, EpisodeOptions{}));
          if (run == 0) {
            first = text;
          } else if (text != first) {
            v.fail("rerun differs for " + std::string(variant_name(var)));
          }
        }
        try {
          const auto again = replay(parse_jsonl(first));
          if (to_jsonl(again) != first) v.fail("replay output differs");
        } catch (const std::exception& e) {
          v.fail(std::string("replay failed: ") + e.what());
        }
        ++transcripts;
      }
    }
  }
  for (const auto& f : fixtures::fault_fixtures()) {
    try {
      replay(parse_jsonl(to_jsonl(f.transcript)));
      ++transcripts;
    } catch (const std::exception& e) {
      v.fail(f.name + " replay: " + e.what());
    }
  }
  if (v.pass) v.detail = std::to_string(transcripts) + " transcripts, 0 divergences";
  return v;
}

// 6. Tool-call round trip for all well-formed commands; 100,000 fuzz inputs.
Verdict parser_robustness() {
  Verdict v;
  const GeneratedTask t = generate(TaskClass::ServeFruit, Variant::FruitsSameBowlLeft, 0, kDefaultConstants, true);
  std::vector<std::string> names;
  for (const auto& [n, o] : t.world.objects) names.push_back(n);
  auto invocations = [&](Side side) {
    std::vector<SkillInvocation> out;
    for (Skill s : kSkills) {
      if (skill_arity(s) == 0) out.push_back({s, side, {}});
      if (skill_arity(s) == 1) {
        for (const auto& a : names) out.push_back({s, side, {a}});
      }
      if (skill_arity(s) == 2) {
        for (const auto& a : names) {
          for (const auto& b : names) out.push_back({s, side, {a, b}});
        }
      }
    }
    return out;
  };
  long round_trips = 0;
  const auto lefts = invocations(Side::Left);
  const auto rights = invocations(Side::Right);
  for (const auto& l : lefts) {
    for (const auto& r : rights) {
      BimanualCommand c;
      c.left = l;
      c.right = r;
      const ParsedReply p = parse_tool_call(command_message(c, "id"));
      const auto* back = std::get_if<BimanualCommand>(&p);
      if (back == nullptr || *back != c) v.fail("round trip failed for " + render_plan_line(c));
      ++round_trips;
    }
  }

  std::mt19937_64 rng(6);
  long fuzzed = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::string s = i % 2 ? randomized::random_bytes(rng, 256) : randomized::mutated_call(rng);
    try {
      const ParsedReply a = parse_tool_call(Message::assistant(s));
      const ParsedReply b = parse_tool_call(Message::assistant("", {ToolCall{"f", "bimanual_control", s}}));
      for (const ParsedReply* r : {&a, &b}) {
        if (const auto* c = std::get_if<BimanualCommand>(r)) {
          if (c->left.args.size() != skill_arity(c->left.skill) ||
              c->right.args.size() != skill_arity(c->right.skill)) {
            v.fail("parser accepted a malformed command");
          }
        }
      }
      ++fuzzed;
    } catch (const std::exception& e) {
      v.fail(std::string("parser threw: ") + e.what());
    }
  }
  if (v.pass) {
    v.detail = std::to_string(round_trips) + " round trips, " + std::to_string(fuzzed) + " fuzz inputs";
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"oracle solvability", oracle_solvability},
      {"invariant suite", invariant_suite},
      {"coordination semantics", coordination_semantics},
      {"failure classifier fixtures", classifier_fixtures},
      {"determinism and replay", determinism_and_replay},
      {"parser robustness", parser_robustness},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("threw: ") + e.what());
    }
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", index, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
