#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "labor/agent.hpp"

namespace labor {

// ---------------------------------------------------------------------------
// Failure classification

enum class FailureTag { Temporal, Spatial, Other };

inline constexpr std::string_view failure_tag_name(FailureTag t) {
  switch (t) {
    case FailureTag::Temporal: return "Temporal";
    case FailureTag::Spatial: return "Spatial";
    case FailureTag::Other: return "Other";
  }
  return "?";
}

/// Bumped whenever a rule below changes meaning, so stored labels can be
/// audited against the rules that produced them.
inline constexpr int kFailureRulesVersion = 1;

struct FailureLabel {
  FailureTag tag = FailureTag::Other;
  std::vector<int> evidence;  // round indices
  std::string rule;

  bool operator==(const FailureLabel&) const = default;
};

namespace detail {

struct Round {
  int index;
  const StepRecord* step;
  WorldState before;
  WorldState after;
};

/// Pairs every executed command with the worlds around it.
inline std::vector<Round> executed_rounds(const EpisodeTranscript& t, const WorldConstants& c) {
  std::vector<Round> out;
  WorldState prev = world_from_json(t.header.initial_world, c);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const StepRecord& s = t.steps[i];
    WorldState next = s.world.is_null() ? prev : world_from_json(s.world, c);
    if (s.kind == StepKind::Command && s.command && s.result) {
      out.push_back(Round{static_cast<int>(i), &s, prev, next});
    }
    prev = std::move(next);
  }
  return out;
}

inline bool side_ran(const Round& r, Side s, Skill skill) {
  const SkillOutcome& o = s == Side::Left ? r.step->result->left : r.step->result->right;
  return r.step->command->of(s).skill == skill && o.ok();
}

inline std::optional<FailureLabel> spatial_rule(TaskClass cls, const std::vector<Round>& rounds) {
  for (const Round& r : rounds) {
    for (Side s : kSides) {
      const HandState& hand = r.before.hand(s);
      if (cls == TaskClass::ServeWater && side_ran(r, s, Skill::PourOut) && hand.held &&
          in_subtree(r.before, *hand.held, kWater) && *hand.held != kYellowCup) {
        const ObjectState* cup = r.before.find(kYellowCup);
        const bool above = cup != nullptr && hand.position.z > cup->position.z &&
                           distance_xy(hand.position, cup->position) <=
                               r.before.constants.pour_radius;
        if (!above) return FailureLabel{FailureTag::Spatial, {r.index}, "pour_not_above_cup"};
      }
      if (cls == TaskClass::ServeFruit && side_ran(r, s, Skill::Release) && hand.held &&
          (*hand.held == kApple || *hand.held == kBanana) &&
          container_of(r.after, *hand.held) != std::string(kBowl)) {
        return FailureLabel{FailureTag::Spatial, {r.index}, "fruit_released_off_bowl"};
      }
    }
  }
  return std::nullopt;
}

inline std::optional<FailureLabel> temporal_rule(TaskClass cls, const std::vector<Round>& rounds) {
  for (const Round& r : rounds) {
    for (Side s : kSides) {
      const SkillOutcome& o = s == Side::Left ? r.step->result->left : r.step->result->right;
      if (r.step->command->of(s).skill == Skill::MoveAndGrasp && !o.ok() &&
          o.reason == RejectReason::UnreachableZone) {
        return FailureLabel{FailureTag::Temporal, {r.index}, "grasp_before_in_reach"};
      }
    }
    if (cls == TaskClass::ServeWater && container_of(r.after, kWater) != std::string(kYellowCup)) {
      // The empty cup is carried to the serving position.
      for (Side s : kSides) {
        const SkillOutcome& o = s == Side::Left ? r.step->result->left : r.step->result->right;
        const SkillInvocation& inv = r.step->command->of(s);
        if (o.ok() && is_held_by(r.before, s, kYellowCup) &&
            (inv.skill == Skill::MoveTo || inv.skill == Skill::MoveAbove) &&
            inv.args == std::vector<std::string>{std::string(kServingPosition)}) {
          return FailureLabel{FailureTag::Temporal, {r.index}, "pour_missing_before_serving"};
        }
      }
    }
    if (cls == TaskClass::ServeFruit) {
      const ObjectState* bowl = r.after.find(kBowl);
      if (bowl != nullptr &&
          distance(bowl->position, r.after.constants.serving_position) <=
              r.after.constants.success_tolerance &&
          (container_of(r.after, kApple) != std::string(kBowl) ||
           container_of(r.after, kBanana) != std::string(kBowl))) {
        return FailureLabel{FailureTag::Temporal, {r.index}, "bowl_served_missing_fruit"};
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Rule-based label for a failed episode. Spatial rules run first, then
/// Temporal ones; anything else is Other with the outcome as its rule.
inline FailureLabel classify_failure(TaskClass cls, const EpisodeTranscript& t,
                                     const WorldConstants& c = kDefaultConstants) {
  const auto rounds = detail::executed_rounds(t, c);
  if (auto l = detail::spatial_rule(cls, rounds)) return *l;
  if (auto l = detail::temporal_rule(cls, rounds)) return *l;
  std::vector<int> last;
  if (!t.steps.empty()) last.push_back(static_cast<int>(t.steps.size()) - 1);
  return FailureLabel{FailureTag::Other, std::move(last), std::string(outcome_name(t.footer.outcome))};
}

// ---------------------------------------------------------------------------
// Batch evaluation

struct EvalRow {
  TaskClass task_class = TaskClass::ServeWater;
  std::string mode;
  std::optional<Variant> variant;  // nullopt for the class total
  int episodes = 0;
  int successes = 0;
  int temporal = 0;
  int spatial = 0;
  int other = 0;
  long success_steps = 0;  // summed over successful episodes

  double mean_steps() const {
    return successes > 0 ? static_cast<double>(success_steps) / successes : 0.0;
  }
  bool operator==(const EvalRow&) const = default;
};

struct EpisodeRecord {
  TaskSpec task;
  EpisodeTranscript transcript;
  std::optional<FailureLabel> label;  // set only for failures
};

struct EvalReport {
  std::vector<EvalRow> rows;  // per variant, then the class total
  std::vector<EpisodeRecord> episodes;
};

using BackendFactory = std::function<std::unique_ptr<ChatBackend>(const GeneratedTask&)>;

struct BatchOptions {
  std::string label;  // report "mode" column
  EpisodeOptions episode;
  int parallel = 1;
  WorldConstants constants = kDefaultConstants;
  bool distractor = false;
};

/// Draws variant i from an RNG seeded with `seed0`; episode i uses seed
/// seed0 + i. Episodes may run on several threads; the result does not
/// depend on how many.
inline EvalReport evaluate_batch(TaskClass cls, const BackendFactory& make_backend, int n,
                                 std::uint64_t seed0, const BatchOptions& opts) {
  if (n < 1) throw Error("episode count must be at least 1");
  const auto variants = variants_for(cls);
  std::mt19937_64 rng(seed0);
  std::vector<GeneratedTask> tasks;
  tasks.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Variant v = variants[rng() % variants.size()];
    tasks.push_back(generate(cls, v, seed0 + static_cast<std::uint64_t>(i), opts.constants,
                             opts.distractor));
  }

  std::vector<EpisodeRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      auto backend = make_backend(tasks[i]);
      EpisodeRecord& rec = records[i];
      rec.task = tasks[i].spec;
      rec.transcript = run_episode(tasks[i], *backend, opts.episode);
      if (rec.transcript.footer.outcome != Outcome::Success) {
        rec.label = classify_failure(cls, rec.transcript, opts.constants);
      }
    }
  };
  const int threads = std::max(1, std::min(opts.parallel, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  EvalReport report;
  auto tally = [](EvalRow& row, const EpisodeRecord& rec) {
    ++row.episodes;
    if (!rec.label) {
      ++row.successes;
      row.success_steps += rec.transcript.footer.steps;
      return;
    }
    switch (rec.label->tag) {
      case FailureTag::Temporal: ++row.temporal; break;
      case FailureTag::Spatial: ++row.spatial; break;
      case FailureTag::Other: ++row.other; break;
    }
  };
  EvalRow total{cls, opts.label, std::nullopt};
  for (Variant v : variants) {
    EvalRow row{cls, opts.label, v};
    for (const auto& rec : records) {
      if (rec.task.variant == v) tally(row, rec);
    }
    if (row.episodes > 0) report.rows.push_back(row);
  }
  for (const auto& rec : records) tally(total, rec);
  report.rows.push_back(total);
  report.episodes = std::move(records);
  return report;
}

inline void merge_into(EvalReport& into, EvalReport from) {
  into.rows.insert(into.rows.end(), from.rows.begin(), from.rows.end());
  for (auto& e : from.episodes) into.episodes.push_back(std::move(e));
}

// ---------------------------------------------------------------------------
// Rendering

/// Whole percent when exact, otherwise one decimal.
inline std::string format_percent(int num, int den) {
  if (den <= 0) return "0%";
  if ((100L * num) % den == 0) return std::to_string(100L * num / den) + "%";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * num / den);
  return buf;
}

inline constexpr std::string_view kReportHeader =
    "class  mode  episodes  success  temporal  spatial  other";
inline constexpr std::string_view kCsvHeader =
    "class,mode,variant,episodes,successes,temporal,spatial,other,mean_steps";

/// One line per class and mode total.
inline std::string render_table(const EvalReport& r) {
  std::string out(kReportHeader);
  out += "\n";
  for (const auto& row : r.rows) {
    if (row.variant) continue;
    out += std::string(class_name(row.task_class)) + "  " + row.mode + "  " +
           std::to_string(row.episodes) + "  " + format_percent(row.successes, row.episodes) +
           "  " + std::to_string(row.temporal) + "  " + std::to_string(row.spatial) + "  " +
           std::to_string(row.other) + "\n";
  }
  return out;
}

inline std::string format_mean(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string render_csv(const EvalReport& r) {
  std::string out(kCsvHeader);
  out += "\n";
  for (const auto& row : r.rows) {
    out += std::string(class_name(row.task_class)) + "," + row.mode + "," +
           (row.variant ? std::string(variant_name(*row.variant)) : std::string("all")) + "," +
           std::to_string(row.episodes) + "," + std::to_string(row.successes) + "," +
           std::to_string(row.temporal) + "," + std::to_string(row.spatial) + "," +
           std::to_string(row.other) + "," + format_mean(row.mean_steps()) + "\n";
  }
  return out;
}

struct RenderedReport {
  std::string table;
  std::string csv;
};

inline RenderedReport render_report(const EvalReport& r) { return {render_table(r), render_csv(r)}; }

inline std::vector<EvalRow> parse_report_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("CSV header mismatch");
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw Error("CSV row needs 9 fields: " + line);
    EvalRow row;
    auto cls = class_from_name(f[0]);
    if (!cls) throw Error("unknown class in CSV: " + f[0]);
    row.task_class = *cls;
    row.mode = f[1];
    if (f[2] != "all") {
      row.variant = variant_from_name(f[2]);
      if (!row.variant) throw Error("unknown variant in CSV: " + f[2]);
    }
    try {
      row.episodes = std::stoi(f[3]);
      row.successes = std::stoi(f[4]);
      row.temporal = std::stoi(f[5]);
      row.spatial = std::stoi(f[6]);
      row.other = std::stoi(f[7]);
      row.success_steps = std::lround(std::stod(f[8]) * row.successes);
    } catch (const std::logic_error&) {
      throw Error("bad number in CSV row: " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace labor
