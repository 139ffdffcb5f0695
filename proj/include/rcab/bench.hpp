// Copyright 2026 The rcab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment matrix: every target x augmenter x seed x trial is one
// augmentation campaign. While a campaign runs, the dataset is frozen at each
// schedule point and every configured extractor ranks the frozen copy on the
// worker pool, so extraction never consumes augmentation budget.
//
// Config file (key = value, '#' comments, paths relative to the file):
//
//   targets          = targets/mock/m1.target targets/mock/m2.target
//   augmenters       = aflcem concfuzz          (default: both)
//   extractors       = vulnloc aurora           (default: both)
//   trials           = 5
//   budget           = 4000execs | 4h | 30m | 90s | 500ms
//   schedule_scale   = 10/1      budget units per schedule minute
//                                (default 60000/1 for wall budgets, 1/1 else)
//   base_rng         = 0         trial i runs with rng base_rng + i
//   workers          = 3         (default: cores - 1, at least 1)
//   cap              = 200
//   probes_per_byte  = 8
//   seeds.<target>   = a.seed b.seed   (default: the manifest's seeds)
//   max_trace_events = 0         per-extraction event cap, 0 = none
//   extract_time_cap_ms = 0      per-extraction time cap, 0 = none
//   out              = bench-out

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rcab/manifest.hpp"
#include "rcab/pipeline.hpp"
#include "rcab/schedule.hpp"

namespace rcab {

inline std::size_t default_workers() {
  const auto n = std::thread::hardware_concurrency();
  return n > 1 ? n - 1 : 1;
}

struct BenchConfig {
  std::vector<std::filesystem::path> targets;
  std::vector<AugmenterKind> augmenters{AugmenterKind::AflCem,
                                        AugmenterKind::ConcFuzz};
  std::vector<ExtractorKind> extractors{ExtractorKind::VulnLoc,
                                        ExtractorKind::Aurora};
  std::size_t trials = 5;
  std::optional<Budget> budget;
  std::optional<ScheduleScale> scale;
  std::uint64_t base_rng = 0;
  std::size_t workers = default_workers();
  std::size_t cap = kDefaultRankCap;
  AugmentOptions options;
  // Seed overrides by target id.
  std::map<std::string, std::vector<std::filesystem::path>> seeds;
  std::uint64_t max_trace_events = 0;
  std::uint64_t extract_time_cap_ms = 0;
  std::filesystem::path out = "bench-out";

  ScheduleScale effective_scale() const {
    if (scale) return *scale;
    return budget && budget->kind == BudgetKind::WallMs
               ? ScheduleScale::wall_clock()
               : ScheduleScale{};
  }
};

inline BenchConfig parse_bench_config(std::string_view text,
                                      const std::string& source,
                                      const std::filesystem::path& base_dir) {
  BenchConfig c;
  bool saw_extractors = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(source, line_no, 1, "expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    const auto items = detail::split_list(value);
    auto number = [&](const char* what) {
      try {
        return detail::parse_u64(value, what);
      } catch (const ValidationError& e) {
        throw ParseError(source, line_no, eq + 2, e.what());
      }
    };
    auto paths = [&] {
      std::vector<std::filesystem::path> out;
      for (const auto& i : items) out.push_back(base_dir / i);
      return out;
    };
    try {
      if (key == "targets") {
        c.targets = paths();
      } else if (key == "augmenters") {
        c.augmenters.clear();
        for (const auto& i : items) c.augmenters.push_back(parse_augmenter(i));
      } else if (key == "extractors") {
        saw_extractors = true;
        c.extractors.clear();
        for (const auto& i : items) c.extractors.push_back(parse_extractor(i));
      } else if (key == "trials") {
        c.trials = number("trials");
      } else if (key == "budget") {
        c.budget = parse_budget(value);
      } else if (key == "schedule_scale") {
        c.scale = parse_scale(value);
      } else if (key == "base_rng") {
        c.base_rng = number("base_rng");
      } else if (key == "workers") {
        c.workers = number("workers");
      } else if (key == "cap") {
        c.cap = number("cap");
      } else if (key == "probes_per_byte") {
        c.options.probes_per_byte = number("probes_per_byte");
      } else if (key == "max_trace_events") {
        c.max_trace_events = number("max_trace_events");
      } else if (key == "extract_time_cap_ms") {
        c.extract_time_cap_ms = number("extract_time_cap_ms");
      } else if (key == "out") {
        c.out = base_dir / std::string(value);
      } else if (key.rfind("seeds.", 0) == 0 && key.size() > 6) {
        c.seeds[key.substr(6)] = paths();
      } else {
        throw ParseError(source, line_no, 1, "unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_no, eq + 2, e.what());
    }
  }
  if (saw_extractors && c.extractors.empty()) {
    throw ValidationError(source + ": extractor set is empty");
  }
  return c;
}

inline BenchConfig load_bench_config(const std::filesystem::path& path) {
  return parse_bench_config(read_file(path), path.string(),
                            path.parent_path().empty() ? "." : path.parent_path());
}

struct Campaign {
  std::size_t target_index = 0;
  std::size_t augmenter_index = 0;
  std::size_t seed_index = 0;
  std::size_t trial = 0;
  AugmenterKind augmenter = AugmenterKind::AflCem;
  std::string seed_id;
  std::filesystem::path seed_path;
  std::uint64_t rng = 0;
};

struct ExperimentPlan {
  BenchConfig config;
  std::vector<TargetSpec> targets;
  std::vector<Campaign> campaigns;
  std::vector<SchedulePoint> schedule;

  std::size_t pairings() const {
    return campaigns.size() * config.extractors.size();
  }
  std::size_t expected_results() const { return pairings() * schedule.size(); }
};

// Full cross product in canonical order. Throws on unknown methods, missing
// targets, an empty method set or zero trials.
inline ExperimentPlan plan(BenchConfig config) {
  if (config.targets.empty()) throw ValidationError("plan has no targets");
  if (config.augmenters.empty()) throw ValidationError("augmenter set is empty");
  if (config.extractors.empty()) throw ValidationError("extractor set is empty");
  if (config.trials == 0) throw ValidationError("trials must be at least 1");
  if (!config.budget) throw ValidationError("plan has no budget");
  if (config.budget->amount == 0) throw BudgetZero("plan budget must be > 0");
  if (config.workers == 0) throw ValidationError("workers must be at least 1");
  if (config.cap == 0) throw ValidationError("cap must be positive");

  ExperimentPlan p;
  p.schedule = schedule_points(config.budget->amount, config.effective_scale());
  for (const auto& path : config.targets) p.targets.push_back(load_manifest(path));
  for (const auto& [id, paths] : config.seeds) {
    const bool known = std::any_of(p.targets.begin(), p.targets.end(),
                                   [&](const TargetSpec& t) { return t.id == id; });
    if (!known) throw ValidationError("seeds given for unknown target '" + id + "'");
    if (paths.empty()) throw ValidationError("empty seed list for '" + id + "'");
  }
  for (std::size_t ti = 0; ti < p.targets.size(); ++ti) {
    const auto& spec = p.targets[ti];
    const auto it = config.seeds.find(spec.id);
    const auto& seeds = it != config.seeds.end() ? it->second : spec.seeds;
    std::vector<std::string> ids;
    for (const auto& s : seeds) {
      auto id = s.stem().string();
      if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
        id += "#" + std::to_string(ids.size());
      }
      ids.push_back(id);
    }
    for (std::size_t ai = 0; ai < config.augmenters.size(); ++ai) {
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        for (std::size_t trial = 0; trial < config.trials; ++trial) {
          p.campaigns.push_back(Campaign{ti, ai, si, trial, config.augmenters[ai],
                                         ids[si], seeds[si],
                                         config.base_rng + trial});
        }
      }
    }
  }
  p.config = std::move(config);
  return p;
}

enum class RankKind { Ranked, Absent, NoData };

struct SnapshotResult {
  std::string target;
  AugmenterKind augmenter = AugmenterKind::AflCem;
  ExtractorKind extractor = ExtractorKind::VulnLoc;
  std::string seed_id;
  std::size_t trial = 0;
  SchedulePoint point;
  RankKind kind = RankKind::NoData;
  std::size_t rank = 0;
  std::size_t n_crash = 0;
  std::size_t n_noncrash = 0;
  // Budget clock at the snapshot: virtual for execution budgets.
  std::uint64_t wall_ms = 0;
  // Measured, not reproducible.
  double elapsed_ms = 0;
  double extract_ms = 0;
  std::string note;

  // Canonical position in the plan.
  std::size_t campaign_index = 0;
  std::size_t extractor_index = 0;
  std::size_t point_index = 0;
};

inline std::string rank_token(const SnapshotResult& r) {
  switch (r.kind) {
    case RankKind::Ranked: return std::to_string(r.rank);
    case RankKind::Absent: return "ABSENT";
    case RankKind::NoData: return "NODATA";
  }
  return "NODATA";
}

// Fixed-size pool draining a FIFO task queue. Tasks may submit more tasks.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) threads_.emplace_back([this] { loop(); });
  }
  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
  }

  void submit(std::function<void()> task) { enqueue(std::move(task), false); }

  // Runs before anything already queued.
  void submit_urgent(std::function<void()> task) {
    enqueue(std::move(task), true);
  }

  void wait_idle() {
    std::unique_lock lock(mu_);
    idle_.wait(lock, [&] { return pending_ == 0; });
  }

 private:
  void enqueue(std::function<void()> task, bool front) {
    {
      std::lock_guard lock(mu_);
      if (front) {
        tasks_.push_front(std::move(task));
      } else {
        tasks_.push_back(std::move(task));
      }
      ++pending_;
    }
    cv_.notify_one();
  }

  void loop() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || !tasks_.empty(); });
        if (tasks_.empty()) return;
        task = std::move(tasks_.front());
        tasks_.pop_front();
      }
      task();
      std::lock_guard lock(mu_);
      if (--pending_ == 0) idle_.notify_all();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_, idle_;
  std::deque<std::function<void()>> tasks_;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::vector<std::jthread> threads_;
};

struct BenchRun {
  std::vector<SnapshotResult> results;  // canonical order
  std::vector<std::string> errors;      // one line per failed campaign
};

namespace detail {

inline std::size_t trace_events(const Dataset& d) {
  std::size_t n = 0;
  for (const auto& s : d.samples()) n += s.trace.events.size();
  return n;
}

}  // namespace detail

inline BenchRun run_plan(const ExperimentPlan& p) {
  using Clock = std::chrono::steady_clock;
  const auto& cfg = p.config;
  BenchRun run;
  std::mutex mu;

  auto emit = [&](SnapshotResult r) {
    std::lock_guard lock(mu);
    run.results.push_back(std::move(r));
  };

  auto base_result = [&](std::size_t ci, std::size_t ei, std::size_t pi) {
    const auto& c = p.campaigns[ci];
    SnapshotResult r;
    r.target = p.targets[c.target_index].id;
    r.augmenter = c.augmenter;
    r.extractor = cfg.extractors[ei];
    r.seed_id = c.seed_id;
    r.trial = c.trial;
    r.point = p.schedule[pi];
    r.wall_ms = p.schedule[pi].tick;
    r.campaign_index = ci;
    r.extractor_index = ei;
    r.point_index = pi;
    return r;
  };

  auto extraction = [&](std::size_t ci, std::size_t ei, std::size_t pi,
                        std::shared_ptr<const Dataset> snap, double elapsed_ms) {
    auto r = base_result(ci, ei, pi);
    const auto& spec = p.targets[p.campaigns[ci].target_index];
    const auto bal = dataset_balance(*snap);
    r.n_crash = bal.n_crash;
    r.n_noncrash = bal.n_noncrash;
    r.elapsed_ms = elapsed_ms;
    const auto start = Clock::now();
    try {
      if (cfg.max_trace_events && detail::trace_events(*snap) > cfg.max_trace_events) {
        throw Error("snapshot exceeds max_trace_events");
      }
      const auto ranking = extract(r.extractor, *snap, spec, cfg.cap).ranking;
      const auto rank = rank_of_ground_truth(ranking, spec.ground_truth);
      r.kind = rank ? RankKind::Ranked : RankKind::Absent;
      r.rank = rank.value_or(0);
    } catch (const std::exception& e) {
      r.kind = RankKind::NoData;
      r.note = e.what();
    }
    r.extract_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (cfg.extract_time_cap_ms && r.extract_ms > cfg.extract_time_cap_ms) {
      r.kind = RankKind::NoData;
      r.note = "extraction exceeded extract_time_cap_ms";
    }
    emit(std::move(r));
  };

  WorkerPool pool(cfg.workers);
  for (std::size_t ci = 0; ci < p.campaigns.size(); ++ci) {
    pool.submit([&, ci] {
      const auto& c = p.campaigns[ci];
      const auto& spec = p.targets[c.target_index];
      const auto start = Clock::now();
      std::size_t next = 0;
      auto freeze = [&](const Dataset& d) {
        auto snap = std::make_shared<const Dataset>(d.snapshot(p.schedule[next].tick));
        const double elapsed =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        for (std::size_t ei = 0; ei < cfg.extractors.size(); ++ei) {
          pool.submit_urgent([&, ci, ei, pi = next, snap, elapsed] {
            extraction(ci, ei, pi, snap, elapsed);
          });
        }
        ++next;
      };
      Dataset sink(spec.id, to_string(c.augmenter), c.rng);
      try {
        const auto seed = read_bytes(c.seed_path);
        augment(c.augmenter, spec, seed, *cfg.budget, c.rng, sink, cfg.options,
                [&](const Dataset& d) {
                  const auto born = d.samples().back().born_at;
                  while (next < p.schedule.size() && born > p.schedule[next].tick) {
                    freeze(d);
                  }
                });
        while (next < p.schedule.size()) freeze(sink);
      } catch (const std::exception& e) {
        {
          std::lock_guard lock(mu);
          run.errors.push_back(spec.id + " " + to_string(c.augmenter) + " " +
                               c.seed_id + " trial " + std::to_string(c.trial) +
                               ": " + e.what());
        }
        for (; next < p.schedule.size(); ++next) {
          for (std::size_t ei = 0; ei < cfg.extractors.size(); ++ei) {
            auto r = base_result(ci, ei, next);
            r.note = e.what();
            emit(std::move(r));
          }
        }
      }
    });
  }
  pool.wait_idle();

  std::sort(run.results.begin(), run.results.end(),
            [](const SnapshotResult& a, const SnapshotResult& b) {
              return std::tie(a.campaign_index, a.point_index, a.extractor_index) <
                     std::tie(b.campaign_index, b.point_index, b.extractor_index);
            });
  std::sort(run.errors.begin(), run.errors.end());
  return run;
}

inline constexpr const char* kResultsHeader =
    "target,augmenter,extractor,seed_id,trial,snapshot,rank,n_crash,n_noncrash,"
    "wall_ms";

inline std::string results_csv(const std::vector<SnapshotResult>& results) {
  std::string out = std::string(kResultsHeader) + '\n';
  for (const auto& r : results) {
    out += r.target + ',' + to_string(r.augmenter) + ',' + to_string(r.extractor) +
           ',' + r.seed_id + ',' + std::to_string(r.trial) + ',' +
           format_score(r.point.minutes) + ',' + rank_token(r) + ',' +
           std::to_string(r.n_crash) + ',' + std::to_string(r.n_noncrash) + ',' +
           std::to_string(r.wall_ms) + '\n';
  }
  return out;
}

inline std::string timing_csv(const std::vector<SnapshotResult>& results) {
  std::string out =
      "target,augmenter,extractor,seed_id,trial,snapshot,elapsed_ms,extract_ms,"
      "note\n";
  for (const auto& r : results) {
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    std::replace(note.begin(), note.end(), '\n', ' ');
    out += r.target + ',' + to_string(r.augmenter) + ',' + to_string(r.extractor) +
           ',' + r.seed_id + ',' + std::to_string(r.trial) + ',' +
           format_score(r.point.minutes) + ',' + format_score(r.elapsed_ms) + ',' +
           format_score(r.extract_ms) + ',' + note + '\n';
  }
  return out;
}

inline std::string seeds_csv(const ExperimentPlan& p) {
  std::string out = "target,seed_id,bytes\n";
  std::vector<std::string> seen;
  for (const auto& c : p.campaigns) {
    const auto key = p.targets[c.target_index].id + ',' + c.seed_id;
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    out += key + ',' + std::to_string(std::filesystem::file_size(c.seed_path)) + '\n';
  }
  return out;
}

// Writes results.csv, timing.csv, seeds.csv and errors.txt into `out`.
inline void write_bench_outputs(const std::filesystem::path& out,
                                const ExperimentPlan& p, const BenchRun& run) {
  std::filesystem::create_directories(out);
  write_file(out / "results.csv", results_csv(run.results));
  write_file(out / "timing.csv", timing_csv(run.results));
  write_file(out / "seeds.csv", seeds_csv(p));
  std::string errors;
  for (const auto& e : run.errors) errors += e + '\n';
  write_file(out / "errors.txt", errors);
}

}  // namespace rcab
