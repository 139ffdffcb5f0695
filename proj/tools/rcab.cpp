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

// rcab: root-cause-analysis benchmark driver.
//
//   rcab exec     --target T --input FILE
//   rcab augment  --method aflcem|concfuzz --target T --seed FILE --budget B
//                 --rng N --out DIR [--probes-per-byte K]
//   rcab extract  --method vulnloc|aurora --dataset DIR --target T
//                 [--cap 200] --out ranking.csv
//   rcab bench    --config FILE [--out DIR] [--workers N]
//   rcab report   --results results.csv --out DIR [--points 15,120,240]

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcab/bench.hpp"
#include "rcab/harness.hpp"
#include "rcab/pipeline.hpp"
#include "rcab/report.hpp"

namespace {

int cmd_exec(const std::string& target, const std::string& input) {
  const auto spec = rcab::load_manifest(target);
  const auto s = rcab::execute(spec, rcab::read_bytes(input),
                               std::chrono::milliseconds(spec.timeout_ms));
  std::cout << "verdict " << rcab::verdict_token(s.verdict) << '\n'
            << rcab::serialize_trace(s.trace);
  return 0;
}

int cmd_augment(const std::string& method, const std::string& target,
                const std::string& seed, const std::string& budget,
                std::uint64_t rng, const std::string& out,
                std::size_t probes_per_byte) {
  const auto kind = rcab::parse_augmenter(method);
  const auto spec = rcab::load_manifest(target);
  rcab::AugmentOptions options;
  options.probes_per_byte = probes_per_byte;
  rcab::Dataset d(spec.id, method, rng);
  rcab::augment(kind, spec, rcab::read_bytes(seed), rcab::parse_budget(budget),
                rng, d, options);
  rcab::save_dataset(d, out);
  const auto b = rcab::dataset_balance(d);
  std::cout << d.size() << " samples (" << b.n_crash << " crash, " << b.n_noncrash
            << " non-crash) written to " << out << '\n';
  return 0;
}

int cmd_extract(const std::string& method, const std::string& dataset,
                const std::string& target, std::size_t cap,
                const std::string& out) {
  const auto kind = rcab::parse_extractor(method);
  const auto spec = rcab::load_manifest(target);
  const auto d = rcab::load_dataset(dataset);
  const auto result = rcab::extract(kind, d, spec, cap);
  const std::filesystem::path out_path(out);
  if (out_path.has_parent_path()) {
    std::filesystem::create_directories(out_path.parent_path());
  }
  rcab::write_file(out_path, rcab::ranking_csv(result.ranking));
  if (kind == rcab::ExtractorKind::Aurora) {
    rcab::write_file(out_path.parent_path() / "predicates.csv",
                     rcab::predicates_csv(result.predicates));
  }
  const auto rank = rcab::rank_of_ground_truth(result.ranking, spec.ground_truth);
  std::cout << "ground truth rank: " << (rank ? std::to_string(*rank) : "absent")
            << '\n';
  return 0;
}

int cmd_bench(const std::string& config, const std::string& out,
              std::size_t workers) {
  auto cfg = rcab::load_bench_config(config);
  if (!out.empty()) cfg.out = out;
  if (workers > 0) cfg.workers = workers;
  const auto out_dir = cfg.out;
  const auto p = rcab::plan(std::move(cfg));
  std::cerr << p.campaigns.size() << " campaigns, " << p.pairings()
            << " pairings, " << p.schedule.size() << " snapshots each\n";
  const auto run = rcab::run_plan(p);
  rcab::write_bench_outputs(out_dir, p, run);
  for (const auto& e : run.errors) std::cerr << "campaign failed: " << e << '\n';
  std::cout << run.results.size() << " results written to "
            << (out_dir / "results.csv").string() << '\n';
  return 0;
}

int cmd_report(const std::string& results, const std::string& out,
               const std::vector<double>& points) {
  const auto rows = rcab::load_results(results);
  const auto files = rcab::emit_plots(
      rows, out, points.empty() ? rcab::default_table_points() : points);
  for (const auto& w : files.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << files.written.size() << " files written to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rcab: benchmark root-cause analysis pipelines"};
  app.require_subcommand(1);

  std::string target, input, method, seed, budget, out, dataset, config, results;
  std::uint64_t rng = 0;
  std::size_t probes = rcab::AugmentOptions{}.probes_per_byte;
  std::size_t cap = rcab::kDefaultRankCap;
  std::size_t workers = 0;
  std::vector<double> points;

  auto* exec = app.add_subcommand("exec", "Run one input and print its trace");
  exec->add_option("--target", target, "Target manifest")->required();
  exec->add_option("--input", input, "Input file")->required();

  auto* aug = app.add_subcommand("augment", "Build a dataset from a crashing seed");
  aug->add_option("--method", method, "aflcem or concfuzz")->required();
  aug->add_option("--target", target, "Target manifest")->required();
  aug->add_option("--seed", seed, "Crashing seed input")->required();
  aug->add_option("--budget", budget, "e.g. 5000execs, 30m, 4h")->required();
  aug->add_option("--rng", rng, "RNG seed")->required();
  aug->add_option("--out", out, "Dataset directory")->required();
  aug->add_option("--probes-per-byte", probes, "concfuzz sensitivity probes");

  auto* ext = app.add_subcommand("extract", "Rank root-cause candidates");
  ext->add_option("--method", method, "vulnloc or aurora")->required();
  ext->add_option("--dataset", dataset, "Dataset directory")->required();
  ext->add_option("--target", target, "Target manifest")->required();
  ext->add_option("--cap", cap, "Maximum ranking length");
  ext->add_option("--out", out, "Ranking CSV path")->required();

  auto* bench = app.add_subcommand("bench", "Run an experiment matrix");
  bench->add_option("--config", config, "Bench config file")->required();
  bench->add_option("--out", out, "Output directory (overrides config)");
  bench->add_option("--workers", workers, "Worker threads (overrides config)");

  auto* rep = app.add_subcommand("report", "Tables and figures from results");
  rep->add_option("--results", results, "results.csv")->required();
  rep->add_option("--out", out, "Output directory")->required();
  rep->add_option("--points", points, "Table snapshot minutes")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exec) return cmd_exec(target, input);
    if (*aug) return cmd_augment(method, target, seed, budget, rng, out, probes);
    if (*ext) return cmd_extract(method, dataset, target, cap, out);
    if (*bench) return cmd_bench(config, out, workers);
    if (*rep) return cmd_report(results, out, points);
  } catch (const std::exception& e) {
    std::cerr << "rcab: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
