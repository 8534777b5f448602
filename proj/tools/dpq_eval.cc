//
// Copyright 2026 The dpq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Multi-client exploration experiments on synthetic data.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dpq/harness.h"

int main(int argc, char** argv) {
  CLI::App app{"Budget curves for dpq, baselines and ablations"};
  dpq::TaskConfig cfg;
  cfg.engine.total_budget = 1e9;
  std::string task = "bfs", dist = "zipf", out_dir = ".";
  app.add_option("--task", task, "bfs, dfs or rrq");
  app.add_option("--runs", cfg.runs);
  app.add_option("--clients", cfg.clients);
  app.add_option("--repeats", cfg.repeats, "explorations per client");
  app.add_option("--seed", cfg.seed);
  app.add_option("--domain", cfg.data.domain);
  app.add_option("--rows", cfg.data.rows);
  app.add_option("--data", dist, "zipf, uniform or planted");
  app.add_option("--count", cfg.rrq.count, "RRQ workloads");
  app.add_option("--rrq-domain", cfg.rrq.domain);
  app.add_option("--mc-samples", cfg.engine.mc_samples);
  app.add_option("--budget", cfg.engine.total_budget);
  app.add_flag("--ablation", cfg.ablation, "also replay with each module off");
  app.add_option("--out-dir", out_dir);
  CLI11_PARSE(app, argc, argv);

  if (task == "bfs") cfg.kind = dpq::TaskKind::kBfs;
  else if (task == "dfs") cfg.kind = dpq::TaskKind::kDfs;
  else if (task == "rrq") cfg.kind = dpq::TaskKind::kRrq;
  else {
    std::cerr << "unknown task " << task << "\n";
    return 2;
  }
  if (dist == "zipf") cfg.data.distribution = dpq::Distribution::kZipf;
  else if (dist == "uniform") cfg.data.distribution = dpq::Distribution::kUniform;
  else if (dist == "planted") cfg.data.distribution = dpq::Distribution::kPlanted;
  else {
    std::cerr << "unknown data " << dist << "\n";
    return 2;
  }
  if (task == "rrq") cfg.clients = 1;

  absl::StatusOr<dpq::Experiment> ex = dpq::RunExperiment(cfg);
  if (!ex.ok()) {
    std::cerr << ex.status().message() << "\n";
    return 1;
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream runs(out_dir + "/runs.csv"), freq(out_dir + "/freq.csv");
  ex->WriteRunsCsv(runs);
  ex->WriteFreqCsv(freq);
  for (const auto& [name, trace] : ex->runs.back().systems) {
    std::cout << name << " final cumulative epsilon (last run): "
              << dpq::CumulativeEpsilon(trace) << "\n";
  }
  return 0;
}
