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

#ifndef DPQ_HARNESS_H_
#define DPQ_HARNESS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpq/engine.h"
#include "dpq/laplace.h"

namespace dpq {

// ---------------------------------------------------------------- data

enum class Distribution { kUniform, kZipf, kPlanted };

struct SyntheticSpec {
  Distribution distribution = Distribution::kZipf;
  int64_t domain = 64;
  int64_t rows = 10000;
  double zipf_exponent = 1.1;
  // kPlanted: this fraction of the domain, starting at a seeded offset, is
  // left empty and the rest is uniform.
  double sparse_fraction = 0.25;
  uint64_t seed = 0;
  std::string attribute = "x";
};

// One integer attribute over [0, domain).
Dataset MakeSynthetic(const SyntheticSpec& spec);

// ---------------------------------------------------------------- clients

// An analyst issuing workloads that may depend on earlier answers.
class Explorer {
 public:
  virtual ~Explorer() = default;
  // nullopt once the exploration is over.
  virtual std::optional<WorkloadRequest> Next() = 0;
  virtual void Observe(const Answered& answer) = 0;
  // A refused workload ends the exploration.
  virtual void Refused() { done_ = true; }

 protected:
  bool done_ = false;
};

// Level-by-level descent: each workload holds the children of every node on
// the previous level whose noisy count reached the threshold.
class BfsExplorer : public Explorer {
 public:
  BfsExplorer(std::shared_ptr<const View> view, double threshold,
              AccuracyRequirement accuracy);
  std::optional<WorkloadRequest> Next() override;
  void Observe(const Answered& answer) override;

 private:
  std::shared_ptr<const View> view_;
  double threshold_;
  AccuracyRequirement accuracy_;
  std::vector<int> frontier_;
};

// Depth-first search for a node whose noisy count is non-zero and at most
// the threshold. A dead end at a leaf backs up a random number of levels
// and resumes at the next-smallest sibling there.
class DfsExplorer : public Explorer {
 public:
  DfsExplorer(std::shared_ptr<const View> view, double threshold,
              AccuracyRequirement accuracy, uint64_t seed, int max_steps = 64);
  std::optional<WorkloadRequest> Next() override;
  void Observe(const Answered& answer) override;
  bool found() const { return found_; }

 private:
  struct Level {
    std::vector<int> order;  // children of the parent, by noisy count
    size_t next = 0;
  };
  std::shared_ptr<const View> view_;
  double threshold_;
  AccuracyRequirement accuracy_;
  Rng rng_;
  int steps_left_;
  int expand_ = 0;            // node whose children are asked next
  std::vector<Level> stack_;
  bool found_ = false;
};

// Single-range workloads with normally distributed start, length and
// squared-error bound, all clamped into range.
struct RrqParams {
  int64_t domain = 1000;
  int count = 50000;
  double start_mean = 500, start_sd = 10;
  double length_mean = 320, length_sd = 10;
  double accuracy_mean = 250000, accuracy_sd = 25000;
};

class RrqExplorer : public Explorer {
 public:
  RrqExplorer(std::string attribute, RrqParams params, uint64_t seed);
  std::optional<WorkloadRequest> Next() override;
  void Observe(const Answered&) override {}

 private:
  std::string attribute_;
  RrqParams params_;
  Rng rng_;
  int issued_ = 0;
};

// ---------------------------------------------------------------- traces

struct TraceEntry {
  int client = 0;
  WorkloadRequest request;
  double epsilon = 0;
  Mechanism mechanism = Mechanism::kMmm;
  bool rejected = false;
};
using Trace = std::vector<TraceEntry>;

// Repeatedly picks a uniformly random unfinished client and runs its next
// workload on `engine` until every client is done.
absl::StatusOr<Trace> RunClients(Engine& engine,
                                 std::vector<std::unique_ptr<Explorer>>& clients,
                                 uint64_t seed);

absl::StatusOr<Trace> RunBfs(Engine& engine, const std::string& attribute,
                             double threshold, double alpha, double beta);
absl::StatusOr<Trace> RunDfs(Engine& engine, const std::string& attribute,
                             double threshold, double alpha, double beta,
                             uint64_t seed);
absl::StatusOr<Trace> RunRrq(Engine& engine, const std::string& attribute,
                             const RrqParams& params, uint64_t seed);

// Replays the workloads of `trace` through the per-workload calibrated
// matrix mechanism with no cache.
absl::StatusOr<Trace> ReplayCacheless(Engine& engine, const Trace& trace);
// As ReplayCacheless, but an exact repeat of an earlier workload at equal or
// looser accuracy is free.
absl::StatusOr<Trace> ReplayNaiveCache(Engine& engine, const Trace& trace);
// Replays the workloads of `trace` through `engine` in order.
absl::StatusOr<Trace> Replay(Engine& engine, const Trace& trace);

double CumulativeEpsilon(const Trace& trace);

// ---------------------------------------------------------------- experiments

enum class TaskKind { kBfs, kDfs, kRrq };

struct TaskConfig {
  TaskKind kind = TaskKind::kBfs;
  int clients = 5;
  // alpha = fraction * rows, fraction drawn per client from this list.
  std::vector<double> alpha_fractions = {0.01, 0.06, 0.11, 0.16};
  double beta = 0.05;
  // BFS / DFS thresholds = fraction * rows, drawn uniformly per client.
  double threshold_lo = 0.01;
  double threshold_hi = 0.2;
  // Every client runs its exploration this many times in sequence.
  int repeats = 1;
  int runs = 20;
  uint64_t seed = 1;
  SyntheticSpec data;
  RrqParams rrq;
  EngineConfig engine;  // paths ignored; budget, seed and toggles used
  bool baselines = true;  // Cacheless and NaiveCache
  bool ablation = false;  // one run per single module switched off
};

struct RunResult {
  std::map<std::string, Trace> systems;  // "dpq", "Cacheless", ...
};

struct Experiment {
  std::vector<RunResult> runs;

  // run, workload_idx, system, epsilon, cum_epsilon, mechanism
  void WriteRunsCsv(std::ostream& out) const;
  // system, Free, MMM, RP, SE: mean number of choices per run.
  void WriteFreqCsv(std::ostream& out) const;
};

absl::StatusOr<RunResult> RunOnce(const TaskConfig& config, int run);
absl::StatusOr<Experiment> RunExperiment(const TaskConfig& config);

}  // namespace dpq

#endif  // DPQ_HARNESS_H_
