// Copyright 2026 The segkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dataset balancing and the two-phase training schedule.
//
// Each dataset d with n_d training samples is repeated
// max(1, floor(target / n_d)) times. A phase's sample pool concatenates the
// repeated datasets it includes and is shuffled with Philox, keyed by
// (seed, phase, cycle). Batches are consecutive slices of the pool; when the
// pool runs out it is reshuffled with the next cycle number.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "segkit/dataset_catalog.hpp"

namespace segkit {

inline constexpr std::uint64_t kDefaultRepeatTarget = 120000;
inline constexpr std::uint64_t kDefaultTotalIters = 80000;
inline constexpr std::uint32_t kDefaultBatchSize = 64;

/// max(1, floor(target / n)); n = 0 is an ArgumentError.
std::uint64_t repeat_factor(std::uint64_t target, std::uint64_t n);

struct DatasetPool {
  std::string name;
  std::uint64_t samples = 0;  // training samples available

  bool operator==(const DatasetPool&) const = default;
};

/// Train-split sizes of a catalog, in catalog order.
std::vector<DatasetPool> pools_from_catalog(const Catalog& catalog);
/// Train-split record counts of the given datasets in a manifest.
std::vector<DatasetPool> pools_from_manifest(const Manifest& manifest,
                                             const std::vector<std::string>& datasets);

struct RepeatPlan {
  std::uint64_t target_size = kDefaultRepeatTarget;
  std::vector<std::pair<std::string, std::uint64_t>> factors;  // pool order

  /// 0 when `dataset` is not in the plan.
  std::uint64_t factor(std::string_view dataset) const;
};

RepeatPlan build_repeat_plan(const std::vector<DatasetPool>& pools,
                             std::uint64_t target = kDefaultRepeatTarget);
RepeatPlan build_repeat_plan(const Catalog& catalog, std::uint64_t target = kDefaultRepeatTarget);

struct PhaseSpec {
  std::uint64_t start_iter = 0;  // inclusive
  std::uint64_t end_iter = 0;    // exclusive
  std::vector<std::string> included;

  bool operator==(const PhaseSpec&) const = default;
};

/// Two phases split at total_iters / 2; the first leaves out `held_back`.
std::vector<PhaseSpec> default_phases(const std::vector<std::string>& datasets,
                                      std::uint64_t total_iters = kDefaultTotalIters,
                                      const std::vector<std::string>& held_back = {"BDD", "IDD"});

/// Optimizer settings recorded in plan files. Nothing here is executed.
struct TrainingMeta {
  std::string optimizer = "AdamW";
  double learning_rate = 6e-5;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::string lr_schedule = "poly";
  std::uint64_t warmup_iters = 1500;

  bool operator==(const TrainingMeta&) const = default;
};

struct BatchItem {
  std::uint32_t dataset = 0;  // index into TrainSchedule::pools()
  std::uint64_t sample = 0;   // index into that dataset's train records

  bool operator==(const BatchItem&) const = default;
};

struct BatchSpec {
  std::uint64_t iter = 0;
  std::vector<BatchItem> items;

  bool operator==(const BatchSpec&) const = default;
};

class TrainSchedule {
 public:
  TrainSchedule(std::vector<DatasetPool> pools, RepeatPlan plan, std::vector<PhaseSpec> phases,
                std::uint64_t total_iters, std::uint32_t batch_size, std::uint64_t seed,
                TrainingMeta meta);
  // Copies share nothing; the pool cache starts empty.
  TrainSchedule(const TrainSchedule& other);
  TrainSchedule& operator=(const TrainSchedule&) = delete;

  const std::vector<DatasetPool>& pools() const { return pools_; }
  const RepeatPlan& repeat_plan() const { return plan_; }
  const std::vector<PhaseSpec>& phases() const { return phases_; }
  std::uint64_t total_iters() const { return total_iters_; }
  std::uint32_t batch_size() const { return batch_size_; }
  std::uint64_t seed() const { return seed_; }
  const TrainingMeta& meta() const { return meta_; }

  std::uint64_t total_items() const { return total_iters_ * batch_size_; }
  std::size_t phase_of(std::uint64_t iter) const;
  /// Length of one shuffled pool cycle of `phase`.
  std::uint64_t pool_length(std::size_t phase) const;

  /// Pure function of (schedule, iter). Thread-safe.
  BatchSpec next_batch(std::uint64_t iter) const;

  /// Plan file: seed, total_iters, batch_size, phases[], repeat_factors{},
  /// training_meta{}, plus rng and dataset_sizes{} needed to replay it.
  std::string plan_json() const;
  /// One line of `plan --dump-batches`.
  std::string batch_json(const BatchSpec& batch) const;

  /// Rebuilds a schedule from plan_json() output.
  static TrainSchedule from_plan_json(std::string_view text);

 private:
  using Pool = std::vector<BatchItem>;
  std::shared_ptr<const Pool> shuffled_pool(std::size_t phase, std::uint64_t cycle) const;

  std::vector<DatasetPool> pools_;
  RepeatPlan plan_;
  std::vector<PhaseSpec> phases_;
  std::uint64_t total_iters_;
  std::uint32_t batch_size_;
  std::uint64_t seed_;
  TrainingMeta meta_;
  std::vector<std::uint64_t> pool_lengths_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::size_t, std::uint64_t>, std::shared_ptr<const Pool>> cache_;
};

/// Validates the inputs and builds the schedule. Throws ScheduleError when
/// phases do not tile [0, total_iters), reference unknown datasets, or a
/// phase's pool is empty.
TrainSchedule build_schedule(std::vector<DatasetPool> pools, RepeatPlan plan,
                             std::vector<PhaseSpec> phases,
                             std::uint64_t total_iters = kDefaultTotalIters,
                             std::uint32_t batch_size = kDefaultBatchSize,
                             std::uint64_t seed = 0, TrainingMeta meta = {});

/// Stream id used for the shuffle of (phase, cycle).
inline std::uint64_t schedule_stream(std::size_t phase, std::uint64_t cycle) {
  return (static_cast<std::uint64_t>(phase) << 32) | (cycle & 0xFFFFFFFFull);
}

}  // namespace segkit
