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

#include "segkit/sampler.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "segkit/errors.hpp"
#include "segkit/rng.hpp"

namespace segkit {
namespace {

using ordered_json = nlohmann::ordered_json;

// Shuffled pools kept per schedule; two covers a phase-boundary batch and a
// cycle-boundary batch.
constexpr std::size_t kPoolCacheSize = 4;

}  // namespace

std::uint64_t repeat_factor(std::uint64_t target, std::uint64_t n) {
  if (n == 0) throw ArgumentError("repeat_factor: dataset is empty");
  return std::max<std::uint64_t>(1, target / n);
}

std::vector<DatasetPool> pools_from_catalog(const Catalog& catalog) {
  std::vector<DatasetPool> pools;
  for (const auto& d : catalog) pools.push_back(DatasetPool{d.name, d.train_count});
  return pools;
}

std::vector<DatasetPool> pools_from_manifest(const Manifest& manifest,
                                             const std::vector<std::string>& datasets) {
  std::vector<DatasetPool> pools;
  for (const auto& name : datasets) {
    std::uint64_t n = 0;
    if (auto it = manifest.counts().find(name); it != manifest.counts().end()) n = it->second.train;
    pools.push_back(DatasetPool{name, n});
  }
  return pools;
}

std::uint64_t RepeatPlan::factor(std::string_view dataset) const {
  for (const auto& [name, f] : factors) {
    if (name == dataset) return f;
  }
  return 0;
}

RepeatPlan build_repeat_plan(const std::vector<DatasetPool>& pools, std::uint64_t target) {
  if (pools.empty()) throw ArgumentError("build_repeat_plan: no datasets");
  RepeatPlan plan;
  plan.target_size = target;
  for (const auto& p : pools) plan.factors.emplace_back(p.name, repeat_factor(target, p.samples));
  return plan;
}

RepeatPlan build_repeat_plan(const Catalog& catalog, std::uint64_t target) {
  return build_repeat_plan(pools_from_catalog(catalog), target);
}

std::vector<PhaseSpec> default_phases(const std::vector<std::string>& datasets,
                                      std::uint64_t total_iters,
                                      const std::vector<std::string>& held_back) {
  PhaseSpec first{0, total_iters / 2, {}};
  PhaseSpec second{total_iters / 2, total_iters, datasets};
  for (const auto& d : datasets) {
    if (std::find(held_back.begin(), held_back.end(), d) == held_back.end()) {
      first.included.push_back(d);
    }
  }
  if (first.start_iter == first.end_iter) return {second};
  return {first, second};
}

TrainSchedule::TrainSchedule(std::vector<DatasetPool> pools, RepeatPlan plan,
                             std::vector<PhaseSpec> phases, std::uint64_t total_iters,
                             std::uint32_t batch_size, std::uint64_t seed, TrainingMeta meta)
    : pools_(std::move(pools)),
      plan_(std::move(plan)),
      phases_(std::move(phases)),
      total_iters_(total_iters),
      batch_size_(batch_size),
      seed_(seed),
      meta_(std::move(meta)) {
  if (batch_size_ == 0) throw ScheduleError("batch size must be positive");
  if (total_iters_ == 0) throw ScheduleError("total_iters must be positive");
  if (pools_.size() > 0xFFFFFFFFu) throw ScheduleError("too many datasets");

  std::set<std::string> names;
  for (const auto& p : pools_) {
    if (!names.insert(p.name).second) throw ScheduleError("dataset '" + p.name + "' listed twice");
  }
  std::uint64_t expected_start = 0;
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    const auto& ph = phases_[i];
    if (ph.start_iter != expected_start || ph.end_iter <= ph.start_iter) {
      throw ScheduleError("phase " + std::to_string(i) + " [" + std::to_string(ph.start_iter) +
                          ", " + std::to_string(ph.end_iter) +
                          ") does not continue the tiling at " + std::to_string(expected_start));
    }
    expected_start = ph.end_iter;
    std::uint64_t length = 0;
    for (const auto& d : ph.included) {
      if (!names.count(d)) {
        throw ScheduleError("phase " + std::to_string(i) + " references dataset '" + d +
                            "' which has no manifest");
      }
    }
    for (const auto& p : pools_) {
      if (std::find(ph.included.begin(), ph.included.end(), p.name) == ph.included.end()) continue;
      const std::uint64_t f = plan_.factor(p.name);
      if (f == 0 && p.samples > 0) {
        throw ScheduleError("no repeat factor for dataset '" + p.name + "'");
      }
      length += f * p.samples;
    }
    if (length == 0) throw ScheduleError("phase " + std::to_string(i) + " has an empty sample pool");
    pool_lengths_.push_back(length);
  }
  if (expected_start != total_iters_) {
    throw ScheduleError("phases cover [0, " + std::to_string(expected_start) + ") but total_iters is " +
                        std::to_string(total_iters_));
  }
}

TrainSchedule::TrainSchedule(const TrainSchedule& other)
    : pools_(other.pools_),
      plan_(other.plan_),
      phases_(other.phases_),
      total_iters_(other.total_iters_),
      batch_size_(other.batch_size_),
      seed_(other.seed_),
      meta_(other.meta_),
      pool_lengths_(other.pool_lengths_) {}

std::size_t TrainSchedule::phase_of(std::uint64_t iter) const {
  if (iter >= total_iters_) {
    throw ArgumentError("iteration " + std::to_string(iter) + " outside [0, " +
                        std::to_string(total_iters_) + ")");
  }
  const auto it = std::upper_bound(phases_.begin(), phases_.end(), iter,
                                   [](std::uint64_t v, const PhaseSpec& p) { return v < p.end_iter; });
  return static_cast<std::size_t>(it - phases_.begin());
}

std::uint64_t TrainSchedule::pool_length(std::size_t phase) const { return pool_lengths_.at(phase); }

std::shared_ptr<const TrainSchedule::Pool> TrainSchedule::shuffled_pool(std::size_t phase,
                                                                        std::uint64_t cycle) const {
  const auto key = std::make_pair(phase, cycle);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }

  auto pool = std::make_shared<Pool>();
  pool->reserve(pool_lengths_[phase]);
  const auto& included = phases_[phase].included;
  for (std::size_t d = 0; d < pools_.size(); ++d) {
    if (std::find(included.begin(), included.end(), pools_[d].name) == included.end()) continue;
    const std::uint64_t f = plan_.factor(pools_[d].name);
    for (std::uint64_t r = 0; r < f; ++r) {
      for (std::uint64_t s = 0; s < pools_[d].samples; ++s) {
        pool->push_back(BatchItem{static_cast<std::uint32_t>(d), s});
      }
    }
  }
  // Fisher-Yates, high index down.
  RngStream rng(seed_, schedule_stream(phase, cycle));
  for (std::uint64_t i = pool->size(); i > 1; --i) {
    const std::uint64_t j = rng.below(i);
    std::swap((*pool)[i - 1], (*pool)[j]);
  }

  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (cache_.size() >= kPoolCacheSize) cache_.erase(cache_.begin());
  auto [it, inserted] = cache_.emplace(key, std::move(pool));
  return it->second;
}

BatchSpec TrainSchedule::next_batch(std::uint64_t iter) const {
  const std::size_t phase = phase_of(iter);
  const std::uint64_t length = pool_lengths_[phase];
  BatchSpec batch;
  batch.iter = iter;
  batch.items.reserve(batch_size_);
  const std::uint64_t first = (iter - phases_[phase].start_iter) * batch_size_;
  std::uint64_t cycle = first / length;
  auto pool = shuffled_pool(phase, cycle);
  for (std::uint64_t k = first; k < first + batch_size_; ++k) {
    if (k / length != cycle) {
      cycle = k / length;
      pool = shuffled_pool(phase, cycle);
    }
    batch.items.push_back((*pool)[k % length]);
  }
  return batch;
}

std::string TrainSchedule::plan_json() const {
  ordered_json j;
  j["seed"] = seed_;
  j["total_iters"] = total_iters_;
  j["batch_size"] = batch_size_;
  j["rng"] = "philox4x32-10";
  j["phases"] = ordered_json::array();
  for (const auto& p : phases_) {
    ordered_json ph;
    ph["start_iter"] = p.start_iter;
    ph["end_iter"] = p.end_iter;
    ph["datasets"] = p.included;
    j["phases"].push_back(ph);
  }
  j["repeat_target"] = plan_.target_size;
  j["repeat_factors"] = ordered_json::object();
  for (const auto& [name, f] : plan_.factors) j["repeat_factors"][name] = f;
  j["dataset_sizes"] = ordered_json::object();
  for (const auto& p : pools_) j["dataset_sizes"][p.name] = p.samples;
  ordered_json meta;
  meta["optimizer"] = meta_.optimizer;
  meta["learning_rate"] = meta_.learning_rate;
  meta["weight_decay"] = meta_.weight_decay;
  meta["betas"] = {meta_.beta1, meta_.beta2};
  meta["lr_schedule"] = meta_.lr_schedule;
  meta["warmup_iters"] = meta_.warmup_iters;
  j["training_meta"] = meta;
  return j.dump(2) + "\n";
}

std::string TrainSchedule::batch_json(const BatchSpec& batch) const {
  ordered_json j;
  j["iter"] = batch.iter;
  j["items"] = ordered_json::array();
  for (const auto& item : batch.items) {
    j["items"].push_back({pools_[item.dataset].name, item.sample});
  }
  return j.dump();
}

TrainSchedule TrainSchedule::from_plan_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("rng") && j["rng"] != "philox4x32-10") {
      throw ParseError("plan uses unsupported rng " + j["rng"].dump());
    }
    // nlohmann::json sorts object keys; ordered_json keeps file order, which
    // is the pool order.
    const auto o = ordered_json::parse(text);
    std::vector<DatasetPool> pools;
    for (const auto& [name, n] : o.at("dataset_sizes").items()) {
      pools.push_back(DatasetPool{name, n.get<std::uint64_t>()});
    }
    RepeatPlan plan;
    plan.target_size = o.value("repeat_target", kDefaultRepeatTarget);
    for (const auto& [name, f] : o.at("repeat_factors").items()) {
      plan.factors.emplace_back(name, f.get<std::uint64_t>());
    }
    std::vector<PhaseSpec> phases;
    for (const auto& p : o.at("phases")) {
      phases.push_back(PhaseSpec{p.at("start_iter").get<std::uint64_t>(),
                                 p.at("end_iter").get<std::uint64_t>(),
                                 p.at("datasets").get<std::vector<std::string>>()});
    }
    TrainingMeta meta;
    if (o.contains("training_meta")) {
      const auto& m = o["training_meta"];
      meta.optimizer = m.value("optimizer", meta.optimizer);
      meta.learning_rate = m.value("learning_rate", meta.learning_rate);
      meta.weight_decay = m.value("weight_decay", meta.weight_decay);
      if (m.contains("betas")) {
        meta.beta1 = m["betas"].at(0).get<double>();
        meta.beta2 = m["betas"].at(1).get<double>();
      }
      meta.lr_schedule = m.value("lr_schedule", meta.lr_schedule);
      meta.warmup_iters = m.value("warmup_iters", meta.warmup_iters);
    }
    return TrainSchedule(std::move(pools), std::move(plan), std::move(phases),
                         o.at("total_iters").get<std::uint64_t>(),
                         o.at("batch_size").get<std::uint32_t>(), o.at("seed").get<std::uint64_t>(),
                         std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
}

TrainSchedule build_schedule(std::vector<DatasetPool> pools, RepeatPlan plan,
                             std::vector<PhaseSpec> phases, std::uint64_t total_iters,
                             std::uint32_t batch_size, std::uint64_t seed, TrainingMeta meta) {
  return TrainSchedule(std::move(pools), std::move(plan), std::move(phases), total_iters,
                       batch_size, seed, std::move(meta));
}

}  // namespace segkit
