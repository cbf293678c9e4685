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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "segkit/dataset_catalog.hpp"
#include "segkit/file_util.hpp"
#include "segkit/image_io.hpp"
#include "segkit/label_space.hpp"
#include "segkit/predictor.hpp"
#include "segkit/tta.hpp"
#include "test_util.hpp"

namespace segkit {
namespace {

namespace fs = std::filesystem;
using testing::CommandResult;
using testing::mapping_csv;
using testing::random_mask;
using testing::TempDir;

// stdout only; stderr is dropped unless `merge` is set.
CommandResult Segkit(const std::string& args, bool merge = false) {
  return testing::run_command(std::string(SEGKIT_CLI) + " " + args + (merge ? " 2>&1" : " 2>/dev/null"));
}

std::string Q(const fs::path& p) { return "'" + p.string() + "'"; }

// Toy dataset space {0,1,2} mapped to unified ids 1..3.
void WriteToyMapping(const fs::path& path) { write_file_atomic(path, mapping_csv({{0, 1}, {1, 2}, {2, 3}})); }

TEST(Cli, HelpDocumentsPrecedenceAndExitCodes) {
  const auto r = Segkit("--help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("config"), std::string::npos);
  EXPECT_NE(r.out.find("exit"), std::string::npos);
}

TEST(Cli, ValidateMappingCountsToyMapping) {
  TempDir dir;
  WriteToyMapping(dir / "toy.csv");
  const auto r = Segkit("validate-mapping " + Q(dir / "toy.csv"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("toy: 3 -> 3"), std::string::npos) << r.out;
}

TEST(Cli, ValidateMappingDevkitListsEveryDataset) {
  const auto r = Segkit("--mapping-dir " + testing::data_dir() + " validate-mapping");
  EXPECT_EQ(r.status, 0);
  for (const char* name : {"COCO", "ADE20K", "Cityscapes", "Vistas", "BDD", "IDD", "WildDash2", "ScanNet", "VIPER"}) {
    EXPECT_NE(r.out.find(std::string(name) + ": "), std::string::npos) << name << "\n" << r.out;
  }
}

TEST(Cli, CorruptMappingIsAParseError) {
  TempDir dir;
  write_file_atomic(dir / "bad.csv", "source_id,source_name,target_id,target_name\n0,a,1,b\n1,\"oops,2,c\n");
  const auto r = Segkit("validate-mapping " + Q(dir / "bad.csv"), true);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;
  write_file_atomic(dir / "bad.csv", mapping_csv({{0, 999}}));
  EXPECT_EQ(Segkit("validate-mapping " + Q(dir / "bad.csv")).status, 2);
  EXPECT_EQ(Segkit("validate-mapping " + Q(dir / "missing.csv")).status, 2);
}

TEST(Cli, UnknownFlagsAreRejected) {
  EXPECT_EQ(Segkit("plan --no-such-flag").status, 2);
  EXPECT_EQ(Segkit("--threads 0 plan").status, 2);
}

TEST(Cli, RemapMatchesLibraryProjection) {
  TempDir dir;
  WriteToyMapping(dir / "toy.csv");
  std::mt19937 gen(1);
  std::vector<fs::path> rels;
  for (int i = 0; i < 100; ++i) {
    const fs::path rel = fs::path("part" + std::to_string(i % 3)) / ("m" + std::to_string(i) + ".png");
    fs::create_directories((dir / "in" / rel).parent_path());
    write_mask_png(dir / "in" / rel, random_mask(gen, 1 + i % 17, 1 + i % 11, {0, 1, 2}));
    rels.push_back(rel);
  }
  const auto r = Segkit("--threads 3 remap --in " + Q(dir / "in") + " --out " + Q(dir / "out") + " --mapping " +
                     Q(dir / "toy.csv"));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("100 files"), std::string::npos) << r.out;

  const LabelSpace unified = generic_unified_space();
  const LabelSpace source = infer_source_space(read_file(dir / "toy.csv"), "toy");
  const ProjectionLUT lut = build_lut(parse_mapping(read_file(dir / "toy.csv"), source, unified));
  for (const auto& rel : rels) {
    const MaskImage expected = project_mask(read_mask_png(dir / "in" / rel), lut, unified);
    EXPECT_EQ(read_mask_png(dir / "out" / rel).data, expected.data) << rel;
  }

  const auto back = Segkit("remap --direction to-dataset --in " + Q(dir / "out") + " --out " + Q(dir / "back") +
                        " --mapping " + Q(dir / "toy.csv"));
  ASSERT_EQ(back.status, 0);
  for (const auto& rel : rels) EXPECT_EQ(read_file(dir / "back" / rel), read_file(dir / "in" / rel)) << rel;
}

TEST(Cli, RemapEmptyDirectoryAndBadPixels) {
  TempDir dir;
  WriteToyMapping(dir / "toy.csv");
  fs::create_directories(dir / "empty");
  const auto r = Segkit("remap --in " + Q(dir / "empty") + " --out " + Q(dir / "out") + " --mapping " + Q(dir / "toy.csv"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("0 files"), std::string::npos) << r.out;

  fs::create_directories(dir / "in");
  MaskImage m(4, 4, "");
  m.at(3, 2) = 9;
  write_mask_png(dir / "in" / "m.png", m);
  const auto bad = Segkit("remap --in " + Q(dir / "in") + " --out " + Q(dir / "out") + " --mapping " + Q(dir / "toy.csv"), true);
  EXPECT_EQ(bad.status, 3);
  EXPECT_NE(bad.out.find("m.png"), std::string::npos) << bad.out;
}

TEST(Cli, PlanIsDeterministic) {
  const auto a = Segkit("--seed 7 plan --iters 400 --batch 8 --dump-batches 20");
  const auto b = Segkit("plan --seed 7 --iters 400 --batch 8 --dump-batches 20");
  const auto c = Segkit("--seed 8 plan --iters 400 --batch 8 --dump-batches 20");
  ASSERT_EQ(a.status, 0);
  ASSERT_EQ(b.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_NE(a.out.find("\"iter\":19"), std::string::npos) << a.out.substr(0, 200);
}

TEST(Cli, PlanFileRebuildsTheSameBatches) {
  TempDir dir;
  ASSERT_EQ(Segkit("--seed 3 plan --iters 200 --batch 4 --out " + Q(dir / "plan.json")).status, 0);
  const auto direct = Segkit("--seed 3 plan --iters 200 --batch 4 --dump-batches 50");
  const auto rebuilt = Segkit("plan --from-plan " + Q(dir / "plan.json") + " --dump-batches 50");
  ASSERT_EQ(rebuilt.status, 0);
  EXPECT_EQ(direct.out, rebuilt.out);
}

TEST(Cli, ConfigPrecedence) {
  TempDir dir;
  write_file_atomic(dir / "c.json", R"({"seed": 5, "plan": {"iters": 100, "batch": 2, "dump-batches": 4}})");
  const auto from_config = Segkit("--config " + Q(dir / "c.json") + " plan");
  const auto explicit_flags = Segkit("--seed 5 plan --iters 100 --batch 2 --dump-batches 4");
  ASSERT_EQ(from_config.status, 0);
  EXPECT_EQ(from_config.out, explicit_flags.out);
  const auto overridden = Segkit("--config " + Q(dir / "c.json") + " --seed 6 plan");
  const auto seed6 = Segkit("--seed 6 plan --iters 100 --batch 2 --dump-batches 4");
  EXPECT_EQ(overridden.out, seed6.out);
  EXPECT_NE(overridden.out, from_config.out);
  write_file_atomic(dir / "bad.json", R"({"sede": 5})");
  EXPECT_EQ(Segkit("--config " + Q(dir / "bad.json") + " plan").status, 2);
}

TEST(Cli, ManifestStrictModeFlagsCountMismatch) {
  TempDir dir;
  const fs::path root = dir / "cs";
  for (const char* split : {"train", "val"}) {
    fs::create_directories(root / "leftImg8bit" / split / "aachen");
    fs::create_directories(root / "gtFine" / split / "aachen");
    write_image_png(root / "leftImg8bit" / split / "aachen" / "a_000001_leftImg8bit.png", ImageBuffer(4, 4));
    write_mask_png(root / "gtFine" / split / "aachen" / "a_000001_gtFine_labelIds.png", MaskImage(4, 4, ""));
  }
  const auto r = Segkit("manifest --dataset Cityscapes --root " + Q(root) + " --out " + Q(dir / "m.jsonl"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(Manifest::parse(read_file(dir / "m.jsonl")).size(), 2u);
  EXPECT_EQ(Segkit("--strict manifest --dataset Cityscapes --root " + Q(root)).status, 1);
  EXPECT_EQ(Segkit("manifest --dataset Nope --root " + Q(root)).status, 2);
}

class CliDatasetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    WriteToyMapping(dir_ / "toy.csv");
    fs::create_directories(dir_ / "img");
    fs::create_directories(dir_ / "gt");
    std::mt19937 gen(2);
    std::vector<SampleRecord> records;
    for (int i = 0; i < 6; ++i) {
      const std::string name = "f" + std::to_string(i);
      write_image_png(dir_ / "img" / (name + ".png"), testing::random_image(gen, 48, 32));
      write_mask_png(dir_ / "gt" / (name + ".png"), random_mask(gen, 48, 32, {0, 1, 2}));
      records.push_back(SampleRecord{"toy", i < 4 ? Split::kTrain : Split::kVal, (dir_ / "img" / (name + ".png")).string(),
                                     (dir_ / "gt" / (name + ".png")).string(), 48, 32});
    }
    write_file_atomic(dir_ / "m.jsonl", Manifest(std::move(records)).serialize());
  }
  TempDir dir_;
};

TEST_F(CliDatasetTest, EvaluateProjectedGroundTruthScoresOne) {
  ASSERT_EQ(Segkit("remap --in " + Q(dir_ / "gt") + " --out " + Q(dir_ / "pred") + " --mapping " + Q(dir_ / "toy.csv")).status, 0);
  const auto r = Segkit("evaluate --pred " + Q(dir_ / "pred") + " --gt " + Q(dir_ / "m.jsonl") + " --mapping " + Q(dir_ / "toy.csv"));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"miou\": 1.0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"images\": 6"), std::string::npos) << r.out;

  fs::remove(dir_ / "pred" / "f3.png");
  EXPECT_EQ(Segkit("evaluate --pred " + Q(dir_ / "pred") + " --gt " + Q(dir_ / "m.jsonl") + " --mapping " + Q(dir_ / "toy.csv")).status, 0);
  EXPECT_EQ(Segkit("--strict evaluate --pred " + Q(dir_ / "pred") + " --gt " + Q(dir_ / "m.jsonl") + " --mapping " +
                Q(dir_ / "toy.csv")).status, 3);
  EXPECT_EQ(Segkit("evaluate --pred " + Q(dir_ / "pred") + " --gt " + Q(dir_ / "m.jsonl")).status, 2);
}

TEST_F(CliDatasetTest, DegenerateTtaEqualsDirectArgmax) {
  const std::string predictor = std::string(SEGKIT_FAKE_PREDICTOR) + " --mode gt-leak --classes 3 --masks " +
                                (dir_ / "gt").string() + " --workdir " + dir_.path().string();
  const auto r = Segkit("--threads 2 tta --manifest " + Q(dir_ / "m.jsonl") + " --split train --predictor '" + predictor +
                     "' --ratios 1.0 --no-flip --base-scale 24 16 --out " + Q(dir_ / "tta"), true);
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("4 files"), std::string::npos) << r.out;
  ProcessPredictor direct(predictor);
  for (int i = 0; i < 4; ++i) {
    const std::string name = "f" + std::to_string(i);
    const LogitMap l = direct.predict(PredictRequest{(dir_ / "img" / (name + ".png")).string(), 24, 16, false});
    const MaskImage expected = argmax_mask(rescale_logits(l, 48, 32));
    EXPECT_EQ(read_mask_png(dir_ / "tta" / (name + ".png")).data, expected.data) << name;
  }
}

TEST_F(CliDatasetTest, TtaPredictorFailureExitsWithFour) {
  const std::string predictor = std::string(SEGKIT_FAKE_PREDICTOR) + " --mode error --workdir " + dir_.path().string();
  const auto r = Segkit("tta --image " + Q(dir_ / "img" / "f0.png") + " --predictor '" + predictor + "' --out " +
                     Q(dir_ / "tta"), true);
  EXPECT_EQ(r.status, 4);
  EXPECT_NE(r.out.find("ratio 0.5"), std::string::npos) << r.out;
}

TEST_F(CliDatasetTest, AugmentReplayIsByteIdentical) {
  const std::string common = " --crop 32 24 --base-scale 48 32";
  const auto first = Segkit("--seed 11 augment --manifest " + Q(dir_ / "m.jsonl") + " --n 6 --out " + Q(dir_ / "a") + common);
  ASSERT_EQ(first.status, 0);
  const auto replay = Segkit("augment --replay " + Q(dir_ / "a" / "draws.jsonl") + " --out " + Q(dir_ / "b"));
  ASSERT_EQ(replay.status, 0);
  const auto again = Segkit("--seed 11 --threads 3 augment --manifest " + Q(dir_ / "m.jsonl") + " --n 6 --out " + Q(dir_ / "c") + common);
  ASSERT_EQ(again.status, 0);
  for (int i = 0; i < 6; ++i) {
    for (const char* kind : {"image", "mask"}) {
      char name[32];
      std::snprintf(name, sizeof name, "%06d_%s.png", i, kind);
      const std::string a = read_file(dir_ / "a" / name);
      EXPECT_EQ(a, read_file(dir_ / "b" / name)) << name;
      EXPECT_EQ(a, read_file(dir_ / "c" / name)) << name;
    }
  }
  EXPECT_EQ(read_mask_png(dir_ / "a" / "000000_mask.png").width, 32);
}

TEST_F(CliDatasetTest, StatsCountsPixels) {
  const auto r = Segkit("stats --manifest " + Q(dir_ / "m.jsonl") + " --mapping " + Q(dir_ / "toy.csv"));
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"pixels\": " + std::to_string(6 * 48 * 32)), std::string::npos) << r.out;
}

}  // namespace
}  // namespace segkit
