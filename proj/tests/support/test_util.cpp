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

#include "test_util.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <sys/wait.h>

namespace segkit::testing {

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "segkit_test_XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

MaskImage random_mask(std::mt19937& gen, int width, int height,
                      const std::vector<std::uint8_t>& values, std::string space) {
  MaskImage m(width, height, std::move(space));
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  for (auto& v : m.data) v = values[pick(gen)];
  return m;
}

ImageBuffer random_image(std::mt19937& gen, int width, int height) {
  ImageBuffer img(width, height);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(byte(gen));
  return img;
}

LogitMap random_logits(std::mt19937& gen, int width, int height, int classes, float lo,
                       float hi) {
  LogitMap l(width, height, classes);
  std::uniform_real_distribution<float> dist(lo, hi);
  for (auto& v : l.data) v = dist(gen);
  return l;
}

LabelSpace toy_space(const std::string& name, std::uint32_t n, std::optional<ClassId> void_id) {
  std::vector<ClassDef> classes;
  for (std::uint32_t i = 0; i < n; ++i) classes.push_back({i, "c" + std::to_string(i)});
  return LabelSpace(name, std::move(classes), void_id);
}

std::string mapping_csv(const std::vector<std::pair<ClassId, ClassId>>& rows,
                        std::optional<ClassId> source_void) {
  std::string out = "source_id,source_name,target_id,target_name\n";
  for (const auto& [s, t] : rows) {
    const std::string name = source_void && *source_void == s ? "void" : "s" + std::to_string(s);
    out += std::to_string(s) + "," + name + "," + std::to_string(t) + ",t" + std::to_string(t) + "\n";
  }
  return out;
}

CommandResult run_command(const std::string& command) {
  CommandResult r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data_dir() { return std::string(SEGKIT_SOURCE_DIR) + "/data/devkit_synthetic"; }

}  // namespace segkit::testing
