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

// Predictors produce logits for an image at a requested size.
//
// ProcessPredictor speaks the line protocol of an external model process:
// one JSON request per line on its stdin,
//   {"id": N, "image_path": "...", "scale": [w, h], "flip": bool}
// and one JSON reply per line on its stdout, either
//   {"id": N, "logit_path": "..."}   (an SGLT file of h x w logits)
// or
//   {"id": N, "error": "..."}.

#include <cstdint>
#include <filesystem>
#include <string>
#include <sys/types.h>

#include "segkit/logits.hpp"

namespace segkit {

struct PredictRequest {
  std::string image_path;
  int width = 0;   // size the predictor resizes the image to
  int height = 0;
  bool flip = false;  // mirror the image horizontally before predicting
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  /// Logits of the (resized, possibly mirrored) image; width x height must
  /// match the request. Failures throw PredictorError.
  virtual LogitMap predict(const PredictRequest& request) = 0;
};

class ProcessPredictor : public Predictor {
 public:
  /// Runs `command` through /bin/sh -c with a socket on stdin/stdout.
  explicit ProcessPredictor(const std::string& command);
  ~ProcessPredictor() override;
  ProcessPredictor(const ProcessPredictor&) = delete;
  ProcessPredictor& operator=(const ProcessPredictor&) = delete;

  LogitMap predict(const PredictRequest& request) override;

  /// Closes the request channel and waits for the process. Throws
  /// PredictorError on a non-zero exit status.
  void close();

 private:
  std::string read_line();
  [[noreturn]] void fail(const std::string& what);

  std::string command_;
  int fd_ = -1;
  pid_t pid_ = -1;
  std::uint64_t next_id_ = 0;
  std::string buffer_;
};

/// Serves pre-generated SGLT files from a directory, named by
/// fixture_file_name(). Missing files are PredictorErrors.
class FixturePredictor : public Predictor {
 public:
  explicit FixturePredictor(std::filesystem::path dir) : dir_(std::move(dir)) {}
  LogitMap predict(const PredictRequest& request) override;

 private:
  std::filesystem::path dir_;
};

/// "<image stem>_<w>x<h>.sglt", or "..._flip.sglt" for mirrored requests.
std::string fixture_file_name(const std::filesystem::path& image_path, int width, int height, bool flip);

}  // namespace segkit
