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

#include "segkit/predictor.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "segkit/errors.hpp"

namespace segkit {

ProcessPredictor::ProcessPredictor(const std::string& command) : command_(command) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw PredictorError(std::string("socketpair: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    const int err = errno;
    ::close(sv[0]);
    ::close(sv[1]);
    throw PredictorError(std::string("fork: ") + std::strerror(err));
  }
  if (pid_ == 0) {
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  fd_ = sv[0];
}

ProcessPredictor::~ProcessPredictor() {
  try {
    close();
  } catch (const PredictorError&) {
  }
}

void ProcessPredictor::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_WR);
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      throw PredictorError("predictor '" + command_ + "' exited with status " +
                           std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    }
  }
}

void ProcessPredictor::fail(const std::string& what) {
  std::string message = "predictor '" + command_ + "': " + what;
  try {
    close();
  } catch (const PredictorError& e) {
    message += " (" + std::string(e.what()) + ")";
  }
  throw PredictorError(message);
}

std::string ProcessPredictor::read_line() {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) fail("no reply (channel closed)");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

LogitMap ProcessPredictor::predict(const PredictRequest& request) {
  if (fd_ < 0) throw PredictorError("predictor '" + command_ + "' is closed");
  const std::uint64_t id = next_id_++;
  nlohmann::ordered_json j;
  j["id"] = id;
  j["image_path"] = request.image_path;
  j["scale"] = {request.width, request.height};
  j["flip"] = request.flip;
  const std::string line = j.dump() + "\n";
  for (std::size_t sent = 0; sent < line.size();) {
    const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) fail(std::string("cannot send request: ") + std::strerror(errno));
    sent += static_cast<std::size_t>(n);
  }

  const std::string reply_line = read_line();
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(reply_line);
  } catch (const nlohmann::json::parse_error&) {
    fail("malformed reply '" + reply_line + "'");
  }
  if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_unsigned() ||
      reply["id"].get<std::uint64_t>() != id) {
    fail("reply '" + reply_line + "' does not answer request " + std::to_string(id));
  }
  if (reply.contains("error")) {
    throw PredictorError("predictor error for request " + std::to_string(id) + ": " +
                         (reply["error"].is_string() ? reply["error"].get<std::string>() : reply["error"].dump()));
  }
  if (!reply.contains("logit_path") || !reply["logit_path"].is_string()) {
    fail("reply '" + reply_line + "' has no logit_path");
  }
  LogitMap logits;
  try {
    logits = read_sglt(reply["logit_path"].get<std::string>());
  } catch (const Error& e) {
    throw PredictorError(std::string("unreadable predictor output: ") + e.what());
  }
  if (logits.width != request.width || logits.height != request.height) {
    throw PredictorError("predictor returned " + std::to_string(logits.width) + "x" +
                         std::to_string(logits.height) + " logits for a " + std::to_string(request.width) +
                         "x" + std::to_string(request.height) + " request");
  }
  return logits;
}

std::string fixture_file_name(const std::filesystem::path& image_path, int width, int height, bool flip) {
  return image_path.stem().string() + "_" + std::to_string(width) + "x" + std::to_string(height) +
         (flip ? "_flip" : "") + ".sglt";
}

LogitMap FixturePredictor::predict(const PredictRequest& request) {
  const auto path = dir_ / fixture_file_name(request.image_path, request.width, request.height, request.flip);
  LogitMap logits;
  try {
    logits = read_sglt(path);
  } catch (const Error& e) {
    throw PredictorError(std::string("fixture: ") + e.what());
  }
  if (logits.width != request.width || logits.height != request.height) {
    throw PredictorError("fixture '" + path.string() + "' has the wrong dimensions");
  }
  return logits;
}

}  // namespace segkit
