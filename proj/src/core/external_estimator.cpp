/* Copyright 2026 The HomoGuard Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "homoguard/external_estimator.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "homoguard/error.hpp"
#include "json.hpp"

extern char** environ;

namespace homoguard {
namespace {

// Writes with SIGPIPE blocked so a dead child surfaces as EPIPE instead of
// killing the host process.
bool WriteAll(int fd, const char* data, size_t size) {
  sigset_t block, old;
  sigemptyset(&block);
  sigaddset(&block, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &block, &old);
  bool ok = true;
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      ok = false;
      break;
    }
    data += n;
    size -= static_cast<size_t>(n);
  }
  if (!ok) {
    const timespec zero{0, 0};
    sigtimedwait(&block, nullptr, &zero);
  }
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
  return ok;
}

Matrix24 ParseMatrix(const nlohmann::json& value, const char* field) {
  if (!value.is_array() || value.size() != 2) {
    Fail(ErrorCode::kProtocolError, std::string(field) + " entry must be a 2x4 array");
  }
  Matrix24 m;
  for (int r = 0; r < 2; ++r) {
    const nlohmann::json& row = value[static_cast<size_t>(r)];
    if (!row.is_array() || row.size() != 4) {
      Fail(ErrorCode::kProtocolError, std::string(field) + " rows must hold 4 numbers");
    }
    for (int c = 0; c < 4; ++c) {
      const nlohmann::json& x = row[static_cast<size_t>(c)];
      if (!x.is_number()) Fail(ErrorCode::kProtocolError, std::string(field) + " must be numeric");
      m(r, c) = x.get<double>();
    }
  }
  if (!m.allFinite()) Fail(ErrorCode::kProtocolError, std::string(field) + " must be finite");
  return m;
}

}  // namespace

LineChannel::LineChannel(const std::string& command, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) Fail(ErrorCode::kIo, "pipe failed");
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    Fail(ErrorCode::kIo, "pipe failed");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  std::string shell = "/bin/sh", flag = "-c", cmd = command;
  char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
  // Own process group, so a shell wrapper and its children die together.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  const int rc = posix_spawn(&pid_, "/bin/sh", &actions, &attr, argv, environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    ::close(to_child_);
    ::close(from_child_);
    pid_ = -1;
    Fail(ErrorCode::kProtocolError, "cannot start estimator process: " + std::string(std::strerror(rc)));
  }
}

LineChannel::~LineChannel() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    // Closing stdin asks the child to exit; escalate if it lingers.
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        kill(-pid_, SIGKILL);  // stragglers in the group
        return;
      }
      usleep(10000);
    }
    kill(-pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
}

void LineChannel::WriteLine(const std::string& line) {
  const std::string framed = line + "\n";
  if (!WriteAll(to_child_, framed.data(), framed.size())) {
    Fail(ErrorCode::kProtocolError, "estimator process closed its input");
  }
}

std::string LineChannel::ReadLine() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) Fail(ErrorCode::kProtocolError, "estimator response timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) Fail(ErrorCode::kProtocolError, "estimator response timed out");
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) Fail(ErrorCode::kProtocolError, "estimator process closed its output");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

std::string FormatRequest(long long id, const std::string& satellite_path,
                          const std::string& thermal_path, int iterations) {
  nlohmann::ordered_json request;
  request["id"] = id;
  request["satellite"] = satellite_path;
  request["thermal"] = thermal_path;
  request["iterations"] = iterations;
  return request.dump();
}

EstimateTrajectory ParseResponse(const std::string& line, long long expected_id,
                                 int expected_iterations) {
  if (line.empty()) Fail(ErrorCode::kProtocolError, "empty response line");
  if (std::isspace(static_cast<unsigned char>(line.back()))) {
    Fail(ErrorCode::kProtocolError, "response line has trailing whitespace");
  }
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kProtocolError, std::string("malformed response: ") + e.what());
  }
  if (!response.is_object()) Fail(ErrorCode::kProtocolError, "response is not an object");
  if (response.contains("error")) {
    const auto& msg = response["error"];
    Fail(ErrorCode::kProtocolError,
         "estimator reported: " + (msg.is_string() ? msg.get<std::string>() : msg.dump()));
  }
  if (!response.contains("id") || !response["id"].is_number_integer() ||
      response["id"].get<long long>() != expected_id) {
    Fail(ErrorCode::kProtocolError, "response id does not match request " + std::to_string(expected_id));
  }
  if (!response.contains("displacements") || !response["displacements"].is_array()) {
    Fail(ErrorCode::kProtocolError, "response lacks a displacements array");
  }
  const auto& list = response["displacements"];
  if (static_cast<int>(list.size()) != expected_iterations) {
    Fail(ErrorCode::kProtocolError, "expected " + std::to_string(expected_iterations) +
                                        " displacements, got " + std::to_string(list.size()));
  }
  EstimateTrajectory trajectory;
  for (const auto& entry : list) trajectory.per_iteration.push_back({ParseMatrix(entry, "displacements")});
  if (response.contains("variance") && !response["variance"].is_null()) {
    const Matrix24 variance = ParseMatrix(response["variance"], "variance");
    if ((variance.array() < 0.0).any()) {
      Fail(ErrorCode::kProtocolError, "variance entries must be non-negative");
    }
    trajectory.variance = variance;
  }
  return trajectory;
}

ExternalEstimator::ExternalEstimator(const std::string& command, std::chrono::milliseconds timeout)
    : channel_(command, timeout) {
  std::string templ = (std::filesystem::temp_directory_path() / "homoguard-XXXXXX").string();
  if (mkdtemp(templ.data()) == nullptr) Fail(ErrorCode::kIo, "cannot create scratch directory");
  scratch_ = templ;
}

ExternalEstimator::~ExternalEstimator() {
  std::error_code ignored;
  std::filesystem::remove_all(scratch_, ignored);
}

EstimateTrajectory ExternalEstimator::Query(const std::string& satellite_path,
                                            const std::string& thermal_path, int iterations) {
  const long long id = next_id_++;
  channel_.WriteLine(FormatRequest(id, satellite_path, thermal_path, iterations));
  return ParseResponse(channel_.ReadLine(), id, iterations);
}

EstimateTrajectory ExternalEstimator::Estimate(const EstimateRequest& request) {
  if (request.satellite == nullptr || request.thermal == nullptr) {
    Fail(ErrorCode::kInvalidArgument, "estimate request is missing images");
  }
  const std::string stem = "view" + std::to_string(next_id_);
  const auto sat_path = scratch_ / (stem + "_sat.pgm");
  const auto thr_path = scratch_ / (stem + "_thr.pgm");
  WritePgm(*request.satellite, sat_path);
  WritePgm(*request.thermal, thr_path);
  EstimateTrajectory out = Query(sat_path.string(), thr_path.string(), request.StepsToRun());
  std::error_code ignored;
  std::filesystem::remove(sat_path, ignored);
  std::filesystem::remove(thr_path, ignored);
  return out;
}

}  // namespace homoguard
