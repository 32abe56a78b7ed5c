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

#ifndef HOMOGUARD_EXTERNAL_ESTIMATOR_HPP_
#define HOMOGUARD_EXTERNAL_ESTIMATOR_HPP_

#include <chrono>
#include <filesystem>
#include <string>
#include <sys/types.h>

#include "homoguard/estimator.hpp"

namespace homoguard {

// Bidirectional line channel to a child process started with /bin/sh -c.
// Not safe for concurrent use; use one channel per worker.
class LineChannel {
 public:
  explicit LineChannel(const std::string& command,
                       std::chrono::milliseconds timeout = std::chrono::seconds(120));
  ~LineChannel();

  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  void WriteLine(const std::string& line);
  // Reads one '\n'-terminated line (terminator stripped). Throws
  // ProtocolError on EOF or timeout.
  std::string ReadLine();

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::chrono::milliseconds timeout_;
};

// Request line: {"id":<int>,"satellite":"<pgm>","thermal":"<pgm>","iterations":<int>}
std::string FormatRequest(long long id, const std::string& satellite_path,
                          const std::string& thermal_path, int iterations);

// Validates a response line against the request id and iteration count.
// Throws ProtocolError for anything non-conforming, including error objects.
EstimateTrajectory ParseResponse(const std::string& line, long long expected_id,
                                 int expected_iterations);

// Delegates estimation to an external process speaking the line-delimited
// JSON protocol on its standard input and output. Images are exchanged as
// PGM files in a private temporary directory.
class ExternalEstimator final : public Estimator {
 public:
  explicit ExternalEstimator(const std::string& command,
                             std::chrono::milliseconds timeout = std::chrono::seconds(120));
  ~ExternalEstimator() override;

  EstimateTrajectory Estimate(const EstimateRequest& request) override;
  std::string Name() const override { return "external"; }
  bool ThreadSafe() const override { return false; }

  // Sends pre-written image files; exposed for protocol-level testing.
  EstimateTrajectory Query(const std::string& satellite_path, const std::string& thermal_path,
                           int iterations);

 private:
  LineChannel channel_;
  std::filesystem::path scratch_;
  long long next_id_ = 0;
};

}  // namespace homoguard

#endif  // HOMOGUARD_EXTERNAL_ESTIMATOR_HPP_
