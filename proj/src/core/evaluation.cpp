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

#include "homoguard/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "homoguard/classical_estimator.hpp"
#include "homoguard/error.hpp"
#include "homoguard/external_estimator.hpp"
#include "homoguard/oracle_estimator.hpp"
#include "homoguard/rng.hpp"
#include "homoguard/two_stage.hpp"

namespace homoguard {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kMemberSalt = 0xde5eed;
// Slack added to the D_C search region, resized pixels.
constexpr double kSearchSlack = 16.0;

std::string ExpandMember(std::string command, size_t member) {
  const std::string key = "{member}";
  for (size_t pos = command.find(key); pos != std::string::npos; pos = command.find(key, pos)) {
    command.replace(pos, key.size(), std::to_string(member));
  }
  return command;
}

bool IsEstimatorError(ErrorCode code) {
  return code == ErrorCode::kProtocolError || code == ErrorCode::kSolverDiverged ||
         code == ErrorCode::kLengthMismatch;
}

// Estimators owned by one worker thread. External processes persist across
// samples; pixel-only estimators are rebuilt per sample.
class MemberSet {
 public:
  MemberSet(const EvaluationOptions& options, const FrameConfig& frames)
      : options_(options), frames_(frames) {}

  std::vector<Estimator*> For(const Sample& sample, std::uint64_t stream_seed) {
    const size_t n = options_.ensemble ? static_cast<size_t>(options_.consensus.n_m) : 1;
    std::vector<Estimator*> out;
    switch (options_.estimator.kind) {
      case EstimatorKind::kExternal:
        while (external_.size() < n) {
          external_.push_back(std::make_unique<ExternalEstimator>(
              ExpandMember(options_.estimator.command, external_.size())));
        }
        for (size_t m = 0; m < n; ++m) out.push_back(external_[m].get());
        return out;
      case EstimatorKind::kOracle: {
        owned_.clear();
        const Homography truth = HomographyFromDisplacement(sample.gt, CornersOfFrame(frames_.w_r));
        for (size_t m = 0; m < n; ++m) {
          owned_.push_back(std::make_unique<OracleEstimator>(
              OracleConfig{truth, options_.estimator.oracle_sigma, MixSeed(stream_seed, m + 1)}));
        }
        break;
      }
      case EstimatorKind::kClassical: {
        owned_.clear();
        ClassicalConfig config;
        const double center = 0.5 * (frames_.w_s - frames_.w_t);
        config.prior = ResampleTransform(frames_.w_s, frames_.w_r) *
                       Homography::Translation(center, center) *
                       ResampleTransform(frames_.w_r, frames_.w_t);
        config.search_radius =
            options_.d_c_m.value_or(sample.d_c_m) / frames_.MetersPerResizedPixel() + kSearchSlack;
        for (size_t m = 0; m < n; ++m) {
          // Ensemble members are fixed "models": their seed does not depend on the sample.
          config.member_seed = options_.ensemble ? MixSeed(kMemberSalt, m + 1) : 0;
          owned_.push_back(std::make_unique<ClassicalEstimator>(config));
        }
        break;
      }
    }
    for (const auto& e : owned_) out.push_back(e.get());
    return out;
  }

  // Drops external processes after a protocol failure so the next sample
  // starts from a fresh child.
  void Reset() { external_.clear(); }

 private:
  const EvaluationOptions& options_;
  FrameConfig frames_;
  std::vector<std::unique_ptr<ExternalEstimator>> external_;
  std::vector<std::unique_ptr<Estimator>> owned_;
};

EvalRecord EvaluateSample(const Sample& sample, const EvaluationOptions& options,
                          const FrameConfig& frames, MemberSet& members, long long& steps) {
  EvalRecord record;
  record.sample_id = sample.id;
  record.category = sample.category;
  record.d_c_m = sample.d_c_m;
  record.ground_truth = sample.gt;

  const std::uint64_t stream = SampleStreamSeed(options.seed, sample.id);
  if (options.d_c_m) record.d_c_m = *options.d_c_m;
  SamplingPlan plan = options.plan;
  plan.seed = MixSeed(stream, 0);
  const GrayImage satellite = CropAndResize(sample.satellite, {0, 0, frames.w_s}, frames.w_r);
  const std::vector<Estimator*> estimators = members.For(sample, stream);

  ConsensusConfig consensus = options.consensus;
  consensus.iterations = options.stages.k1;
  const ConsensusResult result =
      RunConsensus(satellite, sample.thermal, plan, consensus, estimators, frames);
  steps += result.estimator_steps;
  record.estimate = result.estimate;
  if (options.two_stage) {
    const GrayImage thermal = CropAndResize(sample.thermal, {0, 0, frames.w_t}, frames.w_r);
    const TwoStageResult refined = RefineSecondStage(*estimators.front(), sample.satellite, thermal,
                                                     result.estimate, options.stages, frames);
    steps += refined.trajectory.size();
    record.estimate = refined.trajectory.Final();
  }
  record.uncertainty = result.total;
  record.score = result.score;
  record.rejected = result.rejected;
  record.mace_m = Mace(record.estimate, sample.gt, frames);
  record.ce_m = CenterError(record.estimate, sample.gt, frames);
  if (!std::isfinite(record.mace_m) || !std::isfinite(record.score)) {
    Fail(ErrorCode::kSolverDiverged, "non-finite estimate");
  }
  return record;
}

json NumberOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ordered_json MatrixJson(const Matrix24& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < 2; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Matrix24 MatrixFromJson(const json& j) {
  Matrix24 m = Matrix24::Zero();
  if (j.is_null()) return m;
  if (!j.is_array() || j.size() != 2) Fail(ErrorCode::kIo, "expected a 2x4 matrix");
  for (int r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 4) Fail(ErrorCode::kIo, "expected a 2x4 matrix");
    for (int c = 0; c < 4; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(17);
  return out;
}

std::string Csv(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

}  // namespace

EstimatorSelector EstimatorSelector::Parse(std::string_view text) {
  EstimatorSelector s;
  if (text == "oracle") {
    s.kind = EstimatorKind::kOracle;
  } else if (text == "classical") {
    s.kind = EstimatorKind::kClassical;
  } else if (text.starts_with("external:") && text.size() > 9) {
    s.kind = EstimatorKind::kExternal;
    s.command = std::string(text.substr(9));
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown estimator '" + std::string(text) + "'");
  }
  return s;
}

std::string EstimatorSelector::ToString() const {
  switch (kind) {
    case EstimatorKind::kOracle: return "oracle";
    case EstimatorKind::kClassical: return "classical";
    case EstimatorKind::kExternal: return "external:" + command;
  }
  return "classical";
}

void EvaluationOptions::Validate(const FrameConfig& frames) const {
  frames.Validate();
  plan.Validate(frames.w_t);
  ConsensusConfig c = consensus;
  c.iterations = stages.k1;
  c.Validate();
  stages.Validate();
  if (ensemble && consensus.n_m < 2) Fail(ErrorCode::kInvalidArgument, "an ensemble needs n_m >= 2");
  if (!(estimator.oracle_sigma >= 0.0)) Fail(ErrorCode::kInvalidArgument, "oracle sigma must be >= 0");
  if (d_c_m && !(*d_c_m >= 0.0)) Fail(ErrorCode::kInvalidArgument, "d_c must be >= 0");
  if (!(roc_threshold_m >= 0.0)) Fail(ErrorCode::kInvalidArgument, "ROC threshold must be >= 0");
  if (threads < 1) Fail(ErrorCode::kInvalidArgument, "threads must be >= 1");
}

std::string EvaluationOptions::MethodLabel() const {
  const bool tta = plan.n_c > 1;
  if (tta && ensemble) return "croptta+de";
  if (tta) return "croptta";
  if (ensemble) return "de";
  return "none";
}

void ApplyMethod(EvaluationOptions& options, std::string_view method) {
  if (method == "none") {
    options.plan.n_c = 1;
    options.ensemble = false;
  } else if (method == "croptta") {
    if (options.plan.n_c < 2) options.plan.n_c = 5;
    options.ensemble = false;
  } else if (method == "de") {
    options.plan.n_c = 1;
    options.ensemble = true;
  } else if (method == "croptta+de") {
    if (options.plan.n_c < 2) options.plan.n_c = 5;
    options.ensemble = true;
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown method '" + std::string(method) + "'");
  }
}

std::uint64_t SampleStreamSeed(std::uint64_t global_seed, std::string_view sample_id) {
  return MixSeed(global_seed, Fnv1a64(sample_id));
}

ResultTable BuildResultTable(std::span<const EvalRecord> records, const std::string& method,
                             double roc_threshold_m) {
  if (records.empty()) Fail(ErrorCode::kEmptyList, "no records to tabulate");
  ResultTable table;
  std::map<double, std::vector<EvalRecord>> by_dc;
  for (const EvalRecord& r : records) by_dc[r.d_c_m].push_back(r);
  for (const auto& [dc, group] : by_dc) {
    ResultRow row;
    row.method = method;
    row.d_c_m = dc;
    row.count = static_cast<int>(group.size());
    double mace = 0.0, ce = 0.0;
    for (const EvalRecord& r : group) {
      if (r.failed()) {
        ++row.failed;
      } else if (!r.rejected) {
        ++row.kept;
        mace += r.mace_m;
        ce += r.ce_m;
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.mace_m = row.kept > 0 ? mace / row.kept : nan;
    row.ce_m = row.kept > 0 ? ce / row.kept : nan;
    row.success_rate = SuccessRate(group);
    try {
      row.auc = ComputeRoc(group, roc_threshold_m).auc;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateLabels && e.code() != ErrorCode::kEmptyList) throw;
      row.auc = nan;
    }
    table.rows.push_back(row);
  }
  for (FailureCategory category : kAllCategories) {
    CategoryRow row;
    row.category = category;
    double mace = 0.0;
    int with_estimate = 0;
    for (const EvalRecord& r : records) {
      if (r.category != category) continue;
      ++row.count;
      if (r.failed()) {
        ++row.failed;
        ++row.rejected;
        continue;
      }
      if (r.rejected) ++row.rejected;
      mace += r.mace_m;
      ++with_estimate;
    }
    if (row.count == 0) continue;
    row.mean_mace_m = with_estimate > 0 ? mace / with_estimate : std::numeric_limits<double>::quiet_NaN();
    table.categories.push_back(row);
  }
  return table;
}

EvaluationResult RunEvaluation(const SampleSource& source, const EvaluationOptions& options) {
  const FrameConfig& frames = source.frames();
  options.Validate(frames);
  const auto start = std::chrono::steady_clock::now();

  EvaluationResult result;
  const size_t count = source.size();
  result.records.resize(count);
  std::vector<long long> steps(count, 0);
  std::vector<char> estimator_failure(count, 0);

  std::atomic<size_t> next{0};
  auto worker = [&] {
    MemberSet members(options, frames);
    for (size_t i = next++; i < count; i = next++) {
      EvalRecord& record = result.records[i];
      Sample sample;
      try {
        sample = source.Load(i);
        record = EvaluateSample(sample, options, frames, members, steps[i]);
      } catch (const Error& e) {
        if (record.sample_id.empty()) record.sample_id = sample.id;
        record.category = sample.category;
        record.d_c_m = options.d_c_m.value_or(sample.d_c_m);
        record.ground_truth = sample.gt;
        record.rejected = true;
        record.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
        if (IsEstimatorError(e.code())) {
          estimator_failure[i] = 1;
          if (e.code() == ErrorCode::kProtocolError) members.Reset();
        }
      } catch (const std::exception& e) {
        record.sample_id = sample.id;
        record.category = sample.category;
        record.rejected = true;
        record.error = std::string("internal: ") + e.what();
      }
      if (record.sample_id.empty()) record.sample_id = "#" + std::to_string(i);
    }
  };
  const int n = std::min<int>(options.threads, static_cast<int>(std::max<size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (size_t i = 0; i < count; ++i) {
    result.estimator_steps += steps[i];
    result.estimator_errors += estimator_failure[i];
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void WriteRecordsJson(std::span<const EvalRecord> records, const std::filesystem::path& path) {
  ordered_json arr = ordered_json::array();
  for (const EvalRecord& r : records) {
    ordered_json j;
    j["id"] = r.sample_id;
    j["category"] = CategoryName(r.category);
    j["d_c_m"] = r.d_c_m;
    j["failed"] = r.failed();
    j["error"] = r.error;
    j["rejected"] = r.rejected;
    j["score"] = NumberOrNull(r.score);
    j["mace_m"] = r.failed() ? ordered_json(nullptr) : ordered_json(NumberOrNull(r.mace_m));
    j["ce_m"] = r.failed() ? ordered_json(nullptr) : ordered_json(NumberOrNull(r.ce_m));
    j["estimate"] = r.failed() ? ordered_json(nullptr) : MatrixJson(r.estimate.offsets);
    j["ground_truth"] = MatrixJson(r.ground_truth.offsets);
    j["uncertainty"] = MatrixJson(r.uncertainty.stds);
    arr.push_back(std::move(j));
  }
  std::ofstream out = OpenForWrite(path);
  out << arr.dump(1) << '\n';
}

std::vector<EvalRecord> ReadRecordsJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open records " + path.string());
  std::vector<EvalRecord> records;
  try {
    const json arr = json::parse(in);
    if (!arr.is_array()) Fail(ErrorCode::kIo, "records file must hold a JSON array");
    for (const json& j : arr) {
      EvalRecord r;
      r.sample_id = j.at("id").get<std::string>();
      r.category = ParseCategory(j.at("category").get<std::string>());
      r.d_c_m = j.value("d_c_m", 0.0);
      r.error = j.value("error", std::string());
      if (j.value("failed", false) && r.error.empty()) r.error = "failed";
      r.rejected = j.at("rejected").get<bool>();
      r.score = j.at("score").is_null() ? 0.0 : j.at("score").get<double>();
      if (!r.failed()) {
        r.mace_m = j.at("mace_m").get<double>();
        r.ce_m = j.at("ce_m").get<double>();
        r.estimate.offsets = MatrixFromJson(j.at("estimate"));
      }
      r.ground_truth.offsets = MatrixFromJson(j.value("ground_truth", json(nullptr)));
      r.uncertainty.stds = MatrixFromJson(j.value("uncertainty", json(nullptr)));
      records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kIo, std::string("malformed records file: ") + e.what());
  }
  return records;
}

void WriteRecordsCsv(std::span<const EvalRecord> records, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  out << "id,category,d_c_m,failed,rejected,score,mace_m,ce_m\n";
  for (const EvalRecord& r : records) {
    out << r.sample_id << ',' << CategoryName(r.category) << ',' << Csv(r.d_c_m) << ','
        << (r.failed() ? 1 : 0) << ',' << (r.rejected ? 1 : 0) << ',' << Csv(r.score) << ','
        << (r.failed() ? "" : Csv(r.mace_m)) << ',' << (r.failed() ? "" : Csv(r.ce_m)) << '\n';
  }
}

void WriteTableJson(const ResultTable& table, const std::filesystem::path& path) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const ResultRow& r : table.rows) {
    rows.push_back({{"method", r.method},
                    {"d_c_m", r.d_c_m},
                    {"count", r.count},
                    {"kept", r.kept},
                    {"failed", r.failed},
                    {"mace_m", NumberOrNull(r.mace_m)},
                    {"ce_m", NumberOrNull(r.ce_m)},
                    {"success_rate", r.success_rate},
                    {"auc", NumberOrNull(r.auc)}});
  }
  ordered_json cats = ordered_json::array();
  for (const CategoryRow& c : table.categories) {
    cats.push_back({{"category", CategoryName(c.category)},
                    {"count", c.count},
                    {"rejected", c.rejected},
                    {"failed", c.failed},
                    {"mean_mace_m", NumberOrNull(c.mean_mace_m)}});
  }
  j["rows"] = std::move(rows);
  j["categories"] = std::move(cats);
  std::ofstream out = OpenForWrite(path);
  out << j.dump(1) << '\n';
}

void WriteTableCsv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  out << "method,d_c_m,count,kept,failed,mace_m,ce_m,success_rate,auc\n";
  for (const ResultRow& r : table.rows) {
    out << r.method << ',' << Csv(r.d_c_m) << ',' << r.count << ',' << r.kept << ',' << r.failed
        << ',' << Csv(r.mace_m) << ',' << Csv(r.ce_m) << ',' << Csv(r.success_rate) << ','
        << Csv(r.auc) << '\n';
  }
}

void WriteRocCsv(const RocCurve& roc, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  out << "# auc=" << Csv(roc.auc) << " positives=" << roc.positives
      << " negatives=" << roc.negatives << '\n';
  out << "threshold,fpr,tpr\n";
  for (const RocPoint& p : roc.points) {
    out << (std::isfinite(p.threshold) ? Csv(p.threshold) : "inf") << ',' << Csv(p.fpr) << ','
        << Csv(p.tpr) << '\n';
  }
}

void WriteHistogramCsv(std::span<const HistogramBin> bins, const std::filesystem::path& path) {
  std::ofstream out = OpenForWrite(path);
  out << "lo_m,hi_m,count\n";
  for (size_t i = 0; i < bins.size(); ++i) {
    const bool overflow = i + 1 == bins.size();
    out << Csv(bins[i].lo) << ',' << (overflow ? "inf" : Csv(bins[i + 1].lo)) << ','
        << bins[i].count << '\n';
  }
}

}  // namespace homoguard
