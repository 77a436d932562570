/*
 * Copyright 2026 The Minicar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "minicar/imitation/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "minicar/core/error.h"
#include "minicar/core/rng.h"

namespace minicar {

void FeatureSpec::Validate() const {
  if (beams <= 0 || 360 % beams != 0) {
    throw ConfigError("features.beams: must divide 360");
  }
  if (!(range_max > 0.0)) throw ConfigError("features.range_max: must be positive");
  if (!(max_speed > 0.0)) throw ConfigError("features.max_speed: must be positive");
}

Json FeatureSpec::ToJson() const {
  return {{"beams", beams}, {"range_max", range_max}, {"max_speed", max_speed}};
}

FeatureSpec FeatureSpec::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("features: expected an object");
  FeatureSpec s;
  s.beams = static_cast<int>(NumberOr(j, "beams", s.beams, "features"));
  s.range_max = NumberOr(j, "range_max", s.range_max, "features");
  s.max_speed = NumberOr(j, "max_speed", s.max_speed, "features");
  s.Validate();
  return s;
}

std::vector<double> Featurize(const LidarScan& scan, double speed, const FeatureSpec& spec) {
  const std::size_t n = scan.ranges.size();
  if (n == 0 || n % static_cast<std::size_t>(spec.beams) != 0) {
    throw std::invalid_argument("scan size " + std::to_string(n) + " is not a multiple of " +
                                std::to_string(spec.beams));
  }
  const std::size_t stride = n / static_cast<std::size_t>(spec.beams);
  std::vector<double> f(static_cast<std::size_t>(spec.size()));
  for (int k = 0; k < spec.beams; ++k) {
    const double r = scan.ranges[static_cast<std::size_t>(k) * stride];
    f[static_cast<std::size_t>(k)] = std::isfinite(r) ? std::min(r, spec.range_max) / spec.range_max
                                                      : 1.0;
  }
  f.back() = speed / spec.max_speed;
  return f;
}

Featurizer::Featurizer(FeatureSpec spec, double wheel_radius, int cpr)
    : spec_(spec), wheel_radius_(wheel_radius), cpr_(cpr) {
  spec_.Validate();
}

void Featurizer::Reset() {
  last_scan_frame_.reset();
  speed_ = 0.0;
}

std::optional<std::vector<double>> Featurizer::Observe(const SensorFrame& frame) {
  if (!frame.lidar) return std::nullopt;
  if (last_scan_frame_) {
    const double dt = frame.sim_time - last_scan_frame_->sim_time;
    const double ticks = 0.5 * static_cast<double>((frame.encoder_left - last_scan_frame_->encoder_left) +
                                                   (frame.encoder_right - last_scan_frame_->encoder_right));
    speed_ = dt > 0.0 ? ticks / cpr_ * kTwoPi * wheel_radius_ / dt : 0.0;
  } else {
    speed_ = 0.0;
  }
  last_scan_frame_ = frame;
  return Featurize(*frame.lidar, speed_, spec_);
}

Json DatasetRow::ToJson() const {
  return {{"type", "row"},     {"format_version", kDatasetFormatVersion},
          {"t", t},            {"lap_id", lap_id},
          {"steering", steering}, {"throttle", throttle},
          {"features", features}};
}

DatasetRow DatasetRow::FromJson(const Json& j) {
  if (!j.is_object()) throw ParseError("dataset row: expected an object");
  if (j.contains("format_version") &&
      (!j["format_version"].is_number_integer() ||
       j["format_version"].get<int>() != kDatasetFormatVersion)) {
    throw ParseError("dataset row: unsupported format_version");
  }
  DatasetRow r;
  try {
    r.features = RequireArray(j, "features", "row").get<std::vector<double>>();
    r.steering = RequireNumber(j, "steering", "row");
    r.throttle = RequireNumber(j, "throttle", "row");
    r.t = NumberOr(j, "t", 0.0, "row");
    r.lap_id = static_cast<int>(NumberOr(j, "lap_id", 0.0, "row"));
  } catch (const ConfigError& e) {
    throw ParseError(std::string("dataset ") + e.what());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("dataset row.features: ") + e.what());
  }
  if (!(std::abs(r.steering) <= 1.0 && std::abs(r.throttle) <= 1.0)) {
    throw ValidationError("dataset row: labels must lie in [-1, 1]");
  }
  return r;
}

std::vector<DatasetRow> BalanceDataset(const std::vector<DatasetRow>& rows, int bins,
                                       std::uint64_t seed) {
  if (rows.empty()) throw std::invalid_argument("cannot balance an empty dataset");
  if (bins <= 0) throw std::invalid_argument("bins must be positive");
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(bins));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double u = (std::clamp(rows[i].steering, -1.0, 1.0) + 1.0) / 2.0;
    const int b = std::min(bins - 1, static_cast<int>(std::floor(u * bins)));
    members[static_cast<std::size_t>(b)].push_back(i);
  }
  std::vector<std::size_t> counts;
  for (const auto& m : members) {
    if (!m.empty()) counts.push_back(m.size());
  }
  std::sort(counts.begin(), counts.end());
  const std::size_t mid = counts.size() / 2;
  const double median = counts.size() % 2 == 1
                            ? static_cast<double>(counts[mid])
                            : 0.5 * static_cast<double>(counts[mid - 1] + counts[mid]);
  const auto cap = static_cast<std::size_t>(std::floor(2.0 * median));

  RngStream rng = RngStream::ForChannel(seed, "balance");
  std::vector<bool> keep(rows.size(), true);
  for (auto& m : members) {
    if (m.size() <= cap) continue;
    // Partial Fisher-Yates: the first `cap` entries are the survivors.
    for (std::size_t i = 0; i < cap; ++i) {
      const std::size_t j = i + rng.UniformIndex(m.size() - i);
      std::swap(m[i], m[j]);
    }
    for (std::size_t i = cap; i < m.size(); ++i) keep[m[i]] = false;
  }
  std::vector<DatasetRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (keep[i]) out.push_back(rows[i]);
  }
  return out;
}

DatasetRow MirrorRow(const DatasetRow& row, int beams) {
  if (row.features.size() < static_cast<std::size_t>(beams)) {
    throw std::invalid_argument("row has fewer features than beams");
  }
  DatasetRow m = row;
  for (int k = 0; k < beams; ++k) {
    m.features[static_cast<std::size_t>(k)] = row.features[static_cast<std::size_t>((beams - k) % beams)];
  }
  m.steering = -row.steering;
  return m;
}

std::vector<DatasetRow> AugmentMirror(const std::vector<DatasetRow>& rows) {
  std::vector<DatasetRow> out = rows;
  out.reserve(2 * rows.size());
  for (const DatasetRow& r : rows) {
    out.push_back(MirrorRow(r, static_cast<int>(r.features.size()) - 1));
  }
  return out;
}

void SaveDataset(const std::filesystem::path& path, const std::vector<DatasetRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const DatasetRow& r : rows) out << r.ToJson().dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<DatasetRow> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<DatasetRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("type") && j["type"] != "row") continue;
    rows.push_back(DatasetRow::FromJson(j));
    if (rows.back().features.size() != rows.front().features.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": feature length differs from the first row");
    }
  }
  return rows;
}

}  // namespace minicar
