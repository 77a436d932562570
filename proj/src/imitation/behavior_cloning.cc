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


#include "minicar/imitation/behavior_cloning.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "minicar/core/error.h"

namespace minicar {

Eigen::VectorXd BcModel::Normalize(const std::vector<double>& f) const {
  if (f.size() != feature_min.size()) {
    throw std::invalid_argument("expected " + std::to_string(feature_min.size()) +
                                " features, got " + std::to_string(f.size()));
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double span = feature_max[i] - feature_min[i];
    x(static_cast<Eigen::Index>(i)) = span > 1e-12 ? 2.0 * (f[i] - feature_min[i]) / span - 1.0 : 0.0;
  }
  return x;
}

DriveCommand BcModel::Predict(const std::vector<double>& f) const {
  const Eigen::VectorXd y = net.Predict(Normalize(f));
  return {y(1), y(0)};
}

Json BcModel::ToJson() const {
  return {{"format_version", kModelFormatVersion},
          {"features", features.ToJson()},
          {"outputs", {"steering", "throttle"}},
          {"normalization", {{"min", feature_min}, {"max", feature_max}}},
          {"network", net.ToJson()},
          {"metadata", metadata}};
}

BcModel BcModel::FromJson(const Json& j) {
  if (!j.is_object()) throw ParseError("model: expected an object");
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kModelFormatVersion) {
    throw ParseError("model.format_version: expected " + std::to_string(kModelFormatVersion));
  }
  BcModel m;
  try {
    m.features = FeatureSpec::FromJson(RequireObject(j, "features", "model"));
    const Json& norm = RequireObject(j, "normalization", "model");
    m.feature_min = RequireArray(norm, "min", "model.normalization").get<std::vector<double>>();
    m.feature_max = RequireArray(norm, "max", "model.normalization").get<std::vector<double>>();
    m.net = Mlp::FromJson(RequireObject(j, "network", "model"));
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  const auto n = static_cast<std::size_t>(m.features.size());
  if (m.feature_min.size() != n || m.feature_max.size() != n ||
      m.net.input_size() != m.features.size() || m.net.output_size() != 2) {
    throw ValidationError("model: feature count, normalization and network sizes disagree");
  }
  if (j.contains("metadata")) m.metadata = j["metadata"];
  return m;
}

void BcModel::Save(const std::filesystem::path& path) const { WriteJsonFile(path, ToJson()); }

BcModel BcModel::Load(const std::filesystem::path& path) { return FromJson(ReadJsonFile(path)); }

BcTrainResult TrainBehaviorCloning(const std::vector<DatasetRow>& rows, const FeatureSpec& spec,
                                   const BcTrainConfig& config) {
  if (rows.empty()) throw std::invalid_argument("empty dataset");
  const auto n_features = static_cast<std::size_t>(spec.size());
  for (const DatasetRow& r : rows) {
    if (r.features.size() != n_features) {
      throw std::invalid_argument("row has " + std::to_string(r.features.size()) +
                                  " features, spec expects " + std::to_string(n_features));
    }
  }
  std::vector<DatasetRow> data = rows;
  if (config.balance) data = BalanceDataset(data, config.balance_bins, config.train.seed);
  if (config.mirror) data = AugmentMirror(data);

  BcTrainResult result;
  BcModel& m = result.model;
  m.features = spec;
  m.feature_min.assign(n_features, std::numeric_limits<double>::infinity());
  m.feature_max.assign(n_features, -std::numeric_limits<double>::infinity());
  for (const DatasetRow& r : data) {
    for (std::size_t i = 0; i < n_features; ++i) {
      m.feature_min[i] = std::min(m.feature_min[i], r.features[i]);
      m.feature_max[i] = std::max(m.feature_max[i], r.features[i]);
    }
  }

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n_features), static_cast<Eigen::Index>(data.size()));
  Eigen::MatrixXd y(2, static_cast<Eigen::Index>(data.size()));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    x.col(col) = m.Normalize(data[k].features);
    y(0, col) = data[k].steering;
    y(1, col) = data[k].throttle;
  }

  std::vector<int> sizes = {spec.size()};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(2);
  TrainResult trained = TrainMlp(Mlp::Random(sizes, config.train.seed), x, y, config.train);
  m.net = std::move(trained.model);
  result.loss_curve = trained.loss_curve;
  result.rows_used = data.size();
  m.metadata = {{"seed", config.train.seed},
                {"epochs", config.train.epochs},
                {"batch_size", config.train.batch_size},
                {"lr", config.train.adam.lr},
                {"rows", data.size()},
                {"loss_curve", result.loss_curve}};
  return result;
}

BcDriver::BcDriver(BcModel model, double wheel_radius)
    : model_(std::move(model)), featurizer_(model_.features, wheel_radius) {}

void BcDriver::Reset() {
  featurizer_.Reset();
  last_ = {};
}

DriveCommand BcDriver::Step(const SensorFrame& frame) {
  if (const auto f = featurizer_.Observe(frame)) {
    last_ = model_.Predict(*f);
    if (throttle_override_) last_.throttle = std::clamp(*throttle_override_, -1.0, 1.0);
  }
  return last_;
}

LapCounter::LapCounter(const Scene& scene) : scene_(scene), length_(CenterlineLength(scene)) {}

void LapCounter::Reset() {
  last_progress_.reset();
  distance_ = 0.0;
  laps_ = 0;
}

bool LapCounter::Update(Vec2 position) {
  const double s = CenterlineProgress(scene_, position);
  if (!last_progress_) {
    last_progress_ = s;
    return false;
  }
  double ds = s - *last_progress_;
  if (ds > 0.5 * length_) ds -= length_;
  if (ds < -0.5 * length_) ds += length_;
  last_progress_ = s;
  distance_ += ds;
  // The tolerance absorbs rounding when a path closes exactly on itself.
  const int laps = static_cast<int>(std::floor(distance_ / length_ + 1e-9));
  if (laps > laps_) {
    laps_ = laps;
    return true;
  }
  return false;
}

Vec2 CenterlinePoint(const Scene& scene, double s) {
  const auto& c = scene.centerline;
  const double total = CenterlineLength(scene);
  s = std::fmod(s, total);
  if (s < 0.0) s += total;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec2 a = c[i];
    const Vec2 e = c[(i + 1) % c.size()] - a;
    const double len = Norm(e);
    if (s <= len && len > 0.0) return a + (s / len) * e;
    s -= len;
  }
  return c.front();
}

Demonstrator::Demonstrator(const Scene& scene, double wheelbase, double max_steer,
                           DemonstratorParams params, std::uint64_t seed)
    : scene_(scene),
      wheelbase_(wheelbase),
      max_steer_(max_steer),
      params_(params),
      rng_(RngStream::ForChannel(seed, "demonstrator")) {
  if (scene_.centerline.size() < 2) throw std::invalid_argument("scene has no centerline");
}

Demonstrator::Output Demonstrator::Step(const Pose2& pose, double dt) {
  const double s = CenterlineProgress(scene_, pose.position());
  const Vec2 target = CenterlinePoint(scene_, s + params_.lookahead);
  const Vec2 d = target - pose.position();
  const double alpha = WrapAngle(std::atan2(d.y, d.x) - pose.yaw);
  const double ld = std::max(Norm(d), 1e-6);
  const double delta = std::atan(2.0 * wheelbase_ * std::sin(alpha) / ld);

  // Exact discretization of the OU process.
  const double decay = std::exp(-params_.ou_theta * dt);
  const double spread =
      params_.ou_sigma * std::sqrt((1.0 - decay * decay) / (2.0 * params_.ou_theta));
  wander_ = decay * wander_ + spread * rng_.Normal();

  Output out;
  out.label = {params_.throttle, std::clamp(delta / max_steer_, -1.0, 1.0)};
  out.executed = {params_.throttle, std::clamp(out.label.steering + wander_, -1.0, 1.0)};
  return out;
}

}  // namespace minicar
