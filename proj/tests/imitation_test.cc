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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "minicar/core/error.h"
#include "minicar/core/rng.h"
#include "minicar/imitation/behavior_cloning.h"
#include "minicar/imitation/dataset.h"
#include "minicar/imitation/mlp.h"
#include "minicar/sim/recorder.h"

namespace minicar {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LidarScan ScanOf(double fill) {
  LidarScan s;
  s.ranges.assign(360, fill);
  s.angle_increment = kTwoPi / 360.0;
  return s;
}

Scene DrivingSchool() { return LoadSceneFile(MINICAR_DATA_DIR "/scenes/driving_school.json"); }

TEST(FeaturizeTest, NoReturnsReadAsOne) {
  const auto f = Featurize(ScanOf(kInf), 0.0, FeatureSpec{});
  ASSERT_EQ(f.size(), 37u);
  for (int k = 0; k < 36; ++k) EXPECT_EQ(f[k], 1.0);
  EXPECT_EQ(f[36], 0.0);
}

TEST(FeaturizeTest, RangeAndSpeedScaling) {
  LidarScan s = ScanOf(kInf);
  s.ranges[0] = 1.2;
  s.ranges[10] = 6.0;
  s.ranges[5] = 0.3;  // between sampled bearings, ignored
  const auto f = Featurize(s, 0.13, FeatureSpec{});
  EXPECT_NEAR(f[0], 0.1, 1e-15);
  EXPECT_NEAR(f[1], 0.5, 1e-15);
  EXPECT_EQ(f[2], 1.0);
  EXPECT_NEAR(f[36], 0.5, 1e-15);
}

TEST(FeaturizeTest, RejectsIncompatibleScan) {
  LidarScan s;
  s.ranges.assign(100, 1.0);
  EXPECT_THROW(Featurize(s, 0.0, FeatureSpec{}), std::invalid_argument);
  FeatureSpec bad;
  bad.beams = 7;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(FeaturizerTest, TenSecondsGiveSeventyRows) {
  SimulationConfig c;
  c.scene = DrivingSchool();
  Simulation sim(c);
  Featurizer feat(FeatureSpec{}, c.vehicle.wheel.radius);
  int rows = 0;
  double last_speed = 0.0;
  for (int i = 0; i < 5000; ++i) {
    sim.SetCommand({0.5, 0.0});
    if (feat.Observe(sim.Tick())) {
      ++rows;
      last_speed = feat.speed();
    }
  }
  EXPECT_EQ(rows, 70);
  // Encoder speed tracks the true forward speed.
  EXPECT_NEAR(last_speed, sim.state().v_x, 0.01);
}

DatasetRow RowWithSteering(double steering, int beams = 36) {
  DatasetRow r;
  r.features.assign(static_cast<std::size_t>(beams) + 1, 0.5);
  r.steering = steering;
  r.throttle = 0.5;
  return r;
}

int BinOf(double s, int bins) {
  return std::min(bins - 1, static_cast<int>(std::floor((s + 1.0) / 2.0 * bins)));
}

TEST(BalanceTest, UniformLabelsUnchanged) {
  std::vector<DatasetRow> rows;
  for (int b = 0; b < 21; ++b) {
    for (int k = 0; k < 5; ++k) rows.push_back(RowWithSteering(-1.0 + (b + 0.5) * 2.0 / 21.0));
  }
  EXPECT_EQ(BalanceDataset(rows, 21, 3), rows);
}

TEST(BalanceTest, DominantZeroBinCutToCap) {
  std::vector<DatasetRow> rows;
  RngStream rng(8);
  for (int i = 0; i < 900; ++i) rows.push_back(RowWithSteering(0.0));
  for (int i = 0; i < 100; ++i) rows.push_back(RowWithSteering(rng.Uniform(-1.0, -0.2)));
  // Oracle: histogram and cap computed here.
  std::vector<int> counts(21, 0);
  for (const auto& r : rows) ++counts[BinOf(r.steering, 21)];
  std::vector<int> nonzero;
  for (int c : counts) {
    if (c > 0) nonzero.push_back(c);
  }
  std::sort(nonzero.begin(), nonzero.end());
  const std::size_t m = nonzero.size();
  const double median = m % 2 ? nonzero[m / 2] : 0.5 * (nonzero[m / 2 - 1] + nonzero[m / 2]);
  const int cap = static_cast<int>(2.0 * median);

  const auto out = BalanceDataset(rows, 21, 1);
  std::vector<int> after(21, 0);
  for (const auto& r : out) ++after[BinOf(r.steering, 21)];
  EXPECT_EQ(after[10], cap);
  for (int b = 0; b < 21; ++b) {
    EXPECT_EQ(after[b], std::min(counts[b], cap)) << "bin " << b;
    if (counts[b] > 0) EXPECT_GT(after[b], 0);
  }
}

TEST(BalanceTest, SeededAndOrderPreserving) {
  std::vector<DatasetRow> rows;
  for (int i = 0; i < 300; ++i) {
    DatasetRow r = RowWithSteering(i % 10 == 0 ? 0.5 : i % 10 == 1 ? -0.5 : 0.0);
    r.t = i;
    rows.push_back(r);
  }
  const auto a = BalanceDataset(rows, 21, 4);
  EXPECT_EQ(a.size(), 120u);
  EXPECT_TRUE(a == BalanceDataset(rows, 21, 4));
  EXPECT_FALSE(a == BalanceDataset(rows, 21, 5));
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a[i - 1].t, a[i].t);
  EXPECT_THROW(BalanceDataset({}, 21, 0), std::invalid_argument);
}

TEST(MirrorTest, SymmetricScanIsFixedPoint) {
  DatasetRow r;
  for (int k = 0; k < 36; ++k) r.features.push_back(0.1 + 0.02 * std::min(k, 36 - k));
  r.features.push_back(0.3);
  r.steering = 0.0;
  EXPECT_EQ(MirrorRow(r, 36), r);
}

TEST(MirrorTest, NegatesSteeringAndReflectsBeams) {
  DatasetRow r = RowWithSteering(0.4);
  r.features[9] = 0.2;  // 90 degrees left
  const DatasetRow m = MirrorRow(r, 36);
  EXPECT_EQ(m.steering, -0.4);
  EXPECT_EQ(m.throttle, r.throttle);
  EXPECT_EQ(m.features[27], 0.2);  // 90 degrees right
  EXPECT_EQ(m.features[9], 0.5);
  EXPECT_EQ(m.features[36], r.features[36]);
}

TEST(MirrorTest, DoubleApplicationIsInvolution) {
  RngStream rng(2);
  std::vector<DatasetRow> rows;
  for (int i = 0; i < 20; ++i) {
    DatasetRow r;
    for (int k = 0; k < 37; ++k) r.features.push_back(rng.Uniform());
    r.steering = rng.Uniform(-1.0, 1.0);
    rows.push_back(r);
  }
  const auto twice = AugmentMirror(AugmentMirror(rows));
  ASSERT_EQ(twice.size(), 4 * rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(MirrorRow(MirrorRow(rows[i], 36), 36), rows[i]);
    EXPECT_EQ(twice[i], rows[i]);
    EXPECT_EQ(twice[i + rows.size()], MirrorRow(rows[i], 36));
    EXPECT_EQ(twice[i + 3 * rows.size()], rows[i]);
  }
}

TEST(DatasetIoTest, RoundTripAndSkipsOtherRecords) {
  const auto path = std::filesystem::temp_directory_path() / "minicar_dataset_test.jsonl";
  std::vector<DatasetRow> rows = {RowWithSteering(0.25), RowWithSteering(-0.5)};
  rows[1].lap_id = 3;
  rows[1].t = 1.5;
  SaveDataset(path, rows);
  {
    std::ofstream out(path, std::ios::app);
    out << R"({"type":"telemetry","t":1.0})" << '\n' << R"({"type":"summary","rows":2})" << '\n';
  }
  EXPECT_EQ(LoadDataset(path), rows);
  {
    std::ofstream out(path);
    out << R"({"type":"row","format_version":99,"features":[],"steering":0,"throttle":0})" << '\n';
  }
  EXPECT_THROW(LoadDataset(path), ParseError);
  std::filesystem::remove(path);
}

TEST(MlpTest, ZeroModelOutputsZero) {
  const Mlp m = Mlp::Zeros({37, 64, 32, 16, 2});
  const Eigen::VectorXd y = m.Forward(Eigen::VectorXd(Eigen::VectorXd::Constant(37, 0.7)));
  EXPECT_EQ(y(0), 0.0);
  EXPECT_EQ(y(1), 0.0);
}

TEST(MlpTest, SingleIdentityLayerPassesInput) {
  Mlp m = Mlp::Zeros({2, 2});
  m.weights(0).setIdentity();
  const Eigen::Vector2d x(0.3, -2.5);
  EXPECT_EQ(m.Forward(Eigen::VectorXd(x)), Eigen::VectorXd(x));
  const Eigen::VectorXd p = m.Predict(x);
  EXPECT_EQ(p(0), 0.3);
  EXPECT_EQ(p(1), -1.0);
}

TEST(MlpTest, SeededModelIsBitIdentical) {
  const Mlp a = Mlp::Random({37, 64, 32, 16, 2}, 9);
  const Mlp b = Mlp::Random({37, 64, 32, 16, 2}, 9);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(37, -1.0, 1.0);
  const Eigen::VectorXd ya = a.Forward(x), yb = b.Forward(x);
  EXPECT_EQ(ya(0), yb(0));
  EXPECT_EQ(ya(1), yb(1));
  EXPECT_EQ(a.ParameterCount(), 37u * 64 + 64 + 64 * 32 + 32 + 32 * 16 + 16 + 16 * 2 + 2);
  EXPECT_THROW(a.Forward(Eigen::VectorXd(Eigen::VectorXd::Zero(36))), std::invalid_argument);
}

TEST(MlpTest, PerfectPredictionHasZeroLossAndGradient) {
  const Mlp m = Mlp::Zeros({5, 4, 2});
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 8);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, 8);
  MlpGradients g;
  EXPECT_EQ(MseLoss(m, x, y, &g), 0.0);
  for (int l = 0; l < m.num_layers(); ++l) {
    EXPECT_EQ(g.weights[l].norm(), 0.0);
    EXPECT_EQ(g.biases[l].norm(), 0.0);
  }
}

double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Central differences with h = 1e-5 over every parameter.
double WorstGradientError(const std::vector<int>& sizes, std::uint64_t seed) {
  Mlp m = Mlp::Random(sizes, seed);
  RngStream rng(seed + 100);
  for (int l = 0; l < m.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < m.bias(l).size(); ++i) m.bias(l)(i) = rng.Uniform(-0.5, 0.5);
  }
  Eigen::MatrixXd x(sizes.front(), 6), y(sizes.back(), 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = rng.Uniform(-1.0, 1.0);
  MlpGradients g;
  MseLoss(m, x, y, &g);
  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& p, double analytic) {
    const double saved = p;
    p = saved + h;
    const double up = MseLoss(m, x, y);
    p = saved - h;
    const double down = MseLoss(m, x, y);
    p = saved;
    worst = std::max(worst, RelativeError(analytic, (up - down) / (2.0 * h)));
  };
  for (int l = 0; l < m.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < m.weights(l).size(); ++i) {
      check(m.weights(l).data()[i], g.weights[l].data()[i]);
    }
    for (Eigen::Index i = 0; i < m.bias(l).size(); ++i) check(m.bias(l)(i), g.biases[l](i));
  }
  return worst;
}

TEST(MlpTest, GradientMatchesCentralDifferences) {
  EXPECT_LT(WorstGradientError({37, 8, 2}, 1), 1e-4);
}

TEST(MlpTest, GradientCheckAcrossDepths) {
  const std::vector<std::vector<int>> configs = {
      {6, 5, 2}, {6, 5, 4, 2}, {6, 5, 4, 3, 2}, {6, 5, 4, 3, 3, 2}, {37, 64, 32, 16, 2}};
  for (const auto& sizes : configs) {
    EXPECT_LT(WorstGradientError(sizes, 7), 1e-4) << "hidden layers " << sizes.size() - 2;
  }
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  Mlp m = Mlp::Random({4, 3, 2}, 1);
  const Mlp before = m;
  AdamState s = AdamState::For(m);
  AdamStep(m, MlpGradients::ZerosLike(m), s, AdamParams{});
  EXPECT_EQ(s.step, 1);
  for (int l = 0; l < m.num_layers(); ++l) {
    EXPECT_EQ(m.weights(l), before.weights(l));
    EXPECT_EQ(m.bias(l), before.bias(l));
  }
}

TEST(AdamTest, FirstStepMovesEachCoordinateByLearningRate) {
  Mlp m = Mlp::Random({4, 3, 2}, 1);
  const Mlp before = m;
  MlpGradients g = MlpGradients::ZerosLike(m);
  RngStream rng(5);
  for (auto& w : g.weights) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.Uniform(-3.0, 3.0);
  }
  g.weights[0](0, 0) = 0.0;
  AdamState s = AdamState::For(m);
  const AdamParams p;
  AdamStep(m, g, s, p);
  for (int l = 0; l < m.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < m.weights(l).size(); ++i) {
      const double gi = g.weights[l].data()[i];
      const double delta = m.weights(l).data()[i] - before.weights(l).data()[i];
      // m_hat = g, v_hat = g^2, so the step is -lr * g / (|g| + eps).
      const double expected = gi == 0.0 ? 0.0 : -p.lr * gi / (std::abs(gi) + p.epsilon);
      EXPECT_NEAR(delta, expected, 1e-15);
    }
  }
}

struct ToyData {
  Eigen::MatrixXd x, y;
};

// Steering is the mean of two beam features; throttle a constant.
ToyData MakeToy(int n, std::uint64_t seed) {
  RngStream rng(seed);
  ToyData d{Eigen::MatrixXd(37, n), Eigen::MatrixXd(2, n)};
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < 37; ++r) d.x(r, c) = rng.Uniform(-1.0, 1.0);
    d.y(0, c) = 0.5 * (d.x(3, c) + d.x(20, c));
    d.y(1, c) = 0.5;
  }
  return d;
}

TEST(TrainTest, LearnsToyMapping) {
  const ToyData d = MakeToy(4096, 3);
  TrainParams p;
  p.seed = 11;
  const TrainResult r = TrainMlp(Mlp::Random({37, 64, 32, 16, 2}, 11), d.x, d.y, p);
  ASSERT_EQ(r.loss_curve.size(), 4u);
  EXPECT_LT(r.loss_curve[3], 0.1 * r.loss_curve[0]);
  EXPECT_TRUE(r.model.AllFinite());
}

TEST(TrainTest, ZeroEpochsReturnsInitialModel) {
  const ToyData d = MakeToy(64, 3);
  const Mlp init = Mlp::Random({37, 8, 2}, 2);
  TrainParams p;
  p.epochs = 0;
  const TrainResult r = TrainMlp(init, d.x, d.y, p);
  EXPECT_TRUE(r.loss_curve.empty());
  EXPECT_EQ(r.model.weights(0), init.weights(0));
}

TEST(TrainTest, SameSeedSameCurve) {
  const ToyData d = MakeToy(500, 4);
  TrainParams p;
  p.seed = 6;
  const auto a = TrainMlp(Mlp::Random({37, 16, 2}, 6), d.x, d.y, p);
  const auto b = TrainMlp(Mlp::Random({37, 16, 2}, 6), d.x, d.y, p);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  EXPECT_EQ(a.model.weights(0), b.model.weights(0));
}

std::vector<DatasetRow> RandomRows(int n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<DatasetRow> rows;
  for (int i = 0; i < n; ++i) {
    DatasetRow r;
    for (int k = 0; k < 37; ++k) r.features.push_back(rng.Uniform());
    r.steering = rng.Uniform(-0.8, 0.8);
    r.throttle = rng.Uniform(0.2, 0.6);
    rows.push_back(r);
  }
  return rows;
}

TEST(BcModelTest, OverfitSingleRowReproducesLabel) {
  DatasetRow row = RandomRows(1, 1)[0];
  row.steering = 0.3;
  row.throttle = 0.45;
  std::vector<DatasetRow> rows(64, row);
  rows[0].features[0] += 0.01;  // keep the scaling non-degenerate
  BcTrainConfig c;
  c.balance = false;
  c.mirror = false;
  c.train.epochs = 400;
  const BcTrainResult r = TrainBehaviorCloning(rows, FeatureSpec{}, c);
  const DriveCommand cmd = r.model.Predict(row.features);
  EXPECT_NEAR(cmd.steering, 0.3, 0.02);
  EXPECT_NEAR(cmd.throttle, 0.45, 0.02);
}

TEST(BcModelTest, JsonRoundTripPredictsIdentically) {
  BcTrainConfig c;
  c.train.seed = 3;
  const BcTrainResult r = TrainBehaviorCloning(RandomRows(200, 2), FeatureSpec{}, c);
  const BcModel loaded = BcModel::FromJson(Json::parse(r.model.ToJson().dump()));
  for (const DatasetRow& row : RandomRows(20, 9)) {
    const DriveCommand a = r.model.Predict(row.features);
    const DriveCommand b = loaded.Predict(row.features);
    EXPECT_EQ(a.steering, b.steering);
    EXPECT_EQ(a.throttle, b.throttle);
    EXPECT_LE(std::abs(a.steering), 1.0);
    EXPECT_LE(std::abs(a.throttle), 1.0);
  }
  EXPECT_EQ(loaded.metadata["epochs"], 4);
  Json bad = r.model.ToJson();
  bad["format_version"] = 2;
  EXPECT_THROW(BcModel::FromJson(bad), ParseError);
  bad = r.model.ToJson();
  bad["network"]["layers"][0]["bias"] = Json::array({1.0});
  EXPECT_THROW(BcModel::FromJson(bad), ParseError);
}

TEST(BcModelTest, OutputsAreClampedAtInference) {
  BcModel m;
  m.feature_min.assign(37, 0.0);
  m.feature_max.assign(37, 1.0);
  m.net = Mlp::Zeros({37, 2});
  m.net.bias(0) << 5.0, -7.0;
  const DriveCommand cmd = m.Predict(std::vector<double>(37, 0.5));
  EXPECT_EQ(cmd.steering, 1.0);
  EXPECT_EQ(cmd.throttle, -1.0);
}

TEST(BcDriverTest, HoldsCommandBetweenScans) {
  BcModel m;
  m.feature_min.assign(37, 0.0);
  m.feature_max.assign(37, 1.0);
  m.net = Mlp::Zeros({37, 2});
  m.net.bias(0) << 0.2, 0.6;
  BcDriver driver(m, 0.0325);
  SensorFrame frame;
  EXPECT_EQ(driver.Step(frame).throttle, 0.0);
  frame.lidar = ScanOf(2.0);
  const DriveCommand a = driver.Step(frame);
  EXPECT_EQ(a.steering, 0.2);
  EXPECT_EQ(a.throttle, 0.6);
  frame.lidar.reset();
  EXPECT_EQ(driver.Step(frame).steering, 0.2);
  driver.SetThrottleOverride(0.3);
  frame.lidar = ScanOf(2.0);
  EXPECT_EQ(driver.Step(frame).throttle, 0.3);
}

TEST(LapCounterTest, OneScriptedLoopIsOneLap) {
  const Scene s = DrivingSchool();
  LapCounter laps(s);
  const double len = CenterlineLength(s);
  const double start = CenterlineProgress(s, s.spawn.position());
  int completions = 0;
  for (int i = 0; i <= 1000; ++i) {
    completions += laps.Update(CenterlinePoint(s, start + len * i / 1000.0));
  }
  EXPECT_EQ(laps.laps(), 1);
  EXPECT_EQ(completions, 1);
  EXPECT_NEAR(laps.distance(), len, 1e-9);

  LapCounter backwards(s);
  for (int i = 0; i <= 1000; ++i) backwards.Update(CenterlinePoint(s, start - len * i / 1000.0));
  EXPECT_EQ(backwards.laps(), 0);
  EXPECT_NEAR(backwards.distance(), -len, 1e-9);
}

TEST(RecorderTest, TwoSecondsGiveFourteenRows) {
  SimulationConfig c;
  c.scene = DrivingSchool();
  Simulation sim(c);
  std::ostringstream out;
  Recorder rec(out, FeatureSpec{}, c.vehicle.wheel.radius, c.scene);
  for (int i = 0; i < 1000; ++i) {
    const DriveCommand cmd{0.5, 0.1};
    sim.SetCommand(cmd);
    sim.Tick();
    rec.Observe(sim, cmd);
  }
  rec.Finish();
  int rows = 0, telemetry = 0, summaries = 0;
  std::istringstream in(out.str());
  std::string line;
  double last_t = 0.0;
  while (std::getline(in, line)) {
    const Json j = Json::parse(line);
    if (j["type"] == "row") ++rows;
    if (j["type"] == "telemetry") {
      ++telemetry;
      EXPECT_GT(j["t"].get<double>(), last_t);
      last_t = j["t"];
    }
    if (j["type"] == "summary") {
      ++summaries;
      EXPECT_EQ(j["rows"], 14);
      EXPECT_NEAR(j["duration"].get<double>(), 2.0, 1e-9);
    }
  }
  EXPECT_EQ(rows, 14);
  EXPECT_EQ(telemetry, 1000);
  EXPECT_EQ(summaries, 1);
}

}  // namespace
}  // namespace minicar
