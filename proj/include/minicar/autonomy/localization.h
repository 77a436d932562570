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


#ifndef MINICAR_AUTONOMY_LOCALIZATION_H_
#define MINICAR_AUTONOMY_LOCALIZATION_H_

#include <vector>

#include "minicar/autonomy/occupancy_grid.h"
#include "minicar/core/geometry.h"
#include "minicar/core/rng.h"
#include "minicar/sensors/sensors.h"

namespace minicar {

// Body-frame pose increment between two sensor frames. Distance from the
// mean rear-encoder tick delta, heading change from the IMU yaw, composed
// as a unicycle arc (midpoint heading).
Pose2 OdometryUpdate(const SensorFrame& prev, const SensorFrame& curr, double wheel_radius,
                     int cpr = kEncoderCpr);

// Applies a body-frame increment.
Pose2 ComposePose(const Pose2& pose, const Pose2& delta);

// Distance (m) from every cell to the nearest cell with p > threshold,
// exact Euclidean transform.
class LikelihoodField {
 public:
  LikelihoodField() = default;
  LikelihoodField(const OccupancyGrid& grid, double occupied_threshold = 0.65);

  // Distance from `p` to the nearest occupied cell center; +inf outside the
  // grid or when the map is empty.
  double Distance(Vec2 p) const;
  const OccupancyGrid& grid() const { return grid_; }

 private:
  OccupancyGrid grid_;
  std::vector<double> distance_;
};

struct MclParams {
  int min_particles = 100;
  int max_particles = 2000;
  int beam_stride = 10;
  double sigma_hit = 0.05;    // m
  double floor = 0.05;        // uniform mixture weight
  double occupied_threshold = 0.65;
  // Motion jitter: sigma = base + gain * |increment|.
  double jitter_xy_base = 0.003;
  double jitter_xy_gain = 0.1;
  double jitter_yaw_base = 0.005;
  double jitter_yaw_gain = 0.1;
  // The scan likelihood is raised to the largest power <= 1 that keeps the
  // effective sample size above this fraction of the set, so one lucky
  // particle cannot take over a widely spread set in a single update.
  double min_ess_fraction = 0.3;
  // While the set is spread out the hit model is widened to
  // max(sigma_hit, anneal_gain * position std), smoothing the likelihood
  // so that near misses still rank above distant hypotheses.
  double anneal_gain = 0.5;
  // Scale on the kernel bandwidth used to jitter particles after resampling
  // (regularized particle filter); 0 disables it.
  double regularization = 1.0;
  // Spread (m) that maps to max_particles when adapting the count.
  double dispersion_full_scale = 0.5;
};

struct Particle {
  Pose2 pose;
  double weight = 0.0;
};

// Low-variance (systematic) resampling to `count` equally weighted
// particles. Weights must be normalized.
std::vector<Particle> LowVarianceResample(const std::vector<Particle>& particles, int count,
                                          RngStream& rng);

struct MclUpdateResult {
  bool resampled = false;
  double temper = 1.0;  // exponent applied to the scan likelihood
  // All weights underflowed and the set was re-spread uniformly.
  bool recovered = false;
};

class ParticleFilter {
 public:
  ParticleFilter(const OccupancyGrid& static_map, const MclParams& params, RngStream rng);

  void InitializeGaussian(const Pose2& mean, double sigma_xy, double sigma_yaw, int count);
  // Uniform over cells observed free (p < 0.5), uniform yaw.
  void InitializeUniform(int count);

  // Motion update by a body-frame increment, then (when `scan` is given)
  // measurement update, normalization, resampling and count adaptation.
  MclUpdateResult Update(const Pose2& odom_delta, const LidarScan* scan);

  // Weighted mean with circular mean for yaw.
  Pose2 Estimate() const;
  // Weighted standard deviation of position (sqrt of var x + var y).
  double PositionStd() const;
  double EffectiveSampleSize() const;

  const std::vector<Particle>& particles() const { return particles_; }
  const LikelihoodField& field() const { return field_; }
  const MclParams& params() const { return params_; }

  // Log-likelihood of a scan from `pose` against the field.
  double ScanLogLikelihood(const Pose2& pose, const LidarScan& scan) const {
    return ScanLogLikelihood(pose, scan, params_.sigma_hit);
  }
  double ScanLogLikelihood(const Pose2& pose, const LidarScan& scan, double sigma) const;

 private:
  void Normalize();
  void Resample(int count);
  int TargetCount() const;

  MclParams params_;
  LikelihoodField field_;
  RngStream rng_;
  std::vector<Particle> particles_;
  std::vector<GridIndex> free_cells_;
};

}  // namespace minicar

#endif  // MINICAR_AUTONOMY_LOCALIZATION_H_
