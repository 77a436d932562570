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


#include "minicar/autonomy/localization.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minicar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stand-in for "no occupied cell"; large but finite so the parabola
// intersections stay well defined.
constexpr double kFar = 1e20;

// Felzenszwalb-Huttenlocher 1D squared distance transform of f into d.
void DistanceTransform1D(const double* f, double* d, int n, std::vector<int>& v,
                         std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

Pose2 ComposePose(const Pose2& pose, const Pose2& delta) {
  const Vec2 p = pose.position() + Rotate(delta.position(), pose.yaw);
  return {p.x, p.y, WrapAngle(pose.yaw + delta.yaw)};
}

Pose2 OdometryUpdate(const SensorFrame& prev, const SensorFrame& curr, double wheel_radius,
                     int cpr) {
  const double ticks = 0.5 * static_cast<double>((curr.encoder_left - prev.encoder_left) +
                                                 (curr.encoder_right - prev.encoder_right));
  const double distance = ticks * kTwoPi * wheel_radius / cpr;
  const double dyaw = WrapAngle(curr.imu.yaw - prev.imu.yaw);
  return {distance * std::cos(0.5 * dyaw), distance * std::sin(0.5 * dyaw), dyaw};
}

LikelihoodField::LikelihoodField(const OccupancyGrid& grid, double occupied_threshold)
    : grid_(grid) {
  const int w = grid.width(), h = grid.height();
  const double l_threshold = ProbabilityToLogOdds(occupied_threshold);
  std::vector<double> f(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[y * w + x] = grid.LogOdds({x, y}) > l_threshold ? 0.0 : kFar;
  }
  const int n = std::max(w, h);
  std::vector<double> in(n), out(n), z(n + 1);
  std::vector<int> v(n);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) in[y] = f[y * w + x];
    DistanceTransform1D(in.data(), out.data(), h, v, z);
    for (int y = 0; y < h; ++y) f[y * w + x] = out[y];
  }
  distance_.resize(f.size());
  for (int y = 0; y < h; ++y) {
    DistanceTransform1D(&f[y * w], out.data(), w, v, z);
    for (int x = 0; x < w; ++x) {
      distance_[y * w + x] = out[x] >= 0.5 * kFar ? kInf : std::sqrt(out[x]) * grid.resolution();
    }
  }
}

double LikelihoodField::Distance(Vec2 p) const {
  const GridIndex c = grid_.CellOf(p);
  if (!grid_.Contains(c)) return kInf;
  return distance_[static_cast<std::size_t>(c.y) * grid_.width() + c.x];
}

ParticleFilter::ParticleFilter(const OccupancyGrid& static_map, const MclParams& params,
                               RngStream rng)
    : params_(params), field_(static_map, params.occupied_threshold), rng_(rng) {
  for (int y = 0; y < static_map.height(); ++y) {
    for (int x = 0; x < static_map.width(); ++x) {
      if (static_map.LogOdds({x, y}) < 0.0) free_cells_.push_back({x, y});
    }
  }
}

void ParticleFilter::InitializeGaussian(const Pose2& mean, double sigma_xy, double sigma_yaw,
                                        int count) {
  count = std::clamp(count, params_.min_particles, params_.max_particles);
  particles_.assign(static_cast<std::size_t>(count), {});
  for (Particle& p : particles_) {
    p.pose.x = rng_.Normal(mean.x, sigma_xy);
    p.pose.y = rng_.Normal(mean.y, sigma_xy);
    p.pose.yaw = WrapAngle(rng_.Normal(mean.yaw, sigma_yaw));
    p.weight = 1.0 / count;
  }
}

void ParticleFilter::InitializeUniform(int count) {
  count = std::clamp(count, params_.min_particles, params_.max_particles);
  const OccupancyGrid& g = field_.grid();
  particles_.assign(static_cast<std::size_t>(count), {});
  for (Particle& p : particles_) {
    GridIndex c;
    if (free_cells_.empty()) {
      c = {static_cast<int>(rng_.UniformIndex(static_cast<std::uint64_t>(g.width()))),
           static_cast<int>(rng_.UniformIndex(static_cast<std::uint64_t>(g.height())))};
    } else {
      c = free_cells_[rng_.UniformIndex(free_cells_.size())];
    }
    const Vec2 corner = g.CellCenter(c) - Vec2{0.5 * g.resolution(), 0.5 * g.resolution()};
    p.pose.x = corner.x + rng_.Uniform() * g.resolution();
    p.pose.y = corner.y + rng_.Uniform() * g.resolution();
    p.pose.yaw = WrapAngle(rng_.Uniform(-kPi, kPi));
    p.weight = 1.0 / count;
  }
}

double ParticleFilter::ScanLogLikelihood(const Pose2& pose, const LidarScan& scan,
                                         double sigma) const {
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  double total = 0.0;
  for (std::size_t i = 0; i < scan.ranges.size(); i += static_cast<std::size_t>(params_.beam_stride)) {
    const double r = scan.ranges[i];
    if (!std::isfinite(r)) continue;
    const double bearing = pose.yaw + scan.angle_min + static_cast<double>(i) * scan.angle_increment;
    const Vec2 end = pose.position() + r * Vec2{std::cos(bearing), std::sin(bearing)};
    const double d = field_.Distance(end);
    const double hit = std::isfinite(d) ? std::exp(-d * d * inv_two_sigma2) : 0.0;
    total += std::log(params_.floor + (1.0 - params_.floor) * hit);
  }
  return total;
}

MclUpdateResult ParticleFilter::Update(const Pose2& odom_delta, const LidarScan* scan) {
  MclUpdateResult result;
  const double step = Norm(odom_delta.position());
  const double s_xy = params_.jitter_xy_base + params_.jitter_xy_gain * step;
  const double s_yaw = params_.jitter_yaw_base + params_.jitter_yaw_gain * std::abs(odom_delta.yaw);
  for (Particle& p : particles_) {
    const Pose2 noisy{odom_delta.x + rng_.Normal(0.0, s_xy), odom_delta.y + rng_.Normal(0.0, s_xy),
                      odom_delta.yaw + rng_.Normal(0.0, s_yaw)};
    p.pose = ComposePose(p.pose, noisy);
  }
  if (scan == nullptr) return result;

  const std::size_t n = particles_.size();
  const double sigma = std::max(params_.sigma_hit, params_.anneal_gain * PositionStd());
  std::vector<double> log_prior(n), log_like(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_prior[i] = std::log(particles_[i].weight);
    log_like[i] = ScanLogLikelihood(particles_[i].pose, *scan, sigma);
  }
  // Normalized weights for exponent beta, returning their ESS (0 on
  // underflow).
  std::vector<double> w(n);
  auto weigh = [&](double beta) {
    double best = -kInf;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, log_prior[i] + beta * log_like[i]);
    if (!std::isfinite(best)) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::exp(log_prior[i] + beta * log_like[i] - best);
      sum += w[i];
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) return 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= sum;
      sq += w[i] * w[i];
    }
    return 1.0 / sq;
  };
  const double ess_floor = params_.min_ess_fraction * static_cast<double>(n);
  double beta = 1.0;
  double ess = weigh(beta);
  if (ess > 0.0 && ess < ess_floor) {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 30; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (weigh(mid) >= ess_floor ? lo : hi) = mid;
    }
    beta = lo;
    ess = weigh(beta);
  }
  if (!(ess > 0.0)) {
    InitializeUniform(params_.max_particles);
    result.recovered = true;
    return result;
  }
  result.temper = beta;
  for (std::size_t i = 0; i < n; ++i) particles_[i].weight = w[i];
  Normalize();
  if (EffectiveSampleSize() < 0.5 * static_cast<double>(particles_.size())) {
    Resample(TargetCount());
    result.resampled = true;
  }
  return result;
}

void ParticleFilter::Normalize() {
  double sum = 0.0;
  for (const Particle& p : particles_) sum += p.weight;
  for (Particle& p : particles_) p.weight /= sum;
}

double ParticleFilter::EffectiveSampleSize() const {
  double sq = 0.0;
  for (const Particle& p : particles_) sq += p.weight * p.weight;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

int ParticleFilter::TargetCount() const {
  const double frac = std::min(1.0, PositionStd() / params_.dispersion_full_scale);
  const int n = params_.min_particles +
                static_cast<int>(std::lround(frac * (params_.max_particles - params_.min_particles)));
  return std::clamp(n, params_.min_particles, params_.max_particles);
}

std::vector<Particle> LowVarianceResample(const std::vector<Particle>& particles, int count,
                                          RngStream& rng) {
  std::vector<Particle> out;
  out.reserve(static_cast<std::size_t>(count));
  const double inv = 1.0 / count;
  const double r = rng.Uniform() * inv;
  double c = particles[0].weight;
  std::size_t i = 0;
  for (int m = 0; m < count; ++m) {
    const double u = r + m * inv;
    while (u > c && i + 1 < particles.size()) c += particles[++i].weight;
    out.push_back({particles[i].pose, inv});
  }
  return out;
}

void ParticleFilter::Resample(int count) {
  // Regularization bandwidth from the pre-resampling spread (Silverman's
  // rule for a 3-D Gaussian kernel).
  const Pose2 mean = Estimate();
  double var_x = 0.0, var_y = 0.0, var_yaw = 0.0;
  for (const Particle& p : particles_) {
    var_x += p.weight * (p.pose.x - mean.x) * (p.pose.x - mean.x);
    var_y += p.weight * (p.pose.y - mean.y) * (p.pose.y - mean.y);
    const double dyaw = WrapAngle(p.pose.yaw - mean.yaw);
    var_yaw += p.weight * dyaw * dyaw;
  }
  const double h = params_.regularization *
                   std::pow(4.0 / 5.0, 1.0 / 7.0) * std::pow(static_cast<double>(count), -1.0 / 7.0);

  std::vector<Particle> out = LowVarianceResample(particles_, count, rng_);
  if (h > 0.0) {
    const double sx = h * std::sqrt(var_x), sy = h * std::sqrt(var_y), syaw = h * std::sqrt(var_yaw);
    for (Particle& p : out) {
      p.pose.x += rng_.Normal(0.0, sx);
      p.pose.y += rng_.Normal(0.0, sy);
      p.pose.yaw = WrapAngle(p.pose.yaw + rng_.Normal(0.0, syaw));
    }
  }
  particles_ = std::move(out);
}

Pose2 ParticleFilter::Estimate() const {
  double x = 0.0, y = 0.0, s = 0.0, c = 0.0;
  for (const Particle& p : particles_) {
    x += p.weight * p.pose.x;
    y += p.weight * p.pose.y;
    s += p.weight * std::sin(p.pose.yaw);
    c += p.weight * std::cos(p.pose.yaw);
  }
  return {x, y, std::atan2(s, c)};
}

double ParticleFilter::PositionStd() const {
  const Pose2 m = Estimate();
  double var = 0.0;
  for (const Particle& p : particles_) {
    const double dx = p.pose.x - m.x, dy = p.pose.y - m.y;
    var += p.weight * (dx * dx + dy * dy);
  }
  return std::sqrt(var);
}

}  // namespace minicar
