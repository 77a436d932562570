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


#ifndef MINICAR_IMITATION_MLP_H_
#define MINICAR_IMITATION_MLP_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "minicar/core/json_util.h"

namespace minicar {

// Feedforward network: affine + tanh on hidden layers, affine output.
// Batches are column-major: one sample per column.
class Mlp {
 public:
  static Mlp Zeros(const std::vector<int>& sizes);
  // Glorot-uniform weights, zero biases.
  static Mlp Random(const std::vector<int>& sizes, std::uint64_t seed);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  std::size_t ParameterCount() const;

  Eigen::MatrixXd& weights(int l) { return weights_[static_cast<std::size_t>(l)]; }
  const Eigen::MatrixXd& weights(int l) const { return weights_[static_cast<std::size_t>(l)]; }
  Eigen::VectorXd& bias(int l) { return biases_[static_cast<std::size_t>(l)]; }
  const Eigen::VectorXd& bias(int l) const { return biases_[static_cast<std::size_t>(l)]; }

  // Raw network output. Throws std::invalid_argument on a size mismatch.
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd Forward(const Eigen::VectorXd& x) const;
  // Forward output clamped to [-1, 1].
  Eigen::VectorXd Predict(const Eigen::VectorXd& x) const;

  bool AllFinite() const;
  Json ToJson() const;
  static Mlp FromJson(const Json& j);

 private:
  explicit Mlp(std::vector<int> sizes);

  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // layer l maps sizes[l] -> sizes[l + 1]
  std::vector<Eigen::VectorXd> biases_;
};

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpGradients ZerosLike(const Mlp& model);
};

// Mean squared error over every output of every sample, and its exact
// gradient with respect to all parameters when `grads` is given.
double MseLoss(const Mlp& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
               MlpGradients* grads = nullptr);

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  MlpGradients m;
  MlpGradients v;
  long step = 0;

  static AdamState For(const Mlp& model);
};

void AdamStep(Mlp& model, const MlpGradients& grads, AdamState& state, const AdamParams& params);

struct TrainParams {
  int epochs = 4;
  int batch_size = 64;
  AdamParams adam;
  std::uint64_t seed = 0;
};

struct TrainResult {
  Mlp model;
  // Mean per-sample loss of each epoch, accumulated while training.
  std::vector<double> loss_curve;
};

// Minibatch Adam on (x, y), reshuffled every epoch from `seed`.
TrainResult TrainMlp(Mlp model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     const TrainParams& params);

}  // namespace minicar

#endif  // MINICAR_IMITATION_MLP_H_
