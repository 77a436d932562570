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


#include "minicar/imitation/mlp.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "minicar/core/error.h"
#include "minicar/core/rng.h"

namespace minicar {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("an MLP needs at least two layer sizes");
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.push_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
    biases_.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
}

Mlp Mlp::Zeros(const std::vector<int>& sizes) { return Mlp(sizes); }

Mlp Mlp::Random(const std::vector<int>& sizes, std::uint64_t seed) {
  Mlp m(sizes);
  RngStream rng = RngStream::ForChannel(seed, "mlp_init");
  for (auto& w : m.weights_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.Uniform(-limit, limit);
    }
  }
  return m;
}

std::size_t Mlp::ParameterCount() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

Eigen::MatrixXd Mlp::ForwardBatch(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_size()) {
    throw std::invalid_argument("input has " + std::to_string(x.rows()) + " features, model expects " +
                                std::to_string(input_size()));
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    a = l + 1 < weights_.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return a;
}

Eigen::VectorXd Mlp::Forward(const Eigen::VectorXd& x) const {
  return ForwardBatch(x).col(0);
}

Eigen::VectorXd Mlp::Predict(const Eigen::VectorXd& x) const {
  return Forward(x).cwiseMax(-1.0).cwiseMin(1.0);
}

bool Mlp::AllFinite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

Json Mlp::ToJson() const {
  Json layers = Json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) row.push_back(weights_[l](r, c));
      rows.push_back(std::move(row));
    }
    layers.push_back({{"weights", std::move(rows)},
                      {"bias", std::vector<double>(biases_[l].data(),
                                                   biases_[l].data() + biases_[l].size())}});
  }
  return {{"sizes", sizes_}, {"activation", "tanh"}, {"layers", std::move(layers)}};
}

Mlp Mlp::FromJson(const Json& j) {
  try {
    Mlp m(RequireArray(j, "sizes", "model.network").get<std::vector<int>>());
    const Json& layers = RequireArray(j, "layers", "model.network");
    if (layers.size() != m.weights_.size()) {
      throw ParseError("model.network.layers: expected " + std::to_string(m.weights_.size()) +
                       " layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string where = "model.network.layers[" + std::to_string(l) + "]";
      const auto rows = RequireArray(layers[l], "weights", where).get<std::vector<std::vector<double>>>();
      const auto bias = RequireArray(layers[l], "bias", where).get<std::vector<double>>();
      Eigen::MatrixXd& w = m.weights_[l];
      if (rows.size() != static_cast<std::size_t>(w.rows()) ||
          bias.size() != static_cast<std::size_t>(w.rows())) {
        throw ParseError(where + ": shape does not match sizes");
      }
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        if (rows[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(w.cols())) {
          throw ParseError(where + ": shape does not match sizes");
        }
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
          w(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        m.biases_[l](r) = bias[static_cast<std::size_t>(r)];
      }
    }
    if (!m.AllFinite()) throw ValidationError("model.network: non-finite parameter");
    return m;
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("model.network: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model.network.sizes: ") + e.what());
  }
}

MlpGradients MlpGradients::ZerosLike(const Mlp& model) {
  MlpGradients g;
  for (int l = 0; l < model.num_layers(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(model.weights(l).rows(), model.weights(l).cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(model.bias(l).size()));
  }
  return g;
}

double MseLoss(const Mlp& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
               MlpGradients* grads) {
  if (x.rows() != model.input_size() || y.rows() != model.output_size() || x.cols() != y.cols() ||
      x.cols() == 0) {
    throw std::invalid_argument("batch shape does not match the model");
  }
  const int n_layers = model.num_layers();
  std::vector<Eigen::MatrixXd> acts;  // acts[l] is the input to layer l
  acts.reserve(static_cast<std::size_t>(n_layers) + 1);
  acts.push_back(x);
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = model.weights(l) * acts.back();
    z.colwise() += model.bias(l);
    if (l + 1 < n_layers) z = z.array().tanh().matrix();
    acts.push_back(std::move(z));
  }
  const Eigen::MatrixXd err = acts.back() - y;
  const double count = static_cast<double>(err.size());
  const double loss = err.squaredNorm() / count;
  if (grads == nullptr) return loss;

  *grads = MlpGradients::ZerosLike(model);
  Eigen::MatrixXd delta = (2.0 / count) * err;
  for (int l = n_layers - 1; l >= 0; --l) {
    const auto li = static_cast<std::size_t>(l);
    grads->weights[li] = delta * acts[li].transpose();
    grads->biases[li] = delta.rowwise().sum();
    if (l > 0) {
      delta = (model.weights(l).transpose() * delta).cwiseProduct(
          (1.0 - acts[li].array().square()).matrix());
    }
  }
  return loss;
}

AdamState AdamState::For(const Mlp& model) {
  return {MlpGradients::ZerosLike(model), MlpGradients::ZerosLike(model), 0};
}

void AdamStep(Mlp& model, const MlpGradients& grads, AdamState& state, const AdamParams& p) {
  ++state.step;
  const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(state.step));
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = p.beta1 * m + (1.0 - p.beta1) * g;
    v = p.beta2 * v + (1.0 - p.beta2) * g.cwiseProduct(g);
    param.array() -= p.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + p.epsilon);
  };
  for (int l = 0; l < model.num_layers(); ++l) {
    const auto li = static_cast<std::size_t>(l);
    update(model.weights(l), grads.weights[li], state.m.weights[li], state.v.weights[li]);
    update(model.bias(l), grads.biases[li], state.m.biases[li], state.v.biases[li]);
  }
}

TrainResult TrainMlp(Mlp model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     const TrainParams& params) {
  if (params.epochs < 0 || params.batch_size <= 0) {
    throw std::invalid_argument("epochs must be >= 0 and batch_size > 0");
  }
  if (x.cols() != y.cols()) throw std::invalid_argument("x and y sample counts differ");
  TrainResult result{std::move(model), {}};
  if (params.epochs == 0) return result;
  if (x.cols() == 0) throw std::invalid_argument("cannot train on an empty dataset");

  const Eigen::Index n = x.cols();
  RngStream rng = RngStream::ForChannel(params.seed, "shuffle");
  AdamState adam = AdamState::For(result.model);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  MlpGradients grads;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.UniformIndex(i + 1)]);
    }
    double total = 0.0;
    for (Eigen::Index start = 0; start < n; start += params.batch_size) {
      const Eigen::Index len = std::min<Eigen::Index>(params.batch_size, n - start);
      Eigen::MatrixXd bx(x.rows(), len), by(y.rows(), len);
      for (Eigen::Index k = 0; k < len; ++k) {
        bx.col(k) = x.col(order[static_cast<std::size_t>(start + k)]);
        by.col(k) = y.col(order[static_cast<std::size_t>(start + k)]);
      }
      const double loss = MseLoss(result.model, bx, by, &grads);
      if (!std::isfinite(loss)) throw std::runtime_error("training loss became non-finite");
      total += loss * static_cast<double>(len);
      AdamStep(result.model, grads, adam, params.adam);
    }
    result.loss_curve.push_back(total / static_cast<double>(n));
  }
  return result;
}

}  // namespace minicar
