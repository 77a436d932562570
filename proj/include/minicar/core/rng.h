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

#ifndef MINICAR_CORE_RNG_H_
#define MINICAR_CORE_RNG_H_

#include <cstdint>
#include <string_view>

namespace minicar {

// Portable, seedable 64-bit generator. Every noise channel owns one stream so
// that adding draws on one channel never shifts another. The algorithm is
// fixed and documented in docs/RNG.md; std::*_distribution is deliberately
// not used since its output differs between standard library vendors.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  // Derives an independent stream for a named channel of a master seed.
  static RngStream ForChannel(std::uint64_t seed, std::string_view channel);

  // splitmix64.
  std::uint64_t NextU64();

  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform();

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal via Box-Muller. Uses two uniforms per draw and discards
  // the sine branch so that the draw count per sample is always two.
  double Normal();

  double Normal(double mean, double sigma) { return mean + sigma * Normal(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t UniformIndex(std::uint64_t n);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// splitmix64 finalizer, exposed for seed derivation.
std::uint64_t Mix64(std::uint64_t z);

// FNV-1a over the channel name.
std::uint64_t HashChannel(std::string_view channel);

}  // namespace minicar

#endif  // MINICAR_CORE_RNG_H_
