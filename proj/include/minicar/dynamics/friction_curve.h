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

#ifndef MINICAR_DYNAMICS_FRICTION_CURVE_H_
#define MINICAR_DYNAMICS_FRICTION_CURVE_H_

#include <array>

namespace minicar {

struct SlipPoint {
  double slip = 0.0;   // dimensionless
  double force = 0.0;  // normalized by normal load
};

// Cubic a*S^3 + b*S^2 + c*S + d.
struct Cubic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double Value(double s) const { return ((a * s + b) * s + c) * s + d; }
  double Slope(double s) const { return (3.0 * a * s + 2.0 * b) * s + c; }
};

// Normalized tire force versus slip: cubic from the origin anchor to the
// extremum, cubic from the extremum to the asymptote, constant beyond, odd
// extension for negative slip.
//
// The two cubics are Hermite pieces: piece 0 matches both anchor values, the
// configured slope at the origin anchor and zero slope at the extremum;
// piece 1 matches both anchor values and has zero slope at both ends.
class FrictionCurve {
 public:
  // Throws ConfigError unless origin.slip < extremum.slip < asymptote.slip and
  // the extremum has the largest |force| of the three.
  static FrictionCurve Fit(SlipPoint origin, SlipPoint extremum, SlipPoint asymptote,
                           double initial_slope);

  double Evaluate(double slip) const;
  double Derivative(double slip) const;

  const SlipPoint& origin() const { return origin_; }
  const SlipPoint& extremum() const { return extremum_; }
  const SlipPoint& asymptote() const { return asymptote_; }
  double initial_slope() const { return initial_slope_; }
  const std::array<Cubic, 2>& pieces() const { return pieces_; }

 private:
  SlipPoint origin_;
  SlipPoint extremum_;
  SlipPoint asymptote_;
  double initial_slope_ = 0.0;
  std::array<Cubic, 2> pieces_;
};

}  // namespace minicar

#endif  // MINICAR_DYNAMICS_FRICTION_CURVE_H_
