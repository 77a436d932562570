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

#include "minicar/dynamics/friction_curve.h"

#include <cmath>
#include <sstream>

#include "minicar/core/error.h"

namespace minicar {

namespace {

// Hermite cubic on [s0, s1] expanded into monomial coefficients of S.
Cubic HermitePiece(double s0, double y0, double m0, double s1, double y1, double m1) {
  const double h = s1 - s0;
  const double secant = (y1 - y0) / h;
  // Coefficients in t = S - s0.
  const double c2 = (3.0 * secant - 2.0 * m0 - m1) / h;
  const double c3 = (m0 + m1 - 2.0 * secant) / (h * h);

  Cubic p;
  p.a = c3;
  p.b = c2 - 3.0 * c3 * s0;
  p.c = m0 - 2.0 * c2 * s0 + 3.0 * c3 * s0 * s0;
  p.d = y0 - m0 * s0 + c2 * s0 * s0 - c3 * s0 * s0 * s0;
  return p;
}

}  // namespace

FrictionCurve FrictionCurve::Fit(SlipPoint origin, SlipPoint extremum, SlipPoint asymptote,
                                 double initial_slope) {
  if (!(origin.slip < extremum.slip && extremum.slip < asymptote.slip)) {
    std::ostringstream msg;
    msg << "friction curve anchors must satisfy S0 < Se < Sa, got " << origin.slip << ", "
        << extremum.slip << ", " << asymptote.slip;
    throw ConfigError(msg.str());
  }
  if (std::abs(extremum.force) < std::abs(origin.force) ||
      std::abs(extremum.force) < std::abs(asymptote.force)) {
    throw ConfigError("friction curve extremum must carry the largest |force|");
  }
  if (!std::isfinite(initial_slope)) throw ConfigError("friction curve initial slope not finite");

  FrictionCurve curve;
  curve.origin_ = origin;
  curve.extremum_ = extremum;
  curve.asymptote_ = asymptote;
  curve.initial_slope_ = initial_slope;
  curve.pieces_[0] = HermitePiece(origin.slip, origin.force, initial_slope, extremum.slip,
                                  extremum.force, 0.0);
  curve.pieces_[1] =
      HermitePiece(extremum.slip, extremum.force, 0.0, asymptote.slip, asymptote.force, 0.0);
  return curve;
}

double FrictionCurve::Evaluate(double slip) const {
  if (slip < 0.0) return -Evaluate(-slip);
  if (slip >= asymptote_.slip) return asymptote_.force;
  if (slip >= extremum_.slip) return pieces_[1].Value(slip);
  return pieces_[0].Value(slip);
}

double FrictionCurve::Derivative(double slip) const {
  // F is odd, so F' is even.
  const double s = std::abs(slip);
  if (s >= asymptote_.slip) return 0.0;
  if (s >= extremum_.slip) return pieces_[1].Slope(s);
  return pieces_[0].Slope(s);
}

}  // namespace minicar
