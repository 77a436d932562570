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

#ifndef MINICAR_CORE_ERROR_H_
#define MINICAR_CORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace minicar {

// Invalid configuration value. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (scene, dataset, model, wire message).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry or data failing a semantic check after parsing.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The integrator produced or was handed a non-finite state.
class IntegrationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Planner failures carry the reason so callers can branch on it.
class PlanningError : public std::runtime_error {
 public:
  enum class Kind { kUnreachable, kInvalidEndpoint };

  PlanningError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace minicar

#endif  // MINICAR_CORE_ERROR_H_
