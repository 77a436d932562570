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

#include "minicar/core/json_util.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "minicar/core/error.h"

namespace minicar {

namespace {

std::string Join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

}  // namespace

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const Json& doc, int indent) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(indent) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

double RequireNumber(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(Join(where, key) + ": missing required number");
  }
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(Join(where, key) + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(Join(where, key) + ": must be finite");
  return d;
}

double NumberOr(const Json& obj, const std::string& key, double fallback,
                const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return RequireNumber(obj, key, where);
}

const Json& RequireObject(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_object()) {
    throw ConfigError(Join(where, key) + ": missing required object");
  }
  return obj.at(key);
}

const Json& RequireArray(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_array()) {
    throw ConfigError(Join(where, key) + ": missing required array");
  }
  return obj.at(key);
}

}  // namespace minicar
