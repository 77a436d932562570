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

#ifndef MINICAR_CORE_JSON_UTIL_H_
#define MINICAR_CORE_JSON_UTIL_H_

#include <filesystem>
#include <string>

#include "json.hpp"

namespace minicar {

using Json = nlohmann::json;

// Reads and parses a JSON file. Parse failures become ParseError carrying the
// path and the byte offset reported by the parser.
Json ReadJsonFile(const std::filesystem::path& path);

// Writes `doc` followed by a newline.
void WriteJsonFile(const std::filesystem::path& path, const Json& doc, int indent = 2);

// Keyed accessors used by config loaders. `where` is the dotted path of the
// enclosing object and is prefixed to every error message.
double RequireNumber(const Json& obj, const std::string& key, const std::string& where);
double NumberOr(const Json& obj, const std::string& key, double fallback,
                const std::string& where);
const Json& RequireObject(const Json& obj, const std::string& key, const std::string& where);
const Json& RequireArray(const Json& obj, const std::string& key, const std::string& where);

}  // namespace minicar

#endif  // MINICAR_CORE_JSON_UTIL_H_
