/*
 * Copyright 2026 The hiaa Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HIAA_SRC_JSON_IO_HPP_
#define HIAA_SRC_JSON_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace hiaa::detail {

using json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);

// Writes via a temporary sibling and renames, so readers never observe a
// partial file.
void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);

json parse_json(const std::string& text, const std::filesystem::path& origin);

// One JSON value per non-empty line.
std::vector<json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<json>& rows);

}  // namespace hiaa::detail

#endif  // HIAA_SRC_JSON_IO_HPP_
