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

#include "json_io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "hiaa/error.hpp"

namespace hiaa::detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kMissingInput, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::kMissingInput, "cannot write " + path.string());
    }
    out << contents;
    if (!out.flush()) {
      throw Error(Errc::kMissingInput, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::kMissingInput, "cannot move output into " + path.string());
  }
}

json parse_json(const std::string& text, const std::filesystem::path& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::kCorruptFile,
                origin.string() + ": malformed JSON: " + e.what());
  }
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kMissingInput, "cannot open " + path.string());
  }
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(Errc::kCorruptFile, path.string() + ":" +
                                          std::to_string(lineno) + ": " +
                                          e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<json>& rows) {
  std::string out;
  for (const json& row : rows) {
    out += row.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace hiaa::detail
