// Copyright 2026 The urc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "urc/models.hpp"

namespace urc::cli {

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Writes `content` to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_double(double x);

/// Header lines shared by every table: table name, tool version, config hash, seed.
struct RunStamp {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// A CSV table with `#` header lines. Cells are stored preformatted.
class Table {
 public:
  Table(std::string name, std::vector<std::string> columns);

  Table& row();
  Table& cell(const std::string& text);
  Table& cell(double x);
  Table& cell(std::int64_t x);
  Table& cell(std::uint64_t x);
  Table& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
  Table& flag(bool b) { return cell(std::string(b ? "1" : "0")); }

  const std::string& name() const { return name_; }
  std::size_t rows() const { return rows_.size(); }
  std::string render(const RunStamp& p, const std::vector<std::string>& notes = {}) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes <dir>/<name>.csv and the metadata sidecar <dir>/<name>.json.
void write_table(const std::filesystem::path& dir, const Table& table, const RunStamp& p,
                 const nlohmann::json& sidecar, const std::vector<std::string>& notes = {});

/// Pulse file: header lines, then `segment,u0,u1,...`.
struct PulseFile {
  Pulse pulse = Pulse::zeros(1, 1, 1.0);
  std::map<std::string, std::string> meta;
};

std::string render_pulse(const Pulse& pulse, const RunStamp& p, const std::map<std::string, std::string>& meta);
/// Throws ConfigError on malformed files. `dt` is the segment length of the target template.
PulseFile read_pulse(const std::filesystem::path& path, double dt);

std::string utc_timestamp();

}  // namespace urc::cli
