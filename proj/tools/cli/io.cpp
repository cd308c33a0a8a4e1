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

#include "cli/io.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <unistd.h>

#include "urc/error.hpp"
#include "urc/version.hpp"

namespace urc::cli {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += fmt::format(".tmp{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw Error(fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

Table::Table(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

Table& Table::row() {
  rows_.emplace_back();
  rows_.back().reserve(columns_.size());
  return *this;
}

Table& Table::cell(const std::string& text) {
  if (rows_.empty()) row();
  rows_.back().push_back(text);
  return *this;
}

Table& Table::cell(double x) { return cell(format_double(x)); }
Table& Table::cell(std::int64_t x) { return cell(std::to_string(x)); }
Table& Table::cell(std::uint64_t x) { return cell(std::to_string(x)); }

std::string Table::render(const RunStamp& p, const std::vector<std::string>& notes) const {
  std::string out = fmt::format("# table {}\n# urc {}\n# config_hash {}\n# seed {}\n", name_, kVersion,
                                p.config_hash, p.seed);
  for (const std::string& n : notes) out += "# " + n + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
  out += "\n";
  for (const auto& r : rows_) {
    if (r.size() != columns_.size()) {
      throw InvariantError(fmt::format("table {} row has {} cells, expected {}", name_, r.size(), columns_.size()));
    }
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

void write_table(const std::filesystem::path& dir, const Table& table, const RunStamp& p,
                 const nlohmann::json& sidecar, const std::vector<std::string>& notes) {
  write_atomic(dir / (table.name() + ".csv"), table.render(p, notes));
  nlohmann::json meta = sidecar;
  meta["table"] = table.name() + ".csv";
  meta["rows"] = table.rows();
  meta["config_hash"] = p.config_hash;
  meta["seed"] = p.seed;
  meta["version"] = kVersion;
  write_atomic(dir / (table.name() + ".json"), meta.dump(2) + "\n");
}

std::string render_pulse(const Pulse& pulse, const RunStamp& p, const std::map<std::string, std::string>& meta) {
  std::string out = fmt::format("# pulse\n# urc {}\n# config_hash {}\n# seed {}\n", kVersion, p.config_hash, p.seed);
  for (const auto& [k, v] : meta) out += fmt::format("# {} {}\n", k, v);
  out += "segment";
  for (Eigen::Index c = 0; c < pulse.channels(); ++c) out += fmt::format(",u{}", c);
  out += "\n";
  for (Eigen::Index k = 0; k < pulse.segments(); ++k) {
    out += std::to_string(k);
    for (Eigen::Index c = 0; c < pulse.channels(); ++c) out += "," + format_double(pulse.values()(k, c));
    out += "\n";
  }
  return out;
}

PulseFile read_pulse(const std::filesystem::path& path, double dt) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open pulse file {}", path.string()));
  PulseFile f;
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      std::string value;
      std::getline(ss >> std::ws, value);
      if (!key.empty()) f.meta[key] = value;
      continue;
    }
    if (!header) {
      if (line.rfind("segment", 0) != 0) throw ConfigError(fmt::format("{}:{}: missing column header", path.string(), lineno));
      header = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        first = false;
        continue;
      }
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}:{}: bad number '{}'", path.string(), lineno, cell));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(fmt::format("{}:{}: ragged pulse row", path.string(), lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw ConfigError(fmt::format("{}: no pulse rows", path.string()));
  Pulse::Table t(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < rows[k].size(); ++c) t(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = rows[k][c];
  }
  f.pulse = Pulse(std::move(t), dt);
  return f;
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

}  // namespace urc::cli
