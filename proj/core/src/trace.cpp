// Copyright 2026 The decadam authors. All Rights Reserved.
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
// =============================================================================

#include "decadam/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decadam/errors.hpp"

namespace decadam {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, value);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << content;
    if (!out) throw IoError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string format_trace_csv(const std::string& header_json,
                             const std::vector<TraceRow>& rows) {
  std::string out;
  out.reserve(rows.size() * 96 + header_json.size() + 80);
  out += "# ";
  out += header_json;
  out += "\n";
  out += kTraceColumns;
  out += "\n";
  char buf[192];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%ld,%.17g,%.17g,%.17g,%" PRIu64 ",%ld\n", r.t, r.loss,
                  r.grad_norm_sq, r.consensus_err, r.comm_bits_cum,
                  r.comm_rounds_cum);
    out += buf;
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::string& header_json,
                     const std::vector<TraceRow>& rows) {
  write_text_atomic(path, format_trace_csv(header_json, rows));
}

TraceFile read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace: " + path.string());
  TraceFile out;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw IoError("trace missing JSON header line: " + path.string());
  out.header_json = line.substr(2);
  if (!std::getline(in, line) || line != kTraceColumns)
    throw IoError("trace missing column header: " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow row;
    if (std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg,%" SCNu64 ",%ld", &row.t,
                    &row.loss, &row.grad_norm_sq, &row.consensus_err,
                    &row.comm_bits_cum, &row.comm_rounds_cum) != 6)
      throw IoError("malformed trace row: " + line);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace decadam
