// Copyright 2026 The srgw-sbm Authors.
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

#include "srgw/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "srgw/error.hpp"

namespace srgw::io {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long long parse_int(const std::string& token, int line_no) {
  long long value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("line " + std::to_string(line_no) + ": expected an integer, got '" +
                          token + "'");
  }
  return value;
}

double parse_double(const std::string& token, int line_no) {
  double value = 0.0;
  const std::string t = trim(token);
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("line " + std::to_string(line_no) + ": expected a number, got '" + t +
                          "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf, ptr);
}

AdjacencyMatrix read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  long long n = -1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    n = parse_int(line, line_no);
    break;
  }
  if (n < 1) throw ValidationError("edge list must start with a positive node count");

  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string si, sj, extra;
    if (!(fields >> si >> sj) || (fields >> extra)) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'i j'");
    }
    const long long i = parse_int(si, line_no);
    const long long j = parse_int(sj, line_no);
    if (i < 0 || j >= n || i >= j) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": edge endpoints must satisfy 0 <= i < j < N");
    }
    if (!seen.emplace(static_cast<int>(i), static_cast<int>(j)).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate edge");
    }
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return AdjacencyMatrix::from_edges(static_cast<int>(n), edges);
}

void write_edge_list(std::ostream& out, const AdjacencyMatrix& a) {
  if (!a.is_binary()) throw ValidationError("edge list format only holds binary graphs");
  out << a.n() << '\n';
  for (const auto& [i, j] : a.edges()) out << i << ' ' << j << '\n';
}

Labels read_labels(std::istream& in, int k) {
  std::vector<int> values;
  std::string line;
  int line_no = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const long long v = parse_int(line, line_no);
    if (v < 0) throw ValidationError("line " + std::to_string(line_no) + ": negative label");
    values.push_back(static_cast<int>(v));
    max_label = std::max(max_label, static_cast<int>(v));
  }
  if (values.empty()) throw ValidationError("labels file is empty");
  return Labels(std::move(values), k > 0 ? k : max_label + 1);
}

void write_labels(std::ostream& out, const Labels& labels) {
  for (int v : labels.values()) out << v << '\n';
}

Eigen::MatrixXd read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) row.push_back(parse_double(cell, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": ragged CSV row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

AdjacencyMatrix load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return read_edge_list(in);
}

Labels load_labels(const std::filesystem::path& path, int k) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels file " + path.string());
  return read_labels(in, k);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace srgw::io
