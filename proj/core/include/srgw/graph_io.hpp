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

#ifndef SRGW_GRAPH_IO_HPP_
#define SRGW_GRAPH_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "srgw/sbm.hpp"

namespace srgw::io {

// Edge list: first line N, then one "i j" line per undirected edge with
// 0 <= i < j < N, newline terminated. Edges are written in row-major order.
AdjacencyMatrix read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const AdjacencyMatrix& a);

// One integer per line. When k is 0 it is inferred as max label + 1.
Labels read_labels(std::istream& in, int k = 0);
void write_labels(std::ostream& out, const Labels& labels);

// Row per line, comma separated, shortest round-trip decimal.
Eigen::MatrixXd read_csv_matrix(std::istream& in);
void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m);

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

AdjacencyMatrix load_edge_list(const std::filesystem::path& path);
Labels load_labels(const std::filesystem::path& path, int k = 0);

// Writes to "<path>.tmp" then renames over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace srgw::io

#endif  // SRGW_GRAPH_IO_HPP_
