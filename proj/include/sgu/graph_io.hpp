// Copyright 2026 The SGU Authors.
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

#ifndef SGU_GRAPH_IO_HPP_
#define SGU_GRAPH_IO_HPP_

#include <filesystem>
#include <vector>

#include "sgu/graph.hpp"

namespace sgu {

// Edge list: one "u<TAB>v" pair per line, 0-indexed.
std::vector<Edge> read_edge_list(const std::filesystem::path& path);
void write_edge_list(const std::filesystem::path& path, std::span<const Edge> edges);

// Features: binary "GUFM" + u64 n + u64 f + n*f f64 (all little-endian), or
// CSV. The reader sniffs the magic bytes.
Matrix read_features(const std::filesystem::path& path);
void write_features_binary(const std::filesystem::path& path, const Matrix& features);
void write_features_csv(const std::filesystem::path& path, const Matrix& features);

// Labels: "node<TAB>class" per line; nodes absent from the file are unlabeled.
std::vector<Label> read_labels(const std::filesystem::path& path, std::size_t n);
void write_labels(const std::filesystem::path& path, std::span<const Label> labels);

// Masks: one node id per line.
std::vector<NodeId> read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, std::span<const NodeId> nodes);

/// File names used inside a dataset directory.
struct DatasetPaths {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
  std::filesystem::path train_mask;
  std::filesystem::path test_mask;

  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

Graph load_dataset(const DatasetPaths& paths, std::size_t classes = 0);
void save_dataset(const Graph& graph, const DatasetPaths& paths);

// Little-endian helpers shared by the binary formats.
void write_u64_le(std::ostream& out, std::uint64_t value);
void write_f64_le(std::ostream& out, double value);
std::uint64_t read_u64_le(std::istream& in);
double read_f64_le(std::istream& in);

}  // namespace sgu

#endif  // SGU_GRAPH_IO_HPP_
