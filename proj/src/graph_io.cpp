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

#include "sgu/graph_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "sgu/errors.hpp"

namespace sgu {

namespace fs = std::filesystem;

namespace {

constexpr char kFeatureMagic[4] = {'G', 'U', 'F', 'M'};

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

template <typename T>
T parse_number(std::string_view token, const fs::path& path, std::size_t line) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\r')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\r')) token.remove_suffix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": cannot parse '" +
                    std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

void write_u64_le(std::ostream& out, std::uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

void write_f64_le(std::ostream& out, double value) {
  write_u64_le(out, std::bit_cast<std::uint64_t>(value));
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw IoError("unexpected end of binary file");
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return value;
}

double read_f64_le(std::istream& in) { return std::bit_cast<double>(read_u64_le(in)); }

std::vector<Edge> read_edge_list(const fs::path& path) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 'u<TAB>v'");
    }
    edges.emplace_back(parse_number<NodeId>(fields[0], path, lineno),
                       parse_number<NodeId>(fields[1], path, lineno));
  }
  return edges;
}

void write_edge_list(const fs::path& path, std::span<const Edge> edges) {
  auto out = open_out(path);
  for (const auto& [u, v] : edges) out << u << '\t' << v << '\n';
}

Matrix read_features(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kFeatureMagic, 4) == 0) {
    const auto n = read_u64_le(in);
    const auto f = read_u64_le(in);
    Matrix m(n, f);
    for (auto& v : m.values()) v = read_f64_le(in);
    return m;
  }

  in.clear();
  in.seekg(0);
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto fields = split(line, ',');
    if (rows == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(cols) + " columns");
    }
    for (auto token : fields) values.push_back(parse_number<double>(token, path, lineno));
    ++rows;
  }
  Matrix m(rows, cols);
  m.values() = std::move(values);
  return m;
}

void write_features_binary(const fs::path& path, const Matrix& features) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kFeatureMagic, 4);
  write_u64_le(out, features.rows());
  write_u64_le(out, features.cols());
  for (double v : features.values()) write_f64_le(out, v);
}

void write_features_csv(const fs::path& path, const Matrix& features) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    auto row = features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

std::vector<Label> read_labels(const fs::path& path, std::size_t n) {
  auto in = open_in(path);
  std::vector<Label> labels(n, kUnlabeled);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 'node<TAB>class'");
    }
    const auto node = parse_number<NodeId>(fields[0], path, lineno);
    if (node >= n) throw IndexError("label for node " + std::to_string(node) + " >= n");
    labels[node] = parse_number<Label>(fields[1], path, lineno);
  }
  return labels;
}

void write_labels(const fs::path& path, std::span<const Label> labels) {
  auto out = open_out(path);
  for (std::size_t u = 0; u < labels.size(); ++u) {
    if (labels[u] != kUnlabeled) out << u << '\t' << labels[u] << '\n';
  }
}

std::vector<NodeId> read_mask(const fs::path& path) {
  auto in = open_in(path);
  std::vector<NodeId> nodes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    nodes.push_back(parse_number<NodeId>(line, path, lineno));
  }
  return nodes;
}

void write_mask(const fs::path& path, std::span<const NodeId> nodes) {
  auto out = open_out(path);
  for (NodeId u : nodes) out << u << '\n';
}

DatasetPaths DatasetPaths::in_directory(const fs::path& dir) {
  return {dir / "edges.tsv", dir / "features.gufm", dir / "labels.tsv", dir / "train_mask.txt",
          dir / "test_mask.txt"};
}

Graph load_dataset(const DatasetPaths& paths, std::size_t classes) {
  Matrix features = read_features(paths.features);
  const std::size_t n = features.rows();
  auto edges = read_edge_list(paths.edges);
  auto labels = read_labels(paths.labels, n);
  auto train = read_mask(paths.train_mask);
  auto test = read_mask(paths.test_mask);
  return build_graph(n, edges, std::move(features), std::move(labels), train, test, classes);
}

void save_dataset(const Graph& graph, const DatasetPaths& paths) {
  write_edge_list(paths.edges, graph.edge_list());
  write_features_binary(paths.features, graph.features());
  write_labels(paths.labels, graph.labels());
  write_mask(paths.train_mask, graph.train_nodes());
  write_mask(paths.test_mask, graph.test_nodes());
}

}  // namespace sgu
