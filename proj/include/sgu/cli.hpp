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

#ifndef SGU_CLI_HPP_
#define SGU_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgu/datagen.hpp"
#include "sgu/pipeline.hpp"
#include "sgu/unlearn.hpp"

namespace sgu {

/// One JSON document of flat dotted keys (nested objects are flattened).
/// Unknown keys are a ConfigError.
struct RunConfig {
  std::string run_id = "sgu";
  std::uint64_t seed = 0;

  SbmSpec sbm;
  PipelineConfig pipeline;

  std::string data_dir;      // default: <run dir>/data; "{seed}" is substituted
  std::string request_path;  // default: sample `request_fraction` of the train nodes
  RequestKind request_kind = RequestKind::kNode;
  double request_fraction = 0.1;

  std::size_t mia_pool = 0;  // 0 = every test node
  std::vector<double> edge_ratios;

  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  /// Propagates the master seed into every seeded component.
  void set_seed(std::uint64_t value);
};

/// Files of one seeded run.
struct RunLayout {
  std::filesystem::path dir;
  std::filesystem::path data;

  std::filesystem::path metrics() const { return dir / "metrics.jsonl"; }
  std::filesystem::path original() const { return dir / "original.ckpt"; }
  std::filesystem::path unlearned() const { return dir / "unlearned.ckpt"; }
  std::filesystem::path retrained() const { return dir / "retrained.ckpt"; }
  std::filesystem::path request() const { return dir / "request.json"; }
  std::filesystem::path hie() const { return dir / "hie.csv"; }
  std::filesystem::path loss_log() const { return dir / "loss_log.tsv"; }

  static RunLayout make(const std::filesystem::path& dir, const RunConfig& config);
};

void cmd_gen(const RunConfig& config, const RunLayout& run);
void cmd_train(const RunConfig& config, const RunLayout& run);
void cmd_unlearn(const RunConfig& config, const RunLayout& run,
                 const std::filesystem::path& checkpoint);
void cmd_retrain(const RunConfig& config, const RunLayout& run);
void cmd_attack(const RunConfig& config, const RunLayout& run);

/// Aggregates a metrics file into <out>/summary.csv plus plot series.
void cmd_report(const std::filesystem::path& metrics, const std::filesystem::path& out_dir);

/// "a..b" (inclusive) or a single value.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// Entry point behind the `sgu` tool. Returns the process exit code; errors
/// are printed to `err` as one line `error: <Class>: <message>`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sgu

#endif  // SGU_CLI_HPP_
