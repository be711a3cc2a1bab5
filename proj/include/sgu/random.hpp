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

#ifndef SGU_RANDOM_HPP_
#define SGU_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace sgu {

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so the transforms
/// from raw 64-bit words are done here. A given seed yields the same stream
/// on every conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent seed for a named sub-stream of `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

  // `count` distinct draws from `pool` (partial Fisher-Yates, pool order
  // does not need to be sorted). Requires count <= pool.size().
  template <typename T>
  std::vector<T> sample(std::vector<T> pool, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(pool[i], pool[i + below(pool.size() - i)]);
    }
    pool.resize(count);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sgu

#endif  // SGU_RANDOM_HPP_
