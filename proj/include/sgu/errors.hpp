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

#ifndef SGU_ERRORS_HPP_
#define SGU_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sgu {

// Every library error carries a short class name so the CLI can print
// "error: <Class>: <message>" on a single line.
class Error : public std::runtime_error {
 public:
  Error(const char* error_class, const std::string& message)
      : std::runtime_error(message), error_class_(error_class) {}

  const char* error_class() const noexcept { return error_class_; }

 private:
  const char* error_class_;
};

#define SGU_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

SGU_DEFINE_ERROR(IndexError)
SGU_DEFINE_ERROR(MaskError)
SGU_DEFINE_ERROR(DataError)
SGU_DEFINE_ERROR(ShapeError)
SGU_DEFINE_ERROR(ConfigError)
SGU_DEFINE_ERROR(RequestError)
SGU_DEFINE_ERROR(PrototypeError)
SGU_DEFINE_ERROR(StateError)
SGU_DEFINE_ERROR(MetricError)
SGU_DEFINE_ERROR(IoError)
SGU_DEFINE_ERROR(CheckpointError)

#undef SGU_DEFINE_ERROR

}  // namespace sgu

#endif  // SGU_ERRORS_HPP_
