/* Copyright 2026 The switchnet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SWITCHNET_ERROR_HPP_
#define SWITCHNET_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace switchnet {

/// Broad failure category. Mirrors the status codes of the C API.
enum class ErrorKind {
  kInvalidArgument,
  kConfig,
  kIo,
  kParse,
  kRouting,
  kTraining,
  kNotFound,
  kRuntime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace switchnet

#endif  // SWITCHNET_ERROR_HPP_
