// Copyright 2026 The accentkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace accentkit {

// Machine-readable failure class. The CLI prints the name next to the
// message so scripts can branch on it.
enum class ErrorCategory {
  kInvalidArgument,
  kIo,
  kParse,
  kOov,
  kNetwork,
  kAuth,
  kReplayMiss,
  kRateLimited,
  kIntegrity,
  kNotFound,
  kInternal,
};

std::string_view category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Out-of-vocabulary failure; carries every offending token.
class OovError : public Error {
 public:
  explicit OovError(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::vector<std::string> tokens_;
};

}  // namespace accentkit
