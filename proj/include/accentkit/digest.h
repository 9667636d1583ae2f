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

#include <cstdint>
#include <string>
#include <string_view>

namespace accentkit {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Accumulates tagged, length-prefixed fields so that distinct field
// sequences never serialize to the same byte string.
class DigestBuilder {
 public:
  DigestBuilder& add(std::string_view tag, std::string_view value);
  DigestBuilder& add(std::string_view tag, std::int64_t value);

  const std::string& canonical() const { return buf_; }
  std::string hex() const { return sha256_hex(buf_); }

 private:
  std::string buf_;
};

}  // namespace accentkit
