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

// Small UTF-8 and string helpers shared by every module.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace accentkit::text {

// Throws Error(kParse) on malformed input.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

// Canonical composition (NFC).
std::string nfc(std::string_view s);

std::string ascii_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace accentkit::text
