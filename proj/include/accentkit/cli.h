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

// Command-line dispatch. Exit codes: 0 success, 1 operational failure
// (stderr carries "error[<category>]: <message>"), 2 usage error.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace accentkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace accentkit::cli
