// Copyright 2026 The urc Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace urc::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNumericFailure = 1;
inline constexpr int kConfigError = 2;

/// Runs the command line `args` (without the program name). Results go to
/// files; `out` receives fixture dumps and `err` progress and diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace urc::cli
