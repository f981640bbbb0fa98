// Copyright 2026 The hfreadout Authors
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

// Subcommand execution. Each run writes its artifacts and manifest into the output
// directory and throws hfro errors on failure; the caller maps them to exit codes.

#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace hfro::app {

struct RunContext {
    int workers = 1;
    std::string output_dir = ".";
    /// Directory relative paths inside the config resolve against.
    std::string base_dir = ".";
};

void run(const RunConfig &config, const RunContext &context, std::ostream &log);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

}  // namespace hfro::app
