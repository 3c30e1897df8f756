// Copyright 2026 The stoqtraj Authors
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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "stoq/config.hpp"
#include "stoq/errors.hpp"

namespace stoq {

/// Process exit codes for the command-line driver.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;       // numerical failure or tolerance breach
inline constexpr int kExitConfigError = 2;   // unreadable or invalid config

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    bool quiet = false;
};

/// Executes a validated config and writes `<prefix>_*` artifacts into out_dir.
/// Returns kExitPass, or kExitFailure when a comparison breaches its tolerance.
/// Engine errors propagate as stoq::Error.
int run(const RunConfig& config, const RunOptions& options, std::ostream& log);

/// "stoqtraj config_hash=<hash> mode=<mode>"; writers prefix it with "# ".
std::string provenance_line(const RunConfig& config);

/// `ERROR <code> <message>`
std::string error_line(const Error& error);

}  // namespace stoq
