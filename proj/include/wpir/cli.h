// Copyright 2026 The WPIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WPIR_CLI_H_
#define WPIR_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace wpir::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming the directory that relative --output paths
// are resolved against.
inline constexpr const char* kOutputDirEnv = "WPIR_OUTPUT_DIR";

// Runs `wpir <args...>`; args excludes the program name. Results go to
// `out` unless --output is given, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace wpir::cli

#endif  // WPIR_CLI_H_
