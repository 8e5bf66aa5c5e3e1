/* Copyright 2026 The TLW Authors. All Rights Reserved.

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

// The tlw command line, callable in-process. Exit codes: 0 valid/success,
// 1 invalid/refuted, 2 usage, parse or IO error.

#ifndef TLW_TOOLS_CLI_HPP_
#define TLW_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace tlw::cli {

inline constexpr int kSchema = 1;

// args excludes the program name. Relative input paths are read against
// base_dir when it is non-empty; reports echo them as given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::string& base_dir = "");

// Splits a corpus command line: whitespace separated, with '...' and "..."
// quoting.
std::vector<std::string> split_command(const std::string& line);

}  // namespace tlw::cli

#endif  // TLW_TOOLS_CLI_HPP_
