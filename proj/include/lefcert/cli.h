// Copyright 2026 The lefcert Authors
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

// The `lefcert` command line.
//
//   certify        sample-wise certificates for every query of an episode
//   collective     worst-case allocation of one budget across all queries
//   sweep          evaluation protocol over an M x lambda grid
//   oracle-check   brute-force validation of the bounds on random instances
//   gen-synthetic  writes a synthetic embedding pool
//
// Exit status: 0 on success, 1 on configuration errors, 2 on file errors.
// The certification outcome lives in the results file, never in the status.

#ifndef LEFCERT_CLI_H_
#define LEFCERT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace lefcert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

// `args` excludes the program name. Diagnostics go to `err`, one line each.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace lefcert::cli

#endif  // LEFCERT_CLI_H_
