// Copyright 2026 The mlunmix Authors. All Rights Reserved.
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


// mlunmix command line: synth, unmix, eval, bench.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 solver divergence.

#ifndef MLUNMIX_TOOLS_CLI_HPP_
#define MLUNMIX_TOOLS_CLI_HPP_

#include <ostream>

namespace mlunmix::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitDivergence = 3,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mlunmix::cli

#endif  // MLUNMIX_TOOLS_CLI_HPP_
