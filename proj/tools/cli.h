// Copyright 2026 The vandal-sentinel Authors.
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

// Command-line front end. Option values come from, in order: the flag,
// VS_<FLAG_NAME> in the environment, the --config JSON file, the default.

#ifndef VSENTINEL_TOOLS_CLI_H_
#define VSENTINEL_TOOLS_CLI_H_

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vsentinel {

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
std::optional<std::string> ProcessEnv(const std::string& name);

// "revert-window" -> "VS_REVERT_WINDOW".
std::string EnvNameFor(const std::string& flag);

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
           const EnvLookup& env = ProcessEnv);

}  // namespace vsentinel

#endif  // VSENTINEL_TOOLS_CLI_H_
