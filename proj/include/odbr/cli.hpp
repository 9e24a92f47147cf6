/*
 * Copyright (C) 2026 The ODBR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace odbr {

struct CliIo {
  std::istream& in;
  std::ostream& out;  // JSON results
  std::ostream& err;  // prompts and diagnostics
  bool interactive = false;  // stdin is a terminal
  std::optional<std::string> bridge_override;  // ODBR_BRIDGE
};

// Runs one `odbr` command. Returns 0 on success, 1 for invalid input or
// documents, 2 for bridge and I/O faults.
int run_cli(const std::vector<std::string>& args, CliIo& io);

}  // namespace odbr
