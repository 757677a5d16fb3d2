//------------------------------------------------------------------------------
//
//   Copyright 2026 The mechlab Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mechlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitGuard = 3;
inline constexpr int kExitAssertion = 4;

/// One certificate or assertion: `lhs relation rhs` and whether it held.
struct CsvRow {
  std::string name;
  std::string lhs;
  std::string rhs;
  std::string relation;
  bool pass = false;
};

/// Result of one command before it is rendered.
struct CommandReport {
  std::vector<std::string> notes;
  std::vector<CsvRow> rows;

  bool ok() const;
};

/// Renders the header comments (version, config, seed), the notes as comment
/// lines, and the rows under `name,lhs,rhs,relation,pass`.
std::string render_csv(const std::string& config, unsigned long long seed, const CommandReport& report);

/// Parses argv, runs one command and writes CSV to `out` (or --out) and
/// diagnostics to `err`. Returns 0 when every row passes, 2 on malformed
/// input, 3 when a guard limit is exceeded and 4 when an assertion fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mechlab::cli
