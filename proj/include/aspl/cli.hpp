#pragma once

// Command-line entry point: train, segment, eval, synth-corpus, metrics, serve.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 schedule mismatch.

#include <iosfwd>
#include <string>
#include <vector>

namespace aspl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitSchedule = 4;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace aspl
