#pragma once

// Command-line front end: subcommands lyapunov, ids, fk-laplace, wfunc,
// thouless, hoelder, rank and bounds. Every file written gets a sibling
// <file>.manifest.json with the full parameter record.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace strip::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kParameterError = 1;
inline constexpr int kNumericalError = 2;

/// Runs one subcommand; `args` excludes the program name. CSV goes to `out`
/// when no --out path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

/// 64-bit FNV-1a hash, used for cache keys.
std::uint64_t fnv1a(const std::string& data);

}  // namespace strip::cli
