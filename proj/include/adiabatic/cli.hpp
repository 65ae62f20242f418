#pragma once

// Command-line experiments:
//   adiabatic <command> --config <path.json> [--out <dir>] [--seed <int>]
// Exit status: 0 success, 1 domain error, 2 configuration error.

#include "adiabatic/schedule.hpp"
#include "adiabatic/spec.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adiabatic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitConfig = 2;

/// "shift-discrete(n)", "shift-continuous(n)" or "glauber-torus(n,d,beta1,beta2)".
/// `schedule`, when given, replaces the linear schedule of the shift examples.
AdiabaticSpec builtin_example(const std::string& name,
                              const std::optional<Schedule>& schedule = std::nullopt);

/// Size parameter of a builtin example name (n), if it has one.
std::optional<long> example_size(const std::string& name);

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace adiabatic::cli
