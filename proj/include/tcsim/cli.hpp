#pragma once

#include <string>
#include <vector>

namespace tcsim {

inline const std::vector<std::string> cli_subcommands{
    "spectroscopy", "chevron", "coupling", "ramsey-phase", "phase-scan", "leakage-map",
    "rb", "pb", "tune-adiabatic", "tune-diabatic", "zz"};

/// Exit codes: 0 success, 1 runtime failure (diagnostic JSON written), 2 invalid configuration.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace tcsim
