// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#pragma once

#include "copx/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace copx::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

struct PresetCommand
{
    std::string name;
    std::string out_path;
    bool low_power = false;
    std::optional<double> truck_azimuth_deg;
};

struct RunCommand
{
    std::string config_path;
    std::optional<std::uint64_t> seed; ///< default: the config's seed
    int n_realizations = 20;
    std::string out_path;
    std::optional<std::string> reports_path; ///< per-realization traffic reports
    int workers = 0;
};

struct SweepCommand
{
    std::string config_path;
    double d_min_m = 0.0;
    double d_max_m = 10000.0;
    double step_m = 10.0;
    std::optional<double> power_dbm;
    std::optional<McAccess> access;
    std::optional<std::uint64_t> seed;
    int n_realizations = 20;
    std::string out_path;
    int workers = 0;
};

using Command = std::variant<PresetCommand, RunCommand, SweepCommand>;

/// Raised for malformed command lines; the message names the offending flag.
class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Strict parsing; `args` excludes the program name. Applies the
/// COPXSIM_WORKERS override. Throws UsageError.
Command parse_args(const std::vector<std::string>& args);

/// Runs a command; returns the process exit status.
int execute(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_args + execute with usage handling (help text, usage exit code).
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace copx::cli
