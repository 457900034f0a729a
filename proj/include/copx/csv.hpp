// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace copx::csv
{

/// Fixed "%.6g" formatting, "." decimal separator.
std::string num(double v);

/// bits/s printed as Mbps.
std::string mbps(double bps);

std::vector<std::string> split_line(std::string_view line);

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const;
};

/// Parses LF-separated CSV with a header line. No quoting.
Table parse(std::string_view text);

/// Writes to `path` through a temporary sibling and rename. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

} // namespace copx::csv
