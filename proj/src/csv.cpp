// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/csv.hpp"

#include "copx/types.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace copx::csv
{

std::string num(double v)
{
    if (v == 0.0)
    {
        return "0"; // no "-0"
    }
    if (std::isnan(v))
    {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string mbps(double bps)
{
    return num(bps / 1e6);
}

std::vector<std::string> split_line(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos)
        {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

int Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        if (header[i] == name)
        {
            return static_cast<int>(i);
        }
    }
    return -1;
}

Table parse(std::string_view text)
{
    Table t;
    bool first = true;
    std::size_t start = 0;
    while (start < text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
        {
            end = text.size();
        }
        const auto line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty())
        {
            continue;
        }
        if (first)
        {
            t.header = split_line(line);
            first = false;
        }
        else
        {
            t.rows.push_back(split_line(line));
        }
    }
    return t;
}

void write_file_atomic(const std::string& path, const std::string& contents)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw IoError("cannot open '" + tmp + "' for writing: " + std::strerror(errno));
        }
        out << contents;
        out.flush();
        if (!out)
        {
            throw IoError("write to '" + tmp + "' failed");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
    {
        const std::string err = std::strerror(errno);
        std::remove(tmp.c_str());
        throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + err);
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace copx::csv
