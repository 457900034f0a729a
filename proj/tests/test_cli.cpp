// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "doctest.h"

#include "copx/cli.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

using namespace copx;
using namespace copx::cli;

namespace fs = std::filesystem;

namespace
{

struct TempDir
{
    fs::path path;

    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("copx_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    std::vector<char*> argv;
    std::string prog = "copxsim";
    argv.push_back(prog.data());
    for (auto& a : args)
    {
        argv.push_back(a.data());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int rc = copx::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text != nullptr)
    {
        *out_text = out.str();
    }
    if (err_text != nullptr)
    {
        *err_text = err.str();
    }
    return rc;
}

std::string usage_message(const std::vector<std::string>& args)
{
    try
    {
        (void)parse_args(args);
    }
    catch (const UsageError& e)
    {
        return e.what();
    }
    return {};
}

// RAII guard so the workers override never leaks into other cases.
struct EnvGuard
{
    explicit EnvGuard(const char* value) { ::setenv("COPXSIM_WORKERS", value, 1); }
    ~EnvGuard() { ::unsetenv("COPXSIM_WORKERS"); }
};

} // namespace

TEST_CASE("parse preset command")
{
    const Command cmd = parse_args({"preset", "macro-uav", "--out", "uav.json"});
    const auto* p = std::get_if<PresetCommand>(&cmd);
    REQUIRE(p != nullptr);
    CHECK(p->name == "macro-uav");
    CHECK(p->out_path == "uav.json");
    CHECK_FALSE(p->low_power);
    CHECK_FALSE(p->truck_azimuth_deg.has_value());
}

TEST_CASE("parse sweep command")
{
    const Command cmd = parse_args({"sweep", "--config", "uav.json", "--dmin", "0", "--dmax", "10000", "--step",
                                    "10", "--power", "24", "--access", "deployable-only", "--out", "s.csv"});
    const auto* s = std::get_if<SweepCommand>(&cmd);
    REQUIRE(s != nullptr);
    CHECK(s->config_path == "uav.json");
    CHECK(s->d_min_m == 0.0);
    CHECK(s->d_max_m == 10000.0);
    CHECK(s->step_m == 10.0);
    REQUIRE(s->power_dbm.has_value());
    CHECK(*s->power_dbm == 24.0);
    REQUIRE(s->access.has_value());
    CHECK(*s->access == McAccess::DeployableOnly);
    CHECK(s->n_realizations == 20);
    CHECK_FALSE(s->seed.has_value());
}

TEST_CASE("parse run command")
{
    const Command cmd =
        parse_args({"run", "--config", "c.json", "--seed", "7", "--realizations", "3", "--out", "r.csv"});
    const auto* r = std::get_if<RunCommand>(&cmd);
    REQUIRE(r != nullptr);
    REQUIRE(r->seed.has_value());
    CHECK(*r->seed == 7u);
    CHECK(r->n_realizations == 3);
    CHECK_FALSE(r->reports_path.has_value());
}

TEST_CASE("usage errors name the offending flag")
{
    CHECK(usage_message({"sweep", "--config", "c.json", "--access", "public-only", "--out", "s.csv"})
              .find("--access") != std::string::npos);
    CHECK(usage_message({"run", "--config", "c.json", "--out", "r.csv", "--bogus"}).find("--bogus") !=
          std::string::npos);
    CHECK(usage_message({"run", "--out", "r.csv"}).find("--config") != std::string::npos);
    CHECK(usage_message({"sweep", "--config", "c.json", "--dmin", "500", "--dmax", "100", "--out", "s.csv"})
              .find("--dmin") != std::string::npos);
    CHECK_FALSE(usage_message({"preset", "macro-bus", "--out", "x.json"}).empty());
    CHECK_FALSE(usage_message({}).empty());
}

TEST_CASE("usage errors exit with the usage code")
{
    std::string err;
    CHECK(run_cli({"run", "--config", "c.json", "--bogus"}, nullptr, &err) == kExitUsage);
    CHECK(err.find("--bogus") != std::string::npos);
}

TEST_CASE("workers override from the environment")
{
    {
        EnvGuard env("3");
        const Command cmd = parse_args({"run", "--config", "c.json", "--out", "r.csv", "--workers", "1"});
        CHECK(std::get<RunCommand>(cmd).workers == 3);
    }
    {
        EnvGuard env("many");
        CHECK_THROWS_AS((void)parse_args({"run", "--config", "c.json", "--out", "r.csv"}), UsageError);
    }
}

TEST_CASE("configuration and io failures map to exit codes")
{
    TempDir dir;
    std::string err;
    CHECK(run_cli({"run", "--config", dir.file("missing.json"), "--out", dir.file("r.csv")}, nullptr, &err) ==
          kExitIo);

    {
        std::ofstream bad(dir.file("bad.json"));
        bad << R"({"seed": 1, "no_such_field": 2})";
    }
    CHECK(run_cli({"run", "--config", dir.file("bad.json"), "--out", dir.file("r.csv")}, nullptr, &err) ==
          kExitConfig);
    CHECK_FALSE(err.empty());
}

TEST_CASE("preset then run end to end")
{
    TempDir dir;
    const std::string config = dir.file("mc.json");
    REQUIRE(run_cli({"preset", "macro-mc", "--out", config}) == kExitOk);
    REQUIRE(fs::exists(config));

    const std::string a = dir.file("a.csv");
    const std::string b = dir.file("b.csv");
    const std::string reports = dir.file("reports.csv");
    std::string summary;
    REQUIRE(run_cli({"run", "--config", config, "--realizations", "2", "--out", a, "--reports", reports,
                     "--workers", "1"},
                    &summary) == kExitOk);
    REQUIRE(run_cli({"run", "--config", config, "--realizations", "2", "--out", b, "--workers", "2"}) ==
            kExitOk);
    CHECK_FALSE(summary.empty());

    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(slurp(a + ".cells.csv") == slurp(b + ".cells.csv"));

    // header plus one row per user
    std::istringstream lines(text);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line))
    {
        rows += line.empty() ? 0 : 1;
    }
    CHECK(rows == 1 + 115);
    CHECK(fs::file_size(reports) > 0);

    const auto manifest = nlohmann::json::parse(slurp(a + ".manifest.json"));
    CHECK(manifest.at("n_realizations") == 2);
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.at("convergence").at("realizations") == 2);
}

TEST_CASE("sweep writes a row per distance")
{
    TempDir dir;
    const std::string config = dir.file("uav.json");
    REQUIRE(run_cli({"preset", "macro-uav", "--out", config}) == kExitOk);
    const std::string out = dir.file("sweep.csv");
    REQUIRE(run_cli({"sweep", "--config", config, "--dmin", "0", "--dmax", "1000", "--step", "500",
                     "--realizations", "1", "--power", "24", "--access", "any-network", "--out", out}) ==
            kExitOk);

    std::istringstream lines(slurp(out));
    std::string line;
    int rows = 0;
    while (std::getline(lines, line))
    {
        rows += line.empty() ? 0 : 1;
    }
    CHECK(rows == 1 + 3 * 15); // one row per MC user per distance
    CHECK(fs::exists(out + ".manifest.json"));
}

#ifdef COPXSIM_BINARY
TEST_CASE("installed binary reports usage errors")
{
    const std::string cmd = std::string("\"") + COPXSIM_BINARY + "\" sweep --bogus >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == kExitUsage);
}
#endif
