// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/cli.hpp"

#include "CLI11.hpp"
#include "copx/config_json.hpp"
#include "copx/csv.hpp"
#include "copx/experiment.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace copx::cli
{

namespace
{

constexpr const char* kVersion = "copxsim 1.0.0";

const std::map<std::string, McAccess> kAccessNames{
    {"deployable-only", McAccess::DeployableOnly},
    {"any-network", McAccess::AnyNetwork},
};

struct Parser
{
    CLI::App app{"Coverage and interference simulator for deployable networks coexisting with a public "
                 "macro network",
                 "copxsim"};
    CLI::App* preset = nullptr;
    CLI::App* run = nullptr;
    CLI::App* sweep = nullptr;

    PresetCommand p;
    RunCommand r;
    SweepCommand s;
    std::uint64_t run_seed = 0;
    std::uint64_t sweep_seed = 0;
    double sweep_power = 0.0;
    McAccess sweep_access = McAccess::AnyNetwork;

    Parser()
    {
        app.require_subcommand(1);
        app.set_version_flag("--version", kVersion);

        preset = app.add_subcommand("preset", "Write a scenario preset as a JSON config");
        preset->add_option("name", p.name, "macro-only | macro-mc | macro-truck | macro-uav")
            ->check(CLI::IsMember({"macro-only", "macro-mc", "macro-truck", "macro-uav"}));
        preset->add_option("--out", p.out_path, "Output JSON path");
        preset->add_flag("--low-power", p.low_power, "Low deployable power (truck 33 dBm, UAV 24 dBm)");
        preset->add_option("--truck-azimuth", p.truck_azimuth_deg,
                           "Truck position on the MC-area edge, degrees counter-clockwise from east");

        run = app.add_subcommand("run", "Monte-Carlo realizations of one scenario");
        run->add_option("--config", r.config_path, "Scenario JSON");
        run->add_option("--seed", run_seed, "Base seed (default: the config's seed)");
        run->add_option("--realizations", r.n_realizations, "Number of realizations")
            ->check(CLI::PositiveNumber);
        run->add_option("--out", r.out_path, "Per-user aggregate CSV");
        run->add_option("--reports", r.reports_path, "Per-realization traffic report CSV");
        run->add_option("--workers", r.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

        sweep = app.add_subcommand("sweep", "Macro-to-deployable distance sweep");
        sweep->add_option("--config", s.config_path, "Scenario JSON with one deployable BS");
        sweep->add_option("--dmin", s.d_min_m, "First distance, m")->check(CLI::NonNegativeNumber);
        sweep->add_option("--dmax", s.d_max_m, "Last distance, m")->check(CLI::NonNegativeNumber);
        sweep->add_option("--step", s.step_m, "Grid step, m")->check(CLI::PositiveNumber);
        sweep->add_option("--power", sweep_power,
                          "Deployable Tx power in dBm (truck 46/33, UAV 40/24; default: config)");
        sweep->add_option("--access", sweep_access, "deployable-only | any-network (default: config)")
            ->transform(CLI::CheckedTransformer(kAccessNames));
        sweep->add_option("--seed", sweep_seed, "Base seed (default: the config's seed)");
        sweep->add_option("--realizations", s.n_realizations, "Realizations per distance")
            ->check(CLI::PositiveNumber);
        sweep->add_option("--out", s.out_path, "Sweep CSV");
        sweep->add_option("--workers", s.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    }

    // Required options are checked here rather than by CLI11 so that an
    // unknown flag is reported before a missing one.
    static void require(const CLI::App* app, const std::string& name)
    {
        if (app->count(name) == 0)
        {
            throw UsageError(name + " is required");
        }
    }

    Command finish()
    {
        if (*preset)
        {
            require(preset, "name");
            require(preset, "--out");
            return p;
        }
        if (*run)
        {
            require(run, "--config");
            require(run, "--out");
            if (run->count("--seed") > 0)
            {
                r.seed = run_seed;
            }
            return r;
        }
        require(sweep, "--config");
        require(sweep, "--out");
        if (sweep->count("--seed") > 0)
        {
            s.seed = sweep_seed;
        }
        if (sweep->count("--power") > 0)
        {
            s.power_dbm = sweep_power;
        }
        if (sweep->count("--access") > 0)
        {
            s.access = sweep_access;
        }
        if (s.d_min_m > s.d_max_m)
        {
            throw UsageError("--dmin: must not exceed --dmax");
        }
        return s;
    }
};

std::optional<int> env_workers()
{
    const char* v = std::getenv("COPXSIM_WORKERS");
    if (v == nullptr || *v == '\0')
    {
        return std::nullopt;
    }
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 0)
    {
        throw UsageError(std::string("COPXSIM_WORKERS: invalid value '") + v + "'");
    }
    return static_cast<int>(n);
}

std::string manifest(const std::string& command, const ScenarioConfig& config, std::uint64_t base_seed,
                     int n_realizations, const ConvergenceStats& conv, nlohmann::json extra = nlohmann::json::object())
{
    nlohmann::json m{
        {"tool", kVersion},
        {"command", command},
        {"config_hash", config_hash(config)},
        {"base_seed", base_seed},
        {"n_realizations", n_realizations},
        {"seed_scheme",
         command == "sweep" ? "users: splitmix(base_seed + i); propagation: splitmix(base_seed ^ hash(i, k))"
                            : "realization i: base_seed + i"},
        {"convergence",
         {{"realizations", conv.realizations},
          {"converged", conv.converged},
          {"max_iterations", conv.max_iterations},
          {"mean_iterations", conv.mean_iterations}}},
        {"config", to_json(config)},
    };
    for (const auto& [k, v] : extra.items())
    {
        m[k] = v;
    }
    return m.dump(2) + "\n";
}

void warn_convergence(const ConvergenceStats& conv, std::ostream& err)
{
    if (conv.converged < conv.realizations)
    {
        err << "warning: load coupling did not converge in " << (conv.realizations - conv.converged) << " of "
            << conv.realizations << " realizations; last iterate used\n";
    }
}

int do_preset(const PresetCommand& c, std::ostream& out)
{
    PresetOptions opts;
    opts.low_power = c.low_power;
    opts.truck_edge_azimuth_deg = c.truck_azimuth_deg;
    const ScenarioConfig config = build_preset(parse_preset(c.name), "{}", opts);
    csv::write_file_atomic(c.out_path, dump_config(config));
    out << "preset " << c.name << ": " << config.base_stations.size() << " base stations, "
        << make_sectors(config).size() << " sectors -> " << c.out_path << "\n";
    return kExitOk;
}

int do_run(const RunCommand& c, std::ostream& out, std::ostream& err)
{
    const ScenarioConfig config = load_config(c.config_path);
    RunSpec spec{config, c.n_realizations, c.seed.value_or(config.seed)};

    std::ostringstream reports_csv;
    AggregateMetrics m;
    if (c.reports_path)
    {
        std::vector<RealizationResult> results(static_cast<std::size_t>(spec.n_realizations));
        for (std::size_t i = 0; i < results.size(); ++i)
        {
            results[i] = run_realization(config, spec.base_seed + i);
        }
        m = aggregate(results);
        reports_csv << "realization,";
        bool header = true;
        for (std::size_t i = 0; i < results.size(); ++i)
        {
            std::ostringstream one;
            write_report_csv(one, results[i].reports);
            std::istringstream lines(one.str());
            std::string line;
            std::getline(lines, line);
            if (header)
            {
                reports_csv << line << '\n';
                header = false;
            }
            while (std::getline(lines, line))
            {
                reports_csv << i << ',' << line << '\n';
            }
        }
    }
    else
    {
        m = run_scenario(spec, c.workers);
    }

    std::ostringstream users_csv;
    write_aggregate_csv(users_csv, m);
    std::ostringstream cells_csv;
    write_cell_load_csv(cells_csv, m);

    csv::write_file_atomic(c.out_path, users_csv.str());
    csv::write_file_atomic(c.out_path + ".cells.csv", cells_csv.str());
    if (c.reports_path)
    {
        csv::write_file_atomic(*c.reports_path, reports_csv.str());
    }
    csv::write_file_atomic(c.out_path + ".manifest.json",
                           manifest("run", config, spec.base_seed, spec.n_realizations, m.convergence));
    warn_convergence(m.convergence, err);

    if (config.n_mc_users > 0)
    {
        const ScenarioSummary s = summarize(m);
        out << "MC users fully served: DL " << csv::num(s.mc_fully_served_dl_fraction) << ", UL "
            << csv::num(s.mc_fully_served_ul_fraction) << " (" << m.users.size() << " users, "
            << spec.n_realizations << " realizations)\n";
    }
    else
    {
        out << "run complete: " << m.users.size() << " users, " << spec.n_realizations << " realizations\n";
    }
    return kExitOk;
}

int do_sweep(const SweepCommand& c, std::ostream& out, std::ostream& err)
{
    const ScenarioConfig config = load_config(c.config_path);
    SweepSpec spec;
    spec.base = RunSpec{config, c.n_realizations, c.seed.value_or(config.seed)};
    spec.d_min_m = c.d_min_m;
    spec.d_max_m = c.d_max_m;
    spec.step_m = c.step_m;
    spec.deployable_power_dbm = c.power_dbm;
    spec.mc_access = c.access;

    const SweepTable t = run_distance_sweep(spec, c.workers);
    std::ostringstream csv_out;
    write_sweep_csv(csv_out, t);
    csv::write_file_atomic(c.out_path, csv_out.str());

    const SweepSummary s = summarize(t);
    nlohmann::json extra{
        {"sweep",
         {{"d_min_m", c.d_min_m},
          {"d_max_m", c.d_max_m},
          {"step_m", c.step_m},
          {"points", t.points.size()},
          {"deployable_power_dbm", c.power_dbm ? nlohmann::json(*c.power_dbm) : nlohmann::json(nullptr)},
          {"access", c.access ? nlohmann::json(to_string(*c.access)) : nlohmann::json(nullptr)}}},
        {"summary",
         {{"worst_user_mean_mbps", s.worst_user_mean_bps / 1e6},
          {"worst_cluster_mean_mbps", s.worst_cluster_mean_bps / 1e6},
          {"worst_cluster_distance_m", s.worst_cluster_distance_m},
          {"full_service_distance_m",
           s.full_service_distance_m ? nlohmann::json(*s.full_service_distance_m) : nlohmann::json(nullptr)}}},
    };
    csv::write_file_atomic(c.out_path + ".manifest.json",
                           manifest("sweep", config, spec.base.base_seed, spec.base.n_realizations,
                                    t.convergence, extra));
    warn_convergence(t.convergence, err);

    out << "worst-case served DL per MC user: " << csv::mbps(s.worst_cluster_mean_bps) << " Mbps (cluster mean at "
        << csv::num(s.worst_cluster_distance_m) << " m), " << csv::mbps(s.worst_user_mean_bps)
        << " Mbps (single user); " << t.points.size() << " distances\n";
    return kExitOk;
}

} // namespace

Command parse_args(const std::vector<std::string>& args)
{
    Parser parser;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        parser.app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        throw UsageError(e.what());
    }
    Command cmd = parser.finish();
    if (const auto w = env_workers())
    {
        if (auto* r = std::get_if<RunCommand>(&cmd))
        {
            r->workers = *w;
        }
        else if (auto* s = std::get_if<SweepCommand>(&cmd))
        {
            s->workers = *w;
        }
    }
    return cmd;
}

int execute(const Command& cmd, std::ostream& out, std::ostream& err)
{
    try
    {
        return std::visit(
            [&](const auto& c) -> int {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, PresetCommand>)
                {
                    return do_preset(c, out);
                }
                else if constexpr (std::is_same_v<T, RunCommand>)
                {
                    return do_run(c, out, err);
                }
                else
                {
                    return do_sweep(c, out, err);
                }
            },
            cmd);
    }
    catch (const IoError& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    for (const auto& a : args)
    {
        if (a == "--help" || a == "-h" || a == "--version")
        {
            Parser parser;
            try
            {
                parser.app.parse(argc, argv);
            }
            catch (const CLI::ParseError& e)
            {
                return parser.app.exit(e, out, err);
            }
        }
    }
    Command cmd;
    try
    {
        cmd = parse_args(args);
    }
    catch (const UsageError& e)
    {
        err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
        return kExitUsage;
    }
    return execute(cmd, out, err);
}

} // namespace copx::cli
