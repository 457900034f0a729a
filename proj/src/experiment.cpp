// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/experiment.hpp"

#include "copx/csv.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>

namespace copx
{

namespace
{

// Compact per-MC-user outcome of one sweep realization.
struct McOutcome
{
    double dl_served_bps = 0.0;
    double dl_sinr_db = 0.0;
    bool public_network = false;
    bool fully_served = false;
};

struct SweepCell
{
    std::vector<McOutcome> mc;
    int iterations = 0;
    bool converged = false;
};

ScenarioConfig sweep_config(const SweepSpec& spec)
{
    ScenarioConfig config = spec.base.config;
    const int dep = deployable_index(config);
    if (dep < 0)
    {
        throw ConfigError("distance sweep needs exactly one deployable base station");
    }
    if (spec.deployable_power_dbm)
    {
        config.base_stations[dep].tx_power_dbm = *spec.deployable_power_dbm;
    }
    if (spec.mc_access)
    {
        config.policy.mc_access = *spec.mc_access;
    }
    validate(config);
    return config;
}

std::vector<std::vector<UserSpec>> sweep_users(const ScenarioConfig& config, const RunSpec& run)
{
    std::vector<std::vector<UserSpec>> users;
    for (int i = 0; i < run.n_realizations; ++i)
    {
        users.push_back(drop_users(config, derive_seed(run.base_seed + static_cast<std::uint64_t>(i), SeedStream::Users)));
    }
    return users;
}

RealizationResult sweep_realization(const ScenarioConfig& config, const std::vector<UserSpec>& users,
                                    double distance_m, std::uint64_t base_seed, std::uint64_t realization,
                                    std::uint64_t index)
{
    const auto moved = translate_mc_cluster(config, users, distance_m);
    return run_realization(moved.config, moved.users,
                           derive_seed(sweep_seed(base_seed, realization, index), SeedStream::Propagation));
}

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
    {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

void check_positive_realizations(int n)
{
    if (n < 1)
    {
        throw ConfigError("n_realizations must be >= 1");
    }
}

} // namespace

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream)
{
    return mix64(seed ^ mix64(static_cast<std::uint64_t>(stream)));
}

std::uint64_t sweep_seed(std::uint64_t base_seed, std::uint64_t realization, std::uint64_t index)
{
    return base_seed ^ mix64(mix64(realization) + index);
}

RealizationResult run_realization(const ScenarioConfig& config, const std::vector<UserSpec>& users,
                                  std::uint64_t propagation_seed)
{
    const auto sectors = make_sectors(config);
    const auto cells = make_cells(config, sectors);
    std::mt19937_64 rng(propagation_seed);
    const LinkGainTable gains =
        build_link_gains(config.base_stations, sectors, users, config.rma(), config.propagation, rng);

    const AdmissionResult admission = apply_admission(users, config.policy);
    std::vector<Attachment> attachments(users.size());
    for (int u : admission.blocked)
    {
        attachments[u] = Attachment{u, -1, allowed_networks(users[u].user_class, config.policy)};
    }
    for (int u : admission.admitted)
    {
        attachments[u] = select_cell(users[u], gains, cells, config.policy);
    }

    const NetworkState state{gains,
                             cells,
                             users,
                             attachments,
                             config.bandwidth_hz,
                             config.drop_sinr_threshold_db,
                             config.noise,
                             config.rate,
                             config.power_control,
                             config.coupling};
    const CouplingResult solved = solve_load_coupling(state);

    RealizationResult r;
    r.reports = build_reports(state, solved);
    r.dl_loads = solved.dl_loads;
    r.ul_loads = solved.ul_loads;
    r.iterations = solved.iterations;
    r.converged = solved.converged;
    return r;
}

RealizationResult run_realization(const ScenarioConfig& config, std::uint64_t seed)
{
    const auto users = drop_users(config, derive_seed(seed, SeedStream::Users));
    return run_realization(config, users, derive_seed(seed, SeedStream::Propagation));
}

void ConvergenceStats::add(const RealizationResult& r)
{
    const double total = mean_iterations * realizations + r.iterations;
    ++realizations;
    converged += r.converged ? 1 : 0;
    max_iterations = std::max(max_iterations, r.iterations);
    mean_iterations = total / realizations;
}

void ConvergenceStats::merge(const ConvergenceStats& other)
{
    if (other.realizations == 0)
    {
        return;
    }
    const double total = mean_iterations * realizations + other.mean_iterations * other.realizations;
    realizations += other.realizations;
    converged += other.converged;
    max_iterations = std::max(max_iterations, other.max_iterations);
    mean_iterations = total / realizations;
}

bool fully_served(double served_bps, double req_bps)
{
    return served_bps >= req_bps * (1.0 - 1e-9);
}

int mc_users_with_full_mean(const AggregateMetrics& m, Direction d)
{
    int n = 0;
    for (const auto& u : m.users)
    {
        if (u.user_class != UserClass::Mc)
        {
            continue;
        }
        const bool full = d == Direction::Dl ? fully_served(u.mean_dl_served_bps, u.dl_req_bps)
                                             : fully_served(u.mean_ul_served_bps, u.ul_req_bps);
        n += full ? 1 : 0;
    }
    return n;
}

AggregateMetrics aggregate(std::span<const RealizationResult> realizations)
{
    AggregateMetrics m;
    m.n_realizations = static_cast<int>(realizations.size());
    if (realizations.empty())
    {
        return m;
    }
    const auto n = static_cast<double>(realizations.size());
    const auto& first = realizations.front();
    const std::size_t n_users = first.reports.size();
    const std::size_t n_sectors = first.dl_loads.size();
    m.mean_dl_load.assign(n_sectors, 0.0);
    m.mean_ul_load.assign(n_sectors, 0.0);

    std::vector<double> dl_sinr_sum(n_users, 0.0);
    std::vector<double> ul_sinr_sum(n_users, 0.0);
    std::vector<int> dl_sinr_n(n_users, 0);
    std::vector<int> ul_sinr_n(n_users, 0);
    m.users.resize(n_users);
    for (std::size_t u = 0; u < n_users; ++u)
    {
        const auto& rep = first.reports[u];
        m.users[u].user_id = rep.user_id;
        m.users[u].user_class = rep.user_class;
        m.users[u].dl_req_bps = rep.dl.req_bps;
        m.users[u].ul_req_bps = rep.ul.req_bps;
    }

    for (const auto& r : realizations)
    {
        m.convergence.add(r);
        int n_mc = 0;
        int mc_dl = 0;
        int mc_ul = 0;
        for (std::size_t u = 0; u < n_users; ++u)
        {
            const auto& rep = r.reports[u];
            auto& agg = m.users[u];
            agg.mean_dl_served_bps += rep.dl.served_bps;
            agg.mean_ul_served_bps += rep.ul.served_bps;
            const bool dl_full = fully_served(rep.dl.served_bps, rep.dl.req_bps);
            const bool ul_full = fully_served(rep.ul.served_bps, rep.ul.req_bps);
            agg.dl_fully_served_fraction += dl_full ? 1.0 : 0.0;
            agg.ul_fully_served_fraction += ul_full ? 1.0 : 0.0;
            agg.public_fraction +=
                (rep.serving_sector_id >= 0 && rep.network == NetworkId::Public) ? 1.0 : 0.0;
            if (std::isfinite(rep.dl_sinr_db))
            {
                dl_sinr_sum[u] += rep.dl_sinr_db;
                ++dl_sinr_n[u];
            }
            if (std::isfinite(rep.ul_sinr_db))
            {
                ul_sinr_sum[u] += rep.ul_sinr_db;
                ++ul_sinr_n[u];
            }
            if (rep.user_class == UserClass::Mc)
            {
                ++n_mc;
                mc_dl += dl_full ? 1 : 0;
                mc_ul += ul_full ? 1 : 0;
            }
        }
        if (n_mc > 0)
        {
            m.mc_fully_served_dl_fraction += static_cast<double>(mc_dl) / n_mc;
            m.mc_fully_served_ul_fraction += static_cast<double>(mc_ul) / n_mc;
        }
        for (std::size_t s = 0; s < n_sectors; ++s)
        {
            m.mean_dl_load[s] += r.dl_loads[s];
            m.mean_ul_load[s] += r.ul_loads[s];
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t u = 0; u < n_users; ++u)
    {
        auto& agg = m.users[u];
        agg.mean_dl_served_bps /= n;
        agg.mean_ul_served_bps /= n;
        agg.dl_fully_served_fraction /= n;
        agg.ul_fully_served_fraction /= n;
        agg.public_fraction /= n;
        agg.mean_dl_sinr_db = dl_sinr_n[u] > 0 ? dl_sinr_sum[u] / dl_sinr_n[u] : nan;
        agg.mean_ul_sinr_db = ul_sinr_n[u] > 0 ? ul_sinr_sum[u] / ul_sinr_n[u] : nan;
    }
    m.mc_fully_served_dl_fraction /= n;
    m.mc_fully_served_ul_fraction /= n;
    for (std::size_t s = 0; s < n_sectors; ++s)
    {
        m.mean_dl_load[s] /= n;
        m.mean_ul_load[s] /= n;
    }
    return m;
}

AggregateMetrics run_scenario(const RunSpec& spec, int workers)
{
    check_positive_realizations(spec.n_realizations);
    validate(spec.config);
    std::vector<RealizationResult> results(static_cast<std::size_t>(spec.n_realizations));
    detail::parallel_for(results.size(), workers, [&](std::size_t i) {
        results[i] = run_realization(spec.config, spec.base_seed + i);
    });
    return aggregate(results);
}

std::vector<double> sweep_grid(double d_min_m, double d_max_m, double step_m)
{
    if (!(std::isfinite(d_min_m) && std::isfinite(d_max_m) && d_min_m >= 0.0))
    {
        throw ConfigError("sweep: distances must be finite and >= 0");
    }
    if (!(d_min_m <= d_max_m))
    {
        throw ConfigError("sweep: d_min must not exceed d_max");
    }
    if (!(step_m > 0.0 && std::isfinite(step_m)))
    {
        throw ConfigError("sweep: step must be positive");
    }
    const auto n = static_cast<std::size_t>(std::floor((d_max_m - d_min_m) / step_m + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        grid[k] = d_min_m + static_cast<double>(k) * step_m;
    }
    return grid;
}

std::vector<RealizationResult> run_sweep_point(const SweepSpec& spec, double distance_m, std::uint64_t index)
{
    check_positive_realizations(spec.base.n_realizations);
    const ScenarioConfig config = sweep_config(spec);
    const auto users = sweep_users(config, spec.base);
    std::vector<RealizationResult> out;
    for (int i = 0; i < spec.base.n_realizations; ++i)
    {
        out.push_back(sweep_realization(config, users[i], distance_m, spec.base.base_seed,
                                        static_cast<std::uint64_t>(i), index));
    }
    return out;
}

SweepTable run_distance_sweep(const SweepSpec& spec, int workers)
{
    check_positive_realizations(spec.base.n_realizations);
    const ScenarioConfig config = sweep_config(spec);
    const auto grid = sweep_grid(spec.d_min_m, spec.d_max_m, spec.step_m);
    const auto users = sweep_users(config, spec.base);
    const std::size_t n_real = static_cast<std::size_t>(spec.base.n_realizations);
    const double req = config.mc_service.dl_req_bps;

    std::vector<SweepCell> cells(grid.size() * n_real);
    detail::parallel_for(cells.size(), workers, [&](std::size_t task) {
        const std::size_t k = task / n_real;
        const std::size_t i = task % n_real;
        const auto r = sweep_realization(config, users[i], grid[k], spec.base.base_seed, i, k);
        SweepCell& cell = cells[task];
        cell.iterations = r.iterations;
        cell.converged = r.converged;
        for (const auto& rep : r.reports)
        {
            if (rep.user_class != UserClass::Mc)
            {
                continue;
            }
            cell.mc.push_back(McOutcome{rep.dl.served_bps, rep.dl_sinr_db,
                                        rep.serving_sector_id >= 0 && rep.network == NetworkId::Public,
                                        fully_served(rep.dl.served_bps, rep.dl.req_bps)});
        }
    });

    SweepTable table;
    table.dl_req_bps = req;
    table.n_mc_users = config.n_mc_users;
    const auto nr = static_cast<double>(n_real);
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        SweepPoint point;
        point.distance_m = grid[k];
        for (int m = 0; m < config.n_mc_users; ++m)
        {
            SweepRow row;
            row.distance_m = grid[k];
            row.user_id = m;
            for (std::size_t i = 0; i < n_real; ++i)
            {
                const auto& o = cells[k * n_real + i].mc[static_cast<std::size_t>(m)];
                row.mean_dl_served_bps += o.dl_served_bps;
                row.mean_dl_sinr_db += o.dl_sinr_db;
                row.serving_network_mode_fraction += o.public_network ? 1.0 : 0.0;
                row.dl_fully_served_fraction += o.fully_served ? 1.0 : 0.0;
            }
            row.mean_dl_served_bps /= nr;
            row.mean_dl_sinr_db /= nr;
            row.serving_network_mode_fraction /= nr;
            row.dl_fully_served_fraction /= nr;
            point.mean_fully_served_count += row.dl_fully_served_fraction;
            point.mean_dl_served_bps += row.mean_dl_served_bps;
            table.rows.push_back(row);
        }
        if (config.n_mc_users > 0)
        {
            point.mc_fully_served_dl_fraction = point.mean_fully_served_count / config.n_mc_users;
            point.mean_dl_served_bps /= config.n_mc_users;
        }
        table.points.push_back(point);
        for (std::size_t i = 0; i < n_real; ++i)
        {
            RealizationResult stub;
            stub.iterations = cells[k * n_real + i].iterations;
            stub.converged = cells[k * n_real + i].converged;
            table.convergence.add(stub);
        }
    }
    return table;
}

double median(std::vector<double> values)
{
    if (values.empty())
    {
        throw ConfigError("median of an empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SweepSummary summarize(const SweepTable& table)
{
    if (table.rows.empty())
    {
        throw ConfigError("cannot summarize an empty sweep table");
    }
    std::map<double, std::vector<double>> by_distance;
    for (const auto& row : table.rows)
    {
        by_distance[row.distance_m].push_back(row.mean_dl_served_bps);
    }

    SweepSummary s;
    s.worst_user_mean_bps = std::numeric_limits<double>::infinity();
    s.worst_cluster_mean_bps = std::numeric_limits<double>::infinity();
    for (const auto& [d, values] : by_distance)
    {
        DistanceSummary ds;
        ds.distance_m = d;
        ds.min_bps = *std::min_element(values.begin(), values.end());
        ds.max_bps = *std::max_element(values.begin(), values.end());
        ds.median_bps = median(values);
        ds.mean_bps = mean_of(values);
        s.per_distance.push_back(ds);
        s.worst_user_mean_bps = std::min(s.worst_user_mean_bps, ds.min_bps);
        if (ds.mean_bps < s.worst_cluster_mean_bps)
        {
            s.worst_cluster_mean_bps = ds.mean_bps;
            s.worst_cluster_distance_m = d;
        }
    }
    for (auto it = s.per_distance.rbegin(); it != s.per_distance.rend(); ++it)
    {
        if (!fully_served(it->min_bps, table.dl_req_bps))
        {
            break;
        }
        s.full_service_distance_m = it->distance_m;
    }
    return s;
}

ScenarioSummary summarize(const AggregateMetrics& metrics)
{
    std::vector<double> dl;
    std::vector<double> ul;
    std::vector<double> sinr;
    for (const auto& u : metrics.users)
    {
        if (u.user_class != UserClass::Mc)
        {
            continue;
        }
        dl.push_back(u.mean_dl_served_bps);
        ul.push_back(u.mean_ul_served_bps);
        if (std::isfinite(u.mean_dl_sinr_db))
        {
            sinr.push_back(u.mean_dl_sinr_db);
        }
    }
    if (dl.empty())
    {
        throw ConfigError("no MC users to summarize");
    }
    ScenarioSummary s;
    s.min_dl_bps = *std::min_element(dl.begin(), dl.end());
    s.max_dl_bps = *std::max_element(dl.begin(), dl.end());
    s.median_dl_bps = median(dl);
    s.min_ul_bps = *std::min_element(ul.begin(), ul.end());
    s.max_ul_bps = *std::max_element(ul.begin(), ul.end());
    s.median_ul_bps = median(ul);
    s.median_dl_sinr_db = sinr.empty() ? std::numeric_limits<double>::quiet_NaN() : median(sinr);
    s.mc_fully_served_dl_fraction = metrics.mc_fully_served_dl_fraction;
    s.mc_fully_served_ul_fraction = metrics.mc_fully_served_ul_fraction;
    s.mc_users_full_mean_dl = mc_users_with_full_mean(metrics, Direction::Dl);
    s.mc_users_full_mean_ul = mc_users_with_full_mean(metrics, Direction::Ul);
    return s;
}

void write_aggregate_csv(std::ostream& out, const AggregateMetrics& m)
{
    out << "user_id,class,dl_req_mbps,ul_req_mbps,mean_dl_served_mbps,mean_ul_served_mbps,"
           "mean_dl_sinr_db,mean_ul_sinr_db,dl_fully_served_fraction,ul_fully_served_fraction,public_fraction\n";
    for (const auto& u : m.users)
    {
        out << u.user_id << ',' << to_string(u.user_class) << ',' << csv::mbps(u.dl_req_bps) << ','
            << csv::mbps(u.ul_req_bps) << ',' << csv::mbps(u.mean_dl_served_bps) << ','
            << csv::mbps(u.mean_ul_served_bps) << ',' << csv::num(u.mean_dl_sinr_db) << ','
            << csv::num(u.mean_ul_sinr_db) << ',' << csv::num(u.dl_fully_served_fraction) << ','
            << csv::num(u.ul_fully_served_fraction) << ',' << csv::num(u.public_fraction) << '\n';
    }
}

void write_cell_load_csv(std::ostream& out, const AggregateMetrics& m)
{
    out << "sector_id,mean_dl_load,mean_ul_load\n";
    for (std::size_t s = 0; s < m.mean_dl_load.size(); ++s)
    {
        out << s << ',' << csv::num(m.mean_dl_load[s]) << ',' << csv::num(m.mean_ul_load[s]) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepTable& t)
{
    out << "distance_m,user_id,mean_dl_served_mbps,mean_dl_sinr_db,serving_network_mode_fraction,"
           "dl_fully_served_fraction\n";
    for (const auto& r : t.rows)
    {
        out << csv::num(r.distance_m) << ',' << r.user_id << ',' << csv::mbps(r.mean_dl_served_bps) << ','
            << csv::num(r.mean_dl_sinr_db) << ',' << csv::num(r.serving_network_mode_fraction) << ','
            << csv::num(r.dl_fully_served_fraction) << '\n';
    }
}

} // namespace copx
