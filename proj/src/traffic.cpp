// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/traffic.hpp"

#include "copx/csv.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace copx
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dbm_to_mw(double dbm)
{
    return db_to_linear(dbm);
}

// Path loss seen by UL power control: path loss net of shadowing, without
// antenna gain.
double pc_pathloss_db(const LinkGainTable& gains, int sector, int user)
{
    const auto& t = gains.terms(sector, user);
    return t.pathloss_db - t.shadowing_db;
}

double ul_psd_mw_per_hz(double bandwidth_hz, double pathloss_db, const PowerControlParams& pc)
{
    return dbm_to_mw(ul_tx_power_dbm(pathloss_db, bandwidth_hz, pc)) / bandwidth_hz;
}

struct PassInput
{
    std::vector<double> dl_loads;
    std::vector<UlEmitter> emitters; ///< one per attached user
};

struct PassOutput
{
    std::vector<double> dl_loads;
    std::vector<double> ul_loads;
    std::vector<double> dl_sinr;
    std::vector<double> ul_sinr;
    std::vector<DropDecision> drops;
    std::vector<double> dl_achievable;
    std::vector<double> ul_achievable;
    std::vector<CellAllocation> dl_alloc;
    std::vector<CellAllocation> ul_alloc;
    std::vector<UlEmitter> emitters;
};

class CouplingSolver
{
  public:
    explicit CouplingSolver(const NetworkState& s)
        : s_(s),
          n_sectors_(static_cast<int>(s.cells.size())),
          n_users_(static_cast<int>(s.users.size())),
          tx_dbm_(s.cells.size()),
          dl_noise_dbm_(s.users.size()),
          pc_pathloss_(s.users.size(), 0.0),
          members_(s.cells.size())
    {
        for (int c = 0; c < n_sectors_; ++c)
        {
            tx_dbm_[c] = s.cells[c].tx_power_dbm;
        }
        ul_noise_psd_ = dbm_to_mw(s.noise.thermal_density_dbm_hz + s.noise.bs_noise_figure_db);
        for (int u = 0; u < n_users_; ++u)
        {
            dl_noise_dbm_[u] = noise_power_dbm(s.bandwidth_hz, s.users[u].noise_figure_db,
                                               s.noise.thermal_density_dbm_hz);
            const int serving = s.attachments[u].serving_sector_id;
            if (serving >= 0)
            {
                members_[serving].push_back(u);
                pc_pathloss_[u] = pc_pathloss_db(s.gains, serving, u);
            }
        }
    }

    // Full load: each cell's carrier is split evenly between its users.
    PassInput initial_input() const
    {
        PassInput in;
        in.dl_loads.assign(n_sectors_, 1.0);
        for (int c = 0; c < n_sectors_; ++c)
        {
            const auto& m = members_[c];
            for (int u : m)
            {
                const double bw = s_.bandwidth_hz / static_cast<double>(m.size());
                in.emitters.push_back(UlEmitter{u, c, ul_psd_mw_per_hz(bw, pc_pathloss_[u], s_.power_control),
                                                1.0 / static_cast<double>(m.size())});
            }
        }
        return in;
    }

    PassOutput pass(const PassInput& in) const
    {
        const double bw = s_.bandwidth_hz;
        PassOutput out;
        out.dl_sinr.assign(n_users_, kNaN);
        out.ul_sinr.assign(n_users_, kNaN);
        out.drops.assign(n_users_, DropDecision{});
        out.dl_achievable.assign(n_users_, 0.0);
        out.ul_achievable.assign(n_users_, 0.0);

        std::vector<double> dl_weights = in.dl_loads;
        std::vector<UlEmitter> ul_emitters = in.emitters;
        if (s_.coupling.full_load)
        {
            std::fill(dl_weights.begin(), dl_weights.end(), 1.0);
            for (auto& e : ul_emitters)
            {
                e.activity = 1.0 / static_cast<double>(members_[e.sector_id].size());
            }
        }

        std::vector<double> ul_in(n_sectors_, 0.0);
        for (int c = 0; c < n_sectors_; ++c)
        {
            ul_in[c] = ul_interference_mw_per_hz(c, s_.gains, ul_emitters) + ul_noise_psd_;
        }

        std::vector<double> dl_se(n_users_, 0.0);
        std::vector<double> ul_ref_sinr(n_users_, kNaN);
        for (int c = 0; c < n_sectors_; ++c)
        {
            std::vector<CellDemand> dl_demands;
            std::vector<CellDemand> ul_demands;
            for (int u : members_[c])
            {
                const auto& user = s_.users[u];
                const double g = s_.gains.gain_linear(c, u);

                const double dl_sinr = dl_sinr_db(u, c, s_.gains, tx_dbm_, dl_weights, dl_noise_dbm_[u]);
                const double ref_bw = std::min(s_.power_control.reference_bandwidth_hz, bw);
                const double ul_sinr_ref =
                    linear_to_db(ul_psd_mw_per_hz(ref_bw, pc_pathloss_[u], s_.power_control) * g / ul_in[c]);
                const DropDecision drop = drop_check(dl_sinr, ul_sinr_ref, s_.drop_threshold_db);

                out.dl_sinr[u] = dl_sinr;
                out.ul_sinr[u] = ul_sinr_ref;
                ul_ref_sinr[u] = ul_sinr_ref;
                out.drops[u] = drop;
                dl_se[u] = spectral_efficiency(dl_sinr, s_.rate);

                if (!drop.dl)
                {
                    const double req = user.service.dl_req_bps;
                    const double demand = req <= 0.0 ? 0.0 : (dl_se[u] > 0.0 ? req / dl_se[u] : kInf);
                    dl_demands.push_back(CellDemand{u, user.user_class, demand});
                }
                if (!drop.ul)
                {
                    const double demand = ul_demand_hz(user.service.ul_req_bps, pc_pathloss_[u], g, ul_in[c], bw,
                                                       s_.power_control, s_.rate);
                    ul_demands.push_back(CellDemand{u, user.user_class, demand});
                }
            }
            out.dl_alloc.push_back(allocate_cell(c, Direction::Dl, dl_demands, bw));
            out.ul_alloc.push_back(allocate_cell(c, Direction::Ul, ul_demands, bw));
        }

        out.dl_loads.assign(n_sectors_, 0.0);
        out.ul_loads.assign(n_sectors_, 0.0);
        std::vector<double> ul_bw(n_users_, 0.0);
        for (int c = 0; c < n_sectors_; ++c)
        {
            out.dl_loads[c] = out.dl_alloc[c].load;
            out.ul_loads[c] = out.ul_alloc[c].load;
            for (const auto& a : out.dl_alloc[c].users)
            {
                const double req = s_.users[a.user_id].service.dl_req_bps;
                out.dl_achievable[a.user_id] =
                    a.allocated_hz >= a.demand_hz ? req : a.allocated_hz * dl_se[a.user_id];
            }
            for (const auto& a : out.ul_alloc[c].users)
            {
                const int u = a.user_id;
                const double req = s_.users[u].service.ul_req_bps;
                const double g = s_.gains.gain_linear(c, u);
                ul_bw[u] = a.allocated_hz;
                out.ul_achievable[u] =
                    a.allocated_hz >= a.demand_hz
                        ? req
                        : ul_rate_bps(a.allocated_hz, pc_pathloss_[u], g, ul_in[c], s_.power_control, s_.rate);
                if (a.allocated_hz > 0.0)
                {
                    out.ul_sinr[u] = linear_to_db(
                        ul_psd_mw_per_hz(a.allocated_hz, pc_pathloss_[u], s_.power_control) * g / ul_in[c]);
                }
            }
        }

        for (int c = 0; c < n_sectors_; ++c)
        {
            for (int u : members_[c])
            {
                const double b = ul_bw[u];
                const double psd_bw = b > 0.0 ? b : std::min(s_.power_control.reference_bandwidth_hz, bw);
                out.emitters.push_back(
                    UlEmitter{u, c, ul_psd_mw_per_hz(psd_bw, pc_pathloss_[u], s_.power_control), b / bw});
            }
        }
        return out;
    }

    CouplingResult solve() const
    {
        CouplingResult result;
        PassInput in = initial_input();
        std::vector<double> prev_dl(n_sectors_, 1.0);
        std::vector<double> prev_ul(n_sectors_, 1.0);
        const double d = s_.coupling.damping;

        for (int it = 1; it <= s_.coupling.max_iterations; ++it)
        {
            PassOutput out = pass(in);
            result.iterations = it;

            double delta = 0.0;
            double max_load = 0.0;
            for (int c = 0; c < n_sectors_; ++c)
            {
                delta = std::max({delta, std::abs(out.dl_loads[c] - prev_dl[c]),
                                  std::abs(out.ul_loads[c] - prev_ul[c])});
                max_load = std::max({max_load, in.dl_loads[c], out.dl_loads[c], out.ul_loads[c]});
            }
            result.max_load_trace.push_back(max_load);

            if (delta < s_.coupling.tolerance)
            {
                result.converged = true;
                in.dl_loads = out.dl_loads;
                in.emitters = out.emitters;
                break;
            }
            prev_dl = out.dl_loads;
            prev_ul = out.ul_loads;
            for (int c = 0; c < n_sectors_; ++c)
            {
                in.dl_loads[c] = d * in.dl_loads[c] + (1.0 - d) * out.dl_loads[c];
            }
            for (std::size_t i = 0; i < in.emitters.size(); ++i)
            {
                in.emitters[i].activity = d * in.emitters[i].activity + (1.0 - d) * out.emitters[i].activity;
                in.emitters[i].psd_mw_per_hz = out.emitters[i].psd_mw_per_hz;
            }
        }

        PassOutput fin = pass(in);
        result.dl_loads = std::move(fin.dl_loads);
        result.ul_loads = std::move(fin.ul_loads);
        result.dl_sinr_db = std::move(fin.dl_sinr);
        result.ul_sinr_db = std::move(fin.ul_sinr);
        result.drops = std::move(fin.drops);
        result.dl_achievable_bps = std::move(fin.dl_achievable);
        result.ul_achievable_bps = std::move(fin.ul_achievable);
        result.dl_allocations = std::move(fin.dl_alloc);
        result.ul_allocations = std::move(fin.ul_alloc);
        return result;
    }

  private:
    const NetworkState& s_;
    int n_sectors_;
    int n_users_;
    std::vector<double> tx_dbm_;
    std::vector<double> dl_noise_dbm_;
    std::vector<double> pc_pathloss_;
    std::vector<std::vector<int>> members_;
    double ul_noise_psd_ = 0.0;
};

} // namespace

std::vector<CellInfo> make_cells(const ScenarioConfig& config, std::span<const SectorInstance> sectors)
{
    std::vector<CellInfo> cells;
    cells.reserve(sectors.size());
    for (const auto& s : sectors)
    {
        const auto& bs = config.base_stations.at(s.bs_index);
        cells.push_back(CellInfo{s.sector_id, bs.network, bs.tx_power_dbm});
    }
    return cells;
}

NetworkSet allowed_networks(UserClass cls, const AccessPolicy& policy)
{
    if (cls == UserClass::Normal)
    {
        return NetworkSet{true, false};
    }
    return policy.mc_access == McAccess::AnyNetwork ? NetworkSet{true, true} : NetworkSet{false, true};
}

Attachment select_cell(const UserSpec& user, const LinkGainTable& gains, std::span<const CellInfo> cells,
                       const AccessPolicy& policy)
{
    Attachment a;
    a.user_id = user.user_id;
    a.allowed_networks = allowed_networks(user.user_class, policy);
    double best = -kInf;
    for (const auto& cell : cells)
    {
        if (!a.allowed_networks.contains(cell.network))
        {
            continue;
        }
        const double rx = cell.tx_power_dbm + gains.gain_db(cell.sector_id, user.user_id);
        if (a.serving_sector_id < 0 || rx > best || (rx == best && cell.sector_id < a.serving_sector_id))
        {
            best = rx;
            a.serving_sector_id = cell.sector_id;
        }
    }
    if (a.serving_sector_id < 0)
    {
        throw ConfigError("user " + std::to_string(user.user_id) + " has no accessible sector");
    }
    return a;
}

AdmissionResult apply_admission(std::span<const UserSpec> users, const AccessPolicy& policy)
{
    AdmissionResult r;
    for (const auto& u : users)
    {
        if (policy.block_normal_users && u.user_class == UserClass::Normal)
        {
            r.blocked.push_back(u.user_id);
        }
        else
        {
            r.admitted.push_back(u.user_id);
        }
    }
    return r;
}

DropDecision drop_check(double dl_sinr_db, double ul_sinr_db, double threshold_db)
{
    return DropDecision{dl_sinr_db < threshold_db, ul_sinr_db < threshold_db};
}

CellAllocation allocate_cell(int sector_id, Direction direction, std::span<const CellDemand> demands,
                             double carrier_bandwidth_hz)
{
    std::vector<CellDemand> order(demands.begin(), demands.end());
    std::sort(order.begin(), order.end(), [](const CellDemand& a, const CellDemand& b) {
        const bool a_mc = a.user_class == UserClass::Mc;
        const bool b_mc = b.user_class == UserClass::Mc;
        if (a_mc != b_mc)
        {
            return a_mc;
        }
        if (a.demand_hz != b.demand_hz)
        {
            return a.demand_hz < b.demand_hz;
        }
        return a.user_id < b.user_id;
    });

    CellAllocation out;
    out.sector_id = sector_id;
    out.direction = direction;
    double residual = carrier_bandwidth_hz;
    double used = 0.0;
    for (const auto& d : order)
    {
        double a = 0.0;
        if (std::isfinite(d.demand_hz))
        {
            a = std::clamp(d.demand_hz, 0.0, residual);
        }
        residual = std::max(0.0, residual - a);
        used += a;
        out.users.push_back(UserAllocation{d.user_id, d.demand_hz, a});
    }
    out.residual_bandwidth_hz = residual;
    out.load = std::min(1.0, used / carrier_bandwidth_hz);
    return out;
}

std::string to_string(DropReason r)
{
    switch (r)
    {
    case DropReason::None:
        return "none";
    case DropReason::AdmissionBlocked:
        return "admission_blocked";
    case DropReason::LinkQuality:
        return "link_quality";
    }
    return "?";
}

DirectionTraffic account(double req_bps, bool dropped, double achievable_bps)
{
    if (!(req_bps >= 0.0))
    {
        throw std::logic_error("negative traffic requirement");
    }
    DirectionTraffic t;
    t.req_bps = req_bps;
    if (dropped)
    {
        t.dropped_bps = req_bps;
        return t;
    }
    t.served_bps = std::clamp(achievable_bps, 0.0, req_bps);
    t.blocked_bps = req_bps - t.served_bps;
    if (t.blocked_bps < 0.0)
    {
        throw std::logic_error("negative blocked traffic");
    }
    return t;
}

double ul_rate_bps(double bandwidth_hz, double pathloss_db, double gain_linear,
                   double interference_noise_mw_per_hz, const PowerControlParams& pc, const LinkRateModel& rate)
{
    if (bandwidth_hz <= 0.0)
    {
        return 0.0;
    }
    const double sinr = ul_psd_mw_per_hz(bandwidth_hz, pathloss_db, pc) * gain_linear / interference_noise_mw_per_hz;
    return link_rate_bps(linear_to_db(sinr), bandwidth_hz, rate);
}

double ul_demand_hz(double req_bps, double pathloss_db, double gain_linear, double interference_noise_mw_per_hz,
                    double carrier_hz, const PowerControlParams& pc, const LinkRateModel& rate)
{
    if (req_bps <= 0.0)
    {
        return 0.0;
    }
    auto rate_at = [&](double b) {
        return ul_rate_bps(b, pathloss_db, gain_linear, interference_noise_mw_per_hz, pc, rate);
    };
    const double full = rate_at(carrier_hz);
    if (full < req_bps)
    {
        return full > 0.0 ? carrier_hz * req_bps / full : kInf;
    }

    double lo = 0.0;
    if (pc.mode == UlPowerMode::FractionalPc)
    {
        // Below the cap the PSD, hence the spectral efficiency, does not
        // depend on the bandwidth.
        const double open_loop_dbm = pc.p0_dbm + pc.alpha * pathloss_db;
        const double cap_bw = pc.reference_bandwidth_hz * db_to_linear(pc.max_power_dbm - open_loop_dbm);
        const double psd = dbm_to_mw(open_loop_dbm) / pc.reference_bandwidth_hz;
        const double se = spectral_efficiency(linear_to_db(psd * gain_linear / interference_noise_mw_per_hz), rate);
        if (se > 0.0 && req_bps / se <= cap_bw)
        {
            return req_bps / se;
        }
        lo = std::min(cap_bw, carrier_hz);
    }
    double hi = carrier_hz;
    for (int i = 0; i < 60 && hi - lo > 1e-9 * hi; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        if (rate_at(mid) >= req_bps)
        {
            hi = mid;
        }
        else
        {
            lo = mid;
        }
    }
    return hi;
}

CouplingResult solve_load_coupling(const NetworkState& state)
{
    return CouplingSolver(state).solve();
}

std::vector<TrafficReport> build_reports(const NetworkState& state, const CouplingResult& solved)
{
    std::vector<TrafficReport> reports;
    reports.reserve(state.users.size());
    for (const auto& user : state.users)
    {
        const int u = user.user_id;
        TrafficReport r;
        r.user_id = u;
        r.user_class = user.user_class;
        r.serving_sector_id = state.attachments[u].serving_sector_id;
        if (r.serving_sector_id < 0)
        {
            r.drop_reason = DropReason::AdmissionBlocked;
            r.dl = account(user.service.dl_req_bps, true, 0.0);
            r.ul = account(user.service.ul_req_bps, true, 0.0);
            r.dl_sinr_db = kNaN;
            r.ul_sinr_db = kNaN;
            reports.push_back(r);
            continue;
        }
        r.network = state.cells[r.serving_sector_id].network;
        const DropDecision drop = solved.drops[u];
        r.drop_reason = (drop.dl || drop.ul) ? DropReason::LinkQuality : DropReason::None;
        r.dl = account(user.service.dl_req_bps, drop.dl, solved.dl_achievable_bps[u]);
        r.ul = account(user.service.ul_req_bps, drop.ul, solved.ul_achievable_bps[u]);
        r.dl_sinr_db = solved.dl_sinr_db[u];
        r.ul_sinr_db = solved.ul_sinr_db[u];
        reports.push_back(r);
    }
    return reports;
}

void write_report_csv(std::ostream& out, std::span<const TrafficReport> reports)
{
    out << "user_id,class,serving_sector,network,drop_reason,dl_sinr_db,ul_sinr_db,"
           "dl_req_mbps,dl_dropped_mbps,dl_blocked_mbps,dl_served_mbps,"
           "ul_req_mbps,ul_dropped_mbps,ul_blocked_mbps,ul_served_mbps\n";
    for (const auto& r : reports)
    {
        const bool attached = r.serving_sector_id >= 0;
        out << r.user_id << ',' << to_string(r.user_class) << ',' << r.serving_sector_id << ','
            << (attached ? to_string(r.network) : "none") << ',' << to_string(r.drop_reason) << ','
            << csv::num(r.dl_sinr_db) << ',' << csv::num(r.ul_sinr_db) << ',' << csv::mbps(r.dl.req_bps) << ','
            << csv::mbps(r.dl.dropped_bps) << ',' << csv::mbps(r.dl.blocked_bps) << ','
            << csv::mbps(r.dl.served_bps) << ',' << csv::mbps(r.ul.req_bps) << ',' << csv::mbps(r.ul.dropped_bps)
            << ',' << csv::mbps(r.ul.blocked_bps) << ',' << csv::mbps(r.ul.served_bps) << '\n';
    }
}

} // namespace copx
