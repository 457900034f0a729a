// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/propagation.hpp"

#include "copx/csv.hpp"

#include <algorithm>
#include <ostream>

namespace copx
{

namespace
{

constexpr double kMinDistance2d = 10.0;
constexpr double kNlosValidity2d = 5000.0;

void require_finite(double v, const char* what)
{
    if (!std::isfinite(v))
    {
        throw ConfigError(std::string("non-finite ") + what);
    }
}

// PL1 of the LOS two-slope model, on the 3D distance.
double pl1(double d3d, double carrier_ghz, double h)
{
    const double hp = std::pow(h, 1.72);
    return 20.0 * std::log10(40.0 * M_PI * d3d * carrier_ghz / 3.0) +
           std::min(0.03 * hp, 10.0) * std::log10(d3d) - std::min(0.044 * hp, 14.77) +
           0.002 * std::log10(h) * d3d;
}

double pl_los(double d2d, double d3d, double h_bs, double h_ut, const RmaParams& p)
{
    const double d_bp = breakpoint_distance(h_bs, h_ut, p.carrier_ghz * 1e9);
    if (d2d <= d_bp)
    {
        return pl1(d3d, p.carrier_ghz, p.avg_building_height_m);
    }
    return pl1(d_bp, p.carrier_ghz, p.avg_building_height_m) + 40.0 * std::log10(d3d / d_bp);
}

double pl_nlos_prime(double d3d, double h_bs, double h_ut, const RmaParams& p)
{
    const double h = p.avg_building_height_m;
    const double w = p.street_width_m;
    const double hr = h / h_bs;
    const double lut = std::log10(11.75 * h_ut);
    return 161.04 - 7.1 * std::log10(w) + 7.5 * std::log10(h) -
           (24.37 - 3.7 * hr * hr) * std::log10(h_bs) +
           (43.42 - 3.1 * std::log10(h_bs)) * (std::log10(d3d) - 3.0) +
           20.0 * std::log10(p.carrier_ghz) - (3.2 * lut * lut - 4.97);
}

} // namespace

std::string to_string(LinkState v)
{
    return v == LinkState::Los ? "LOS" : "NLOS";
}

double los_probability(double d2d_m)
{
    if (d2d_m <= 10.0)
    {
        return 1.0;
    }
    return std::exp(-(d2d_m - 10.0) / 1000.0);
}

double breakpoint_distance(double h_bs_m, double h_ut_m, double carrier_hz)
{
    return 2.0 * M_PI * h_bs_m * h_ut_m * carrier_hz / kSpeedOfLight;
}

double rma_pathloss(LinkState state, double d2d_m, double d3d_m, double h_bs_m, double h_ut_m,
                    const RmaParams& params)
{
    require_finite(d2d_m, "2D distance");
    require_finite(d3d_m, "3D distance");
    require_finite(h_bs_m, "BS height");
    require_finite(h_ut_m, "UT height");
    if (d2d_m < kMinDistance2d)
    {
        d2d_m = kMinDistance2d;
        d3d_m = std::max(d3d_m, std::hypot(kMinDistance2d, h_bs_m - h_ut_m));
    }
    const double los = pl_los(d2d_m, d3d_m, h_bs_m, h_ut_m, params);
    if (state == LinkState::Los)
    {
        return los;
    }
    return std::max(los, pl_nlos_prime(d3d_m, h_bs_m, h_ut_m, params));
}

double shadowing_sigma_db(LinkState state, bool beyond_breakpoint)
{
    if (state == LinkState::Nlos)
    {
        return 8.0;
    }
    return beyond_breakpoint ? 6.0 : 4.0;
}

double sample_shadowing(LinkState state, bool beyond_breakpoint, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, shadowing_sigma_db(state, beyond_breakpoint));
    return normal(rng);
}

double wrap_angle_deg(double deg)
{
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0)
    {
        r += 360.0;
    }
    else if (r > 180.0)
    {
        r -= 360.0;
    }
    return r;
}

double antenna_gain(const AntennaConfig& antenna, double sector_azimuth_deg,
                    double bearing_to_user_deg)
{
    if (antenna.pattern == AntennaPattern::Omni)
    {
        return antenna.boresight_gain_dbi;
    }
    const double phi = wrap_angle_deg(bearing_to_user_deg - sector_azimuth_deg);
    const double ratio = phi / antenna.phi_3db_deg;
    return antenna.boresight_gain_dbi - std::min(12.0 * ratio * ratio, antenna.front_back_ratio_db);
}

LinkTerms link_terms(const BaseStationSpec& bs, const SectorInstance& sector,
                     const UserSpec& user, LinkState state, double shadowing_db,
                     const RmaParams& params)
{
    const double d2d = distance_2d(bs.site, user.position);
    const double d3d = distance_3d(bs.site, user.position);
    LinkTerms t;
    t.state = state;
    t.pathloss_db = rma_pathloss(state, d2d, d3d, bs.site.z, user.position.z, params);
    t.shadowing_db = shadowing_db;
    t.antenna_db = antenna_gain(bs.antenna, sector.azimuth_deg, bearing_deg(bs.site, user.position));
    t.gain_db = t.antenna_db - t.pathloss_db + t.shadowing_db;
    t.out_of_validity = state == LinkState::Nlos && d2d > kNlosValidity2d;
    return t;
}

CellGain cell_gain(const BaseStationSpec& bs, const SectorInstance& sector, const UserSpec& user,
                   LinkState state, double shadowing_db, const RmaParams& params)
{
    return CellGain{link_terms(bs, sector, user, state, shadowing_db, params).gain_db};
}

LinkGainTable::LinkGainTable(int n_sectors, int n_users)
    : n_sectors_(n_sectors),
      n_users_(n_users),
      terms_(static_cast<std::size_t>(n_sectors) * static_cast<std::size_t>(n_users)),
      linear_(terms_.size(), 0.0)
{
}

std::size_t LinkGainTable::index(int sector, int user) const
{
    if (sector < 0 || sector >= n_sectors_ || user < 0 || user >= n_users_)
    {
        throw std::out_of_range("no gain entry for sector " + std::to_string(sector) +
                                ", user " + std::to_string(user));
    }
    return static_cast<std::size_t>(sector) * static_cast<std::size_t>(n_users_) +
           static_cast<std::size_t>(user);
}

double LinkGainTable::gain_db(int sector, int user) const
{
    return terms_[index(sector, user)].gain_db;
}

void LinkGainTable::set(int sector, int user, const LinkTerms& terms)
{
    const auto i = index(sector, user);
    terms_[i] = terms;
    linear_[i] = std::pow(10.0, terms.gain_db / 10.0);
}

void LinkGainTable::offset_all(double delta_db)
{
    for (std::size_t i = 0; i < terms_.size(); ++i)
    {
        terms_[i].gain_db += delta_db;
        linear_[i] = std::pow(10.0, terms_[i].gain_db / 10.0);
    }
}

LinkGainTable build_link_gains(std::span<const BaseStationSpec> base_stations,
                               std::span<const SectorInstance> sectors,
                               std::span<const UserSpec> users, const RmaParams& params,
                               const PropagationOptions& options, std::mt19937_64& rng)
{
    LinkGainTable table(static_cast<int>(sectors.size()), static_cast<int>(users.size()));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    for (int b = 0; b < static_cast<int>(base_stations.size()); ++b)
    {
        const auto& bs = base_stations[b];
        for (const auto& user : users)
        {
            const double d2d = distance_2d(bs.site, user.position);
            const double u = uniform(rng);
            const LinkState state =
                (options.force_los || u < los_probability(d2d)) ? LinkState::Los : LinkState::Nlos;
            const double d_bp =
                breakpoint_distance(bs.site.z, user.position.z, params.carrier_ghz * 1e9);
            const double shadow = sample_shadowing(state, d2d > d_bp, rng);
            const double shadowing_db = options.shadowing ? shadow : 0.0;

            for (const auto& sector : sectors)
            {
                if (sector.bs_index != b)
                {
                    continue;
                }
                table.set(sector.sector_id, user.user_id,
                          link_terms(bs, sector, user, state, shadowing_db, params));
            }
        }
    }
    return table;
}

void write_link_csv(std::ostream& out, const LinkGainTable& table)
{
    out << "sector_id,user_id,state,pathloss_db,shadowing_db,antenna_db,gain_db,extrapolated\n";
    for (int s = 0; s < table.n_sectors(); ++s)
    {
        for (int u = 0; u < table.n_users(); ++u)
        {
            const auto& t = table.terms(s, u);
            out << s << ',' << u << ',' << to_string(t.state) << ',' << csv::num(t.pathloss_db) << ','
                << csv::num(t.shadowing_db) << ',' << csv::num(t.antenna_db) << ','
                << csv::num(t.gain_db) << ',' << (t.out_of_validity ? 1 : 0) << '\n';
        }
    }
}

} // namespace copx
