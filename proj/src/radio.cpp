// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/radio.hpp"

#include <algorithm>

namespace copx
{

double noise_power_dbm(double bandwidth_hz, double noise_figure_db, double thermal_density_dbm_hz)
{
    return thermal_density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double dl_sinr_db(int user, int serving_sector, const LinkGainTable& gains,
                  std::span<const double> sector_tx_power_dbm, std::span<const double> dl_loads,
                  double noise_dbm)
{
    const double signal =
        db_to_linear(sector_tx_power_dbm[serving_sector]) * gains.gain_linear(serving_sector, user);
    double interference = 0.0;
    for (int s = 0; s < gains.n_sectors(); ++s)
    {
        if (s == serving_sector || dl_loads[s] <= 0.0)
        {
            continue;
        }
        interference += dl_loads[s] * db_to_linear(sector_tx_power_dbm[s]) * gains.gain_linear(s, user);
    }
    return linear_to_db(signal / (interference + db_to_linear(noise_dbm)));
}

double ul_tx_power_dbm(double pathloss_db, double alloc_bandwidth_hz, const PowerControlParams& pc)
{
    if (pc.mode == UlPowerMode::MaxPower)
    {
        return pc.max_power_dbm;
    }
    const double open_loop = pc.p0_dbm + pc.alpha * pathloss_db +
                             10.0 * std::log10(alloc_bandwidth_hz / pc.reference_bandwidth_hz);
    return std::min(pc.max_power_dbm, open_loop);
}

double ul_interference_mw_per_hz(int sector, const LinkGainTable& gains,
                                 std::span<const UlEmitter> emitters)
{
    double sum = 0.0;
    for (const auto& e : emitters)
    {
        if (e.sector_id == sector || e.activity <= 0.0)
        {
            continue;
        }
        sum += e.activity * e.psd_mw_per_hz * gains.gain_linear(sector, e.user_id);
    }
    return sum;
}

double ul_sinr_db(int user, int serving_sector, const LinkGainTable& gains,
                  double user_psd_mw_per_hz, std::span<const UlEmitter> emitters,
                  double noise_psd_mw_per_hz)
{
    const double signal = user_psd_mw_per_hz * gains.gain_linear(serving_sector, user);
    const double interference = ul_interference_mw_per_hz(serving_sector, gains, emitters);
    return linear_to_db(signal / (interference + noise_psd_mw_per_hz));
}

double spectral_efficiency(double sinr_db, const LinkRateModel& model)
{
    if (!(sinr_db >= model.min_sinr_db))
    {
        return 0.0;
    }
    const double se = std::log2(1.0 + db_to_linear(sinr_db));
    return model.bandwidth_efficiency * std::min(se, model.se_cap_bps_hz);
}

double link_rate_bps(double sinr_db, double alloc_bandwidth_hz, const LinkRateModel& model)
{
    if (alloc_bandwidth_hz <= 0.0)
    {
        return 0.0;
    }
    return alloc_bandwidth_hz * spectral_efficiency(sinr_db, model);
}

} // namespace copx
