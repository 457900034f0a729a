// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#pragma once

#include "copx/propagation.hpp"

#include <span>

namespace copx
{

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double lin)
{
    return 10.0 * std::log10(lin);
}

struct NoiseModel
{
    double thermal_density_dbm_hz = -174.0;
    double ue_noise_figure_db = 9.0;
    double bs_noise_figure_db = 5.0;
};

/// Truncated Shannon mapping from SINR to rate.
struct LinkRateModel
{
    double bandwidth_efficiency = 0.9;
    double se_cap_bps_hz = 7.4;
    double min_sinr_db = -10.0; ///< rate is zero below this
};

enum class UlPowerMode
{
    FractionalPc,
    MaxPower
};

struct PowerControlParams
{
    UlPowerMode mode = UlPowerMode::FractionalPc;
    double p0_dbm = -96.0; ///< per reference bandwidth
    double alpha = 0.8;
    double reference_bandwidth_hz = 180e3;
    double max_power_dbm = 23.0;
};

/// Thermal noise plus noise figure over `bandwidth_hz`.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db,
                       double thermal_density_dbm_hz = -174.0);

/// DL SINR in dB. Every sector transmits its full power over the whole
/// carrier; interferers are weighted by their DL load. `noise_dbm` is the
/// UE noise over the carrier.
double dl_sinr_db(int user, int serving_sector, const LinkGainTable& gains,
                  std::span<const double> sector_tx_power_dbm, std::span<const double> dl_loads,
                  double noise_dbm);

/// Open-loop fractional power control capped at max_power_dbm. MaxPower
/// mode always returns the cap.
double ul_tx_power_dbm(double pathloss_db, double alloc_bandwidth_hz,
                       const PowerControlParams& pc);

/// One UL transmitter as seen by the other cells. `activity` is the fraction
/// of the carrier the user occupies, i.e. the probability it collides with a
/// given resource of a victim user.
struct UlEmitter
{
    int user_id = 0;
    int sector_id = 0;
    double psd_mw_per_hz = 0.0;
    double activity = 0.0;
};

/// Interference PSD (mW/Hz) at `sector` from emitters attached elsewhere.
double ul_interference_mw_per_hz(int sector, const LinkGainTable& gains,
                                 std::span<const UlEmitter> emitters);

/// UL SINR in dB of `user` at `serving_sector`, all powers referenced per Hz.
double ul_sinr_db(int user, int serving_sector, const LinkGainTable& gains,
                  double user_psd_mw_per_hz, std::span<const UlEmitter> emitters,
                  double noise_psd_mw_per_hz);

/// Spectral efficiency in bit/s/Hz including the bandwidth efficiency;
/// zero below min_sinr_db.
double spectral_efficiency(double sinr_db, const LinkRateModel& model);

double link_rate_bps(double sinr_db, double alloc_bandwidth_hz, const LinkRateModel& model);

} // namespace copx
