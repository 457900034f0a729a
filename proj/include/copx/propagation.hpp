// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors
//
// Rural-macro (RMa) path loss of 3GPP TR 38.901, log-normal shadowing,
// horizontal sector antenna pattern and the resulting per-link cell gain.

#pragma once

#include "copx/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace copx
{

inline constexpr double kSpeedOfLight = 3.0e8;

struct RmaParams
{
    double avg_building_height_m = 5.0;
    double street_width_m = 20.0;
    double carrier_ghz = 0.7;
};

enum class LinkState
{
    Los,
    Nlos
};

std::string to_string(LinkState v);

/// RMa LOS probability: 1 up to 10 m, exp(-(d - 10) / 1000) beyond.
double los_probability(double d2d_m);

/// 2*pi*h_BS*h_UT*f_c/c, with f_c in Hz.
double breakpoint_distance(double h_bs_m, double h_ut_m, double carrier_hz);

/// RMa path loss in dB. The LOS/PL2 branch switches on the 2D distance and
/// evaluates on the 3D distance. 2D distances below 10 m are clamped to 10 m.
/// NLOS is max(LOS, NLOS'), applied past its nominal 5 km limit as well.
/// Throws ConfigError on non-finite input.
double rma_pathloss(LinkState state, double d2d_m, double d3d_m, double h_bs_m, double h_ut_m,
                    const RmaParams& params);

/// Shadowing standard deviation: LOS 4 dB before / 6 dB after the breakpoint, NLOS 8 dB.
double shadowing_sigma_db(LinkState state, bool beyond_breakpoint);

/// Zero-mean Gaussian shadowing draw in dB.
double sample_shadowing(LinkState state, bool beyond_breakpoint, std::mt19937_64& rng);

/// Wraps an angle into (-180, 180].
double wrap_angle_deg(double deg);

/// Horizontal pattern A(phi) = G - min(12 (phi/phi_3dB)^2, A_m); omni returns G.
double antenna_gain(const AntennaConfig& antenna, double sector_azimuth_deg,
                    double bearing_to_user_deg);

struct CellGain
{
    double gain_db = 0.0; ///< antenna - pathloss + shadowing; used for both DL and UL
};

/// Breakdown of one sector-user link, kept for diagnostics.
struct LinkTerms
{
    LinkState state = LinkState::Nlos;
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    double antenna_db = 0.0;
    double gain_db = 0.0;
    bool out_of_validity = false; ///< NLOS link beyond the model's 5 km range
};

LinkTerms link_terms(const BaseStationSpec& bs, const SectorInstance& sector,
                     const UserSpec& user, LinkState state, double shadowing_db,
                     const RmaParams& params);

CellGain cell_gain(const BaseStationSpec& bs, const SectorInstance& sector, const UserSpec& user,
                   LinkState state, double shadowing_db, const RmaParams& params);

/// Switches for deterministic studies.
struct PropagationOptions
{
    bool shadowing = true;
    bool force_los = false;
};

/// Per (sector, user) cell gains of one realization. LOS state and shadowing
/// are drawn once per (site, user) and shared by the co-located sectors.
class LinkGainTable
{
  public:
    LinkGainTable() = default;
    LinkGainTable(int n_sectors, int n_users);

    int n_sectors() const { return n_sectors_; }
    int n_users() const { return n_users_; }

    double gain_db(int sector, int user) const;
    /// Linear gain, cached.
    double gain_linear(int sector, int user) const { return linear_[index(sector, user)]; }
    const LinkTerms& terms(int sector, int user) const { return terms_[index(sector, user)]; }

    void set(int sector, int user, const LinkTerms& terms);

    /// Adds a constant to every gain (used by invariance tests).
    void offset_all(double delta_db);

  private:
    std::size_t index(int sector, int user) const;

    int n_sectors_ = 0;
    int n_users_ = 0;
    std::vector<LinkTerms> terms_;
    std::vector<double> linear_;
};

/// Draws link states and shadowing, then fills the gain table. The draw
/// order is site-major, user-minor, so the table is a pure function of
/// the inputs and the RNG state.
LinkGainTable build_link_gains(std::span<const BaseStationSpec> base_stations,
                               std::span<const SectorInstance> sectors,
                               std::span<const UserSpec> users, const RmaParams& params,
                               const PropagationOptions& options, std::mt19937_64& rng);

/// CSV: sector_id,user_id,state,pathloss_db,shadowing_db,antenna_db,gain_db,extrapolated
/// where extrapolated marks NLOS links past 5 km.
void write_link_csv(std::ostream& out, const LinkGainTable& table);

} // namespace copx
