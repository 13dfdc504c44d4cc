// SPDX-License-Identifier: Apache-2.0
//
// bdris-sim — BD-RIS cascaded channel estimation and beamforming simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "common.hpp"
#include "config.hpp"
#include "rng.hpp"

namespace bdris {

/// Inverse of the end-to-end power gain of the two-hop link.
///
/// xi = rho * (1 - cos(pi/L))^2 with
/// rho = 4^3 pi^4 d1^e1 d2^e2 lambda^-4 / (Gt Gr).
/// Larger xi means more attenuation; received power scales as 1/xi.
inline double path_loss(const PathLossParams& p)
{
    p.validate();
    const double lambda = 299792458.0 / p.carrier_hz;
    const double rho = 64.0 * std::pow(arma::datum::pi, 4)
        * std::pow(p.bs_ris_distance_m, p.bs_ris_exponent)
        * std::pow(p.ris_user_distance_m, p.ris_user_exponent)
        / (std::pow(lambda, 4) * p.bs_gain * p.user_gain);
    const double pattern = 1.0 - std::cos(arma::datum::pi / p.sectors);
    return rho * pattern * pattern;
}

/// One draw of the separate channels for a single surface (sector).
struct ChannelRealization {
    arma::cx_mat ris_to_bs;   // N x M
    arma::cx_mat user_to_ris; // M x K
    double path_loss_linear = 1.0; // xi
    double rician_factor = 0.0;    // linear
    std::uint64_t seed = 0;
};

/// Cascaded channel in per-group and per-tile form. Column block i of
/// `tile` is the sum of the tile's `tile_size` column blocks of `group`.
struct CascadedChannel {
    arma::cx_mat group; // NK x (group_size^2 * num_groups)
    arma::cx_mat tile;  // NK x (group_size^2 * num_tiles)
};

namespace detail {

// half-wavelength uniform linear array response
inline arma::cx_vec steering(int n, double angle)
{
    arma::cx_vec a(n);
    const double s = std::sin(angle);
    for (int k = 0; k < n; ++k)
        a(k) = std::exp(cx(0.0, arma::datum::pi * s * k));
    return a;
}

// Rician mixture with unit average power, then one link's share of the
// end-to-end attenuation.
inline arma::cx_mat draw_link(int n_rows, int n_cols, double kappa,
                              double amplitude, Rng& rng)
{
    const double aod = (rng.uniform() - 0.5) * arma::datum::pi;
    const double aoa = (rng.uniform() - 0.5) * arma::datum::pi;
    arma::cx_mat los = steering(n_rows, aoa) * arma::strans(steering(n_cols, aod));
    arma::cx_mat nlos = rng.cnormal_matrix(n_rows, n_cols);
    const double w_los = std::sqrt(kappa / (kappa + 1.0));
    const double w_nlos = std::sqrt(1.0 / (kappa + 1.0));
    return amplitude * (w_los * los + w_nlos * nlos);
}

} // namespace detail

/// Draws the two separate channels with Rician small-scale fading.
/// The end-to-end attenuation xi is split evenly: each link carries an
/// amplitude factor xi^(-1/4), so the cascade has power 1/xi.
inline ChannelRealization draw_channels(const SurfaceConfig& cfg, double xi,
                                        double kappa, Rng& rng,
                                        std::uint64_t seed = 0)
{
    cfg.validate();
    check_positive(xi, "path loss");
    check_non_negative(kappa, "rician_factor");

    const double amp = std::pow(xi, -0.25);
    ChannelRealization ch;
    ch.ris_to_bs = detail::draw_link(cfg.bs_antennas, cfg.elements, kappa, amp, rng);
    ch.user_to_ris = detail::draw_link(cfg.elements, cfg.user_antennas, kappa, amp, rng);
    ch.path_loss_linear = xi;
    ch.rician_factor = kappa;
    ch.seed = seed;
    return ch;
}

inline ChannelRealization draw_channels(const SurfaceConfig& cfg,
                                        const PathLossParams& p, double kappa,
                                        std::uint64_t seed)
{
    Rng rng(seed);
    return draw_channels(cfg, path_loss(p), kappa, rng, seed);
}

/// Builds the cascaded channel, per group and aggregated per tile.
/// Column block g of the per-group form is kron(H_g^T, G_g).
inline CascadedChannel cascade(const ChannelRealization& ch, const SurfaceConfig& cfg)
{
    cfg.validate();
    const int n = cfg.bs_antennas;
    const int k = cfg.user_antennas;
    const int m = cfg.elements;
    const int mb = cfg.group_size;
    const int g1 = cfg.num_groups();
    const int g2 = cfg.num_tiles();
    const int m2 = mb * mb;

    if (static_cast<int>(ch.ris_to_bs.n_rows) != n
        || static_cast<int>(ch.ris_to_bs.n_cols) != m
        || static_cast<int>(ch.user_to_ris.n_rows) != m
        || static_cast<int>(ch.user_to_ris.n_cols) != k)
        throw dimension_mismatch("cascade: channel dimensions do not match config");

    CascadedChannel out;
    out.group.set_size(n * k, m2 * g1);
    for (int g = 0; g < g1; ++g) {
        arma::cx_mat gg = ch.ris_to_bs.cols(g * mb, (g + 1) * mb - 1);
        arma::cx_mat hg = ch.user_to_ris.rows(g * mb, (g + 1) * mb - 1);
        out.group.cols(g * m2, (g + 1) * m2 - 1) = arma::kron(arma::strans(hg), gg);
    }
    out.tile.zeros(n * k, m2 * g2);
    for (int i = 0; i < g2; ++i)
        for (int j = 0; j < cfg.tile_size; ++j) {
            const int g = i * cfg.tile_size + j;
            out.tile.cols(i * m2, (i + 1) * m2 - 1)
                += out.group.cols(g * m2, (g + 1) * m2 - 1);
        }
    return out;
}

/// Downlink effective channel (K x N) for a stacked pattern vector
/// theta = [vec(T_1^T); ...; vec(T_G2^T)] applied to the tile channel.
inline arma::cx_mat effective_downlink(const arma::cx_mat& tile_channel,
                                       const arma::cx_vec& theta, int bs_antennas)
{
    if (theta.n_elem != tile_channel.n_cols)
        throw dimension_mismatch("effective_downlink: pattern length mismatch");
    if (tile_channel.n_rows % bs_antennas != 0)
        throw dimension_mismatch("effective_downlink: row count not divisible by N");
    return arma::strans(unvec(tile_channel * theta, bs_antennas));
}

} // namespace bdris
