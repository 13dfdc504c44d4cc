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

#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "stiefel.hpp"

namespace bdris {

/// Quadratic coupling matrix of the channel-strength objective:
/// B = Q^T Q^* (Hermitian PSD), so that theta^T B theta^* = ||Q theta||^2.
inline arma::cx_mat pattern_quadratic(const arma::cx_mat& tile_channel)
{
    return arma::strans(tile_channel) * arma::conj(tile_channel);
}

/// Block (i, j) of a tile-indexed quadratic, each group_size^2 square.
inline arma::cx_mat quadratic_block(const arma::cx_mat& b, int i, int j, int block_dim)
{
    return b(arma::span(i * block_dim, (i + 1) * block_dim - 1),
             arma::span(j * block_dim, (j + 1) * block_dim - 1));
}

struct MimoOptions {
    stiefel::SolverOptions inner;
    int max_sweeps = 50;
    double tol = 1e-6; // relative channel-strength change between sweeps
};

struct ThetaResult {
    arma::cx_vec theta;                // stacked tile patterns
    std::vector<double> strength_trace; // tr(H H^H) after each sweep
    int sweeps = 0;
};

/// Block-coordinate maximization of the effective channel strength over the
/// per-tile unitary patterns. Each tile subproblem is a Stiefel ascent warm
/// started at the current iterate, so the strength trace never decreases.
inline ThetaResult optimize_theta(const arma::cx_mat& tile_channel, int group_size,
                                  const MimoOptions& opts = {},
                                  const arma::cx_vec* init = nullptr)
{
    const int m2 = group_size * group_size;
    if (tile_channel.n_cols % m2 != 0)
        throw dimension_mismatch("optimize_theta: channel columns not tile aligned");
    const int tiles = static_cast<int>(tile_channel.n_cols) / m2;

    const arma::cx_mat b = pattern_quadratic(tile_channel);

    arma::cx_vec theta;
    if (init) {
        if (init->n_elem != tile_channel.n_cols)
            throw dimension_mismatch("optimize_theta: init length mismatch");
        theta = *init;
    } else {
        theta.set_size(tile_channel.n_cols);
        const arma::cx_vec eye_vec = vec(arma::eye<arma::cx_mat>(group_size, group_size));
        for (int i = 0; i < tiles; ++i)
            theta.subvec(i * m2, (i + 1) * m2 - 1) = eye_vec;
    }

    auto strength = [&](const arma::cx_vec& th) {
        return std::pow(arma::norm(tile_channel * th), 2);
    };

    ThetaResult res;
    double current = strength(theta);
    res.strength_trace.push_back(current);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (int i = 0; i < tiles; ++i) {
            arma::cx_vec chi(m2, arma::fill::zeros);
            for (int j = 0; j < tiles; ++j)
                if (j != i)
                    chi += quadratic_block(b, i, j, m2)
                        * arma::conj(theta.subvec(j * m2, (j + 1) * m2 - 1));
            // maximize theta_i^T B_ii theta_i^* + 2 Re{theta_i^T chi}:
            // canonical solver form with the quadratic sign flipped
            const arma::cx_mat v = -quadratic_block(b, i, i, m2);
            const arma::cx_mat x0 = stiefel::point_from_theta(
                theta.subvec(i * m2, (i + 1) * m2 - 1), group_size);
            const auto sol = stiefel::maximize(v, chi, x0, opts.inner);
            theta.subvec(i * m2, (i + 1) * m2 - 1) =
                stiefel::theta_from_point(sol.point);
        }
        const double updated = strength(theta);
        res.strength_trace.push_back(updated);
        ++res.sweeps;
        if (std::abs(updated - current) <= opts.tol * std::max(updated, current))
            break;
        current = updated;
    }
    res.theta = theta;
    return res;
}

struct Transceiver {
    arma::cx_mat precoder; // N x streams, ||precoder||_F^2 = power
    arma::cx_mat combiner; // K x streams, orthonormal columns
    bool rank_deficient = false;
};

/// SVD transceiver on a K x N effective channel: combiner from the leading
/// left singular vectors, precoder from the leading right singular vectors
/// with equal per-stream power and Frobenius normalization to the budget.
inline Transceiver svd_transceiver(const arma::cx_mat& channel, int streams,
                                   double power)
{
    check_positive(power, "power");
    const int k = static_cast<int>(channel.n_rows);
    const int n = static_cast<int>(channel.n_cols);
    if (streams < 1 || streams > std::min(n, k))
        throw invalid_parameter("svd_transceiver: invalid stream count");

    arma::cx_mat u, vmat;
    arma::vec s;
    if (!arma::svd(u, s, vmat, channel))
        throw singular_matrix("svd_transceiver: SVD failed");

    Transceiver out;
    out.combiner = u.cols(0, streams - 1);
    arma::cx_mat p = vmat.cols(0, streams - 1);
    out.precoder = std::sqrt(power) * p / arma::norm(p, "fro");
    out.rank_deficient = s(streams - 1) <= 1e-12 * std::max(1.0, s(0));
    return out;
}

/// Mutual information of the combined link, in bits per channel use.
inline double link_rate(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                        const arma::cx_mat& combiner, double noise_power)
{
    check_positive(noise_power, "noise_power");
    const int streams = static_cast<int>(precoder.n_cols);
    const arma::cx_mat wc = combiner.t() * channel * precoder; // streams x streams
    const arma::cx_mat gram = noise_power * (combiner.t() * combiner);
    arma::cx_mat whitened;
    if (!arma::solve(whitened, gram, arma::cx_mat(wc * wc.t()),
                     arma::solve_opts::no_approx))
        throw singular_matrix("link_rate: combiner Gram matrix is singular");
    const arma::cx_mat inside =
        arma::eye<arma::cx_mat>(streams, streams) + whitened;
    const cx det = arma::det(inside);
    return std::log2(std::abs(det));
}

/// Frame-efficiency scaling of a rate by the share of slots left for data.
inline double spectral_efficiency(double rate, int training, int feedback, int frame)
{
    if (frame <= training + feedback)
        throw invalid_parameter("spectral_efficiency: frame shorter than overhead");
    return (1.0 - double(training + feedback) / frame) * rate;
}

struct MimoDesign {
    arma::cx_vec theta;
    Transceiver transceiver;
    double channel_strength = 0.0; // tr(H H^H) at the designed pattern
    double design_rate = 0.0;      // rate on the channel the design was made from
};

/// Two-stage design from a (possibly estimated) tile channel: pattern by
/// channel-strength ascent, then SVD transceiver on the resulting link.
inline MimoDesign design_mimo(const arma::cx_mat& tile_channel, int group_size,
                              int bs_antennas, int streams, double power,
                              double noise_power, const MimoOptions& opts = {})
{
    MimoDesign d;
    ThetaResult tr = optimize_theta(tile_channel, group_size, opts);
    d.theta = tr.theta;
    d.channel_strength = tr.strength_trace.back();
    const arma::cx_mat h_eff = effective_downlink(tile_channel, d.theta, bs_antennas);
    d.transceiver = svd_transceiver(h_eff, streams, power);
    d.design_rate = link_rate(h_eff, d.transceiver.precoder, d.transceiver.combiner,
                              noise_power);
    return d;
}

} // namespace bdris
