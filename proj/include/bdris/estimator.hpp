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
#include "pattern.hpp"

namespace bdris {

/// Received uplink training signal, stacked over the plan's slots.
/// Slot t contributes sqrt(Pu) * unvec(Q * phi_t) * x_t plus CN(0, sigma2) noise.
inline arma::cx_vec simulate_uplink(const TrainingPlan& plan,
                                    const arma::cx_mat& tile_channel,
                                    int bs_antennas, double tx_power,
                                    double noise_power, Rng& rng)
{
    check_positive(tx_power, "tx_power");
    check_non_negative(noise_power, "noise_power");
    const int n = bs_antennas;
    const int k = plan.user_antennas;
    if (static_cast<int>(tile_channel.n_rows) != n * k
        || static_cast<int>(tile_channel.n_cols) != plan.pattern_rows())
        throw dimension_mismatch("simulate_uplink: channel does not match plan");

    const double amp = std::sqrt(tx_power);
    const double noise_amp = std::sqrt(noise_power);
    const int t1 = plan.overhead();
    arma::cx_vec y(n * t1);
    for (int t = 0; t < t1; ++t) {
        arma::cx_mat hu = unvec(tile_channel * plan.slot_pattern(t), n); // N x K
        arma::cx_vec yt = amp * (hu * plan.slot_pilot(t));
        if (noise_power > 0.0)
            for (int i = 0; i < n; ++i)
                yt(i) += noise_amp * rng.cnormal();
        y.subvec(t * n, (t + 1) * n - 1) = yt;
    }
    return y;
}

enum class LsMode { fast, pinv };

struct ChannelEstimate {
    arma::cx_vec q_hat;          // vectorized estimate
    arma::cx_mat tile_estimate;  // NK x (mb^2 g2)
    int overhead = 0;
    double mse_theory = arma::datum::nan;     // filled where noise level is known
    double normalized_error = arma::datum::nan; // filled where truth is known
};

/// Least-squares estimate of the tile channel.
///
/// fast mode exploits the scaled-unitary plan: the pseudo-inverse collapses
/// to a scaled adjoint, applied slot by slot without forming the sensing
/// matrix. pinv mode solves the normal equations of the explicitly
/// assembled sensing matrix and works for any full-rank plan.
inline ChannelEstimate ls_estimate(const arma::cx_vec& y, const TrainingPlan& plan,
                                   int bs_antennas, double tx_power, LsMode mode)
{
    check_positive(tx_power, "tx_power");
    const int n = bs_antennas;
    const int k = plan.user_antennas;
    const int t1 = plan.overhead();
    if (static_cast<int>(y.n_elem) != n * t1)
        throw dimension_mismatch("ls_estimate: signal length does not match plan");

    ChannelEstimate est;
    est.overhead = t1;
    const double amp = std::sqrt(tx_power);

    if (mode == LsMode::fast) {
        if (!plan.scaled_unitary)
            throw invalid_parameter("ls_estimate: fast mode needs a scaled-unitary plan");
        const double scale = double(k) * plan.group_size * plan.num_tiles;
        arma::cx_mat acc(n * k, plan.pattern_rows(), arma::fill::zeros);
        for (int t = 0; t < t1; ++t) {
            const arma::cx_vec yt = y.subvec(t * n, (t + 1) * n - 1);
            const arma::cx_vec u = vec(yt * plan.slot_pilot(t).t()); // NK
            acc += u * plan.slot_pattern(t).t();
        }
        est.tile_estimate = acc / (scale * amp);
        est.q_hat = vec(est.tile_estimate);
        return est;
    }

    const arma::cx_mat phi_hat = assemble_sensing_matrix(plan, n);
    const arma::cx_mat gram = phi_hat.t() * phi_hat;
    arma::cx_vec rhs = phi_hat.t() * y;
    arma::cx_vec q;
    const bool ok = arma::solve(q, gram, rhs,
                                arma::solve_opts::no_approx + arma::solve_opts::likely_sympd);
    if (!ok || !q.is_finite())
        throw singular_matrix("ls_estimate: sensing matrix is rank deficient");
    est.q_hat = q / amp;
    est.tile_estimate = unvec(est.q_hat, n * k);
    return est;
}

/// Closed-form minimum MSE of the estimator under an optimal plan.
inline double mse_theory(int bs_antennas, int group_size, double noise_power,
                         double tx_power)
{
    check_positive(tx_power, "tx_power");
    check_non_negative(noise_power, "noise_power");
    if (bs_antennas < 1 || group_size < 1)
        throw invalid_parameter("mse_theory: dimensions must be >= 1");
    return double(bs_antennas) * group_size * noise_power / tx_power;
}

/// Training SNR: total per-element received power over the whole uplink
/// training window, divided by the noise power.
inline double training_snr(double tx_power, int overhead, double xi, double noise_power)
{
    check_positive(tx_power, "tx_power");
    check_positive(xi, "path loss");
    check_positive(noise_power, "noise_power");
    if (overhead < 1)
        throw invalid_parameter("training_snr: overhead must be >= 1");
    return tx_power * overhead / (xi * noise_power);
}

/// Transmit power that meets a target training SNR.
inline double power_for_snr(double snr, int overhead, double xi, double noise_power)
{
    check_positive(snr, "snr");
    check_positive(xi, "path loss");
    check_positive(noise_power, "noise_power");
    if (overhead < 1)
        throw invalid_parameter("power_for_snr: overhead must be >= 1");
    return snr * xi * noise_power / overhead;
}

struct MseStats {
    double mse = 0.0;            // mean ||q_hat - q||^2
    double normalized_mse = 0.0; // mean of per-trial ratios
    double analytic_mse = 0.0;   // sigma2/Pu * tr(inv(PhiHat^H PhiHat))
    double mean_inv_norm = 0.0;  // mean of 1/||q||^2, for normalizing the analytic value
};

/// Monte Carlo estimation error for a fixed channel draw. Noise substreams
/// are derived per trial, so results do not depend on execution order.
inline MseStats mse_empirical(const TrainingPlan& plan, const arma::cx_mat& truth,
                              int bs_antennas, double tx_power, double noise_power,
                              int trials, std::uint64_t seed)
{
    if (trials < 1)
        throw invalid_parameter("mse_empirical: trials must be >= 1");
    const arma::cx_vec q = vec(truth);
    const double q_norm2 = std::pow(arma::norm(q), 2);

    // one LS operator per plan; cheap relative to the trial loop
    const arma::cx_mat phi_hat = assemble_sensing_matrix(plan, bs_antennas);
    const arma::cx_mat gram = phi_hat.t() * phi_hat;
    arma::cx_mat gram_inv;
    if (!arma::inv(gram_inv, gram))
        throw singular_matrix("mse_empirical: rank-deficient plan");
    const arma::cx_mat ls_op = gram_inv * phi_hat.t();

    MseStats out;
    out.analytic_mse = noise_power / tx_power * arma::trace(gram_inv).real();
    out.mean_inv_norm = 1.0 / q_norm2;

    const double amp = std::sqrt(tx_power);
    double acc_mse = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, 0x6e6f697365ULL, t); // noise stream
        const arma::cx_vec y = simulate_uplink(plan, truth, bs_antennas, tx_power,
                                               noise_power, rng);
        const arma::cx_vec q_hat = (ls_op * y) / amp;
        acc_mse += std::pow(arma::norm(q_hat - q), 2);
    }
    out.mse = acc_mse / trials;
    out.normalized_mse = out.mse / q_norm2;
    return out;
}

/// Per-user row blocks of a joint estimate: user k owns rows k*N..(k+1)*N-1.
inline std::vector<arma::cx_mat> per_user_slices(const arma::cx_mat& tile_matrix,
                                                 int bs_antennas, int users)
{
    if (static_cast<int>(tile_matrix.n_rows) != bs_antennas * users)
        throw dimension_mismatch("per_user_slices: row count mismatch");
    std::vector<arma::cx_mat> out;
    out.reserve(users);
    for (int k = 0; k < users; ++k)
        out.push_back(tile_matrix.rows(k * bs_antennas, (k + 1) * bs_antennas - 1));
    return out;
}

/// Joint multi-user estimate: all user antennas send orthogonal pilots and
/// one LS solve recovers every cascaded channel at once.
inline std::vector<arma::cx_mat> estimate_multiuser(const SurfaceConfig& cfg,
                                                    const ChannelRealization& ch,
                                                    const TrainingPlan& plan,
                                                    double tx_power, double noise_power,
                                                    Rng& rng)
{
    cfg.validate();
    if (plan.user_antennas != cfg.user_antennas)
        throw dimension_mismatch("estimate_multiuser: plan sized for wrong user count");
    const CascadedChannel casc = cascade(ch, cfg);
    const arma::cx_vec y = simulate_uplink(plan, casc.tile, cfg.bs_antennas, tx_power,
                                           noise_power, rng);
    const ChannelEstimate est = ls_estimate(y, plan, cfg.bs_antennas, tx_power,
                                            plan.scaled_unitary ? LsMode::fast
                                                                : LsMode::pinv);
    return per_user_slices(est.tile_estimate, cfg.bs_antennas, cfg.user_antennas);
}

/// Channels of one sector: its face-to-BS matrix and the stacked columns of
/// the users it covers.
struct SectorChannels {
    arma::cx_mat ris_to_bs;   // N x M
    arma::cx_mat users_to_ris; // M x K_l
};

struct MultiSectorEstimate {
    std::vector<arma::cx_mat> per_user; // N x (mb^2 g2), in sector order
    std::vector<int> sector_of_user;
    int total_overhead = 0;
};

/// Sector-by-sector estimation: while one sector trains, the others are
/// switched off, so each window reduces to the single-sector pipeline with
/// that sector's users. Total overhead is the sum of the per-sector windows.
inline MultiSectorEstimate estimate_multisector(const SurfaceConfig& cfg,
                                                const std::vector<SectorChannels>& sectors,
                                                BaseKind kind, double tx_power,
                                                double noise_power, std::uint64_t seed)
{
    cfg.validate();
    if (sectors.empty())
        throw invalid_parameter("estimate_multisector: no sectors given");

    MultiSectorEstimate out;
    for (std::size_t l = 0; l < sectors.size(); ++l) {
        const int users = static_cast<int>(sectors[l].users_to_ris.n_cols);
        if (users < 1)
            throw invalid_parameter("estimate_multisector: sector without users");
        SurfaceConfig sector_cfg = cfg;
        sector_cfg.user_antennas = users;

        ChannelRealization ch;
        ch.ris_to_bs = sectors[l].ris_to_bs;
        ch.user_to_ris = sectors[l].users_to_ris;
        const CascadedChannel casc = cascade(ch, sector_cfg);

        const TrainingPlan plan = build_plan(kind, cfg.group_size,
                                             cfg.num_tiles(), users);
        Rng rng = Rng::substream(seed, 0x736563746f72ULL, l);
        const arma::cx_vec y = simulate_uplink(plan, casc.tile, cfg.bs_antennas,
                                               tx_power, noise_power, rng);
        const ChannelEstimate est = ls_estimate(y, plan, cfg.bs_antennas, tx_power,
                                                LsMode::fast);
        auto slices = per_user_slices(est.tile_estimate, cfg.bs_antennas, users);
        for (auto& s : slices) {
            out.per_user.push_back(std::move(s));
            out.sector_of_user.push_back(static_cast<int>(l));
        }
        out.total_overhead += plan.overhead();
    }
    return out;
}

} // namespace bdris
