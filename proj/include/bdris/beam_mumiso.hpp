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

#include "beam_mimo.hpp"
#include "common.hpp"
#include "stiefel.hpp"

namespace bdris {

/// Downlink MU-MISO setting served by a multi-sector surface. Every user is
/// single-antenna, belongs to one sector, and sees the BS only through its
/// sector's cascaded channel (N x group_size^2*tiles).
struct MuMisoScenario {
    std::vector<arma::cx_mat> user_channels; // per user, N x (mb^2 g2)
    std::vector<int> sector_of_user;         // values in [0, sectors)
    int sectors = 1;
    int group_size = 1;
    int bs_antennas = 1;
    double power = 1.0;       // total downlink budget
    double noise_power = 1.0; // per-user receive noise
    int training_overhead = 0; // total uplink slots used to estimate
    int feedback_overhead = 0;
    int frame_length = 0; // 0: report the plain sum rate as the efficiency

    int users() const { return static_cast<int>(user_channels.size()); }
    int tiles() const
    {
        return static_cast<int>(user_channels.front().n_cols) / (group_size * group_size);
    }

    void validate() const
    {
        if (user_channels.empty() || sector_of_user.size() != user_channels.size())
            throw invalid_parameter("scenario: users and sector map disagree");
        if (sectors < 1 || group_size < 1 || bs_antennas < 1)
            throw invalid_parameter("scenario: dimensions must be >= 1");
        check_positive(power, "power");
        check_positive(noise_power, "noise_power");
        const arma::uword cols = user_channels.front().n_cols;
        for (std::size_t k = 0; k < user_channels.size(); ++k) {
            if (user_channels[k].n_rows != arma::uword(bs_antennas)
                || user_channels[k].n_cols != cols)
                throw dimension_mismatch("scenario: inconsistent user channel shape");
            if (sector_of_user[k] < 0 || sector_of_user[k] >= sectors)
                throw invalid_parameter("scenario: user assigned to missing sector");
        }
        if (cols % arma::uword(group_size * group_size) != 0)
            throw dimension_mismatch("scenario: channel columns not tile aligned");
    }
};

/// Iterates of the four-block ascent. The surrogate is tracked in bits
/// (natural-log machinery divided by ln 2), so its converged value equals
/// the sum rate.
struct FpState {
    std::vector<arma::cx_vec> sector_theta; // per sector, length mb^2 g2
    arma::cx_mat precoders;                 // N x K
    arma::vec iota;                         // K
    arma::cx_vec tau;                       // K
    std::vector<double> surrogate_trace;    // recorded after each block update
    double sum_rate = 0.0;
    double efficiency = 0.0;
    int outer_iterations = 0;
    bool converged = false;
};

struct FpOptions {
    int max_outer = 100;
    double tol = 1e-6;     // relative surrogate change per outer iteration
    int theta_sweeps = 20; // inner tile sweeps per outer iteration
    double theta_tol = 1e-6;
    stiefel::SolverOptions inner;
};

namespace fp_detail {

// effective column channel of user k at the current sector patterns
inline arma::cx_vec effective_channel(const MuMisoScenario& sc, const FpState& st, int k)
{
    const arma::cx_vec r = sc.user_channels[k] * st.sector_theta[sc.sector_of_user[k]];
    return arma::conj(r); // h_k, so that h_k^H p = theta^T Q^T p
}

inline arma::cx_mat all_effective_channels(const MuMisoScenario& sc, const FpState& st)
{
    arma::cx_mat h(sc.bs_antennas, sc.users());
    for (int k = 0; k < sc.users(); ++k)
        h.col(k) = effective_channel(sc, st, k);
    return h;
}

} // namespace fp_detail

inline double sinr(const MuMisoScenario& sc, const FpState& st, int k)
{
    const arma::cx_vec h = fp_detail::effective_channel(sc, st, k);
    double interference = 0.0;
    for (int j = 0; j < sc.users(); ++j) {
        if (j == k)
            continue;
        interference += std::norm(arma::cdot(h, st.precoders.col(j)));
    }
    const double signal = std::norm(arma::cdot(h, st.precoders.col(k)));
    return signal / (interference + sc.noise_power);
}

/// Sum rate of a fixed design on explicitly given channels; used to score a
/// design made from estimates against the channels it actually runs on.
inline double sum_rate_on(const std::vector<arma::cx_mat>& channels,
                          const std::vector<int>& sector_of_user,
                          const std::vector<arma::cx_vec>& sector_theta,
                          const arma::cx_mat& precoders, double noise_power)
{
    const int users = static_cast<int>(channels.size());
    double acc = 0.0;
    for (int k = 0; k < users; ++k) {
        const arma::cx_vec h = arma::conj(channels[k] * sector_theta[sector_of_user[k]]);
        double interference = 0.0;
        for (int j = 0; j < users; ++j)
            if (j != k)
                interference += std::norm(arma::cdot(h, precoders.col(j)));
        const double signal = std::norm(arma::cdot(h, precoders.col(k)));
        acc += std::log2(1.0 + signal / (interference + noise_power));
    }
    return acc;
}

inline double sum_rate(const MuMisoScenario& sc, const FpState& st)
{
    double acc = 0.0;
    for (int k = 0; k < sc.users(); ++k)
        acc += std::log2(1.0 + sinr(sc, st, k));
    return acc;
}

/// Surrogate value in bits. At the per-user stationary points of the
/// auxiliaries it collapses to the sum rate.
inline double surrogate(const MuMisoScenario& sc, const FpState& st)
{
    const arma::cx_mat h = fp_detail::all_effective_channels(sc, st);
    double acc = 0.0;
    for (int k = 0; k < sc.users(); ++k) {
        const cx s = arma::cdot(h.col(k), st.precoders.col(k));
        double total = sc.noise_power;
        for (int j = 0; j < sc.users(); ++j)
            total += std::norm(arma::cdot(h.col(k), st.precoders.col(j)));
        const double i = st.iota(k);
        acc += std::log(1.0 + i) - i
            + 2.0 * std::sqrt(1.0 + i) * std::real(std::conj(st.tau(k)) * s)
            - std::norm(st.tau(k)) * total;
    }
    return acc / std::log(2.0);
}

/// First-order optimal auxiliary ratios: iota_k = current SINR of user k.
inline void update_iota(const MuMisoScenario& sc, FpState& st)
{
    for (int k = 0; k < sc.users(); ++k)
        st.iota(k) = sinr(sc, st, k);
}

/// First-order optimal scaling auxiliaries given the ratios.
inline void update_tau(const MuMisoScenario& sc, FpState& st)
{
    for (int k = 0; k < sc.users(); ++k) {
        const arma::cx_vec h = fp_detail::effective_channel(sc, st, k);
        const cx s = arma::cdot(h, st.precoders.col(k));
        double total = sc.noise_power;
        for (int j = 0; j < sc.users(); ++j)
            total += std::norm(arma::cdot(h, st.precoders.col(j)));
        st.tau(k) = std::sqrt(1.0 + st.iota(k)) * s / total;
    }
}

/// KKT precoder update: p_k = sqrt(1+iota_k) tau_k (B + mu I)^{-1} h_k with
/// the multiplier found by bisection on the power constraint.
inline void update_precoders(const MuMisoScenario& sc, FpState& st)
{
    const int n = sc.bs_antennas;
    const int users = sc.users();
    const arma::cx_mat h = fp_detail::all_effective_channels(sc, st);

    arma::cx_mat b(n, n, arma::fill::zeros);
    arma::cx_mat a(n, users);
    double a_mass = 0.0;
    for (int k = 0; k < users; ++k) {
        b += std::norm(st.tau(k)) * (h.col(k) * h.col(k).t());
        a.col(k) = std::sqrt(1.0 + st.iota(k)) * st.tau(k) * h.col(k);
        a_mass += std::pow(arma::norm(a.col(k)), 2);
    }
    if (a_mass == 0.0) {
        st.precoders.zeros(n, users);
        return;
    }

    arma::vec evals;
    arma::cx_mat evecs;
    if (!arma::eig_sym(evals, evecs, b))
        throw singular_matrix("update_precoders: eigendecomposition failed");
    evals.transform([](double x) { return std::max(x, 0.0); });
    const arma::cx_mat a_rot = evecs.t() * a; // coordinates in the eigenbasis

    auto power_used = [&](double mu) {
        double total = 0.0;
        for (int k = 0; k < users; ++k)
            for (int m = 0; m < n; ++m)
                total += std::norm(a_rot(m, k)) / std::pow(evals(m) + mu, 2);
        return total;
    };

    double mu = 0.0;
    const bool invertible = evals.min() > 1e-12 * std::max(1.0, evals.max());
    if (!invertible || power_used(0.0) > sc.power) {
        double lo = 0.0;
        double hi = std::sqrt(a_mass / sc.power); // power_used(hi) <= budget
        while (power_used(hi) > sc.power)
            hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            mu = 0.5 * (lo + hi);
            if (power_used(mu) > sc.power)
                lo = mu;
            else
                hi = mu;
            if (hi - lo <= 1e-14 * std::max(1.0, hi))
                break;
        }
        mu = hi;
    }

    for (int k = 0; k < users; ++k)
        st.precoders.col(k) = evecs * (a_rot.col(k) / (evals + mu));
}

/// Block-coordinate pattern update across tiles: for tile i the per-sector
/// blocks stack into one point on the (sectors*group_size) x group_size
/// Stiefel manifold, so the sum-unitary constraint holds by construction.
inline void update_theta(const MuMisoScenario& sc, FpState& st,
                         const FpOptions& opts = {})
{
    const int m2 = sc.group_size * sc.group_size;
    const int tiles = sc.tiles();
    const int sectors = sc.sectors;

    // per-sector linear and quadratic pieces of the surrogate
    std::vector<arma::cx_vec> v_lin(sectors, arma::cx_vec(m2 * tiles, arma::fill::zeros));
    std::vector<arma::cx_mat> v_quad(
        sectors, arma::cx_mat(m2 * tiles, m2 * tiles, arma::fill::zeros));
    arma::cx_mat p_gram(sc.bs_antennas, sc.bs_antennas, arma::fill::zeros);
    for (int k = 0; k < sc.users(); ++k)
        p_gram += st.precoders.col(k) * st.precoders.col(k).t();
    for (int k = 0; k < sc.users(); ++k) {
        const int l = sc.sector_of_user[k];
        const arma::cx_mat qt = arma::strans(sc.user_channels[k]);
        v_lin[l] += std::sqrt(1.0 + st.iota(k)) * std::conj(st.tau(k))
            * (qt * st.precoders.col(k));
        v_quad[l] += std::norm(st.tau(k)) * qt * p_gram * arma::conj(sc.user_channels[k]);
    }

    for (int sweep = 0; sweep < opts.theta_sweeps; ++sweep) {
        double max_change = 0.0;
        for (int i = 0; i < tiles; ++i) {
            arma::cx_vec chi(sectors * m2);
            arma::cx_mat v_big(sectors * m2, sectors * m2, arma::fill::zeros);
            arma::cx_vec theta_i(sectors * m2);
            for (int l = 0; l < sectors; ++l) {
                arma::cx_vec c = v_lin[l].subvec(i * m2, (i + 1) * m2 - 1);
                for (int j = 0; j < tiles; ++j)
                    if (j != i)
                        c -= quadratic_block(v_quad[l], i, j, m2)
                            * arma::conj(st.sector_theta[l].subvec(j * m2, (j + 1) * m2 - 1));
                chi.subvec(l * m2, (l + 1) * m2 - 1) = c;
                v_big(arma::span(l * m2, (l + 1) * m2 - 1),
                      arma::span(l * m2, (l + 1) * m2 - 1)) =
                    quadratic_block(v_quad[l], i, i, m2);
                theta_i.subvec(l * m2, (l + 1) * m2 - 1) =
                    st.sector_theta[l].subvec(i * m2, (i + 1) * m2 - 1);
            }
            const arma::cx_mat x0 =
                stiefel::point_from_theta(theta_i, sc.group_size);
            const auto sol = stiefel::maximize(v_big, chi, x0, opts.inner);
            const arma::cx_vec updated = stiefel::theta_from_point(sol.point);
            max_change = std::max(max_change, arma::norm(updated - theta_i));
            for (int l = 0; l < sectors; ++l)
                st.sector_theta[l].subvec(i * m2, (i + 1) * m2 - 1) =
                    updated.subvec(l * m2, (l + 1) * m2 - 1);
        }
        if (max_change <= opts.theta_tol)
            break;
    }
}

inline FpState initial_state(const MuMisoScenario& sc)
{
    sc.validate();
    const int m2 = sc.group_size * sc.group_size;
    FpState st;
    // feasible deterministic start: every sector block identity / sqrt(L)
    arma::cx_vec theta0(m2 * sc.tiles());
    const arma::cx_vec eye_vec =
        vec(arma::eye<arma::cx_mat>(sc.group_size, sc.group_size));
    for (int i = 0; i < sc.tiles(); ++i)
        theta0.subvec(i * m2, (i + 1) * m2 - 1) = eye_vec / std::sqrt(double(sc.sectors));
    st.sector_theta.assign(sc.sectors, theta0);

    st.precoders.set_size(sc.bs_antennas, sc.users());
    for (int k = 0; k < sc.users(); ++k) {
        const arma::cx_vec h = fp_detail::effective_channel(sc, st, k);
        const double norm = arma::norm(h);
        if (norm > 0.0)
            st.precoders.col(k) = std::sqrt(sc.power / sc.users()) * h / norm;
        else
            st.precoders.col(k).zeros();
    }
    st.iota.zeros(sc.users());
    st.tau.zeros(sc.users());
    return st;
}

/// Four-block fractional-programming ascent of the sum rate. The surrogate
/// trace is recorded after the auxiliary pair, the precoder block, and the
/// pattern block; each entry is a conditional maximizer of the surrogate,
/// so the trace is non-decreasing.
///
/// Convergence is judged at the auxiliary-collapse points, where the
/// surrogate equals the true sum rate of the current design; the stale
/// surrogate right after a pattern update can stagnate while the rate is
/// still climbing.
inline FpState solve_mumiso(const MuMisoScenario& sc, const FpOptions& opts = {})
{
    sc.validate();
    FpState st = initial_state(sc);

    double prev = -arma::datum::inf;
    for (int it = 0; it < opts.max_outer; ++it) {
        update_iota(sc, st);
        update_tau(sc, st);
        const double collapsed = surrogate(sc, st);
        st.surrogate_trace.push_back(collapsed);
        if (it > 0
            && std::abs(collapsed - prev)
                <= opts.tol * std::max({std::abs(collapsed), std::abs(prev), 1e-300})) {
            st.converged = true;
            break;
        }
        prev = collapsed;

        update_precoders(sc, st);
        st.surrogate_trace.push_back(surrogate(sc, st));

        update_theta(sc, st, opts);
        st.surrogate_trace.push_back(surrogate(sc, st));

        ++st.outer_iterations;
    }
    if (!st.converged) { // ran out of iterations; leave the state collapsed
        update_iota(sc, st);
        update_tau(sc, st);
        st.surrogate_trace.push_back(surrogate(sc, st));
    }

    st.sum_rate = sum_rate(sc, st);
    if (sc.frame_length > 0)
        st.efficiency = spectral_efficiency(
            st.sum_rate, sc.training_overhead, sc.feedback_overhead, sc.frame_length);
    else
        st.efficiency = st.sum_rate;
    return st;
}

} // namespace bdris
