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

#include "common.hpp"
#include "config.hpp"
#include "rng.hpp"

namespace bdris {

enum class BaseKind { dft, hadamard };

inline const char* to_string(BaseKind k)
{
    return k == BaseKind::dft ? "dft" : "hadamard";
}

/// DFT matrix with kernel exp(-2*pi*i*p*q/n); F^H F = n I, unit-modulus entries.
inline arma::cx_mat dft_matrix(int n)
{
    if (n < 1)
        throw invalid_parameter("dft_matrix: order must be >= 1");
    arma::cx_mat f(n, n);
    const double w = -2.0 * arma::datum::pi / n;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            f(p, q) = std::exp(cx(0.0, w * p * q));
    return f;
}

namespace detail {

inline bool is_prime(int n)
{
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Paley construction: order q+1 for prime q = 3 (mod 4). H = I + S with S
// skew and S S^T = q I, built from the quadratic-residue character of GF(q).
inline arma::imat paley_hadamard(int q)
{
    std::vector<int> chi(q, -1);
    chi[0] = 0;
    for (int a = 1; a < q; ++a)
        chi[(a * a) % q] = 1;

    const int n = q + 1;
    arma::imat h(n, n, arma::fill::eye);
    for (int j = 1; j < n; ++j) {
        h(0, j) += 1;
        h(j, 0) += -1;
    }
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j)
            if (i != j)
                h(i, j) += chi[((i - j) % q + q) % q];
    return h;
}

} // namespace detail

/// Hadamard matrix of order n (entries +-1, D^T D = n I). Supported orders:
/// 1, 2, and anything reachable by Sylvester doubling from a Paley order
/// q+1 (q prime, q = 3 mod 4). Other orders raise unsupported_hadamard_order.
inline arma::imat hadamard_matrix(int n)
{
    if (n < 1)
        throw unsupported_hadamard_order("hadamard_matrix: order must be >= 1");
    if (n == 1)
        return arma::imat(1, 1, arma::fill::ones);
    if (n == 2)
        return arma::imat{{1, 1}, {1, -1}};
    if (n % 2 != 0 || n % 4 != 0)
        throw unsupported_hadamard_order(
            "no Hadamard matrix of order " + std::to_string(n));

    // strip Sylvester factors of two down to an odd-free core
    int core = n;
    int doublings = 0;
    while (core > 2 && core % 2 == 0 && (core / 2) % 4 == 0) {
        core /= 2;
        ++doublings;
    }
    if (core > 2 && core % 2 == 0 && (core / 2) == 2) { // core is a power of two
        core = 2;
        ++doublings;
    }

    arma::imat h;
    if (core <= 2) {
        h = hadamard_matrix(core);
    } else if (detail::is_prime(core - 1) && (core - 1) % 4 == 3) {
        h = detail::paley_hadamard(core - 1);
    } else {
        throw unsupported_hadamard_order(
            "order " + std::to_string(n) + " has no supported construction");
    }
    const arma::imat h2 = {{1, 1}, {1, -1}};
    for (int d = 0; d < doublings; ++d)
        h = arma::kron(h2, h);
    return h;
}

/// The two base matrices behind the tile-block construction, with their
/// scaled-unitary factors. base_shift is circularly shifted across the row
/// blocks; base_weight scales them (and has identical entry modulus).
struct BasePair {
    arma::cx_mat base_shift;  // Z1: Z1^H Z1 = alpha1 I
    arma::cx_mat base_weight; // Z2: Z2^H Z2 = alpha2 I, |entries| = sqrt(alpha2/n)
    double alpha1 = 1.0;
    double alpha2 = 1.0;
};

inline BasePair build_bases(BaseKind kind, int group_size)
{
    if (group_size < 1)
        throw invalid_parameter("build_bases: group_size must be >= 1");
    BasePair b;
    if (kind == BaseKind::dft) {
        b.base_shift = dft_matrix(group_size);
    } else {
        b.base_shift = arma::conv_to<arma::cx_mat>::from(
            arma::conv_to<arma::mat>::from(hadamard_matrix(group_size)));
    }
    b.base_weight = b.base_shift / std::sqrt(static_cast<double>(group_size));
    b.alpha1 = group_size;
    b.alpha2 = 1.0;
    return b;
}

/// Tile block (group_size^2 x group_size^2). Row m*n (0-based m, n) holds,
/// in column block i, base_weight(m, i) times column ((i - n) mod n_g) of
/// base_shift, transposed. Rows are mutually orthogonal with squared norm
/// group_size, and every row reshapes to a unitary matrix.
inline arma::cx_mat build_tile_block(const BasePair& b)
{
    const int mb = static_cast<int>(b.base_shift.n_rows);
    const double tol = 1e-10 * mb;
    const arma::cx_mat eye_mb = arma::eye<arma::cx_mat>(mb, mb);
    if (arma::norm(b.base_shift.t() * b.base_shift - b.alpha1 * eye_mb, "fro") > tol
        || arma::norm(b.base_weight.t() * b.base_weight - b.alpha2 * eye_mb, "fro") > tol
        || std::abs(b.alpha1 * b.alpha2 - mb) > tol)
        throw invalid_parameter("build_tile_block: base matrices violate the "
                                "scaled-unitary conditions");
    const double want = std::sqrt(b.alpha2 / mb);
    if (arma::abs(arma::abs(b.base_weight) - want).max() > 1e-10)
        throw invalid_parameter("build_tile_block: base_weight entries must "
                                "share one modulus");

    arma::cx_mat block(mb * mb, mb * mb);
    for (int m = 0; m < mb; ++m)
        for (int n = 0; n < mb; ++n) {
            const int row = m * mb + n;
            for (int i = 0; i < mb; ++i) {
                const int src = ((i - n) % mb + mb) % mb;
                block(row, arma::span(i * mb, (i + 1) * mb - 1)) =
                    b.base_weight(m, i) * arma::strans(b.base_shift.col(src));
            }
        }
    return block;
}

/// Training definition for one uplink run: pattern rows cycled over blocks
/// of pilot repetitions, per the slot mapping t = s*K + k (0-based).
struct TrainingPlan {
    arma::cx_mat pattern;     // pattern matrix, (mb^2 g2) x (mb^2 g2); row s = block pattern
    arma::cx_mat pilots;      // K x K, rows are per-slot pilot vectors
    arma::cx_mat tile_block;  // mb^2 x mb^2 (empty for random plans)
    arma::cx_mat block_mixer; // g2 x g2 (empty for random plans)
    int group_size = 1;
    int num_tiles = 1;
    int user_antennas = 1;
    bool scaled_unitary = false; // pattern^H pattern == mb*g2*I within tolerance

    int pattern_rows() const { return static_cast<int>(pattern.n_rows); }
    int overhead() const { return user_antennas * pattern_rows(); }

    arma::cx_vec slot_pattern(int t) const
    {
        return arma::strans(pattern.row(t / user_antennas));
    }

    arma::cx_vec slot_pilot(int t) const
    {
        return arma::strans(pilots.row(t % user_antennas));
    }

    // pattern applied to tile i during block s, as a group_size^2 vector
    arma::cx_vec row_block(int s, int i) const
    {
        const int m2 = group_size * group_size;
        return arma::strans(pattern(s, arma::span(i * m2, (i + 1) * m2 - 1)));
    }

    // the same, reshaped to the unitary matrix loaded onto the tile
    arma::cx_mat tile_pattern(int s, int i) const
    {
        return unvec(row_block(s, i), group_size);
    }
};

/// Orthogonal pilot block with unit-modulus entries, X^H X = K I.
inline arma::cx_mat build_pilots(int user_antennas, BaseKind kind)
{
    if (user_antennas < 1)
        throw invalid_parameter("build_pilots: user count must be >= 1");
    if (kind == BaseKind::dft)
        return dft_matrix(user_antennas);
    return arma::conv_to<arma::cx_mat>::from(
        arma::conv_to<arma::mat>::from(hadamard_matrix(user_antennas)));
}

namespace detail {

inline bool plan_is_scaled_unitary(const TrainingPlan& p)
{
    const double dim = static_cast<double>(p.pattern.n_rows);
    const double target = p.group_size * p.num_tiles;
    const arma::cx_mat gram = p.pattern.t() * p.pattern;
    const arma::cx_mat eye_d = arma::eye<arma::cx_mat>(p.pattern.n_rows, p.pattern.n_rows);
    const double dev_phi = arma::norm(gram - target * eye_d, "fro") / dim;
    const int k = p.user_antennas;
    const double dev_x = arma::norm(p.pilots.t() * p.pilots
                                        - double(k) * arma::eye<arma::cx_mat>(k, k),
                                    "fro")
        / k;
    return dev_phi <= 1e-8 && dev_x <= 1e-8;
}

} // namespace detail

/// Full training plan: pattern = kron(mixer, tile_block) with a DFT or
/// Hadamard mixer, plus orthogonal pilots of the same kind.
inline TrainingPlan build_plan(BaseKind kind, int group_size, int num_tiles,
                               int user_antennas)
{
    if (num_tiles < 1)
        throw invalid_parameter("build_plan: num_tiles must be >= 1");
    TrainingPlan plan;
    plan.group_size = group_size;
    plan.num_tiles = num_tiles;
    plan.user_antennas = user_antennas;

    const BasePair bases = build_bases(kind, group_size);
    plan.tile_block = build_tile_block(bases);
    if (kind == BaseKind::dft)
        plan.block_mixer = dft_matrix(num_tiles);
    else
        plan.block_mixer = arma::conv_to<arma::cx_mat>::from(
            arma::conv_to<arma::mat>::from(hadamard_matrix(num_tiles)));
    plan.pattern = arma::kron(plan.block_mixer, plan.tile_block);
    plan.pilots = build_pilots(user_antennas, kind);
    plan.scaled_unitary = detail::plan_is_scaled_unitary(plan);
    return plan;
}

/// Baseline plan: every row block is an independent Haar-random unitary,
/// so each slot is feasible but the pattern matrix is not scaled-unitary.
/// Pilots stay orthogonal.
inline TrainingPlan random_plan(int group_size, int num_tiles, int user_antennas,
                                Rng& rng)
{
    if (group_size < 1 || num_tiles < 1)
        throw invalid_parameter("random_plan: dimensions must be >= 1");
    TrainingPlan plan;
    plan.group_size = group_size;
    plan.num_tiles = num_tiles;
    plan.user_antennas = user_antennas;

    const int m2 = group_size * group_size;
    const int rows = m2 * num_tiles;
    plan.pattern.set_size(rows, rows);
    for (int s = 0; s < rows; ++s)
        for (int i = 0; i < num_tiles; ++i) {
            arma::cx_mat u = rng.haar_unitary(group_size);
            plan.pattern(s, arma::span(i * m2, (i + 1) * m2 - 1)) =
                arma::strans(vec(u));
        }
    plan.pilots = build_pilots(user_antennas, BaseKind::dft);
    plan.scaled_unitary = detail::plan_is_scaled_unitary(plan);
    return plan;
}

/// Stacked sensing matrix relating the received training signal to the
/// vectorized tile channel: rows N per slot, kron(pattern^T, pilot^T, I_N).
inline arma::cx_mat assemble_sensing_matrix(const TrainingPlan& plan, int bs_antennas)
{
    const int n = bs_antennas;
    const int t1 = plan.overhead();
    const int dim = n * plan.user_antennas * plan.pattern_rows();
    const arma::cx_mat eye_n = arma::eye<arma::cx_mat>(n, n);
    arma::cx_mat phi_hat(n * t1, dim);
    for (int t = 0; t < t1; ++t) {
        const arma::cx_vec phi = plan.slot_pattern(t);
        const arma::cx_vec x = plan.slot_pilot(t);
        phi_hat.rows(t * n, (t + 1) * n - 1) =
            arma::kron(arma::strans(phi), arma::kron(arma::strans(x), eye_n));
    }
    return phi_hat;
}

} // namespace bdris
