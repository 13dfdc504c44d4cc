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

#include <cmath>
#include <cstdint>
#include <random>

#include "common.hpp"

namespace bdris {

namespace detail {

// splitmix64 finalizer; used to derive well-separated substream seeds.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Deterministic random stream. Substreams are derived from (seed, path)
// so Monte Carlo trials can run in any order or in parallel and still
// reproduce bit-identical draws per trial.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::mix64(seed)) {}

    static Rng substream(std::uint64_t seed, std::uint64_t a,
                         std::uint64_t b = 0, std::uint64_t c = 0)
    {
        std::uint64_t s = detail::mix64(seed);
        s = detail::mix64(s ^ detail::mix64(a));
        s = detail::mix64(s ^ detail::mix64(b));
        s = detail::mix64(s ^ detail::mix64(c));
        return Rng(s);
    }

    std::uint64_t raw() { return engine_(); }

    // uniform on [0, 1)
    double uniform()
    {
        return static_cast<double>(raw() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (independent of libstdc++ distributions)
    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * arma::datum::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // circularly-symmetric complex normal CN(0, 1)
    cx cnormal()
    {
        const double re = normal();
        const double im = normal();
        return cx(re, im) / std::sqrt(2.0);
    }

    arma::cx_mat cnormal_matrix(arma::uword n_rows, arma::uword n_cols)
    {
        arma::cx_mat out(n_rows, n_cols);
        for (arma::uword j = 0; j < n_cols; ++j)
            for (arma::uword i = 0; i < n_rows; ++i)
                out(i, j) = cnormal();
        return out;
    }

    // Haar-distributed unitary: QR of a complex Gaussian matrix with the
    // R diagonal phases folded back into Q.
    arma::cx_mat haar_unitary(arma::uword n)
    {
        arma::cx_mat a = cnormal_matrix(n, n);
        arma::cx_mat q, r;
        arma::qr_econ(q, r, a);
        for (arma::uword j = 0; j < n; ++j) {
            const cx d = r(j, j);
            const double m = std::abs(d);
            q.col(j) *= (m > 0.0) ? d / m : cx(1.0, 0.0);
        }
        return q;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace bdris
