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

#include <algorithm>
#include <vector>

#include "common.hpp"

namespace bdris {
namespace stiefel {

// Points are tall matrices X (p*mb x mb) with X^H X = I. The optimization
// variable in vector form is theta = vec(X^T); for a stack of square blocks
// X = [T_1; ...; T_p] this gives theta = [vec(T_1^T); ...; vec(T_p^T)] and
// X^H X = sum_l T_l^H T_l, so one Gram condition covers both the unitary
// (p = 1) and the sum-unitary (p = L) constraint families.

inline arma::cx_vec theta_from_point(const arma::cx_mat& x)
{
    return vec(arma::strans(x));
}

inline arma::cx_mat point_from_theta(const arma::cx_vec& theta, int cols)
{
    if (cols < 1 || theta.n_elem % cols != 0)
        throw dimension_mismatch("point_from_theta: bad column count");
    return arma::strans(unvec(theta, cols));
}

struct SolverOptions {
    int max_iters = 200;
    double grad_tol = 1e-6;    // relative to 1 + |objective|
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    int max_backtracks = 40;
    double obj_tol = 1e-8;     // relative objective change
    int obj_window = 5;
    int restart_period = 0;    // 0: use the manifold dimension
};

struct Result {
    arma::cx_mat point;
    std::vector<double> objective; // value at every iterate, ascending
    int iterations = 0;
    bool converged = false;
    double max_feasibility_error = 0.0; // worst ||X^H X - I||_F over iterates
};

/// Objective f(theta) = 2 Re{theta^T chi} - theta^T V theta^* with V Hermitian.
inline double objective(const arma::cx_mat& v, const arma::cx_vec& chi,
                        const arma::cx_vec& theta)
{
    const cx lin = arma::dot(theta, chi);
    const cx quad = arma::dot(theta, v * arma::conj(theta));
    return 2.0 * lin.real() - quad.real();
}

/// Euclidean (Wirtinger) gradient of the objective, in point layout.
/// d f = Re{ <egrad, d theta> } with egrad = 2 (conj(chi) - V^T theta).
inline arma::cx_mat egrad(const arma::cx_mat& x, const arma::cx_mat& v,
                          const arma::cx_vec& chi)
{
    const arma::cx_vec theta = theta_from_point(x);
    if (chi.n_elem != theta.n_elem || v.n_rows != theta.n_elem || v.n_cols != theta.n_elem)
        throw dimension_mismatch("egrad: operand shapes do not match the point");
    const arma::cx_vec g = 2.0 * (arma::conj(chi) - arma::strans(v) * theta);
    return point_from_theta(g, static_cast<int>(x.n_cols));
}

/// Projection onto the tangent space at X: xi - X * herm(X^H xi).
inline arma::cx_mat project_tangent(const arma::cx_mat& x, const arma::cx_mat& xi)
{
    if (arma::size(xi) != arma::size(x))
        throw dimension_mismatch("project_tangent: shape mismatch");
    const arma::cx_mat a = x.t() * xi;
    return xi - x * ((a + a.t()) / 2.0);
}

/// QR retraction with the R diagonal phases fixed so the map is continuous.
inline arma::cx_mat retract(const arma::cx_mat& x, const arma::cx_mat& step)
{
    arma::cx_mat q, r;
    if (!arma::qr_econ(q, r, arma::cx_mat(x + step)))
        throw singular_matrix("retract: QR factorization failed");
    for (arma::uword j = 0; j < q.n_cols; ++j) {
        const double m = std::abs(r(j, j));
        if (m < 1e-14)
            throw singular_matrix("retract: step collapses the point rank");
        q.col(j) *= r(j, j) / m;
    }
    return q;
}

namespace detail {

inline double inner(const arma::cx_mat& a, const arma::cx_mat& b)
{
    return arma::accu(arma::real(arma::conj(a) % b));
}

inline double feasibility_error(const arma::cx_mat& x)
{
    const arma::cx_mat eye_c = arma::eye<arma::cx_mat>(x.n_cols, x.n_cols);
    return arma::norm(x.t() * x - eye_c, "fro");
}

} // namespace detail

/// Riemannian conjugate-gradient ascent of the objective over the Stiefel
/// manifold, from a feasible starting point. Polak-Ribiere+ directions with
/// tangent-projection transport and Armijo backtracking; the objective
/// trace is non-decreasing.
///
/// The operands are normalized internally (the maximizer is invariant under
/// a joint positive scaling of V and chi), so the tolerances behave the
/// same whether the data arrives in unit scale or buried under path loss.
inline Result maximize(const arma::cx_mat& v_in, const arma::cx_vec& chi_in,
                       const arma::cx_mat& init, const SolverOptions& opts = {})
{
    if (detail::feasibility_error(init) > 1e-8 * std::sqrt(double(init.n_cols)))
        throw invalid_parameter("maximize: starting point is not feasible");

    const double scale =
        std::max(arma::norm(v_in, "fro"), arma::norm(chi_in));
    Result res;
    if (scale == 0.0 || !std::isfinite(scale)) {
        if (!std::isfinite(scale))
            throw invalid_parameter("maximize: non-finite operands");
        res.point = init;
        res.objective.push_back(0.0);
        res.converged = true;
        return res;
    }
    const arma::cx_mat v = v_in / scale;
    const arma::cx_vec chi = chi_in / scale;

    // real dimension of the complex Stiefel manifold: 2np - p^2
    const int restart = opts.restart_period > 0
        ? opts.restart_period
        : std::max<int>(1, static_cast<int>(2 * init.n_rows * init.n_cols
                                            - init.n_cols * init.n_cols));

    arma::cx_mat x = init;
    double f = objective(v, chi, theta_from_point(x));
    res.objective.push_back(f);
    res.max_feasibility_error = detail::feasibility_error(x);

    arma::cx_mat g = project_tangent(x, egrad(x, v, chi));
    arma::cx_mat d = g;

    for (int k = 0; k < opts.max_iters; ++k) {
        const double g_norm2 = detail::inner(g, g);
        if (std::sqrt(g_norm2) <= opts.grad_tol * (1.0 + std::abs(f))) {
            res.converged = true;
            break;
        }

        double slope = detail::inner(g, d);
        if (slope <= 0.0) { // stale direction; fall back to steepest ascent
            d = g;
            slope = g_norm2;
        }

        double t = opts.initial_step;
        arma::cx_mat x_new;
        double f_new = f;
        bool accepted = false;
        for (int b = 0; b < opts.max_backtracks; ++b) {
            try {
                x_new = retract(x, t * d);
            } catch (const singular_matrix&) {
                t *= opts.backtrack;
                continue;
            }
            f_new = objective(v, chi, theta_from_point(x_new));
            if (f_new >= f + opts.armijo_c1 * t * slope) {
                accepted = true;
                break;
            }
            t *= opts.backtrack;
        }
        if (!accepted)
            break; // no ascent step left at this scale

        // quadratic refinement: a sufficient-increase step can still be far
        // from the 1-D maximizer (e.g. reflecting across it); one model fit
        // recovers the interior step when the fit predicts one
        const double denom = 2.0 * (slope * t - (f_new - f));
        if (denom > 0.0) {
            const double t_star = slope * t * t / denom;
            if (t_star > 1e-3 * t && t_star < t) {
                try {
                    const arma::cx_mat x_ref = retract(x, t_star * d);
                    const double f_ref = objective(v, chi, theta_from_point(x_ref));
                    if (f_ref > f_new) {
                        x_new = x_ref;
                        f_new = f_ref;
                    }
                } catch (const singular_matrix&) {
                }
            }
        }

        arma::cx_mat g_new = project_tangent(x_new, egrad(x_new, v, chi));
        double beta = 0.0;
        if ((k + 1) % restart != 0) {
            const arma::cx_mat g_prev_t = project_tangent(x_new, g);
            beta = std::max(0.0, detail::inner(g_new, g_new - g_prev_t) / g_norm2);
        }
        d = g_new + beta * project_tangent(x_new, d);

        x = x_new;
        g = g_new;
        f = f_new;
        ++res.iterations;
        res.objective.push_back(f);
        res.max_feasibility_error =
            std::max(res.max_feasibility_error, detail::feasibility_error(x));

        const int w = opts.obj_window;
        if (static_cast<int>(res.objective.size()) > w) {
            const double prev = res.objective[res.objective.size() - 1 - w];
            if (std::abs(f - prev) <= opts.obj_tol * (1.0 + std::abs(f))) {
                res.converged = true;
                break;
            }
        }
    }
    res.point = x;
    for (double& value : res.objective)
        value *= scale;
    return res;
}

} // namespace stiefel
} // namespace bdris
