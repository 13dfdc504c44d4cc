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

#include <armadillo>
#include <complex>
#include <stdexcept>
#include <string>

namespace bdris {

using cx = std::complex<double>;

class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class dimension_mismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class unsupported_hadamard_order : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class singular_matrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void check_positive(double value, const char* name)
{
    if (!(value > 0.0))
        throw invalid_parameter(std::string(name) + " must be positive");
}

inline void check_non_negative(double value, const char* name)
{
    if (!(value >= 0.0))
        throw invalid_parameter(std::string(name) + " must be non-negative");
}

// Column-major vectorization throughout; unvec(v, rows) reverses it.
inline arma::cx_vec vec(const arma::cx_mat& a)
{
    return arma::vectorise(a);
}

inline arma::cx_mat unvec(const arma::cx_vec& v, arma::uword rows)
{
    if (rows == 0 || v.n_elem % rows != 0)
        throw dimension_mismatch("unvec: length not divisible by row count");
    return arma::reshape(v, rows, v.n_elem / rows);
}

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

inline double dbm_to_watt(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

} // namespace bdris
