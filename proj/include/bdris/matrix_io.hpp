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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "common.hpp"

namespace bdris {

// Text matrix format: a header line "rows cols", then one line per row,
// entries whitespace separated as re+imj (e.g. 0.5-1.25j). Round-trips
// doubles exactly via %.17g.

inline std::string format_complex(cx z)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
    return buf;
}

inline void write_matrix(std::ostream& os, const arma::cx_mat& m)
{
    os << m.n_rows << ' ' << m.n_cols << '\n';
    for (arma::uword i = 0; i < m.n_rows; ++i) {
        for (arma::uword j = 0; j < m.n_cols; ++j) {
            if (j)
                os << ' ';
            os << format_complex(m(i, j));
        }
        os << '\n';
    }
    if (!os)
        throw io_error("write_matrix: stream failure");
}

inline void write_matrix(const std::string& path, const arma::cx_mat& m)
{
    std::ofstream f(path);
    if (!f)
        throw io_error("write_matrix: cannot open " + path);
    write_matrix(f, m);
}

inline cx parse_complex(const std::string& token)
{
    if (token.empty() || token.back() != 'j')
        throw io_error("parse_complex: token missing trailing j: " + token);
    const char* s = token.c_str();
    char* end = nullptr;
    const double re = std::strtod(s, &end);
    if (end == s)
        throw io_error("parse_complex: bad real part: " + token);
    const char* s2 = end;
    const double im = std::strtod(s2, &end);
    if (end == s2 || *end != 'j')
        throw io_error("parse_complex: bad imaginary part: " + token);
    return {re, im};
}

inline arma::cx_mat read_matrix(std::istream& is)
{
    arma::uword rows = 0, cols = 0;
    if (!(is >> rows >> cols))
        throw io_error("read_matrix: bad header");
    arma::cx_mat m(rows, cols);
    std::string token;
    for (arma::uword i = 0; i < rows; ++i)
        for (arma::uword j = 0; j < cols; ++j) {
            if (!(is >> token))
                throw io_error("read_matrix: truncated data");
            m(i, j) = parse_complex(token);
        }
    return m;
}

inline arma::cx_mat read_matrix(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw io_error("read_matrix: cannot open " + path);
    return read_matrix(f);
}

} // namespace bdris
