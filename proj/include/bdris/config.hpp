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

namespace bdris {

/// Dimensions of a group-connected surface and of the link it serves.
///
/// A surface (one sector of it) has `elements` ports, partitioned into
/// groups of `group_size` mutually connected ports; each group contributes
/// one unitary block to the scattering matrix. Adjacent groups are bundled
/// into tiles of `tile_size` groups that share one pattern during training,
/// which shrinks the cascaded channel to be estimated.
struct SurfaceConfig {
    int elements = 1;      // ports per sector
    int group_size = 1;    // ports per group (block size of the scattering matrix)
    int tile_size = 1;     // groups per tile
    int sectors = 1;       // 1 = reflective surface
    int bs_antennas = 1;
    int user_antennas = 1; // receive antennas of one user, or total user count

    int num_groups() const { return elements / group_size; }
    int num_tiles() const { return num_groups() / tile_size; }

    // columns of the tile-based cascaded channel (and length of the stacked
    // pattern vector)
    int tile_channel_dim() const { return group_size * group_size * num_tiles(); }

    // pilot slots needed for an unambiguous estimate
    int training_overhead() const { return user_antennas * tile_channel_dim(); }

    void validate() const
    {
        if (elements < 1 || group_size < 1 || tile_size < 1 || sectors < 1
            || bs_antennas < 1 || user_antennas < 1)
            throw invalid_parameter("surface dimensions must all be >= 1");
        if (elements % group_size != 0)
            throw invalid_parameter("group_size must divide elements");
        if ((elements / group_size) % tile_size != 0)
            throw invalid_parameter("tile_size must divide the group count");
    }
};

/// Large-scale propagation parameters for the two-hop link.
struct PathLossParams {
    double bs_ris_distance_m = 30.0;
    double ris_user_distance_m = 10.0;
    double bs_ris_exponent = 2.5;
    double ris_user_exponent = 2.5;
    double carrier_hz = 2.4e9;
    double bs_gain = 1.0;
    double user_gain = 1.0;
    int sectors = 2; // a reflective surface covers half the space

    void validate() const
    {
        check_positive(bs_ris_distance_m, "bs_ris_distance_m");
        check_positive(ris_user_distance_m, "ris_user_distance_m");
        check_positive(carrier_hz, "carrier_hz");
        check_positive(bs_gain, "bs_gain");
        check_positive(user_gain, "user_gain");
        if (sectors < 1)
            throw invalid_parameter("sectors must be >= 1");
    }
};

} // namespace bdris
