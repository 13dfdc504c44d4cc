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

#include "beam_mimo.hpp"
#include "beam_mumiso.hpp"
#include "channel.hpp"
#include "common.hpp"
#include "config.hpp"
#include "estimator.hpp"
#include "harness.hpp"
#include "matrix_io.hpp"
#include "pattern.hpp"
#include "rng.hpp"
#include "stiefel.hpp"
