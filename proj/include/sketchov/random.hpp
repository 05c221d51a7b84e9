/*******************************************************************************
 * Copyright 2026 The sketchov Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *******************************************************************************/
#pragma once

#include <cstdint>
#include <random>

#include "sketchov/common.hpp"

namespace sketchov {

/// Engine used for every random draw in the library. Fixed so outputs are
/// bit-reproducible for a given seed on a given standard library.
using Engine = std::mt19937_64;

/// Mix (seed, stream) into an independent engine seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0);

/// rows x cols matrix of i.i.d. N(0,1) entries, filled column-major.
Matrix gaussian_matrix(Index rows, Index cols, Engine& engine);
Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace sketchov
