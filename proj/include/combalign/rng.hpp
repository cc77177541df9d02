// combalign - network-wide beam alignment simulator for sub-THz D2D links
// Copyright (C) 2026 the combalign authors
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
// -------------------------------------------------------------------------

#ifndef COMBALIGN_RNG_HPP
#define COMBALIGN_RNG_HPP

#include <cstdint>
#include <random>

#include "combalign/common.hpp"

namespace combalign
{

// splitmix64 finalizer; good avalanche, used to mix seed components.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic substream seed from (master, stream components). Substreams
// are independent of thread scheduling: every (trial, round, device, purpose)
// tuple maps to its own generator.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0, std::uint64_t d = 0)
{
    std::uint64_t h = mix64(master);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    h = mix64(h ^ d);
    return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Phases uniform on [0, 2pi).
inline VectorXd draw_phases(std::mt19937_64 &rng, Eigen::Index n)
{
    std::uniform_real_distribution<double> uni(0.0, 2.0 * pi);
    VectorXd p(n);
    for (Eigen::Index i = 0; i < n; i++)
        p[i] = uni(rng);
    return p;
}

// Circularly-symmetric complex Gaussian matrix, per-entry variance sigma2.
inline MatrixXcd draw_cgauss(std::mt19937_64 &rng, Eigen::Index rows, Eigen::Index cols,
                             double sigma2)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    double s = std::sqrt(sigma2 / 2.0);
    MatrixXcd z(rows, cols);
    for (Eigen::Index i = 0; i < rows; i++)
        for (Eigen::Index j = 0; j < cols; j++)
        {
            double re = gauss(rng), im = gauss(rng);
            z(i, j) = cplx(s * re, s * im);
        }
    return z;
}

} // namespace combalign

#endif
