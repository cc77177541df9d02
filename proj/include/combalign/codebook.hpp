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

#ifndef COMBALIGN_CODEBOOK_HPP
#define COMBALIGN_CODEBOOK_HPP

#include "combalign/common.hpp"

namespace combalign
{

// Unitary DFT beam codebook for a half-wavelength ULA. Column k is the beam
// steered to spatial frequency u = 2k/N_a (wrapped to (-1, 1]).
struct Codebook
{
    int n_antennas = 0;
    MatrixXcd c; // N_a x N_a, c(n,k) = e^{-j2pi nk/N_a} / sqrt(N_a)

    explicit Codebook(int n_a) : n_antennas(n_a)
    {
        require(n_a >= 1, "Codebook", "need at least one antenna");
        c.resize(n_a, n_a);
        for (int n = 0; n < n_a; n++)
            for (int k = 0; k < n_a; k++)
                c(n, k) = std::polar(1.0 / std::sqrt(static_cast<double>(n_a)),
                                     -2.0 * pi * n * k / n_a);
    }

    VectorXcd beam(int k) const
    {
        require(k >= 0 && k < n_antennas, "Codebook::beam", "index out of range");
        return c.col(k);
    }
};

// Beam index folded to the symmetric range (-N_a/2, N_a/2].
inline int fold_beam_index(int k, int n_a)
{
    int m = ((k % n_a) + n_a) % n_a;
    return (m > n_a / 2) ? m - n_a : m;
}

// Spatial frequency u = sin(theta) at the center of beam k.
inline double beam_center_u(int k, int n_a)
{
    return 2.0 * fold_beam_index(k, n_a) / n_a;
}

// Boresight-referenced pointing angle of beam k, in radians.
inline double beam_center_angle(int k, int n_a)
{
    double u = beam_center_u(k, n_a);
    if (u > 1.0)
        u = 1.0;
    if (u < -1.0)
        u = -1.0;
    return std::asin(u);
}

// Beam index a device uses to transmit back along the direction it received
// beam k from (spatial frequency negation).
inline int reciprocal_beam_index(int k, int n_a)
{
    return ((n_a - (k % n_a)) % n_a + n_a) % n_a;
}

} // namespace combalign

#endif
