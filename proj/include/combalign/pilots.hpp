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

#ifndef COMBALIGN_PILOTS_HPP
#define COMBALIGN_PILOTS_HPP

#include <cstdint>
#include <random>

#include "combalign/common.hpp"

namespace combalign
{

// Parameters of one comb pilot. A sequence of length M occupies M_s bins
// spaced eta = M/M_s apart, starting at offset k. eta transmitters can share
// the band on disjoint combs (k = 0 .. eta-1).
struct PilotSpec
{
    int length = 0;       // M, total samples
    int bins = 0;         // M_s, occupied bins
    int offset = 0;       // k, comb offset in [0, eta)
    double energy = 0.0;  // E, sum of |s[n]|^2

    int comb_spacing() const { return length / bins; } // eta

    void validate() const
    {
        require(length >= 1, "PilotSpec", "length must be positive");
        require(bins >= 1 && bins <= length, "PilotSpec", "bins must be in [1, length]");
        require(length % bins == 0, "PilotSpec", "bins must divide length");
        require(offset >= 0 && offset < length / bins, "PilotSpec",
                "offset must be in [0, length/bins)");
        require(energy > 0.0, "PilotSpec", "energy must be positive");
    }
};

// Unit-modulus weight vector with (near-)flat DFT magnitude, found by
// alternating projections between the unit-modulus set and the flat-spectrum
// set. Canonical form: the weights before any comb-offset rotation.
struct WeightVector
{
    VectorXcd weights;       // length M_s, |weights[n]| == 1
    double flatness_db = 0;  // max |dB deviation| of |DFT| from its mean
    int iterations = 0;
    bool converged = false;
};

// Designed pilot: constant-envelope time samples plus their unitary DFT.
// Out-of-comb spectrum is zero up to FFT roundoff; in-comb bins carry the
// M_s-point DFT of the weight vector (scaled), so each holds power close to
// energy / M_s.
struct PilotSequence
{
    PilotSpec spec;
    VectorXcd samples;   // length M, |samples[n]| = sqrt(E/M)
    VectorXcd spectrum;  // unitary M-point DFT of samples
    VectorXi freq_set;   // occupied bin indices, ascending
};

// Bin indices {k, k+eta, ..., k+(M_s-1)eta} of the comb.
VectorXi frequency_set(int length, int bins, int offset);

// Searches a unit-modulus length-n vector whose DFT magnitude is flat to
// tol_db (max deviation from the mean, in dB). Starts from random phases.
WeightVector flat_spectrum_sequence(int n, double tol_db, int max_iter, std::mt19937_64 &rng);

// Builds the comb pilot: eta-point impulse -> IDFT tone -> zero-stuffing by
// M_s -> cyclic-shift combination with the offset-rotated weights -> energy
// scaling. Envelope constancy and comb support hold by construction.
PilotSequence design_pilot(const PilotSpec &spec, const WeightVector &w);

} // namespace combalign

#endif
