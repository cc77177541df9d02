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

#ifndef COMBALIGN_SENSING_HPP
#define COMBALIGN_SENSING_HPP

#include <random>
#include <vector>

#include "combalign/common.hpp"
#include "combalign/pilots.hpp"

namespace combalign
{

// Q probing weight vectors in the beam domain, one per row. Entries are
// random phases of magnitude 1/sqrt(N_a), so every probe has unit norm and
// the antenna-domain weights C w are unit-modulus up to the 1/sqrt(N_a)
// feed scaling (constant-envelope front end).
struct BeamWeights
{
    MatrixXcd w; // Q x N_a

    int n_probes() const { return static_cast<int>(w.rows()); }
    int n_antennas() const { return static_cast<int>(w.cols()); }
};

// Row q is N_a * kron(vtx_q^T, urx_q^H): the linear map from the vectorized
// dual-sided beamspace to the probe-q output. Entries are unit modulus.
struct SamplingMatrix
{
    MatrixXcd a; // Q x N_a^2
    int n_antennas = 0;

    int n_probes() const { return static_cast<int>(a.rows()); }
};

// Received pilot bins after probe combining: rows = probes, columns = the
// pilot's comb bins.
struct MeasurementBlock
{
    MatrixXcd y;              // Q x |F|
    VectorXi freq_set;        // bin indices of the columns
    int seq_length = 0;       // M
    double noise_power = 0.0; // per-entry complex noise variance
};

// Row-sparse recovery result. x approximates beamspace * diag(pilot bins);
// its dominant row indexes the aligned beam pair.
struct BeamspaceEstimate
{
    MatrixXcd x; // N_a^2 x |F|
    std::vector<double> objective; // value after each iteration
    int iterations = 0;
    bool converged = false;
};

struct BeamPair
{
    bool ok = false;
    int tx_beam = 0;
    int rx_beam = 0;
    int row = 0;
    double row_norm = 0.0;
};

BeamWeights draw_beam_weights(std::mt19937_64 &rng, int n_probes, int n_antennas);

SamplingMatrix build_sampling_matrix(const BeamWeights &tx, const BeamWeights &rx);

// Synthesizes the probe-domain measurement of one link in the frequency
// domain: y[q, l] = (1/N_a) (A h)[q, F_l] * x_tilde[F_l] + noise, where
// x_tilde is the unitary spectrum of the power-normalized pilot
// (samples / sqrt(T), T = 1/bandwidth) and the noise variance per entry is
// n0 * bandwidth. n0 = 0 leaves the rng untouched.
MeasurementBlock simulate_measurement(const MatrixXcd &beamspace_bins, const SamplingMatrix &a,
                                      const PilotSequence &pilot, double n0_w_per_hz,
                                      double bandwidth_hz, std::mt19937_64 &rng);

// Proximal gradient on 0.5 ||y - A_bar x||_F^2 + gamma * sum_r ||x_r||_2
// with A_bar = a / (N_a sqrt(M)). Step size from the largest eigenvalue of
// A_bar^H A_bar (power iteration, deterministic start). Objective recorded
// after every iteration; converged when the iterate moves less than
// tol * max(1, ||x||_F).
BeamspaceEstimate block_ista_solve(const MeasurementBlock &y, const SamplingMatrix &a,
                                   double gamma, int max_iter = 500, double tol = 1e-7);

// Row-wise group soft threshold: row *= max(0, 1 - t / ||row||).
void row_shrink(MatrixXcd &x, double t);

// Dominant-row beam pair; ok = false when the estimate is identically zero.
BeamPair extract_beam_pair(const BeamspaceEstimate &est, int n_antennas);

// Default group-threshold heuristic: c * sigma * sqrt(Q + |F|).
inline double default_gamma(double noise_power, int n_probes, int n_bins, double scale = 1.0)
{
    return scale * std::sqrt(noise_power) * std::sqrt(static_cast<double>(n_probes + n_bins));
}

} // namespace combalign

#endif
