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

#ifndef COMBALIGN_BASELINE_HPP
#define COMBALIGN_BASELINE_HPP

#include <random>

#include "combalign/channel.hpp"
#include "combalign/pilots.hpp"
#include "combalign/sensing.hpp"

namespace combalign
{

// Transmit-side beam responses seen by a quasi-omni receiver. Summing all
// DFT beams collapses to a single radiating element, so the omni reference
// is the first antenna: g(b, m) = e_0^H H[m] c_b.
struct OneSidedBeamspace
{
    MatrixXcd g; // N_a x M

    int n_beams() const { return static_cast<int>(g.rows()); }
    int n_bins() const { return static_cast<int>(g.cols()); }
};

enum class ProbeKind
{
    half_subset, // N_a/2 random beams active, +/- sqrt(2/N_a) entries
    one_hot      // probe q activates beam (q mod N_a); orthogonal sweep
};

OneSidedBeamspace one_sided_beamspace(const FrequencyChannel &ch, const Codebook &codebook);

// Unit-norm on/off probing vectors in the beam domain. Unit-circle probes
// would put identical energy 1/N_a on every beam and carry no information
// through a power detector; sparse sign subsets keep the energy-domain
// model well conditioned.
BeamWeights draw_probe_weights(std::mt19937_64 &rng, int n_probes, int n_antennas,
                               ProbeKind kind = ProbeKind::half_subset);

// Probe-swept measurement against the omni receiver:
// y[q, l] = sum_b probes(q, b) g(b, F_l) x_tilde[F_l] + noise.
MeasurementBlock simulate_one_sided(const OneSidedBeamspace &bs, const BeamWeights &probes,
                                    const PilotSequence &pilot, double n0_w_per_hz,
                                    double bandwidth_hz, std::mt19937_64 &rng);

// Power detection: per-probe energy across the pilot bins.
VectorXd noncoherent_combine(const MeasurementBlock &block);

// Nonnegative l1 recovery of per-beam energies from probe energies:
// minimizes 0.5 ||(e - floor) - Phi g||^2 + gamma ||g||_1 over g >= 0 with
// Phi(q, b) = |probes(q, b)|^2 and floor the expected noise energy.
VectorXd l1_solve(const VectorXd &energies, const BeamWeights &probes, double noise_floor,
                  double gamma, int max_iter = 500, double tol = 1e-9);

// Picks the dominant entry of each one-sided profile; the pair is the argmax
// of the rank-1 outer product. ok = false if either profile is all zero.
struct OneSidedPair
{
    bool ok = false;
    int beam_a = 0; // local transmit beam at the first device
    int beam_b = 0; // local transmit beam at the second device
};

OneSidedPair rank1_estimate(const VectorXd &gains_a, const VectorXd &gains_b);

// Energy-domain threshold heuristic for l1_solve.
inline double default_baseline_gamma(double noise_power, int n_probes, int n_bins,
                                     double scale = 1.0)
{
    return scale * noise_power * std::sqrt(static_cast<double>(n_probes * n_bins));
}

} // namespace combalign

#endif
