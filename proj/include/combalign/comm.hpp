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

#ifndef COMBALIGN_COMM_HPP
#define COMBALIGN_COMM_HPP

#include <functional>
#include <vector>

#include "combalign/channel.hpp"
#include "combalign/codebook.hpp"

namespace combalign
{

// Template taper for communication beams: a real symmetric unit-norm window
// whose array pattern has an equiripple flat main lobe. ripple_db records
// the achieved passband/sidelobe ripple (positive dB below the flat level).
struct Taper
{
    VectorXcd w;
    double beamwidth_deg = 0.0;
    double ripple_db = 0.0;
};

// Equiripple flat-top design: passband |u| <= sin(bw/2) in u = sin(theta)
// units, one beam spacing (2/N_a) of transition, equal band weights. Throws
// when the requested main lobe is narrower than the array can form or so
// wide that no stopband is left, or when the achieved ripple is worse than
// min_ripple_db.
Taper design_flat_top(int n_antennas, double beamwidth_deg, double min_ripple_db);

// Communication beam: the taper applied on top of DFT beam i_opt,
// renormalized to unit norm.
VectorXcd steer_beam(const Taper &taper, const Codebook &codebook, int i_opt);

// Steering vector toward spatial frequency u, matching the codebook columns
// at u = 2k/N_a.
VectorXcd array_response(int n_antennas, double u);

// Normalized power pattern of weight vector w toward u; a DFT beam on its
// center has gain exactly 1.
double beam_gain(const VectorXcd &w, double u);

struct LinkMetrics
{
    double sinr = 0.0;      // linear
    double se = 0.0;        // bits/s/Hz, log2(1 + sinr)
    double signal_w = 0.0;  // first-tap beamformed power
    double isi_w = 0.0;     // own-channel taps n >= 1, no equalization
    double mui_w = 0.0;     // other pairs' beamformed leakage, all taps
    double noise_w = 0.0;   // N0 * B
    double mfb_se = 0.0;    // matched filter bound with the same beams
};

struct DevicePair
{
    int tx = 0;
    int rx = 0;
};

struct PairBeams
{
    VectorXcd v; // transmit
    VectorXcd u; // receive
};

// Channel lookup by directed device indices.
using ChannelGetter = std::function<const DiscreteChannel &(int from, int to)>;

// Per-pair SINR treating the first tap as signal, later own taps as ISI and
// every other transmitter's full response as interference (symbol timing
// aligned across pairs, the worst case).
std::vector<LinkMetrics> compute_link_metrics(const std::vector<DevicePair> &pairs,
                                              const std::vector<PairBeams> &beams,
                                              const ChannelGetter &channel, double p_tx_w,
                                              double n0_w_per_hz, double bandwidth_hz);

double sum_se(const std::vector<LinkMetrics> &metrics);

// Upper bound of a receiver that equalizes perfectly and collects the
// energy of every tap.
double compute_mfb(const DiscreteChannel &ch, const VectorXcd &v, const VectorXcd &u,
                   double p_tx_w, double n0_w_per_hz, double bandwidth_hz);

struct FlatnessReport
{
    double std_db = 0.0;
    double peak_to_peak_db = 0.0;
};

// Dispersion of |u^H H[m] v| across bins, in dB.
FlatnessReport frequency_flatness(const FrequencyChannel &ch, const VectorXcd &v,
                                  const VectorXcd &u);

} // namespace combalign

#endif
