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

#ifndef COMBALIGN_CHANNEL_HPP
#define COMBALIGN_CHANNEL_HPP

#include <vector>

#include "combalign/codebook.hpp"
#include "combalign/common.hpp"

namespace combalign
{

// Shoebox room spanning (0,0,0) .. (width, depth, height), with a common
// complex reflection coefficient per wall bounce.
struct RoomSpec
{
    double width = 10.0;  // x extent, m
    double depth = 10.0;  // y extent, m
    double height = 3.0;  // z extent, m
    cplx reflection = cplx(-0.3, 0.0);
    int max_order = 2; // total bounces per path

    void validate() const
    {
        require(width > 0 && depth > 0 && height > 0, "RoomSpec", "extents must be positive");
        require(std::abs(reflection) <= 1.0, "RoomSpec", "|reflection| must be <= 1");
        require(max_order >= 0 && max_order <= 4, "RoomSpec", "max_order must be in [0, 4]");
    }
};

// Uniform linear array: elements on a line through `position` along unit
// vector `axis`, centered, with spacing `spacing_m`.
struct DevicePose
{
    Vec3 position;
    Vec3 axis{1.0, 0.0, 0.0};
    int n_antennas = 1;
    double spacing_m = 0.0;

    Vec3 element_position(int e) const
    {
        double off = (e - 0.5 * (n_antennas - 1)) * spacing_m;
        return position + axis * off;
    }
};

// Half-wavelength array at carrier f0.
inline DevicePose make_pose(Vec3 position, Vec3 axis, int n_antennas, double f0)
{
    require(f0 > 0, "make_pose", "carrier frequency must be positive");
    DevicePose p;
    p.position = position;
    p.axis = axis.normalized();
    p.n_antennas = n_antennas;
    p.spacing_m = speed_of_light / f0 / 2.0;
    return p;
}

// One specular path from the image-source expansion. The transmit array is
// mirrored by x -> sign .* x + offset (componentwise), which gives exact
// per-element delays without a far-field assumption. Amplitude uses the
// centroid distance (element-level amplitude spread is negligible at room
// scale; element-level carrier phase is not, and is kept exact).
struct SpecularPath
{
    Vec3 sign;          // componentwise +/-1
    Vec3 offset;        // image translation, m
    int bounces = 0;    // total wall interactions
    double delay = 0.0; // centroid delay, s
    cplx amplitude;     // (lambda / 4 pi d) * reflection^bounces

    Vec3 image_of(const Vec3 &p) const
    {
        return Vec3{sign.x * p.x + offset.x, sign.y * p.y + offset.y, sign.z * p.z + offset.z};
    }
};

struct PathSet
{
    std::vector<SpecularPath> paths;
    double carrier_hz = 0.0;
};

// Raised-cosine pulse knobs for the combined tx/rx shaping (two root-raised
// cosine filters back to back).
struct PulseSpec
{
    double rolloff = 0.25;
    int span = 8; // one-sided support in symbol periods

    void validate() const
    {
        require(rolloff > 0.0 && rolloff <= 1.0, "PulseSpec", "rolloff must be in (0, 1]");
        require(span >= 1 && span <= 64, "PulseSpec", "span must be in [1, 64]");
    }
};

// Combined raised-cosine pulse, unit peak, zero at nonzero integer t/T.
double raised_cosine(double t_over_T, double rolloff);

// Sampled multi-antenna impulse response. Tap n is the N_rx x N_tx matrix at
// time n*T + tau0; tau0 is the earliest per-element arrival, so the first
// path peaks on tap 0 and its pulse tails vanish on the sample grid.
struct DiscreteChannel
{
    std::vector<MatrixXcd> taps; // length L
    double sample_period = 0.0;  // T, s
    double tau0 = 0.0;           // alignment offset, s

    int n_taps() const { return static_cast<int>(taps.size()); }
    int n_rx() const { return taps.empty() ? 0 : static_cast<int>(taps[0].rows()); }
    int n_tx() const { return taps.empty() ? 0 : static_cast<int>(taps[0].cols()); }

    // Reverse-direction channel (propagation reciprocity).
    DiscreteChannel transposed() const
    {
        DiscreteChannel r;
        r.sample_period = sample_period;
        r.tau0 = tau0;
        r.taps.reserve(taps.size());
        for (const auto &h : taps)
            r.taps.push_back(h.transpose());
        return r;
    }
};

// Per-bin frequency response H[m] = sum_n taps[n] e^{-j2pi mn/M}, m = 0..M-1.
struct FrequencyChannel
{
    std::vector<MatrixXcd> bins;

    int n_bins() const { return static_cast<int>(bins.size()); }
    int n_rx() const { return bins.empty() ? 0 : static_cast<int>(bins[0].rows()); }
    int n_tx() const { return bins.empty() ? 0 : static_cast<int>(bins[0].cols()); }
};

// Enumerates specular paths between two interior devices up to
// room.max_order total bounces.
PathSet trace_paths(const RoomSpec &room, const DevicePose &tx, const DevicePose &rx,
                    double carrier_hz);

// Samples the pulse-shaped response at rate bandwidth_hz. Trailing taps more
// than rel_threshold_db below the strongest tap (power dB on squared
// Frobenius norms) are trimmed.
DiscreteChannel discretize_channel(const PathSet &paths, const DevicePose &tx,
                                   const DevicePose &rx, double bandwidth_hz,
                                   const PulseSpec &pulse, double rel_threshold_db = -60.0);

// Smallest L such that every tap at index >= L is below rel_threshold_db of
// the strongest tap. At least 1.
int channel_length(const DiscreteChannel &ch, double rel_threshold_db = -60.0);

// M-point per-entry DFT of the taps. Requires n_bins >= n_taps.
FrequencyChannel to_frequency_domain(const DiscreteChannel &ch, int n_bins);

// Dual-sided DFT beamspace: column m is vec(C^H H[m] C), row r = i + j*N_a
// for (rx beam i, tx beam j).
MatrixXcd beamspace(const FrequencyChannel &ch, const Codebook &codebook);

// Ground truth for angle metrics: the direct ray from `from` to `to`
// projected on device dev's axis. With the ray oriented transmitter ->
// receiver, the same convention serves both codebook roles: the peak beam
// index at either end is round(N_a * u / 2) mod N_a.
inline double link_spatial_frequency(const DevicePose &dev, const Vec3 &from, const Vec3 &to)
{
    return dev.axis.dot((to - from).normalized());
}

} // namespace combalign

#endif
