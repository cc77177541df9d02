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

#include "combalign/channel.hpp"

#include <cmath>

#include "combalign/fft.hpp"

namespace combalign
{

double raised_cosine(double t, double rolloff)
{
    double at = std::abs(t);
    double edge = 1.0 / (2.0 * rolloff);
    // removable singularity at |t| = 1/(2a): limit is (pi/4) sinc(1/(2a))
    if (std::abs(at - edge) < 1e-9)
    {
        double sinc_e = std::sin(pi * edge) / (pi * edge);
        return (pi / 4.0) * sinc_e;
    }
    double sinc = (at < 1e-12) ? 1.0 : std::sin(pi * t) / (pi * t);
    double den = 1.0 - (2.0 * rolloff * t) * (2.0 * rolloff * t);
    return sinc * std::cos(pi * rolloff * t) / den;
}

namespace
{

void validate_pose(const RoomSpec &room, const DevicePose &p, const char *who)
{
    require(p.n_antennas >= 1, who, "need at least one antenna");
    require(std::abs(p.axis.norm() - 1.0) <= 1e-9, who, "axis must be a unit vector");
    require(p.spacing_m > 0.0 || p.n_antennas == 1, who, "element spacing must be positive");
    for (int e : {0, p.n_antennas - 1})
    {
        Vec3 q = p.element_position(e);
        bool inside = q.x > 0 && q.x < room.width && q.y > 0 && q.y < room.depth && q.z > 0 &&
                      q.z < room.height;
        require(inside, who, "array extends outside the room");
    }
}

// 1-D image family for walls at 0 and extent: coordinate maps to
// 2*p*extent + s*x with bounce count |2p| for s=+1 and |2p-1| for s=-1.
struct AxisImage
{
    double sign;
    double offset;
    int bounces;
};

std::vector<AxisImage> axis_images(double extent, int max_order)
{
    std::vector<AxisImage> out;
    int pmax = max_order / 2 + 1;
    for (int p = -pmax; p <= pmax; p++)
        for (double s : {1.0, -1.0})
        {
            int b = (s > 0) ? std::abs(2 * p) : std::abs(2 * p - 1);
            if (b <= max_order)
                out.push_back({s, 2.0 * p * extent, b});
        }
    return out;
}

} // namespace

PathSet trace_paths(const RoomSpec &room, const DevicePose &tx, const DevicePose &rx,
                    double carrier_hz)
{
    room.validate();
    validate_pose(room, tx, "trace_paths(tx)");
    validate_pose(room, rx, "trace_paths(rx)");
    require(carrier_hz > 0, "trace_paths", "carrier frequency must be positive");

    double lambda = speed_of_light / carrier_hz;
    PathSet out;
    out.carrier_hz = carrier_hz;

    auto xs = axis_images(room.width, room.max_order);
    auto ys = axis_images(room.depth, room.max_order);
    auto zs = axis_images(room.height, room.max_order);
    for (const auto &ix : xs)
        for (const auto &iy : ys)
            for (const auto &iz : zs)
            {
                int b = ix.bounces + iy.bounces + iz.bounces;
                if (b > room.max_order)
                    continue;
                SpecularPath p;
                p.sign = {ix.sign, iy.sign, iz.sign};
                p.offset = {ix.offset, iy.offset, iz.offset};
                p.bounces = b;
                Vec3 img = p.image_of(tx.position);
                double d = (rx.position - img).norm();
                require(d > 1e-6, "trace_paths", "devices coincide");
                p.delay = d / speed_of_light;
                p.amplitude = (lambda / (4.0 * pi * d)) * std::pow(room.reflection, b);
                out.paths.push_back(p);
            }
    return out;
}

DiscreteChannel discretize_channel(const PathSet &paths, const DevicePose &tx,
                                   const DevicePose &rx, double bandwidth_hz,
                                   const PulseSpec &pulse, double rel_threshold_db)
{
    require(!paths.paths.empty(), "discretize_channel", "empty path set");
    require(bandwidth_hz > 0, "discretize_channel", "bandwidth must be positive");
    require(rel_threshold_db < 0, "discretize_channel", "threshold must be negative dB");
    pulse.validate();

    const double T = 1.0 / bandwidth_hz;
    const double f0 = paths.carrier_hz;
    const int n_tx = tx.n_antennas, n_rx = rx.n_antennas;

    // element-pair delays per path; tau0 aligns the earliest arrival to tap 0
    std::vector<MatrixXd> delays(paths.paths.size());
    double tau0 = std::numeric_limits<double>::infinity();
    double tau_max = 0.0;
    for (size_t p = 0; p < paths.paths.size(); p++)
    {
        MatrixXd d(n_rx, n_tx);
        for (int j = 0; j < n_tx; j++)
        {
            Vec3 img = paths.paths[p].image_of(tx.element_position(j));
            for (int i = 0; i < n_rx; i++)
                d(i, j) = (rx.element_position(i) - img).norm() / speed_of_light;
        }
        delays[p] = d;
        tau0 = std::min(tau0, d.minCoeff());
        tau_max = std::max(tau_max, d.maxCoeff());
    }

    int n_taps = static_cast<int>(std::ceil((tau_max - tau0) / T)) + pulse.span + 1;
    DiscreteChannel ch;
    ch.sample_period = T;
    ch.tau0 = tau0;
    ch.taps.assign(static_cast<size_t>(n_taps), MatrixXcd::Zero(n_rx, n_tx));

    for (size_t p = 0; p < paths.paths.size(); p++)
    {
        const cplx amp = paths.paths[p].amplitude;
        for (int j = 0; j < n_tx; j++)
            for (int i = 0; i < n_rx; i++)
            {
                double tau = delays[p](i, j);
                cplx coeff = amp * std::polar(1.0, -2.0 * pi * f0 * tau);
                double center = (tau - tau0) / T;
                int lo = std::max(0, static_cast<int>(std::ceil(center - pulse.span)));
                int hi = std::min(n_taps - 1, static_cast<int>(std::floor(center + pulse.span)));
                for (int n = lo; n <= hi; n++)
                    ch.taps[static_cast<size_t>(n)](i, j) +=
                        coeff * raised_cosine(n - center, pulse.rolloff);
            }
    }

    int L = channel_length(ch, rel_threshold_db);
    ch.taps.resize(static_cast<size_t>(L));
    return ch;
}

int channel_length(const DiscreteChannel &ch, double rel_threshold_db)
{
    require(!ch.taps.empty(), "channel_length", "empty channel");
    require(rel_threshold_db < 0, "channel_length", "threshold must be negative dB");

    std::vector<double> p(ch.taps.size());
    double peak = 0.0;
    for (size_t n = 0; n < ch.taps.size(); n++)
    {
        p[n] = ch.taps[n].squaredNorm();
        peak = std::max(peak, p[n]);
    }
    require(peak > 0.0, "channel_length", "all-zero channel");

    double floor_p = peak * from_db10(rel_threshold_db);
    int L = static_cast<int>(ch.taps.size());
    while (L > 1 && p[static_cast<size_t>(L - 1)] < floor_p)
        L--;
    return L;
}

FrequencyChannel to_frequency_domain(const DiscreteChannel &ch, int n_bins)
{
    require(!ch.taps.empty(), "to_frequency_domain", "empty channel");
    require(n_bins >= ch.n_taps(), "to_frequency_domain",
            "bin count must be at least the tap count");

    const int n_rx = ch.n_rx(), n_tx = ch.n_tx(), L = ch.n_taps();
    FrequencyChannel out;
    out.bins.assign(static_cast<size_t>(n_bins), MatrixXcd::Zero(n_rx, n_tx));
    VectorXcd buf = VectorXcd::Zero(n_bins);
    for (int j = 0; j < n_tx; j++)
        for (int i = 0; i < n_rx; i++)
        {
            buf.setZero();
            for (int n = 0; n < L; n++)
                buf[n] = ch.taps[static_cast<size_t>(n)](i, j);
            VectorXcd f = fft(buf);
            for (int m = 0; m < n_bins; m++)
                out.bins[static_cast<size_t>(m)](i, j) = f[m];
        }
    return out;
}

MatrixXcd beamspace(const FrequencyChannel &ch, const Codebook &codebook)
{
    require(ch.n_bins() > 0, "beamspace", "empty channel");
    require(ch.n_rx() == codebook.n_antennas && ch.n_tx() == codebook.n_antennas, "beamspace",
            "codebook size must match the channel");

    const int n_a = codebook.n_antennas, m_bins = ch.n_bins();
    MatrixXcd out(n_a * n_a, m_bins);
    for (int m = 0; m < m_bins; m++)
    {
        MatrixXcd b = codebook.c.adjoint() * ch.bins[static_cast<size_t>(m)] * codebook.c;
        out.col(m) = Eigen::Map<const VectorXcd>(b.data(), n_a * n_a);
    }
    return out;
}

} // namespace combalign
