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

#include "combalign/baseline.hpp"

#include <algorithm>
#include <numeric>

#include "combalign/rng.hpp"

namespace combalign
{

OneSidedBeamspace one_sided_beamspace(const FrequencyChannel &ch, const Codebook &codebook)
{
    require(ch.n_bins() > 0, "one_sided_beamspace", "empty channel");
    require(ch.n_rx() == codebook.n_antennas && ch.n_tx() == codebook.n_antennas,
            "one_sided_beamspace", "codebook size must match the channel");
    const int n_a = codebook.n_antennas, m_bins = ch.n_bins();
    OneSidedBeamspace out;
    out.g.resize(n_a, m_bins);
    for (int m = 0; m < m_bins; m++)
        out.g.col(m) = (ch.bins[static_cast<size_t>(m)].row(0) * codebook.c).transpose();
    return out;
}

BeamWeights draw_probe_weights(std::mt19937_64 &rng, int n_probes, int n_antennas,
                               ProbeKind kind)
{
    require(n_probes >= 1, "draw_probe_weights", "need at least one probe");
    require(n_antennas >= 1, "draw_probe_weights", "need at least one antenna");
    BeamWeights out;
    out.w = MatrixXcd::Zero(n_probes, n_antennas);
    if (kind == ProbeKind::one_hot)
    {
        for (int q = 0; q < n_probes; q++)
            out.w(q, q % n_antennas) = 1.0;
        return out;
    }
    int active = std::max(1, n_antennas / 2);
    double mag = 1.0 / std::sqrt(static_cast<double>(active));
    std::vector<int> beams(static_cast<size_t>(n_antennas));
    std::iota(beams.begin(), beams.end(), 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int q = 0; q < n_probes; q++)
    {
        // Fisher-Yates prefix shuffle picks the active subset
        for (int i = 0; i < active; i++)
        {
            int j = i + static_cast<int>(uni(rng) * (n_antennas - i));
            j = std::min(j, n_antennas - 1);
            std::swap(beams[static_cast<size_t>(i)], beams[static_cast<size_t>(j)]);
        }
        for (int i = 0; i < active; i++)
        {
            double sign = (uni(rng) < 0.5) ? -1.0 : 1.0;
            out.w(q, beams[static_cast<size_t>(i)]) = sign * mag;
        }
    }
    return out;
}

MeasurementBlock simulate_one_sided(const OneSidedBeamspace &bs, const BeamWeights &probes,
                                    const PilotSequence &pilot, double n0_w_per_hz,
                                    double bandwidth_hz, std::mt19937_64 &rng)
{
    require(bs.n_beams() == probes.n_antennas(), "simulate_one_sided",
            "probe and beamspace sizes must match");
    require(bs.n_bins() == pilot.spec.length, "simulate_one_sided",
            "beamspace bin count must match the pilot length");
    require(bandwidth_hz > 0, "simulate_one_sided", "bandwidth must be positive");
    require(n0_w_per_hz >= 0, "simulate_one_sided", "noise density must be nonnegative");

    const double t_sample = 1.0 / bandwidth_hz;
    const int n_f = static_cast<int>(pilot.freq_set.size());
    const int q_n = probes.n_probes();

    MeasurementBlock out;
    out.freq_set = pilot.freq_set;
    out.seq_length = pilot.spec.length;
    out.noise_power = n0_w_per_hz * bandwidth_hz;
    out.y.resize(q_n, n_f);
    for (int l = 0; l < n_f; l++)
    {
        int m = pilot.freq_set[l];
        cplx xw = pilot.spectrum[m] / std::sqrt(t_sample);
        out.y.col(l) = (probes.w * bs.g.col(m)) * xw;
    }
    if (out.noise_power > 0.0)
        out.y += draw_cgauss(rng, q_n, n_f, out.noise_power);
    return out;
}

VectorXd noncoherent_combine(const MeasurementBlock &block)
{
    return block.y.rowwise().squaredNorm();
}

VectorXd l1_solve(const VectorXd &energies, const BeamWeights &probes, double noise_floor,
                  double gamma, int max_iter, double tol)
{
    require(energies.size() == probes.n_probes(), "l1_solve", "probe counts must match");
    require(gamma >= 0 && noise_floor >= 0, "l1_solve",
            "gamma and noise_floor must be nonnegative");

    MatrixXd phi = probes.w.cwiseAbs2();
    VectorXd e = energies.array() - noise_floor;

    // largest eigenvalue of phi^T phi, deterministic power iteration
    MatrixXd g = phi.transpose() * phi;
    VectorXd v = VectorXd::Ones(g.rows());
    v /= v.norm();
    double lambda = 1e-30;
    for (int it = 0; it < 200; it++)
    {
        VectorXd w = g * v;
        double l = w.norm();
        if (l == 0.0)
            break;
        w /= l;
        if (std::abs(l - lambda) <= 1e-9 * l)
        {
            lambda = l;
            break;
        }
        lambda = l;
        v = w;
    }
    lambda = lambda * 1.01 + 1e-30;

    VectorXd x = VectorXd::Zero(phi.cols());
    for (int it = 0; it < max_iter; it++)
    {
        VectorXd grad = phi.transpose() * (phi * x - e);
        VectorXd next = (x - grad / lambda).array() - gamma / lambda;
        next = next.cwiseMax(0.0); // projection onto the nonnegative orthant
        double step = (next - x).norm();
        x.swap(next);
        if (step <= tol * std::max(1.0, x.norm()))
            break;
    }
    return x;
}

OneSidedPair rank1_estimate(const VectorXd &gains_a, const VectorXd &gains_b)
{
    OneSidedPair out;
    if (gains_a.size() == 0 || gains_b.size() == 0)
        return out;
    Eigen::Index ia = 0, ib = 0;
    double ma = gains_a.maxCoeff(&ia);
    double mb = gains_b.maxCoeff(&ib);
    if (ma <= 0.0 || mb <= 0.0)
        return out;
    out.ok = true;
    out.beam_a = static_cast<int>(ia);
    out.beam_b = static_cast<int>(ib);
    return out;
}

} // namespace combalign
