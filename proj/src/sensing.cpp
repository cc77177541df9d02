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

#include "combalign/sensing.hpp"

#include "combalign/rng.hpp"

namespace combalign
{

BeamWeights draw_beam_weights(std::mt19937_64 &rng, int n_probes, int n_antennas)
{
    require(n_probes >= 1, "draw_beam_weights", "need at least one probe");
    require(n_antennas >= 1, "draw_beam_weights", "need at least one antenna");
    BeamWeights out;
    out.w.resize(n_probes, n_antennas);
    double mag = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    std::uniform_real_distribution<double> uni(0.0, 2.0 * pi);
    for (int q = 0; q < n_probes; q++)
        for (int i = 0; i < n_antennas; i++)
            out.w(q, i) = std::polar(mag, uni(rng));
    return out;
}

SamplingMatrix build_sampling_matrix(const BeamWeights &tx, const BeamWeights &rx)
{
    require(tx.n_probes() == rx.n_probes(), "build_sampling_matrix",
            "probe counts must match");
    require(tx.n_antennas() == rx.n_antennas(), "build_sampling_matrix",
            "antenna counts must match");
    const int q_n = tx.n_probes(), n_a = tx.n_antennas();
    SamplingMatrix out;
    out.n_antennas = n_a;
    out.a.resize(q_n, n_a * n_a);
    for (int q = 0; q < q_n; q++)
        for (int j = 0; j < n_a; j++)
            for (int i = 0; i < n_a; i++)
                out.a(q, i + j * n_a) =
                    static_cast<double>(n_a) * tx.w(q, j) * std::conj(rx.w(q, i));
    return out;
}

MeasurementBlock simulate_measurement(const MatrixXcd &beamspace_bins, const SamplingMatrix &a,
                                      const PilotSequence &pilot, double n0_w_per_hz,
                                      double bandwidth_hz, std::mt19937_64 &rng)
{
    const int n_a = a.n_antennas;
    require(beamspace_bins.rows() == n_a * n_a, "simulate_measurement",
            "beamspace row count must be N_a^2");
    require(beamspace_bins.cols() == pilot.spec.length, "simulate_measurement",
            "beamspace bin count must match the pilot length");
    require(bandwidth_hz > 0, "simulate_measurement", "bandwidth must be positive");
    require(n0_w_per_hz >= 0, "simulate_measurement", "noise density must be nonnegative");

    const double t_sample = 1.0 / bandwidth_hz;
    const int n_f = static_cast<int>(pilot.freq_set.size());
    const int q_n = a.n_probes();

    MeasurementBlock out;
    out.freq_set = pilot.freq_set;
    out.seq_length = pilot.spec.length;
    out.noise_power = n0_w_per_hz * bandwidth_hz;
    out.y.resize(q_n, n_f);

    for (int l = 0; l < n_f; l++)
    {
        int m = pilot.freq_set[l];
        cplx xw = pilot.spectrum[m] / std::sqrt(t_sample); // power-normalized bin
        out.y.col(l) = (a.a * beamspace_bins.col(m)) * (xw / static_cast<double>(n_a));
    }
    if (out.noise_power > 0.0)
        out.y += draw_cgauss(rng, q_n, n_f, out.noise_power);
    return out;
}

void row_shrink(MatrixXcd &x, double t)
{
    require(t >= 0, "row_shrink", "threshold must be nonnegative");
    for (Eigen::Index r = 0; r < x.rows(); r++)
    {
        double n = x.row(r).norm();
        if (n <= t)
            x.row(r).setZero();
        else
            x.row(r) *= (1.0 - t / n);
    }
}

namespace
{

// largest eigenvalue of g = A^H A via power iteration, deterministic start
double spectral_bound(const MatrixXcd &a)
{
    MatrixXcd g = a.adjoint() * a;
    VectorXcd v = VectorXcd::Ones(g.rows());
    v /= v.norm();
    double lambda = 0.0;
    for (int it = 0; it < 200; it++)
    {
        VectorXcd w = g * v;
        double l = w.norm();
        if (l == 0.0)
            return 0.0;
        w /= l;
        if (std::abs(l - lambda) <= 1e-9 * l)
        {
            lambda = l;
            break;
        }
        lambda = l;
        v = w;
    }
    return lambda;
}

} // namespace

BeamspaceEstimate block_ista_solve(const MeasurementBlock &y, const SamplingMatrix &a,
                                   double gamma, int max_iter, double tol)
{
    require(y.y.rows() == a.n_probes(), "block_ista_solve", "probe counts must match");
    require(gamma >= 0, "block_ista_solve", "gamma must be nonnegative");
    require(max_iter >= 1, "block_ista_solve", "max_iter must be positive");
    require(y.seq_length >= 1, "block_ista_solve", "measurement lacks the sequence length");

    const double scale = 1.0 / (a.n_antennas * std::sqrt(static_cast<double>(y.seq_length)));
    MatrixXcd a_bar = a.a * scale;

    double lambda = spectral_bound(a_bar) * 1.01 + 1e-30;
    MatrixXcd ah = a_bar.adjoint();

    BeamspaceEstimate est;
    est.x = MatrixXcd::Zero(a_bar.cols(), y.y.cols());
    est.objective.reserve(static_cast<size_t>(max_iter));

    auto objective = [&](const MatrixXcd &x) {
        double fit = 0.5 * (y.y - a_bar * x).squaredNorm();
        double reg = 0.0;
        for (Eigen::Index r = 0; r < x.rows(); r++)
            reg += x.row(r).norm();
        return fit + gamma * reg;
    };

    for (int it = 0; it < max_iter; it++)
    {
        MatrixXcd grad = ah * (a_bar * est.x - y.y);
        MatrixXcd next = est.x - grad / lambda;
        row_shrink(next, gamma / lambda);
        double step = (next - est.x).norm();
        est.x.swap(next);
        est.objective.push_back(objective(est.x));
        est.iterations = it + 1;
        if (step <= tol * std::max(1.0, est.x.norm()))
        {
            est.converged = true;
            break;
        }
    }
    return est;
}

BeamPair extract_beam_pair(const BeamspaceEstimate &est, int n_antennas)
{
    require(est.x.rows() == static_cast<Eigen::Index>(n_antennas) * n_antennas,
            "extract_beam_pair", "estimate row count must be N_a^2");
    BeamPair out;
    for (Eigen::Index r = 0; r < est.x.rows(); r++)
    {
        double n = est.x.row(r).norm();
        if (n > out.row_norm)
        {
            out.row_norm = n;
            out.row = static_cast<int>(r);
        }
    }
    if (out.row_norm <= 0.0)
        return out; // all-zero: alignment failed
    out.ok = true;
    out.rx_beam = out.row % n_antennas;
    out.tx_beam = out.row / n_antennas;
    return out;
}

} // namespace combalign
