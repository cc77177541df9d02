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

#include "combalign/comm.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace combalign
{

namespace
{

// Equiripple linear-phase lowpass by exchange on a dense grid. The real
// response is a polynomial in cos(2pi f); even lengths factor out cos(pi f)
// and fold it into the desired values and weights. Bands carry equal weight.
struct EquirippleResult
{
    VectorXd taps;
    double delta = 0.0; // achieved ripple level
};

EquirippleResult equiripple_lowpass(int n_taps, double f_pass, double f_stop)
{
    require(n_taps >= 2, "equiripple_lowpass", "need at least two taps");
    require(f_pass > 0 && f_pass < f_stop && f_stop < 0.5, "equiripple_lowpass",
            "need 0 < f_pass < f_stop < 0.5");

    const bool even = n_taps % 2 == 0;
    const int r = even ? n_taps / 2 : (n_taps + 1) / 2; // cosine basis size
    const int m = r + 1;                                // alternation count
    const double stop_hi = even ? 0.5 - 1e-3 : 0.5;     // cos(pi f) = 0 is singular
    require(f_stop < stop_hi, "equiripple_lowpass", "stopband too narrow");

    std::vector<double> gf, gd, gw;
    const int total = std::max(20 * m, 400);
    const double width = f_pass + (stop_hi - f_stop);
    auto add_band = [&](double lo, double hi, double dval) {
        int pts = std::max(m + 2, static_cast<int>(std::lround(total * (hi - lo) / width)));
        for (int i = 0; i < pts; i++)
        {
            double f = lo + (hi - lo) * i / (pts - 1);
            double c = std::cos(pi * f);
            gf.push_back(f);
            gd.push_back(even ? dval / c : dval);
            gw.push_back(even ? c : 1.0);
        }
    };
    add_band(0.0, f_pass, 1.0);
    add_band(f_stop, stop_hi, 0.0);
    const int g_n = static_cast<int>(gf.size());

    std::vector<double> gx(g_n);
    for (int i = 0; i < g_n; i++)
        gx[i] = std::cos(2.0 * pi * gf[i]);

    std::vector<int> ref(m);
    for (int k = 0; k < m; k++)
        ref[k] = static_cast<int>(static_cast<double>(g_n - 1) * k / (m - 1));

    std::vector<double> xk(m), bw(m), yk(m);
    double delta = 0.0;
    auto solve_ref = [&]() {
        for (int k = 0; k < m; k++)
            xk[k] = gx[ref[k]];
        for (int k = 0; k < m; k++)
        {
            double p = 1.0;
            for (int j = 0; j < m; j++)
                if (j != k)
                    p *= xk[k] - xk[j];
            bw[k] = 1.0 / p;
        }
        double num = 0.0, den = 0.0;
        for (int k = 0; k < m; k++)
        {
            num += bw[k] * gd[ref[k]];
            den += (k % 2 == 0 ? 1.0 : -1.0) * bw[k] / gw[ref[k]];
        }
        delta = num / den;
        for (int k = 0; k < m; k++)
            yk[k] = gd[ref[k]] - (k % 2 == 0 ? 1.0 : -1.0) * delta / gw[ref[k]];
    };
    auto eval = [&](double x) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k < m; k++)
        {
            double diff = x - xk[k];
            if (std::abs(diff) < 1e-14)
                return yk[k];
            double t = bw[k] / diff;
            num += t * yk[k];
            den += t;
        }
        return num / den;
    };

    std::vector<double> err(g_n);
    for (int iter = 0; iter < 100; iter++)
    {
        solve_ref();
        for (int i = 0; i < g_n; i++)
            err[i] = gw[i] * (gd[i] - eval(gx[i]));

        // one candidate per sign run keeps the alternation property
        std::vector<int> cand;
        int i = 0;
        while (i < g_n)
        {
            bool pos = err[i] >= 0.0;
            int best = i;
            while (i < g_n && (err[i] >= 0.0) == pos)
            {
                if (std::abs(err[i]) > std::abs(err[best]))
                    best = i;
                i++;
            }
            cand.push_back(best);
        }
        if (static_cast<int>(cand.size()) < m)
            break; // degenerate spec; keep the current reference
        while (static_cast<int>(cand.size()) > m)
        {
            if (static_cast<int>(cand.size()) == m + 1)
            {
                if (std::abs(err[cand.front()]) <= std::abs(err[cand.back()]))
                    cand.erase(cand.begin());
                else
                    cand.pop_back();
            }
            else
            {
                int drop = 0;
                double weakest = 1e300;
                for (int k = 0; k + 1 < static_cast<int>(cand.size()); k++)
                {
                    double v = std::max(std::abs(err[cand[k]]), std::abs(err[cand[k + 1]]));
                    if (v < weakest)
                    {
                        weakest = v;
                        drop = k;
                    }
                }
                cand.erase(cand.begin() + drop, cand.begin() + drop + 2);
            }
        }
        bool settled = cand == ref;
        double emax = 0.0;
        for (int k : cand)
            emax = std::max(emax, std::abs(err[k]));
        ref = cand;
        if (settled || emax - std::abs(delta) <= 1e-10 * std::max(std::abs(delta), 1e-12))
            break;
    }
    solve_ref();

    // Chebyshev sampling of the converged interpolant gives the cosine
    // coefficients exactly (degree r - 1 polynomial, r nodes).
    std::vector<double> b(r, 0.0), sample(r);
    for (int j = 0; j < r; j++)
        sample[j] = eval(std::cos(pi * (j + 0.5) / r));
    for (int k = 0; k < r; k++)
    {
        double acc = 0.0;
        for (int j = 0; j < r; j++)
            acc += sample[j] * std::cos(pi * k * (j + 0.5) / r);
        b[k] = acc * 2.0 / r;
    }
    b[0] /= 2.0;

    EquirippleResult out;
    out.delta = std::abs(delta);
    out.taps = VectorXd::Zero(n_taps);
    if (!even)
    {
        int c = (n_taps - 1) / 2;
        out.taps[c] = b[0];
        for (int k = 1; k <= c; k++)
        {
            out.taps[c - k] = b[k] / 2.0;
            out.taps[c + k] = b[k] / 2.0;
        }
    }
    else
    {
        // cos(pi f) cos(2pi k f) = [cos((2k+1)pi f) + cos((2k-1)pi f)] / 2
        int c = n_taps / 2;
        std::vector<double> d(c, 0.0);
        d[0] = b[0] + (c > 1 ? b[1] / 2.0 : 0.0);
        for (int j = 2; j <= c; j++)
            d[j - 1] = (b[j - 1] + (j < c ? b[j] : 0.0)) / 2.0;
        for (int j = 1; j <= c; j++)
        {
            out.taps[c - j] = d[j - 1] / 2.0;
            out.taps[c + j - 1] = d[j - 1] / 2.0;
        }
    }
    return out;
}

} // namespace

Taper design_flat_top(int n_antennas, double beamwidth_deg, double min_ripple_db)
{
    require(n_antennas >= 2, "design_flat_top", "need at least two antennas");
    require(min_ripple_db > 0, "design_flat_top", "ripple requirement must be positive dB");
    require(beamwidth_deg > 0 && beamwidth_deg < 180.0, "design_flat_top",
            "beamwidth must be in (0, 180) degrees");

    const double u_pass = std::sin(0.5 * beamwidth_deg * pi / 180.0);
    const double u_lo = 1.0 / n_antennas;        // narrowest formable main lobe
    const double u_hi = 1.0 - 3.0 / n_antennas;  // leave room for the stopband
    if (u_pass < u_lo || u_pass > u_hi)
    {
        double lo_deg = 2.0 * std::asin(std::min(1.0, u_lo)) * 180.0 / pi;
        double hi_deg = 2.0 * std::asin(std::max(0.0, std::min(1.0, u_hi))) * 180.0 / pi;
        throw std::domain_error("design_flat_top: beamwidth " + std::to_string(beamwidth_deg) +
                                " deg not achievable with " + std::to_string(n_antennas) +
                                " antennas; achievable range is [" + std::to_string(lo_deg) +
                                ", " + std::to_string(hi_deg) + "] deg");
    }

    EquirippleResult res =
        equiripple_lowpass(n_antennas, u_pass / 2.0, (u_pass + 2.0 / n_antennas) / 2.0);
    double achieved_db = res.delta > 0.0 ? -db20(res.delta) : 400.0;
    if (achieved_db < min_ripple_db)
        throw std::domain_error("design_flat_top: achieved ripple " +
                                std::to_string(achieved_db) + " dB is worse than the requested " +
                                std::to_string(min_ripple_db) + " dB");

    Taper t;
    t.w = (res.taps / res.taps.norm()).cast<cplx>();
    t.beamwidth_deg = beamwidth_deg;
    t.ripple_db = achieved_db;
    return t;
}

VectorXcd steer_beam(const Taper &taper, const Codebook &codebook, int i_opt)
{
    require(taper.w.size() == codebook.n_antennas, "steer_beam",
            "taper length must match the codebook");
    require(i_opt >= 0 && i_opt < codebook.n_antennas, "steer_beam", "beam index out of range");
    VectorXcd v = taper.w.cwiseProduct(codebook.beam(i_opt));
    double n = v.norm();
    require(n > 0, "steer_beam", "degenerate taper");
    return v / n;
}

VectorXcd array_response(int n_antennas, double u)
{
    require(n_antennas >= 1, "array_response", "need at least one antenna");
    VectorXcd a(n_antennas);
    const double mag = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    for (int n = 0; n < n_antennas; n++)
        a[n] = std::polar(mag, -pi * n * u);
    return a;
}

double beam_gain(const VectorXcd &w, double u)
{
    return std::norm(array_response(static_cast<int>(w.size()), u).dot(w));
}

std::vector<LinkMetrics> compute_link_metrics(const std::vector<DevicePair> &pairs,
                                              const std::vector<PairBeams> &beams,
                                              const ChannelGetter &channel, double p_tx_w,
                                              double n0_w_per_hz, double bandwidth_hz)
{
    require(pairs.size() == beams.size(), "compute_link_metrics",
            "need one beam pair per device pair");
    require(p_tx_w > 0 && n0_w_per_hz > 0 && bandwidth_hz > 0, "compute_link_metrics",
            "power, noise density and bandwidth must be positive");
    std::set<int> used;
    for (const DevicePair &p : pairs)
    {
        require(used.insert(p.tx).second, "compute_link_metrics", "device reused across pairs");
        require(used.insert(p.rx).second, "compute_link_metrics", "device reused across pairs");
    }
    for (const PairBeams &b : beams)
        require(std::abs(b.v.norm() - 1.0) <= 1e-6 && std::abs(b.u.norm() - 1.0) <= 1e-6,
                "compute_link_metrics", "beams must be unit norm");

    auto tap_gain = [](const DiscreteChannel &ch, const VectorXcd &u, const VectorXcd &v,
                       int n) { return (u.adjoint() * ch.taps[n] * v)(0, 0); };

    const double noise = n0_w_per_hz * bandwidth_hz;
    std::vector<LinkMetrics> out(pairs.size());
    for (size_t i = 0; i < pairs.size(); i++)
    {
        const DiscreteChannel &own = channel(pairs[i].tx, pairs[i].rx);
        require(own.n_rx() == beams[i].u.size() && own.n_tx() == beams[i].v.size(),
                "compute_link_metrics", "beam length must match the channel");
        LinkMetrics &mx = out[i];
        mx.noise_w = noise;
        mx.signal_w = p_tx_w * std::norm(tap_gain(own, beams[i].u, beams[i].v, 0));
        for (int n = 1; n < own.n_taps(); n++)
            mx.isi_w += p_tx_w * std::norm(tap_gain(own, beams[i].u, beams[i].v, n));
        for (size_t j = 0; j < pairs.size(); j++)
        {
            if (j == i)
                continue;
            const DiscreteChannel &cross = channel(pairs[j].tx, pairs[i].rx);
            for (int n = 0; n < cross.n_taps(); n++)
                mx.mui_w += p_tx_w * std::norm(tap_gain(cross, beams[i].u, beams[j].v, n));
        }
        mx.sinr = mx.signal_w / (noise + mx.isi_w + mx.mui_w);
        mx.se = std::log2(1.0 + mx.sinr);
        mx.mfb_se = compute_mfb(own, beams[i].v, beams[i].u, p_tx_w, n0_w_per_hz, bandwidth_hz);
    }
    return out;
}

double sum_se(const std::vector<LinkMetrics> &metrics)
{
    double acc = 0.0;
    for (const LinkMetrics &m : metrics)
        acc += m.se;
    return acc;
}

double compute_mfb(const DiscreteChannel &ch, const VectorXcd &v, const VectorXcd &u,
                   double p_tx_w, double n0_w_per_hz, double bandwidth_hz)
{
    require(p_tx_w > 0 && n0_w_per_hz > 0 && bandwidth_hz > 0, "compute_mfb",
            "power, noise density and bandwidth must be positive");
    require(ch.n_rx() == u.size() && ch.n_tx() == v.size(), "compute_mfb",
            "beam length must match the channel");
    double energy = 0.0;
    for (int n = 0; n < ch.n_taps(); n++)
        energy += std::norm((u.adjoint() * ch.taps[n] * v)(0, 0));
    return std::log2(1.0 + p_tx_w * energy / (n0_w_per_hz * bandwidth_hz));
}

FlatnessReport frequency_flatness(const FrequencyChannel &ch, const VectorXcd &v,
                                  const VectorXcd &u)
{
    require(ch.n_bins() >= 1, "frequency_flatness", "need at least one bin");
    require(ch.n_rx() == u.size() && ch.n_tx() == v.size(), "frequency_flatness",
            "beam length must match the channel");
    VectorXd level_db(ch.n_bins());
    for (int m = 0; m < ch.n_bins(); m++)
    {
        double r = std::abs((u.adjoint() * ch.bins[m] * v)(0, 0));
        level_db[m] = db20(std::max(r, 1e-300));
    }
    FlatnessReport rep;
    double mean = level_db.mean();
    rep.std_db = std::sqrt((level_db.array() - mean).square().mean());
    rep.peak_to_peak_db = level_db.maxCoeff() - level_db.minCoeff();
    return rep;
}

} // namespace combalign
