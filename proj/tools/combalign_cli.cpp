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
//
// Command line front end: pilot design, network alignment runs, sweeps, and
// post-alignment link evaluation. Outputs are CSV files plus a JSON run
// manifest; all runs are deterministic in the configured seed.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "combalign/codebook.hpp"
#include "combalign/harness.hpp"
#include "combalign/pilots.hpp"
#include "combalign/rng.hpp"

using namespace combalign;

namespace
{

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

double safe_db10(double power_ratio) { return db10(std::max(power_ratio, 1e-300)); }

std::ofstream open_out(const std::filesystem::path &dir, const std::string &name)
{
    std::ofstream out(dir / name);
    if (!out)
        throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
}

struct RunOptions
{
    std::string config_path;
    std::string out_dir = "out";
    int threads = 0;
    int trials = -1;       // -1: keep config value
    long long seed = -1;   // -1: keep config value
};

void add_run_options(CLI::App *cmd, RunOptions &opt, bool with_config)
{
    if (with_config)
        cmd->add_option("--config", opt.config_path, "experiment configuration (JSON)");
    cmd->add_option("--out-dir", opt.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
    cmd->add_option("--trials", opt.trials, "override the configured trial count");
    cmd->add_option("--seed", opt.seed, "override the configured master seed");
}

ExperimentConfig load_config(const RunOptions &opt)
{
    ExperimentConfig cfg = opt.config_path.empty() ? parse_experiment_config("{}")
                                                   : load_experiment_config(opt.config_path);
    if (opt.trials > 0)
        cfg.trials = opt.trials;
    if (opt.seed >= 0)
        cfg.master_seed = static_cast<std::uint64_t>(opt.seed);
    return cfg;
}

void write_all_outputs(const ExperimentConfig &cfg, const ResultSet &res, const std::string &dir)
{
    std::filesystem::path out(dir);
    std::filesystem::create_directories(out);
    Aggregates agg = aggregate(res);
    {
        auto f = open_out(out, "records.csv");
        write_records_csv(res, f);
    }
    {
        auto f = open_out(out, "mae.csv");
        write_mae_csv(agg, f);
    }
    {
        auto f = open_out(out, "cdf.csv");
        write_cdf_csv(agg, f);
    }
    {
        auto f = open_out(out, "sum_se.csv");
        write_sum_se_csv(agg, f);
    }
    {
        auto f = open_out(out, "manifest.json");
        write_run_manifest(cfg, f);
    }
    std::cout << "wrote " << res.angles.size() << " angle records, " << res.se.size()
              << " sum-SE records to " << out.string() << "\n";
    for (const MaeRow &r : agg.mae)
        std::cout << "  " << method_name(r.method) << " M_s=" << r.m_s << " Q=" << r.q
                  << " P=" << fmt(watt_to_dbm(r.p_tx_w)) << " dBm: MAE " << fmt(r.mae_deg)
                  << " deg, fail rate " << fmt(r.fail_rate) << "\n";
}

int run_alignment_cmd(const RunOptions &opt, bool force_method, AlignMethod method,
                      bool keep_sweep)
{
    ExperimentConfig cfg = load_config(opt);
    if (force_method)
        cfg.method = method;
    if (!keep_sweep)
    {
        cfg.q_grid.clear();
        cfg.ms_grid.clear();
        cfg.tx_power_grid_w.clear();
    }
    ResultSet res = run_experiment(cfg, opt.threads);
    write_all_outputs(cfg, res, opt.out_dir);
    return 0;
}

int design_pilots_cmd(int length, int bins, int offset, double power_dbm, double bandwidth_hz,
                      std::uint64_t seed, const std::string &samples_path,
                      const std::string &spectrum_path)
{
    PilotSpec spec;
    spec.length = length;
    spec.bins = bins;
    spec.offset = offset;
    spec.energy = dbm_to_watt(power_dbm) * length / bandwidth_hz;
    spec.validate();

    std::mt19937_64 rng(derive_seed(seed, 0xE57, bins));
    WeightVector w = flat_spectrum_sequence(bins, 0.2, 50000, rng);
    PilotSequence pilot = design_pilot(spec, w);

    double amp = std::sqrt(spec.energy / length);
    double env_dev = 0.0;
    for (int n = 0; n < length; n++)
        env_dev = std::max(env_dev, std::abs(std::abs(pilot.samples(n)) - amp));
    double in_set = 0.0, off_comb = 0.0;
    std::vector<bool> active(length, false);
    for (int i = 0; i < pilot.freq_set.size(); i++)
        active[pilot.freq_set(i)] = true;
    for (int m = 0; m < length; m++)
    {
        double p = std::norm(pilot.spectrum(m));
        if (active[m])
            in_set = std::max(in_set, std::abs(p * bins / spec.energy - 1.0));
        else
            off_comb = std::max(off_comb, p);
    }

    std::cout << "pilot M=" << length << " M_s=" << bins << " k=" << offset << " eta="
              << spec.comb_spacing() << "\n"
              << "  energy " << fmt(spec.energy) << " J, per-bin power " << fmt(spec.energy / bins)
              << "\n"
              << "  envelope deviation " << fmt(env_dev) << "\n"
              << "  in-set power deviation " << fmt(in_set) << " (weights "
              << fmt(w.flatness_db) << " dB, converged " << (w.converged ? "yes" : "no") << ")\n"
              << "  off-comb peak power " << fmt(off_comb) << "\n";

    if (!samples_path.empty())
    {
        std::ofstream f(samples_path);
        if (!f)
            throw std::runtime_error("cannot write " + samples_path);
        f << "n,re,im\n";
        for (int n = 0; n < length; n++)
            f << n << ',' << fmt(pilot.samples(n).real()) << ',' << fmt(pilot.samples(n).imag())
              << '\n';
    }
    if (!spectrum_path.empty())
    {
        std::ofstream f(spectrum_path);
        if (!f)
            throw std::runtime_error("cannot write " + spectrum_path);
        f << "m,re,im,power,active\n";
        for (int m = 0; m < length; m++)
            f << m << ',' << fmt(pilot.spectrum(m).real()) << ',' << fmt(pilot.spectrum(m).imag())
              << ',' << fmt(std::norm(pilot.spectrum(m))) << ',' << (active[m] ? 1 : 0) << '\n';
    }
    return 0;
}

int evaluate_cmd(const RunOptions &opt, bool genie, int trial)
{
    ExperimentConfig cfg = load_config(opt);
    const NetworkScenario &sc = cfg.scenario;
    const int k = sc.n_devices();
    const int n_a = sc.poses[0].n_antennas;
    LinkChannels links(sc, cfg.align.bandwidth_hz);
    Codebook cb(n_a);
    Taper taper = design_flat_top(n_a, cfg.taper.beamwidth_deg, cfg.taper.min_ripple_db);

    std::vector<DevicePair> pairs;
    for (int i = 0; 2 * i + 1 < k; i++)
        pairs.push_back({2 * i, 2 * i + 1});

    std::vector<std::pair<int, int>> beam_idx(pairs.size());
    if (genie)
    {
        for (std::size_t l = 0; l < pairs.size(); l++)
        {
            auto freq = links.frequency(pairs[l].tx, pairs[l].rx, cfg.align.seq_length);
            Eigen::MatrixXd energy = Eigen::MatrixXd::Zero(n_a, n_a);
            for (const MatrixXcd &h : freq->bins)
                energy += (cb.c.adjoint() * h * cb.c).cwiseAbs2();
            Eigen::Index bi = 0, bj = 0;
            energy.maxCoeff(&bi, &bj);
            beam_idx[l] = {static_cast<int>(bj), static_cast<int>(bi)}; // (tx, rx)
        }
    }
    else
    {
        AlignmentTable table = run_alignment(sc, links, plan_rounds(k), cfg.method, cfg.align,
                                             cfg.master_seed, static_cast<std::uint64_t>(trial));
        for (std::size_t l = 0; l < pairs.size(); l++)
        {
            const TableEntry &e = table.at(pairs[l].tx, pairs[l].rx);
            if (!(e.present && e.ok))
                std::cerr << "warning: link " << pairs[l].tx << "->" << pairs[l].rx
                          << " failed; evaluating its best-effort beams\n";
            beam_idx[l] = {e.tx_beam, e.rx_beam};
        }
    }

    std::vector<PairBeams> beams(pairs.size());
    for (std::size_t l = 0; l < pairs.size(); l++)
        beams[l] = {steer_beam(taper, cb, beam_idx[l].first),
                    steer_beam(taper, cb, beam_idx[l].second)};

    ChannelGetter getter = [&links](int from, int to) -> const DiscreteChannel & {
        return links.taps(from, to);
    };
    std::vector<LinkMetrics> metrics =
        compute_link_metrics(pairs, beams, getter, cfg.align.tx_power_w, cfg.align.n0_w_per_hz,
                             cfg.align.bandwidth_hz);

    std::filesystem::path out(opt.out_dir);
    std::filesystem::create_directories(out);
    {
        auto f = open_out(out, "metrics.csv");
        f << "pair,tx,rx,tx_beam,rx_beam,sinr_db,se,isi_db,mui_db,mfb_se\n";
        for (std::size_t l = 0; l < pairs.size(); l++)
        {
            const LinkMetrics &m = metrics[l];
            f << l << ',' << pairs[l].tx << ',' << pairs[l].rx << ',' << beam_idx[l].first << ','
              << beam_idx[l].second << ',' << fmt(safe_db10(m.sinr)) << ',' << fmt(m.se) << ','
              << fmt(safe_db10(m.isi_w / m.noise_w)) << ',' << fmt(safe_db10(m.mui_w / m.noise_w))
              << ',' << fmt(m.mfb_se) << '\n';
        }
    }
    {
        auto f = open_out(out, "flatness.csv");
        f << "pair,m,mag_db,ref_mag_db\n";
        for (std::size_t l = 0; l < pairs.size(); l++)
        {
            auto freq = links.frequency(pairs[l].tx, pairs[l].rx, cfg.align.seq_length);
            VectorXcd e0 = VectorXcd::Zero(n_a);
            e0(0) = 1.0;
            for (int m = 0; m < freq->n_bins(); m++)
            {
                double post = std::abs((beams[l].u.adjoint() * freq->bins[m] * beams[l].v)(0, 0));
                double ref = std::abs(freq->bins[m](0, 0));
                f << l << ',' << m << ',' << fmt(20.0 * std::log10(std::max(post, 1e-300))) << ','
                  << fmt(20.0 * std::log10(std::max(ref, 1e-300))) << '\n';
            }
            FlatnessReport post_rep = frequency_flatness(*freq, beams[l].v, beams[l].u);
            FlatnessReport pre_rep = frequency_flatness(*freq, e0, e0);
            std::cout << "pair " << l << " (" << pairs[l].tx << "->" << pairs[l].rx << "): SINR "
                      << fmt(safe_db10(metrics[l].sinr)) << " dB, SE " << fmt(metrics[l].se)
                      << " (MFB " << fmt(metrics[l].mfb_se) << "), flatness std "
                      << fmt(post_rep.std_db) << " dB (single element " << fmt(pre_rep.std_db)
                      << ")\n";
        }
    }
    {
        auto f = open_out(out, "manifest.json");
        write_run_manifest(cfg, f);
    }
    std::cout << "sum SE " << fmt(sum_se(metrics)) << " bits/s/Hz over " << pairs.size()
              << " links (" << (genie ? "genie" : method_name(cfg.method)) << " beams)\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"combalign: comb-pilot network beam alignment experiments"};
    app.require_subcommand(1);

    // design-pilots
    int dp_length = 1024, dp_bins = 16, dp_offset = 0;
    double dp_power_dbm = -15.0, dp_bandwidth = 2e9;
    std::uint64_t dp_seed = 1;
    std::string dp_samples, dp_spectrum;
    CLI::App *dp = app.add_subcommand("design-pilots", "design one comb pilot and report its invariants");
    dp->add_option("-M,--length", dp_length, "sequence length M")->capture_default_str();
    dp->add_option("--bins", dp_bins, "occupied bins M_s")->capture_default_str();
    dp->add_option("--offset", dp_offset, "comb offset k")->capture_default_str();
    dp->add_option("--power-dbm", dp_power_dbm, "transmit power")->capture_default_str();
    dp->add_option("--bandwidth", dp_bandwidth, "bandwidth in Hz")->capture_default_str();
    dp->add_option("--seed", dp_seed, "weight search seed")->capture_default_str();
    dp->add_option("--samples-out", dp_samples, "CSV path for time samples");
    dp->add_option("--spectrum-out", dp_spectrum, "CSV path for the spectrum");

    RunOptions align_opt, base_opt, sweep_opt, eval_opt;
    CLI::App *ra = app.add_subcommand("run-alignment",
                                      "joint alignment at the configured operating point");
    add_run_options(ra, align_opt, true);
    CLI::App *rb = app.add_subcommand("run-baseline",
                                      "one-sided sweep baseline at the configured operating point");
    add_run_options(rb, base_opt, true);
    CLI::App *sw = app.add_subcommand("sweep", "run the configured sweep grids");
    add_run_options(sw, sweep_opt, true);

    bool eval_genie = false;
    int eval_trial = 0;
    CLI::App *ev = app.add_subcommand("evaluate",
                                      "post-alignment link metrics and flatness curves");
    add_run_options(ev, eval_opt, true);
    ev->add_flag("--genie", eval_genie, "use exhaustive-search beams instead of an alignment run");
    ev->add_option("--trial", eval_trial, "trial index for the alignment run")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (dp->parsed())
            return design_pilots_cmd(dp_length, dp_bins, dp_offset, dp_power_dbm, dp_bandwidth,
                                     dp_seed, dp_samples, dp_spectrum);
        if (ra->parsed())
            return run_alignment_cmd(align_opt, true, AlignMethod::mmv, false);
        if (rb->parsed())
            return run_alignment_cmd(base_opt, true, AlignMethod::one_sided, false);
        if (sw->parsed())
            return run_alignment_cmd(sweep_opt, false, AlignMethod::mmv, true);
        if (ev->parsed())
            return evaluate_cmd(eval_opt, eval_genie, eval_trial);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
