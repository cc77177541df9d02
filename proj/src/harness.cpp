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

#include "combalign/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "combalign/codebook.hpp"
#include "combalign/rng.hpp"

namespace combalign
{

namespace
{

// Fallback substream: real alignment rounds use small round indices, so a
// large constant keeps failed-link beam picks disjoint from them.
constexpr std::uint64_t fallback_round = 1000;

double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Fixed-precision float for CSV and JSON echo; %.10g round-trips every
// value that matters here and is byte-stable for identical inputs.
std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

int ceil_log2(int k)
{
    int r = 0;
    while ((1 << r) < k)
        r++;
    return r;
}

int fallback_beam(std::uint64_t master, int trial, int device, int peer, int k, int n_a)
{
    std::mt19937_64 rng(derive_seed(master, static_cast<std::uint64_t>(trial), fallback_round,
                                    static_cast<std::uint64_t>(device) * k + peer));
    return std::uniform_int_distribution<int>(0, n_a - 1)(rng);
}

} // namespace

double link_spatial_frequency(const DevicePose &device, const DevicePose &peer)
{
    Vec3 d = (peer.position - device.position).normalized();
    return device.axis.dot(d);
}

int alignment_rounds(AlignMethod method, int n_devices)
{
    int levels = ceil_log2(n_devices);
    return method == AlignMethod::mmv ? levels : 2 * levels;
}

const char *method_name(AlignMethod method)
{
    return method == AlignMethod::mmv ? "mmv" : "baseline";
}

NetworkScenario default_scenario(int n_devices, int n_antennas, double carrier_hz)
{
    require(n_devices >= 2 && n_devices <= 8, "default_scenario",
            "documented layout has 8 positions; need 2..8 devices");
    static const struct
    {
        Vec3 position, axis;
    } layout[8] = {
        {{2.0, 3.0, 1.2}, {0.5, 0.8, 0.1}},  {{7.0, 6.0, 1.6}, {-0.4, 0.9, 0.0}},
        {{3.5, 7.0, 1.0}, {0.9, 0.1, 0.2}},  {{6.5, 2.5, 1.8}, {0.2, -0.9, 0.1}},
        {{5.0, 5.0, 1.4}, {1.0, 0.3, -0.2}}, {{2.5, 6.0, 1.7}, {0.6, -0.6, 0.3}},
        {{8.0, 4.0, 1.1}, {-0.7, 0.5, 0.2}}, {{4.5, 2.0, 1.5}, {0.3, 1.0, 0.0}},
    };
    NetworkScenario sc;
    sc.carrier_hz = carrier_hz;
    for (int d = 0; d < n_devices; d++)
        sc.poses.push_back(
            make_pose(layout[d].position, layout[d].axis.normalized(), n_antennas, carrier_hz));
    sc.validate();
    return sc;
}

void ExperimentConfig::validate() const
{
    scenario.validate();
    align.validate();
    require(trials >= 1, "ExperimentConfig", "trials must be >= 1");
    require(taper.beamwidth_deg > 0.0, "ExperimentConfig", "taper beamwidth must be positive");
    AlignmentConfig probe = align;
    for (int q : effective_q_grid())
    {
        probe.n_probes = q;
        for (int ms : effective_ms_grid())
        {
            probe.bins = ms;
            probe.validate();
        }
    }
    for (double p : effective_power_grid())
        require(p > 0.0, "ExperimentConfig", "transmit power must be positive");
}

std::vector<int> ExperimentConfig::effective_q_grid() const
{
    return q_grid.empty() ? std::vector<int>{align.n_probes} : q_grid;
}

std::vector<int> ExperimentConfig::effective_ms_grid() const
{
    return ms_grid.empty() ? std::vector<int>{align.bins} : ms_grid;
}

std::vector<double> ExperimentConfig::effective_power_grid() const
{
    return tx_power_grid_w.empty() ? std::vector<double>{align.tx_power_w} : tx_power_grid_w;
}

ResultSet run_experiment(const ExperimentConfig &cfg, int n_threads)
{
    cfg.validate();
    const NetworkScenario &sc = cfg.scenario;
    const int k = sc.n_devices();
    const int n_a = sc.poses[0].n_antennas;
    const std::vector<int> q_grid = cfg.effective_q_grid();
    const std::vector<int> ms_grid = cfg.effective_ms_grid();
    const std::vector<double> p_grid = cfg.effective_power_grid();

    LinkChannels links(sc, cfg.align.bandwidth_hz, -60.0, 512u << 20);
    const RoundPlan plan = plan_rounds(k);
    const Codebook cb(n_a);
    const Taper taper = design_flat_top(n_a, cfg.taper.beamwidth_deg, cfg.taper.min_ripple_db);

    // fixed communication pairing for the sum-SE report
    std::vector<DevicePair> pairs;
    for (int i = 0; 2 * i + 1 < k; i++)
        pairs.push_back({2 * i, 2 * i + 1});

    ChannelGetter getter = [&links](int from, int to) -> const DiscreteChannel & {
        return links.taps(from, to);
    };

    // genie reference: exhaustive beam-pair search on the noiseless channel,
    // then the same flat-top steering the estimated tables receive
    std::vector<PairBeams> genie(pairs.size());
    for (std::size_t l = 0; l < pairs.size(); l++)
    {
        auto freq = links.frequency(pairs[l].tx, pairs[l].rx, cfg.align.seq_length);
        Eigen::MatrixXd energy = Eigen::MatrixXd::Zero(n_a, n_a); // (rx atom, tx atom)
        for (const MatrixXcd &h : freq->bins)
            energy += (cb.c.adjoint() * h * cb.c).cwiseAbs2();
        Eigen::Index best_rx = 0, best_tx = 0;
        energy.maxCoeff(&best_rx, &best_tx);
        genie[l] = {steer_beam(taper, cb, static_cast<int>(best_tx)),
                    steer_beam(taper, cb, static_cast<int>(best_rx))};
    }
    std::vector<double> genie_se(p_grid.size());
    for (std::size_t ip = 0; ip < p_grid.size(); ip++)
        genie_se[ip] = sum_se(compute_link_metrics(pairs, genie, getter, p_grid[ip],
                                                   cfg.align.n0_w_per_hz, cfg.align.bandwidth_hz));

    struct Task
    {
        std::size_t iq, ims, ip;
        int trial;
    };
    std::vector<Task> tasks;
    for (std::size_t iq = 0; iq < q_grid.size(); iq++)
        for (std::size_t ims = 0; ims < ms_grid.size(); ims++)
            for (std::size_t ip = 0; ip < p_grid.size(); ip++)
                for (int t = 0; t < cfg.trials; t++)
                    tasks.push_back({iq, ims, ip, t});

    struct Slot
    {
        std::vector<AngleRecord> angles;
        std::vector<SumSeRecord> se;
    };
    std::vector<Slot> slots(tasks.size());

    auto run_one = [&](const Task &task, Slot &slot) {
        AlignmentConfig acfg = cfg.align;
        acfg.n_probes = q_grid[task.iq];
        acfg.bins = ms_grid[task.ims];
        acfg.tx_power_w = p_grid[task.ip];
        AlignmentTable table = run_alignment(sc, links, plan, cfg.method, acfg, cfg.master_seed,
                                             static_cast<std::uint64_t>(task.trial));

        // one pointing record per endpoint of every unordered pair
        for (int a = 0; a < k; a++)
            for (int b = a + 1; b < k; b++)
                for (auto [dev, peer] : {std::pair{a, b}, std::pair{b, a}})
                {
                    const TableEntry &e = table.at(dev, peer);
                    AngleRecord rec;
                    rec.trial = task.trial;
                    rec.method = cfg.method;
                    rec.q = acfg.n_probes;
                    rec.m_s = acfg.bins;
                    rec.p_tx_w = acfg.tx_power_w;
                    rec.device = dev;
                    rec.peer = peer;
                    rec.ok = e.present && e.ok;
                    rec.beam = rec.ok ? e.tx_beam
                                      : fallback_beam(cfg.master_seed, task.trial, dev, peer, k, n_a);
                    double u = std::clamp(link_spatial_frequency(sc.poses[dev], sc.poses[peer]),
                                          -1.0, 1.0);
                    rec.true_angle_deg = std::asin(u) * 180.0 / pi;
                    rec.est_angle_deg = beam_center_angle(rec.beam, n_a) * 180.0 / pi;
                    rec.abs_err_deg = std::abs(rec.est_angle_deg - rec.true_angle_deg);
                    slot.angles.push_back(rec);
                }

        SumSeRecord se;
        se.trial = task.trial;
        se.method = cfg.method;
        se.q = acfg.n_probes;
        se.m_s = acfg.bins;
        se.p_tx_w = acfg.tx_power_w;
        se.n_links = static_cast<int>(pairs.size());
        std::vector<PairBeams> beams(pairs.size());
        for (std::size_t l = 0; l < pairs.size(); l++)
        {
            const TableEntry &e = table.at(pairs[l].tx, pairs[l].rx);
            int tx_beam = e.tx_beam, rx_beam = e.rx_beam;
            if (!(e.present && e.ok))
            {
                se.n_failed++;
                tx_beam = fallback_beam(cfg.master_seed, task.trial, pairs[l].tx, pairs[l].rx, k, n_a);
                rx_beam = reciprocal_beam_index(
                    fallback_beam(cfg.master_seed, task.trial, pairs[l].rx, pairs[l].tx, k, n_a), n_a);
            }
            beams[l] = {steer_beam(taper, cb, tx_beam), steer_beam(taper, cb, rx_beam)};
        }
        se.sum_se = sum_se(compute_link_metrics(pairs, beams, getter, acfg.tx_power_w,
                                                acfg.n0_w_per_hz, acfg.bandwidth_hz));
        se.genie_sum_se = genie_se[task.ip];
        slot.se.push_back(se);
    };

    int nt = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::max(1, std::min<int>(nt, static_cast<int>(tasks.size())));
    if (nt == 1)
    {
        for (std::size_t i = 0; i < tasks.size(); i++)
            run_one(tasks[i], slots[i]);
    }
    else
    {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&]() {
            try
            {
                for (std::size_t i = next++; i < tasks.size(); i = next++)
                    run_one(tasks[i], slots[i]);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = tasks.size(); // stop the other workers at the next fetch
            }
        };
        std::vector<std::thread> threads;
        for (int i = 0; i < nt; i++)
            threads.emplace_back(worker);
        for (auto &th : threads)
            th.join();
        if (error)
            std::rethrow_exception(error);
    }

    ResultSet out;
    out.n_devices = k;
    out.n_antennas = n_a;
    out.master_seed = cfg.master_seed;
    for (const Slot &slot : slots)
    {
        out.angles.insert(out.angles.end(), slot.angles.begin(), slot.angles.end());
        out.se.insert(out.se.end(), slot.se.begin(), slot.se.end());
    }
    return out;
}

Aggregates aggregate(const ResultSet &results)
{
    Aggregates agg;
    const int k = results.n_devices;

    // (method, m_s, q, p) -> per-direction stats plus per-link partial sums
    using MaeKey = std::tuple<int, int, int, double>;
    struct MaeAccum
    {
        double err_sum = 0.0;
        int n = 0, failed = 0;
        std::map<std::tuple<int, int, int>, std::pair<double, int>> link; // (trial, a, b)
    };
    std::map<MaeKey, MaeAccum> mae;

    using CdfKey = std::tuple<int, double, int>; // (method, p, q)
    std::map<CdfKey, std::vector<double>> cdf;

    for (const AngleRecord &r : results.angles)
    {
        MaeAccum &acc = mae[{static_cast<int>(r.method), r.m_s, r.q, r.p_tx_w}];
        acc.err_sum += r.abs_err_deg;
        acc.n++;
        if (!r.ok)
            acc.failed++;
        auto [a, b] = std::minmax(r.device, r.peer);
        auto &[sum, cnt] = acc.link[{r.trial, a, b}];
        sum += r.abs_err_deg;
        cnt++;
        cdf[{static_cast<int>(r.method), r.p_tx_w, r.q}].push_back(r.abs_err_deg);
    }

    for (const auto &[key, acc] : mae)
    {
        MaeRow row;
        row.method = static_cast<AlignMethod>(std::get<0>(key));
        row.m_s = std::get<1>(key);
        row.q = std::get<2>(key);
        row.p_tx_w = std::get<3>(key);
        row.total_pilots = row.q * alignment_rounds(row.method, k);
        row.mae_deg = acc.err_sum / acc.n;
        double link_sum = 0.0;
        for (const auto &[lk, sc] : acc.link)
            link_sum += sc.first / sc.second;
        row.mae_link_deg = link_sum / static_cast<double>(acc.link.size());
        row.fail_rate = static_cast<double>(acc.failed) / acc.n;
        row.n_records = acc.n;
        agg.mae.push_back(row);
    }

    for (auto &[key, errs] : cdf)
    {
        std::sort(errs.begin(), errs.end());
        for (std::size_t i = 0; i < errs.size(); i++)
        {
            CdfRow row;
            row.method = static_cast<AlignMethod>(std::get<0>(key));
            row.p_tx_w = std::get<1>(key);
            row.q = std::get<2>(key);
            row.err_deg = errs[i];
            row.prob = static_cast<double>(i + 1) / errs.size();
            agg.cdf.push_back(row);
        }
    }

    using SeKey = std::tuple<int, int, int, double>;
    struct SeAccum
    {
        double se_sum = 0.0, genie = 0.0;
        int n = 0;
    };
    std::map<SeKey, SeAccum> se;
    for (const SumSeRecord &r : results.se)
    {
        SeAccum &acc = se[{static_cast<int>(r.method), r.m_s, r.q, r.p_tx_w}];
        acc.se_sum += r.sum_se;
        acc.genie = r.genie_sum_se;
        acc.n++;
    }
    for (const auto &[key, acc] : se)
    {
        SumSeRow row;
        row.method = static_cast<AlignMethod>(std::get<0>(key));
        row.m_s = std::get<1>(key);
        row.q = std::get<2>(key);
        row.p_tx_w = std::get<3>(key);
        row.total_pilots = row.q * alignment_rounds(row.method, k);
        row.mean_sum_se = acc.se_sum / acc.n;
        row.genie_sum_se = acc.genie;
        row.n_trials = acc.n;
        agg.sum_se.push_back(row);
    }
    return agg;
}

// ---------------------------------------------------------------- JSON IO

namespace
{

using nlohmann::json;

ProbeKind parse_probe_kind(const std::string &s)
{
    if (s == "half_subset")
        return ProbeKind::half_subset;
    if (s == "one_hot")
        return ProbeKind::one_hot;
    throw std::invalid_argument("config: probe_kind must be half_subset or one_hot, got " + s);
}

AlignMethod parse_method(const std::string &s)
{
    if (s == "mmv")
        return AlignMethod::mmv;
    if (s == "baseline")
        return AlignMethod::one_sided;
    throw std::invalid_argument("config: method must be mmv or baseline, got " + s);
}

Vec3 parse_vec3(const json &j, const char *key)
{
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument(std::string("config: ") + key + " must be a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string &json_text)
{
    json j;
    try
    {
        j = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    double carrier = j.value("carrier_hz", 100e9);
    int n_antennas = j.value("n_antennas", 32);

    RoomSpec room;
    if (j.contains("room"))
    {
        const json &r = j["room"];
        room.width = r.value("width", room.width);
        room.depth = r.value("depth", room.depth);
        room.height = r.value("height", room.height);
        room.reflection = cplx(r.value("reflection_re", room.reflection.real()),
                               r.value("reflection_im", room.reflection.imag()));
        room.max_order = r.value("max_order", room.max_order);
    }

    if (j.contains("devices"))
    {
        cfg.scenario.room = room;
        cfg.scenario.carrier_hz = carrier;
        for (const json &d : j["devices"])
            cfg.scenario.poses.push_back(make_pose(parse_vec3(d.at("position"), "device position"),
                                                   parse_vec3(d.at("axis"), "device axis").normalized(),
                                                   n_antennas, carrier));
    }
    else
    {
        cfg.scenario = default_scenario(j.value("n_devices", 8), n_antennas, carrier);
        cfg.scenario.room = room;
    }
    if (j.contains("pulse"))
    {
        cfg.scenario.pulse.rolloff = j["pulse"].value("rolloff", cfg.scenario.pulse.rolloff);
        cfg.scenario.pulse.span = j["pulse"].value("span", cfg.scenario.pulse.span);
    }

    cfg.method = parse_method(j.value("method", "mmv"));

    if (j.contains("system"))
    {
        const json &s = j["system"];
        cfg.align.seq_length = s.value("seq_length", cfg.align.seq_length);
        cfg.align.bins = s.value("bins", cfg.align.bins);
        cfg.align.n_probes = s.value("n_probes", cfg.align.n_probes);
        cfg.align.bandwidth_hz = s.value("bandwidth_hz", cfg.align.bandwidth_hz);
        if (s.contains("n0_dbm_per_hz"))
            cfg.align.n0_w_per_hz = dbm_to_watt(s["n0_dbm_per_hz"].get<double>());
        if (s.contains("tx_power_dbm"))
            cfg.align.tx_power_w = dbm_to_watt(s["tx_power_dbm"].get<double>());
        cfg.align.gamma_scale = s.value("gamma_scale", cfg.align.gamma_scale);
        cfg.align.baseline_gamma_scale =
            s.value("baseline_gamma_scale", cfg.align.baseline_gamma_scale);
        cfg.align.ista_max_iter = s.value("ista_max_iter", cfg.align.ista_max_iter);
        cfg.align.ista_tol = s.value("ista_tol", cfg.align.ista_tol);
        if (s.contains("probe_kind"))
            cfg.align.probe_kind = parse_probe_kind(s["probe_kind"].get<std::string>());
    }
    if (j.contains("taper"))
    {
        cfg.taper.beamwidth_deg = j["taper"].value("beamwidth_deg", cfg.taper.beamwidth_deg);
        cfg.taper.min_ripple_db = j["taper"].value("min_ripple_db", cfg.taper.min_ripple_db);
    }
    if (j.contains("sweep"))
    {
        const json &s = j["sweep"];
        if (s.contains("q"))
            cfg.q_grid = s["q"].get<std::vector<int>>();
        if (s.contains("m_s"))
            cfg.ms_grid = s["m_s"].get<std::vector<int>>();
        if (s.contains("tx_power_dbm"))
            for (double dbm : s["tx_power_dbm"].get<std::vector<double>>())
                cfg.tx_power_grid_w.push_back(dbm_to_watt(dbm));
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.master_seed = j.value("seed", cfg.master_seed);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment_config(text.str());
}

std::string experiment_config_json(const ExperimentConfig &cfg)
{
    json j;
    j["carrier_hz"] = cfg.scenario.carrier_hz;
    j["n_antennas"] = cfg.scenario.poses.empty() ? 0 : cfg.scenario.poses[0].n_antennas;
    j["room"] = {{"width", cfg.scenario.room.width},
                 {"depth", cfg.scenario.room.depth},
                 {"height", cfg.scenario.room.height},
                 {"reflection_re", cfg.scenario.room.reflection.real()},
                 {"reflection_im", cfg.scenario.room.reflection.imag()},
                 {"max_order", cfg.scenario.room.max_order}};
    j["devices"] = json::array();
    for (const DevicePose &p : cfg.scenario.poses)
        j["devices"].push_back({{"position", {p.position.x, p.position.y, p.position.z}},
                                {"axis", {p.axis.x, p.axis.y, p.axis.z}}});
    j["pulse"] = {{"rolloff", cfg.scenario.pulse.rolloff}, {"span", cfg.scenario.pulse.span}};
    j["method"] = method_name(cfg.method);
    j["system"] = {{"seq_length", cfg.align.seq_length},
                   {"bins", cfg.align.bins},
                   {"n_probes", cfg.align.n_probes},
                   {"bandwidth_hz", cfg.align.bandwidth_hz},
                   {"n0_dbm_per_hz", watt_to_dbm(cfg.align.n0_w_per_hz)},
                   {"tx_power_dbm", watt_to_dbm(cfg.align.tx_power_w)},
                   {"gamma_scale", cfg.align.gamma_scale},
                   {"baseline_gamma_scale", cfg.align.baseline_gamma_scale},
                   {"ista_max_iter", cfg.align.ista_max_iter},
                   {"ista_tol", cfg.align.ista_tol},
                   {"probe_kind", cfg.align.probe_kind == ProbeKind::half_subset ? "half_subset"
                                                                                 : "one_hot"}};
    j["taper"] = {{"beamwidth_deg", cfg.taper.beamwidth_deg},
                  {"min_ripple_db", cfg.taper.min_ripple_db}};
    json sweep;
    sweep["q"] = cfg.effective_q_grid();
    sweep["m_s"] = cfg.effective_ms_grid();
    json powers = json::array();
    for (double p : cfg.effective_power_grid())
        powers.push_back(watt_to_dbm(p));
    sweep["tx_power_dbm"] = powers;
    j["sweep"] = sweep;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.master_seed;
    return j.dump(2);
}

// ----------------------------------------------------------------- CSV IO

void write_records_csv(const ResultSet &results, std::ostream &out)
{
    out << "trial,method,q,m_s,tx_power_dbm,device,peer,beam,ok,"
           "true_angle_deg,est_angle_deg,abs_err_deg\n";
    for (const AngleRecord &r : results.angles)
        out << r.trial << ',' << method_name(r.method) << ',' << r.q << ',' << r.m_s << ','
            << fmt(watt_to_dbm(r.p_tx_w)) << ',' << r.device << ',' << r.peer << ',' << r.beam
            << ',' << (r.ok ? 1 : 0) << ',' << fmt(r.true_angle_deg) << ','
            << fmt(r.est_angle_deg) << ',' << fmt(r.abs_err_deg) << '\n';
}

void write_mae_csv(const Aggregates &agg, std::ostream &out)
{
    out << "method,m_s,q,total_pilots,tx_power_dbm,mae_deg,mae_link_deg,fail_rate,n_records\n";
    for (const MaeRow &r : agg.mae)
        out << method_name(r.method) << ',' << r.m_s << ',' << r.q << ',' << r.total_pilots << ','
            << fmt(watt_to_dbm(r.p_tx_w)) << ',' << fmt(r.mae_deg) << ',' << fmt(r.mae_link_deg)
            << ',' << fmt(r.fail_rate) << ',' << r.n_records << '\n';
}

void write_cdf_csv(const Aggregates &agg, std::ostream &out)
{
    out << "method,tx_power_dbm,q,err_deg,prob\n";
    for (const CdfRow &r : agg.cdf)
        out << method_name(r.method) << ',' << fmt(watt_to_dbm(r.p_tx_w)) << ',' << r.q << ','
            << fmt(r.err_deg) << ',' << fmt(r.prob) << '\n';
}

void write_sum_se_csv(const Aggregates &agg, std::ostream &out)
{
    out << "method,m_s,q,total_pilots,tx_power_dbm,mean_sum_se,genie_sum_se,n_trials\n";
    for (const SumSeRow &r : agg.sum_se)
        out << method_name(r.method) << ',' << r.m_s << ',' << r.q << ',' << r.total_pilots << ','
            << fmt(watt_to_dbm(r.p_tx_w)) << ',' << fmt(r.mean_sum_se) << ','
            << fmt(r.genie_sum_se) << ',' << r.n_trials << '\n';
}

void write_run_manifest(const ExperimentConfig &cfg, std::ostream &out)
{
    json j;
    j["version"] = version_string;
    j["seed"] = cfg.master_seed;
    j["config"] = json::parse(experiment_config_json(cfg));
    out << j.dump(2) << '\n';
}

} // namespace combalign
