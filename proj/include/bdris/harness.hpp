// SPDX-License-Identifier: Apache-2.0
//
// bdris-sim — BD-RIS cascaded channel estimation and beamforming simulation
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
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "beam_mimo.hpp"
#include "beam_mumiso.hpp"
#include "channel.hpp"
#include "common.hpp"
#include "estimator.hpp"
#include "pattern.hpp"
#include "rng.hpp"

namespace bdris {

enum class Scenario { mse_sweep, mimo_rate, mumiso_sumrate, se_tradeoff };

inline const char* to_string(Scenario s)
{
    switch (s) {
    case Scenario::mse_sweep: return "mse_sweep";
    case Scenario::mimo_rate: return "mimo_rate";
    case Scenario::mumiso_sumrate: return "mumiso_sumrate";
    case Scenario::se_tradeoff: return "se_tradeoff";
    }
    return "?";
}

struct ExperimentConfig {
    Scenario scenario = Scenario::mse_sweep;

    std::vector<int> elements{32};      // per-sector port counts
    std::vector<int> group_sizes{1, 2, 4};
    std::vector<int> tile_sizes{4};
    std::vector<int> sector_counts{2, 4};   // MU-MISO only
    std::vector<int> total_elements{16, 32}; // MU-MISO x-axis (ports * sectors)

    int bs_antennas = 2;
    int user_antennas = 2; // user count for MU-MISO
    int streams = 2;

    std::vector<double> snr_db{0, 5, 10, 15, 20, 25};
    std::vector<int> frame_lengths{600, 1000, 2000};

    PathLossParams path_loss_params{};
    double kappa_db = 0.0;

    double tx_power_w = 0.25;
    double bs_power_w = 0.0; // 0: use user_antennas * tx_power_w
    double noise_dbm = -100.0;

    int trials = 100;
    int threads = 0; // 0: hardware concurrency
    std::uint64_t seed = 1;

    std::vector<BaseKind> bases{BaseKind::dft};
    bool random_pattern_baseline = false; // MSE sweep benchmark
    bool random_theta_baseline = false;   // SE trade-off benchmark

    std::string output_path = "out.csv";

    double noise_power() const { return dbm_to_watt(noise_dbm); }
    double kappa_linear() const { return db_to_linear(kappa_db); }
    double downlink_power() const
    {
        return bs_power_w > 0.0 ? bs_power_w : user_antennas * tx_power_w;
    }
    int worker_count() const
    {
        if (threads > 0)
            return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }
};

inline ExperimentConfig default_config(Scenario s, bool paper_scale = false)
{
    ExperimentConfig c;
    c.scenario = s;
    switch (s) {
    case Scenario::mse_sweep:
        c.elements = {32};
        c.group_sizes = {1, 2, 4};
        c.tile_sizes = {4};
        c.bs_antennas = c.user_antennas = 2;
        c.snr_db = {0, 5, 10, 15, 20, 25};
        c.bases = {BaseKind::dft, BaseKind::hadamard};
        c.random_pattern_baseline = true;
        c.trials = paper_scale ? 10000 : 10000;
        break;
    case Scenario::mimo_rate:
        c.elements = paper_scale ? std::vector<int>{8, 16, 32, 64}
                                 : std::vector<int>{8, 16, 32};
        c.group_sizes = {1, 2, 4};
        c.tile_sizes = {1, 2, 4};
        c.bs_antennas = c.user_antennas = c.streams = 2;
        c.trials = paper_scale ? 500 : 200;
        break;
    case Scenario::mumiso_sumrate:
        c.total_elements = paper_scale ? std::vector<int>{64, 128}
                                       : std::vector<int>{16, 32};
        c.sector_counts = {2, 4};
        c.group_sizes = {1, 2};
        c.tile_sizes = {1};
        c.bs_antennas = 4;
        c.user_antennas = 4; // users
        c.trials = paper_scale ? 200 : 100;
        break;
    case Scenario::se_tradeoff:
        c.elements = {64};
        c.group_sizes = {1, 2, 4};
        c.tile_sizes = {1, 2, 4, 8, 16};
        c.frame_lengths = {600, 1000, 2000};
        c.bs_antennas = c.user_antennas = c.streams = 2;
        c.trials = paper_scale ? 300 : 100;
        c.random_theta_baseline = true;
        break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// config file: flat key = value lines, lists in brackets, '#' comments
// ---------------------------------------------------------------------------

namespace cfg_detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& value)
{
    std::string inner = trim(value);
    if (!inner.empty() && inner.front() == '[') {
        if (inner.back() != ']')
            throw invalid_parameter("config: unterminated list: " + value);
        inner = inner.substr(1, inner.size() - 2);
    }
    std::vector<std::string> out;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

inline std::vector<int> int_list(const std::string& v)
{
    std::vector<int> out;
    for (const auto& s : split_list(v))
        out.push_back(std::stoi(s));
    return out;
}

inline std::vector<double> double_list(const std::string& v)
{
    std::vector<double> out;
    for (const auto& s : split_list(v))
        out.push_back(std::stod(s));
    return out;
}

inline bool parse_bool(const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw invalid_parameter("config: expected boolean, got " + v);
}

inline BaseKind parse_base(const std::string& v)
{
    if (v == "dft")
        return BaseKind::dft;
    if (v == "hadamard")
        return BaseKind::hadamard;
    throw invalid_parameter("config: unknown base kind " + v);
}

inline Scenario parse_scenario(const std::string& v)
{
    if (v == "mse_sweep")
        return Scenario::mse_sweep;
    if (v == "mimo_rate")
        return Scenario::mimo_rate;
    if (v == "mumiso_sumrate")
        return Scenario::mumiso_sumrate;
    if (v == "se_tradeoff")
        return Scenario::se_tradeoff;
    throw invalid_parameter("config: unknown scenario " + v);
}

} // namespace cfg_detail

/// Applies `key = value` lines from a config file on top of a base config.
inline ExperimentConfig apply_config_text(ExperimentConfig c, std::istream& is)
{
    using namespace cfg_detail;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw invalid_parameter("config line " + std::to_string(line_no)
                                    + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "scenario") c.scenario = parse_scenario(value);
            else if (key == "elements") c.elements = int_list(value);
            else if (key == "group_size") c.group_sizes = int_list(value);
            else if (key == "tile_size") c.tile_sizes = int_list(value);
            else if (key == "sectors") c.sector_counts = int_list(value);
            else if (key == "total_elements") c.total_elements = int_list(value);
            else if (key == "bs_antennas") c.bs_antennas = std::stoi(value);
            else if (key == "user_antennas") c.user_antennas = std::stoi(value);
            else if (key == "streams") c.streams = std::stoi(value);
            else if (key == "snr_db") c.snr_db = double_list(value);
            else if (key == "frame_lengths") c.frame_lengths = int_list(value);
            else if (key == "d1_m") c.path_loss_params.bs_ris_distance_m = std::stod(value);
            else if (key == "d2_m") c.path_loss_params.ris_user_distance_m = std::stod(value);
            else if (key == "pl_exponent1") c.path_loss_params.bs_ris_exponent = std::stod(value);
            else if (key == "pl_exponent2") c.path_loss_params.ris_user_exponent = std::stod(value);
            else if (key == "carrier_hz") c.path_loss_params.carrier_hz = std::stod(value);
            else if (key == "bs_gain") c.path_loss_params.bs_gain = std::stod(value);
            else if (key == "user_gain") c.path_loss_params.user_gain = std::stod(value);
            else if (key == "kappa_db") c.kappa_db = std::stod(value);
            else if (key == "tx_power_w") c.tx_power_w = std::stod(value);
            else if (key == "bs_power_w") c.bs_power_w = std::stod(value);
            else if (key == "noise_dbm") c.noise_dbm = std::stod(value);
            else if (key == "trials") c.trials = std::stoi(value);
            else if (key == "threads") c.threads = std::stoi(value);
            else if (key == "seed") c.seed = std::stoull(value);
            else if (key == "bases") {
                c.bases.clear();
                for (const auto& b : split_list(value))
                    c.bases.push_back(parse_base(b));
            }
            else if (key == "random_pattern") c.random_pattern_baseline = parse_bool(value);
            else if (key == "random_theta") c.random_theta_baseline = parse_bool(value);
            else if (key == "out") c.output_path = value;
            else
                throw invalid_parameter("config: unknown key " + key);
        } catch (const std::logic_error& e) {
            throw invalid_parameter("config line " + std::to_string(line_no) + ": "
                                    + e.what());
        }
    }
    if (c.trials < 1)
        throw invalid_parameter("config: trials must be >= 1");
    if (c.bases.empty())
        throw invalid_parameter("config: bases must not be empty");
    return c;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base)
{
    std::ifstream f(path);
    if (!f)
        throw io_error("config: cannot open " + path);
    return apply_config_text(std::move(base), f);
}

// ---------------------------------------------------------------------------
// execution helpers
// ---------------------------------------------------------------------------

namespace detail {

// Runs fn(0..n-1) across a few worker threads. Each index must touch only
// its own output slot; results are then reduced in index order, so the
// outcome does not depend on the thread count.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn)
{
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline double mean(const std::vector<double>& v)
{
    double acc = 0.0;
    for (double x : v)
        acc += x;
    return acc / static_cast<double>(v.size());
}

// substream tags; fixed so that grid points at equal trial index reuse the
// same channel draws (paired comparisons) while noise stays independent
constexpr std::uint64_t tag_channel = 0x6368616eULL;
constexpr std::uint64_t tag_noise = 0x6e6f6973ULL;
constexpr std::uint64_t tag_random_plan = 0x72706c6eULL;
constexpr std::uint64_t tag_random_theta = 0x72746874ULL;

} // namespace detail

// ---------------------------------------------------------------------------
// scenario runners
// ---------------------------------------------------------------------------

/// Normalized estimation error against training SNR, per base kind and
/// group size, with the optional random-pattern benchmark.
inline void run_mse_sweep(const ExperimentConfig& cfg, std::ostream& os)
{
    os << "snr_db,base_kind,elements,group_size,tile_size,bs_antennas,user_antennas,"
          "trials,normalized_mse_empirical,normalized_mse_theory\n";
    const double sigma2 = cfg.noise_power();
    const double kappa = cfg.kappa_linear();
    PathLossParams pl = cfg.path_loss_params;
    pl.sectors = 2;
    const double xi = path_loss(pl);

    struct Kind {
        std::string name;
        bool random;
        BaseKind base;
    };
    std::vector<Kind> kinds;
    for (BaseKind b : cfg.bases)
        kinds.push_back({to_string(b), false, b});
    if (cfg.random_pattern_baseline)
        kinds.push_back({"random", true, BaseKind::dft});

    for (int m : cfg.elements)
        for (int mb : cfg.group_sizes)
            for (int gbar : cfg.tile_sizes) {
                SurfaceConfig sc;
                sc.elements = m;
                sc.group_size = mb;
                sc.tile_size = gbar;
                sc.bs_antennas = cfg.bs_antennas;
                sc.user_antennas = cfg.user_antennas;
                if (m % mb != 0 || (m / mb) % gbar != 0)
                    continue;
                sc.validate();

                for (const Kind& kind : kinds) {
                    TrainingPlan plan;
                    if (kind.random) {
                        Rng rng = Rng::substream(cfg.seed, detail::tag_random_plan,
                                                 mb, gbar);
                        plan = random_plan(mb, sc.num_tiles(), sc.user_antennas, rng);
                    } else {
                        plan = build_plan(kind.base, mb, sc.num_tiles(),
                                          sc.user_antennas);
                    }
                    const int t1 = plan.overhead();

                    // one LS operator and analytic trace per plan
                    const arma::cx_mat phi_hat =
                        assemble_sensing_matrix(plan, sc.bs_antennas);
                    arma::cx_mat gram_inv;
                    if (!arma::inv(gram_inv, arma::cx_mat(phi_hat.t() * phi_hat)))
                        throw singular_matrix("mse sweep: rank-deficient plan");
                    const double trace = arma::trace(gram_inv).real();
                    const arma::cx_mat ls_op = gram_inv * phi_hat.t();

                    for (double snr_db : cfg.snr_db) {
                        const double pu =
                            power_for_snr(db_to_linear(snr_db), t1, xi, sigma2);
                        std::vector<double> ratio(cfg.trials);
                        std::vector<double> inv_norm(cfg.trials);
                        detail::parallel_for(cfg.trials, cfg.worker_count(), [&](int t) {
                            Rng ch_rng = Rng::substream(cfg.seed, detail::tag_channel, t);
                            const ChannelRealization ch =
                                draw_channels(sc, xi, kappa, ch_rng);
                            const CascadedChannel casc = cascade(ch, sc);
                            const arma::cx_vec q = vec(casc.tile);
                            Rng noise_rng =
                                Rng::substream(cfg.seed, detail::tag_noise, t);
                            const arma::cx_vec y = simulate_uplink(
                                plan, casc.tile, sc.bs_antennas, pu, sigma2, noise_rng);
                            arma::cx_vec q_hat;
                            if (plan.scaled_unitary)
                                q_hat = ls_estimate(y, plan, sc.bs_antennas, pu,
                                                    LsMode::fast)
                                            .q_hat;
                            else
                                q_hat = (ls_op * y) / std::sqrt(pu);
                            const double n2 = std::pow(arma::norm(q), 2);
                            ratio[t] = std::pow(arma::norm(q_hat - q), 2) / n2;
                            inv_norm[t] = 1.0 / n2;
                        });
                        const double empirical = detail::mean(ratio);
                        const double theory =
                            sigma2 / pu * trace * detail::mean(inv_norm);
                        os << detail::fmt(snr_db) << ',' << kind.name << ',' << m << ','
                           << mb << ',' << gbar << ',' << sc.bs_antennas << ','
                           << sc.user_antennas << ',' << cfg.trials << ','
                           << detail::fmt(empirical) << ',' << detail::fmt(theory)
                           << '\n';
                    }
                }
            }
    if (!os)
        throw io_error("mse sweep: output stream failure");
}

/// Point-to-point rate against element count, perfect vs estimated CSI.
inline void run_mimo_rate(const ExperimentConfig& cfg, std::ostream& os)
{
    os << "elements,group_size,tile_size,bs_antennas,user_antennas,streams,"
          "trials,csi,mean_rate\n";
    const double sigma2 = cfg.noise_power();
    const double kappa = cfg.kappa_linear();
    PathLossParams pl = cfg.path_loss_params;
    pl.sectors = 2;
    const double xi = path_loss(pl);
    const double pu = cfg.tx_power_w;
    const double pd = cfg.downlink_power();
    const BaseKind base = cfg.bases.front();

    for (int m : cfg.elements)
        for (int mb : cfg.group_sizes)
            for (int gbar : cfg.tile_sizes) {
                if (m % mb != 0 || (m / mb) % gbar != 0)
                    continue;
                SurfaceConfig sc;
                sc.elements = m;
                sc.group_size = mb;
                sc.tile_size = gbar;
                sc.bs_antennas = cfg.bs_antennas;
                sc.user_antennas = cfg.user_antennas;
                sc.validate();
                const TrainingPlan plan =
                    build_plan(base, mb, sc.num_tiles(), sc.user_antennas);

                std::vector<double> rate_perfect(cfg.trials);
                std::vector<double> rate_estimated(cfg.trials);
                detail::parallel_for(cfg.trials, cfg.worker_count(), [&](int t) {
                    Rng ch_rng = Rng::substream(cfg.seed, detail::tag_channel, t);
                    const ChannelRealization ch = draw_channels(sc, xi, kappa, ch_rng);
                    const CascadedChannel casc = cascade(ch, sc);

                    const MimoDesign ideal =
                        design_mimo(casc.tile, mb, sc.bs_antennas, cfg.streams, pd,
                                    sigma2);
                    rate_perfect[t] = ideal.design_rate;

                    Rng noise_rng = Rng::substream(cfg.seed, detail::tag_noise, t);
                    const arma::cx_vec y = simulate_uplink(
                        plan, casc.tile, sc.bs_antennas, pu, sigma2, noise_rng);
                    const ChannelEstimate est =
                        ls_estimate(y, plan, sc.bs_antennas, pu, LsMode::fast);
                    const MimoDesign fitted =
                        design_mimo(est.tile_estimate, mb, sc.bs_antennas,
                                    cfg.streams, pd, sigma2);
                    const arma::cx_mat h_true =
                        effective_downlink(casc.tile, fitted.theta, sc.bs_antennas);
                    rate_estimated[t] = link_rate(h_true, fitted.transceiver.precoder,
                                                  fitted.transceiver.combiner, sigma2);
                });
                for (const char* which : {"perfect", "estimated"}) {
                    const double r = std::string(which) == "perfect"
                        ? detail::mean(rate_perfect)
                        : detail::mean(rate_estimated);
                    os << m << ',' << mb << ',' << gbar << ',' << sc.bs_antennas << ','
                       << sc.user_antennas << ',' << cfg.streams << ',' << cfg.trials
                       << ',' << which << ',' << detail::fmt(r) << '\n';
                }
            }
    if (!os)
        throw io_error("mimo rate: output stream failure");
}

/// Multi-sector MU-MISO sum rate against the total element count.
inline void run_mumiso_sumrate(const ExperimentConfig& cfg, std::ostream& os)
{
    os << "total_elements,sectors,group_size,tile_size,bs_antennas,users,"
          "trials,csi,mean_sumrate\n";
    const double sigma2 = cfg.noise_power();
    const double kappa = cfg.kappa_linear();
    const double pu = cfg.tx_power_w;
    const double pd = cfg.downlink_power();
    const BaseKind base = cfg.bases.front();
    const int users_total = cfg.user_antennas;

    for (int ml : cfg.total_elements)
        for (int sectors : cfg.sector_counts)
            for (int mb : cfg.group_sizes)
                for (int gbar : cfg.tile_sizes) {
                    if (ml % sectors != 0 || users_total % sectors != 0)
                        continue;
                    const int m = ml / sectors;
                    if (m % mb != 0 || ((m / mb) % gbar) != 0)
                        continue;
                    const int users_per_sector = users_total / sectors;

                    SurfaceConfig sc;
                    sc.elements = m;
                    sc.group_size = mb;
                    sc.tile_size = gbar;
                    sc.sectors = sectors;
                    sc.bs_antennas = cfg.bs_antennas;
                    sc.user_antennas = 1;
                    sc.validate();

                    PathLossParams pl = cfg.path_loss_params;
                    pl.sectors = sectors;
                    const double xi = path_loss(pl);

                    std::vector<double> sr_perfect(cfg.trials);
                    std::vector<double> sr_estimated(cfg.trials);
                    detail::parallel_for(cfg.trials, cfg.worker_count(), [&](int t) {
                        // per-sector channel draws and per-user truths
                        std::vector<SectorChannels> faces(sectors);
                        std::vector<arma::cx_mat> truth;
                        std::vector<int> sector_of_user;
                        for (int l = 0; l < sectors; ++l) {
                            Rng rng = Rng::substream(cfg.seed, detail::tag_channel,
                                                     t, l);
                            SurfaceConfig face_cfg = sc;
                            face_cfg.user_antennas = users_per_sector;
                            const ChannelRealization ch =
                                draw_channels(face_cfg, xi, kappa, rng);
                            faces[l].ris_to_bs = ch.ris_to_bs;
                            faces[l].users_to_ris = ch.user_to_ris;
                            const CascadedChannel casc = cascade(ch, face_cfg);
                            auto slices = per_user_slices(
                                casc.tile, sc.bs_antennas, users_per_sector);
                            for (auto& s : slices) {
                                truth.push_back(std::move(s));
                                sector_of_user.push_back(l);
                            }
                        }

                        MuMisoScenario scen;
                        scen.sector_of_user = sector_of_user;
                        scen.sectors = sectors;
                        scen.group_size = mb;
                        scen.bs_antennas = sc.bs_antennas;
                        scen.power = pd;
                        scen.noise_power = sigma2;

                        scen.user_channels = truth;
                        const FpState ideal = solve_mumiso(scen);
                        sr_perfect[t] = sum_rate_on(truth, sector_of_user,
                                                    ideal.sector_theta,
                                                    ideal.precoders, sigma2);

                        const std::uint64_t est_seed = bdris::detail::mix64(
                            cfg.seed ^ bdris::detail::mix64(detail::tag_noise + t));
                        const MultiSectorEstimate est = estimate_multisector(
                            sc, faces, base, pu, sigma2, est_seed);
                        scen.user_channels = est.per_user;
                        scen.training_overhead = est.total_overhead;
                        const FpState fitted = solve_mumiso(scen);
                        sr_estimated[t] = sum_rate_on(truth, sector_of_user,
                                                      fitted.sector_theta,
                                                      fitted.precoders, sigma2);
                    });
                    for (const char* which : {"perfect", "estimated"}) {
                        const double r = std::string(which) == "perfect"
                            ? detail::mean(sr_perfect)
                            : detail::mean(sr_estimated);
                        os << ml << ',' << sectors << ',' << mb << ',' << gbar << ','
                           << cfg.bs_antennas << ',' << users_total << ','
                           << cfg.trials << ',' << which << ',' << detail::fmt(r)
                           << '\n';
                    }
                }
    if (!os)
        throw io_error("mumiso sumrate: output stream failure");
}

/// Frame-efficiency-scaled rate against tile size, with the random-pattern
/// downlink benchmark when enabled. Estimation always uses the optimal plan.
inline void run_se_tradeoff(const ExperimentConfig& cfg, std::ostream& os)
{
    os << "elements,group_size,tile_size,frame,bs_antennas,user_antennas,streams,"
          "trials,scheme,se_mean,flag\n";
    const double sigma2 = cfg.noise_power();
    const double kappa = cfg.kappa_linear();
    PathLossParams pl = cfg.path_loss_params;
    pl.sectors = 2;
    const double xi = path_loss(pl);
    const double pu = cfg.tx_power_w;
    const double pd = cfg.downlink_power();
    const BaseKind base = cfg.bases.front();

    for (int m : cfg.elements)
        for (int mb : cfg.group_sizes)
            for (int gbar : cfg.tile_sizes) {
                if (m % mb != 0 || (m / mb) % gbar != 0)
                    continue;
                SurfaceConfig sc;
                sc.elements = m;
                sc.group_size = mb;
                sc.tile_size = gbar;
                sc.bs_antennas = cfg.bs_antennas;
                sc.user_antennas = cfg.user_antennas;
                sc.validate();
                const TrainingPlan plan =
                    build_plan(base, mb, sc.num_tiles(), sc.user_antennas);
                const int t1 = plan.overhead();
                const int m2 = mb * mb;

                std::vector<double> rate_opt(cfg.trials);
                std::vector<double> rate_rand(cfg.trials,
                                              arma::datum::nan);
                detail::parallel_for(cfg.trials, cfg.worker_count(), [&](int t) {
                    Rng ch_rng = Rng::substream(cfg.seed, detail::tag_channel, t);
                    const ChannelRealization ch = draw_channels(sc, xi, kappa, ch_rng);
                    const CascadedChannel casc = cascade(ch, sc);

                    Rng noise_rng = Rng::substream(cfg.seed, detail::tag_noise, t);
                    const arma::cx_vec y = simulate_uplink(
                        plan, casc.tile, sc.bs_antennas, pu, sigma2, noise_rng);
                    const ChannelEstimate est =
                        ls_estimate(y, plan, sc.bs_antennas, pu, LsMode::fast);

                    const MimoDesign fitted =
                        design_mimo(est.tile_estimate, mb, sc.bs_antennas,
                                    cfg.streams, pd, sigma2);
                    const arma::cx_mat h_true =
                        effective_downlink(casc.tile, fitted.theta, sc.bs_antennas);
                    rate_opt[t] = link_rate(h_true, fitted.transceiver.precoder,
                                            fitted.transceiver.combiner, sigma2);

                    if (cfg.random_theta_baseline) {
                        Rng theta_rng =
                            Rng::substream(cfg.seed, detail::tag_random_theta, t);
                        arma::cx_vec theta_rand(plan.pattern_rows());
                        for (int i = 0; i < sc.num_tiles(); ++i)
                            theta_rand.subvec(i * m2, (i + 1) * m2 - 1) = vec(
                                arma::strans(theta_rng.haar_unitary(mb)));
                        const arma::cx_mat h_est = effective_downlink(
                            est.tile_estimate, theta_rand, sc.bs_antennas);
                        const Transceiver trx =
                            svd_transceiver(h_est, cfg.streams, pd);
                        const arma::cx_mat h_eval = effective_downlink(
                            casc.tile, theta_rand, sc.bs_antennas);
                        rate_rand[t] = link_rate(h_eval, trx.precoder, trx.combiner,
                                                 sigma2);
                    }
                });

                std::vector<std::pair<std::string, double>> schemes{
                    {"optimized", detail::mean(rate_opt)}};
                if (cfg.random_theta_baseline)
                    schemes.emplace_back("random_theta", detail::mean(rate_rand));
                for (int frame : cfg.frame_lengths)
                    for (const auto& [name, rate] : schemes) {
                        double se = 0.0;
                        std::string flag;
                        if (frame > t1)
                            se = spectral_efficiency(rate, t1, 0, frame);
                        else
                            flag = "overhead_exceeds_frame";
                        os << m << ',' << mb << ',' << gbar << ',' << frame << ','
                           << sc.bs_antennas << ',' << sc.user_antennas << ','
                           << cfg.streams << ',' << cfg.trials << ',' << name << ','
                           << detail::fmt(se) << ',' << flag << '\n';
                    }
            }
    if (!os)
        throw io_error("se tradeoff: output stream failure");
}

/// Dispatches on the configured scenario and writes CSV to the output path.
inline void run_experiment(const ExperimentConfig& cfg)
{
    std::ofstream f(cfg.output_path);
    if (!f)
        throw io_error("cannot open output file " + cfg.output_path);
    switch (cfg.scenario) {
    case Scenario::mse_sweep: run_mse_sweep(cfg, f); break;
    case Scenario::mimo_rate: run_mimo_rate(cfg, f); break;
    case Scenario::mumiso_sumrate: run_mumiso_sumrate(cfg, f); break;
    case Scenario::se_tradeoff: run_se_tradeoff(cfg, f); break;
    }
    f.flush();
    if (!f)
        throw io_error("failure writing " + cfg.output_path);
}

} // namespace bdris
