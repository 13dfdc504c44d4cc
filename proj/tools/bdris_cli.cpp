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

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "bdris/bdris.hpp"
#include "bdris/matrix_io.hpp"

namespace {

// exit codes: 0 ok, 2 invalid config, 3 unsupported Hadamard order, 4 I/O
constexpr int kExitConfig = 2;
constexpr int kExitHadamard = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    int threads = -1;
    bool paper_scale = false;
    std::string base;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config_path, "config file (key = value lines)");
    cmd->add_option("--out", f.out_path, "output CSV path");
    cmd->add_option("--seed", f.seed, "RNG seed")->each([&](const std::string&) {
        f.seed_set = true;
    });
    cmd->add_option("--trials", f.trials, "Monte Carlo trials per grid point");
    cmd->add_option("--threads", f.threads, "worker threads (0 = auto)");
    cmd->add_flag("--paper-scale", f.paper_scale, "use the full-size grids");
    cmd->add_option("--base", f.base, "pattern base kind (dft | hadamard)");
}

bdris::ExperimentConfig resolve(bdris::Scenario scenario, const CommonFlags& f)
{
    bdris::ExperimentConfig cfg = bdris::default_config(scenario, f.paper_scale);
    if (!f.config_path.empty())
        cfg = bdris::load_config(f.config_path, cfg);
    cfg.scenario = scenario; // the subcommand wins over the file
    if (f.seed_set)
        cfg.seed = f.seed;
    if (f.trials > 0)
        cfg.trials = f.trials;
    if (f.threads >= 0)
        cfg.threads = f.threads;
    if (!f.out_path.empty())
        cfg.output_path = f.out_path;
    if (!f.base.empty())
        cfg.bases = {bdris::cfg_detail::parse_base(f.base)};
    return cfg;
}

int run_scenario(bdris::Scenario scenario, const CommonFlags& f)
{
    const bdris::ExperimentConfig cfg = resolve(scenario, f);
    bdris::run_experiment(cfg);
    std::cout << "wrote " << cfg.output_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"BD-RIS channel estimation and beamforming experiments"};
    app.require_subcommand(1);

    CommonFlags mse_f, mimo_f, mumiso_f, se_f;
    CLI::App* mse = app.add_subcommand("mse-sweep",
                                       "normalized estimation error vs training SNR");
    add_common(mse, mse_f);
    CLI::App* mimo = app.add_subcommand("mimo-rate",
                                        "point-to-point rate vs element count");
    add_common(mimo, mimo_f);
    CLI::App* mumiso = app.add_subcommand("mumiso-sumrate",
                                          "multi-sector sum rate vs total elements");
    add_common(mumiso, mumiso_f);
    CLI::App* se = app.add_subcommand("se-tradeoff",
                                      "overhead-scaled spectral efficiency vs tile size");
    add_common(se, se_f);

    CLI::App* exp = app.add_subcommand("export-pattern",
                                       "write a training pattern (and pilots) to text files");
    std::string exp_base = "dft";
    int exp_group = 2, exp_tiles = 2, exp_users = 0;
    std::string exp_out = "pattern.txt", exp_pilots_out;
    exp->add_option("--base", exp_base, "dft | hadamard");
    exp->add_option("--group-size", exp_group, "ports per group")->check(CLI::PositiveNumber);
    exp->add_option("--tiles", exp_tiles, "number of tiles")->check(CLI::PositiveNumber);
    exp->add_option("--users", exp_users, "pilot block size (0 = skip pilots)");
    exp->add_option("--out", exp_out, "pattern output path");
    exp->add_option("--pilots-out", exp_pilots_out, "pilot output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (mse->parsed())
            return run_scenario(bdris::Scenario::mse_sweep, mse_f);
        if (mimo->parsed())
            return run_scenario(bdris::Scenario::mimo_rate, mimo_f);
        if (mumiso->parsed())
            return run_scenario(bdris::Scenario::mumiso_sumrate, mumiso_f);
        if (se->parsed())
            return run_scenario(bdris::Scenario::se_tradeoff, se_f);
        if (exp->parsed()) {
            const bdris::BaseKind kind = bdris::cfg_detail::parse_base(exp_base);
            const int users = exp_users > 0 ? exp_users : 1;
            const bdris::TrainingPlan plan =
                bdris::build_plan(kind, exp_group, exp_tiles, users);
            bdris::write_matrix(exp_out, plan.pattern);
            std::cout << "wrote " << exp_out << "\n";
            if (!exp_pilots_out.empty() && exp_users > 0) {
                bdris::write_matrix(exp_pilots_out, plan.pilots);
                std::cout << "wrote " << exp_pilots_out << "\n";
            }
            return 0;
        }
    } catch (const bdris::unsupported_hadamard_order& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitHadamard;
    } catch (const bdris::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const bdris::invalid_parameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bdris::dimension_mismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
