// SPDX-License-Identifier: Apache-2.0
//
// uvchan: multi-UAV to multi-vehicle radio channel simulator
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

// uvchan command line: run, sweep, dump-table.
// Exit codes: 0 success, 2 validation error, 1 runtime error.
// Log verbosity follows SPDLOG_LEVEL (trace, debug, info, warn, error, off).

#include "uvchan/params.hpp"
#include "uvchan/scenario.hpp"
#include "uvchan/simulate.hpp"
#include "uvchan/sweep.hpp"

#include <CLI11.hpp>
#include <omp.h>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <optional>

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_validation = 2;

nlohmann::json read_json(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw uvchan::ValidationError({"config: cannot open '" + path + "'"});
    try
    {
        nlohmann::json j;
        f >> j;
        return j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw uvchan::ValidationError({"config: malformed structured text: " + std::string(e.what())});
    }
}

uvchan::params::Condition condition_arg(const std::string &s)
{
    auto c = uvchan::params::parse_condition(s);
    if (!c)
        throw uvchan::ValidationError({"--condition: expected low, medium or high, got '" + s + "'"});
    return *c;
}

uvchan::params::ParameterTable table_arg(const std::string &path)
{
    if (path.empty())
        return uvchan::params::default_table();
    try
    {
        return uvchan::params::load_table(path);
    }
    catch (const uvchan::params::ParseError &e)
    {
        throw uvchan::ValidationError({std::string("--table: ") + e.what()});
    }
}

} // namespace

int main(int argc, char **argv)
{
    spdlog::set_level(spdlog::level::info);
    spdlog::cfg::load_env_levels();

    CLI::App app{"uvchan: multi-UAV to multi-vehicle channel simulator"};
    app.set_version_flag("--version", std::string(uvchan::version));
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP worker threads (0: runtime default)")
        ->check(CLI::NonNegativeNumber);

    std::string config, out, table_path, condition, seeds;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> conditions;
    bool serial = false;

    auto *run = app.add_subcommand("run", "Single-seed run writing CIR, transfer-function and statistics tables");
    run->add_option("--config", config, "Scenario file")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--condition", condition, "low, medium or high");
    run->add_option("--out", out, "Output directory");
    run->add_option("--table", table_path, "Parameter file replacing the built-in table");

    auto *sw = app.add_subcommand("sweep", "Conditions x seeds ensemble with aggregate statistics and verdicts");
    sw->add_option("--config", config, "Scenario file, optionally with a \"sweep\" object")->required();
    sw->add_option("--seeds", seeds, "Inclusive seed range A..B");
    sw->add_option("--conditions", conditions, "Any of low, medium, high");
    sw->add_option("--out", out, "Output directory");
    sw->add_option("--table", table_path, "Parameter file replacing the built-in table");
    sw->add_flag("--serial", serial, "Use the serial reference instead of the worker pool");

    auto *dump = app.add_subcommand("dump-table", "Write the built-in parameter table");
    dump->add_option("--out", out, "Destination file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_validation;
    }

    if (threads > 0)
        omp_set_num_threads(threads);

    try
    {
        if (*dump)
        {
            uvchan::params::save_table(uvchan::params::default_table(), out);
            spdlog::info("wrote parameter table to {}", out);
            return exit_ok;
        }

        const auto j = read_json(config);
        auto scenario_json = j;
        if (scenario_json.is_object())
            scenario_json.erase("sweep");
        auto sc = uvchan::scenario_from_json(scenario_json);
        if (!out.empty())
            sc.output_dir = out;
        const auto table = table_arg(table_path);

        if (*run)
        {
            if (seed)
                sc.seed = *seed;
            if (!condition.empty())
                sc.condition = condition_arg(condition);
            const auto sum = uvchan::run_to_directory(sc, table);
            spdlog::info("{} snapshots written to {}", sum.snapshots, sc.output_dir);
            return exit_ok;
        }

        auto settings = j.contains("sweep") ? uvchan::sweep::settings_from_json(j.at("sweep"))
                                            : uvchan::sweep::Settings{};
        if (!seeds.empty())
        {
            try
            {
                settings.seeds = uvchan::sweep::parse_seed_range(seeds);
            }
            catch (const std::exception &e)
            {
                throw uvchan::ValidationError({std::string("--seeds: ") + e.what()});
            }
        }
        if (!conditions.empty())
        {
            settings.conditions.clear();
            for (const auto &c : conditions)
                settings.conditions.push_back(condition_arg(c));
        }
        if (threads > 0)
            settings.threads = threads;
        const auto res = uvchan::sweep::run_sweep(sc, table, settings, sc.output_dir, !serial);
        for (const auto &v : res.verdict)
            spdlog::info("{}: {} ({})", v.name, v.evaluated ? (v.pass ? "pass" : "fail") : "not evaluated", v.detail);
        spdlog::info("{} runs aggregated into {}", res.runs, sc.output_dir);
        return exit_ok;
    }
    catch (const uvchan::ValidationError &e)
    {
        std::cerr << e.what() << '\n';
        return exit_validation;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}
