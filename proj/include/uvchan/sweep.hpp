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

#pragma once

#include "uvchan/params.hpp"
#include "uvchan/scenario.hpp"
#include "uvchan/stats.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace uvchan::sweep
{

class SweepError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct Settings
{
    std::vector<params::Condition> conditions{params::Condition::Low, params::Condition::Medium,
                                              params::Condition::High};
    std::vector<std::uint64_t> seeds;

    double tacf_max_lag = 5e-3;            // s
    std::vector<double> tacf_anchors{0.0, 2.0};
    std::size_t dpsd_anchors = 21;         // evenly spaced over [0, dpsd_span]
    double dpsd_span = 2.0;                // s
    std::size_t dpsd_lags = 64;
    std::size_t zero_pad = 4;
    std::size_t tsi_anchors = 200;         // evenly spaced over [0, tsi_span)
    double tsi_span = 1.0;                 // s
    double tsi_threshold = 0.1;

    // Verdict thresholds
    double tacf_margin = 0.02;
    double tsi_separation = 0.10;
    double dpsd_fraction = 0.90;

    int threads = 0; // 0: OpenMP default
};

// Reads the optional "sweep" object of a scenario file. Throws ValidationError.
Settings settings_from_json(const nlohmann::json &j);
nlohmann::json settings_to_json(const Settings &s);
std::vector<std::string> validation_issues(const Settings &s, const Scenario &sc);

// "A..B" inclusive or a single value.
std::vector<std::uint64_t> parse_seed_range(const std::string &text);

// Sample-time layout shared by all seeds of a sweep.
struct Layout
{
    std::size_t lags = 0;               // per anchor window
    std::vector<std::size_t> anchors;   // snapshot indices, sorted, unique
    std::vector<std::size_t> tacf_idx;  // positions in anchors
    std::vector<std::size_t> dpsd_idx;  // positions in anchors
    std::vector<std::size_t> tsi_steps; // snapshot indices
    std::size_t links = 0;
};

Layout make_layout(const Settings &s, const Scenario &sc);

enum Component : std::size_t
{
    Total = 0,
    LoS = 1,
    GR = 2,
    NLoS = 3
};

struct SeedSummary
{
    std::uint64_t seed = 0;
    // window[link][anchor][component][lag]: H(t_anchor + lag*dt, f_c)
    std::vector<std::vector<std::array<std::vector<std::complex<double>>, 4>>> window;
    std::vector<std::complex<double>> tf0; // link 0 transfer function at t0 on the output grid
    std::vector<stats::TsiSample> tsi;
    double mean_active_twins = 0.0;
    std::size_t skipped_scatterers = 0;
    std::size_t shortfall = 0;
};

SeedSummary run_seed(const Scenario &sc, const params::ParameterTable &table, const Layout &layout);

// Serial reference and OpenMP worker pool; identical results in seed order.
std::vector<SeedSummary> run_seeds_serial(const Scenario &base, const params::ParameterTable &table,
                                          const Layout &layout, const std::vector<std::uint64_t> &seeds);
std::vector<SeedSummary> run_seeds_omp(const Scenario &base, const params::ParameterTable &table,
                                       const Layout &layout, const std::vector<std::uint64_t> &seeds);

struct ConditionResult
{
    params::Condition condition = params::Condition::High;
    std::vector<stats::CorrelationCurve> tacf;                // per anchor, link 0, total
    std::vector<std::array<stats::CorrelationCurve, 4>> tacf_components; // normalised by the total's powers
    std::vector<stats::DpsdArray> dpsd;                       // per DPSD anchor
    std::vector<double> flatness;                             // per DPSD anchor
    std::vector<double> tacf_mean_abs;                        // per TACF anchor, over lags in (0, max]
    stats::CorrelationCurve fcf;
    std::vector<std::vector<std::complex<double>>> space_ccf; // [anchor][link k >= 1] against link 0
    std::vector<stats::TsiSample> tsi;                        // seed-major
    double median_tsi = 0.0;
    double censored_fraction = 0.0;
    std::size_t undefined_tsi = 0;
    double mean_active_twins = 0.0;
    std::size_t skipped_scatterers = 0;
    std::size_t shortfall = 0;
};

// Serial reduction in seed order.
ConditionResult reduce(params::Condition cond, const Scenario &sc, const Settings &s, const Layout &layout,
                       const std::vector<SeedSummary> &seeds);

struct Verdict
{
    std::string name;
    bool evaluated = false;
    bool pass = false;
    std::string detail;
};

std::vector<Verdict> verdicts(const std::vector<ConditionResult> &results, const Settings &s);

// Occupied Doppler band used for spectral flatness.
double occupied_band(const Scenario &sc);

struct SweepOutput
{
    std::vector<ConditionResult> results;
    std::vector<Verdict> verdict;
    std::map<std::string, std::string> checksums; // file -> sha256
    std::size_t runs = 0;
};

// Runs conditions x seeds, writes statistic tables, verdict.json and manifest.json into out_dir.
// Aborts naming the failing (condition, seed) cell.
SweepOutput run_sweep(const Scenario &base, const params::ParameterTable &table, const Settings &s,
                      const std::filesystem::path &out_dir, bool parallel = true);

} // namespace uvchan::sweep
