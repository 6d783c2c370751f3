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

#include "uvchan/cir.hpp"
#include "uvchan/evolution.hpp"
#include "uvchan/params.hpp"
#include "uvchan/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace uvchan
{

inline constexpr const char *version = "1.0.0";

// CIR of link (i, j) at the state's current time. Advances the link's Doppler phase integrals by dt.
cir::LinkCir synthesize_link(evolution::EvolutionState &st, const Scenario &sc, const params::ParameterTable &table,
                             std::size_t i, std::size_t j, double dt);

// Snapshot loop: init at t0, then advance -> survive -> birth -> match -> synthesize per step.
class Simulator
{
  public:
    Simulator(Scenario sc, const params::ParameterTable &table);

    const Scenario &scenario() const { return sc_; }
    const evolution::EvolutionState &state() const { return st_; }
    const cir::CirMatrix &cir() const { return cir_; }
    std::size_t step() const { return st_.step; }
    double time() const { return st_.time; }
    bool has_next() const { return st_.step + 1 < sc_.snapshots(); }
    void next();

  private:
    void synthesize(double dt);

    Scenario sc_;
    const params::ParameterTable &table_;
    evolution::EvolutionState st_;
    cir::CirMatrix cir_;
};

struct RunSummary
{
    std::size_t snapshots = 0;
    std::size_t skipped_scatterers = 0;
    std::size_t shortfall = 0;
    std::vector<std::string> files;
};

// Full single-seed run writing the delimited-text bundle and manifest into sc.output_dir.
// On an I/O failure a PARTIAL marker is left in the directory and the error is rethrown.
RunSummary run_to_directory(const Scenario &sc, const params::ParameterTable &table);

} // namespace uvchan
