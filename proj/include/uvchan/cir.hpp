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

#include "uvchan/geometry.hpp"
#include "uvchan/params.hpp"
#include "uvchan/scenario.hpp"

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvchan::cir
{

using geometry::Vec3;
using params::ScattererClass;

inline constexpr double speed_of_light = 299792458.0;

class AssemblyError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

enum class TapKind
{
    LoS,
    GroundReflection,
    NLoS
};

std::string_view to_string(TapKind k);

struct RayTap
{
    TapKind kind = TapKind::LoS;
    std::uint32_t twin = 0; // NLoS only
    std::uint32_t ray = 0;  // NLoS only
    ScattererClass cls = ScattererClass::Static;
    double delay = 0.0;        // s
    double power = 0.0;        // raw linear power before weighting
    double phase = 0.0;        // rad, literal: phi0 (+ arg Gamma) + 2*pi*path/lambda
    double carrier_phase = 0.0; // rad, phi0 (+ arg Gamma); phase with the carrier term removed
    double doppler = 0.0;      // Hz, positive for closing geometry
    double accumulated_phase = 0.0; // rad, 2*pi * integral of doppler since the ray appeared
    double amplitude = 0.0;    // weighted amplitude, set by assemble_link_cir
};

struct LinkCir
{
    std::size_t i = 0; // UAV
    std::size_t j = 0; // vehicle
    double time = 0.0;
    double omega = 1.0; // Ricean factor, linear
    double eta_gr = 0.0;
    double eta_nlos = 1.0;
    bool in_window = true;
    std::vector<RayTap> taps; // taps[0] is the LoS tap
};

// Grid indexed [vehicle j][UAV i].
struct CirMatrix
{
    double time = 0.0;
    std::vector<std::vector<LinkCir>> grid;
    std::size_t vehicles() const { return grid.size(); }
    std::size_t uavs() const { return grid.empty() ? 0 : grid.front().size(); }
    const LinkCir &at(std::size_t j, std::size_t i) const { return grid.at(j).at(i); }
};

struct TransferFunction
{
    std::size_t i = 0;
    std::size_t j = 0;
    double time = 0.0;
    std::vector<double> freq;
    std::vector<std::complex<double>> h;
};

struct GroundModel
{
    double permittivity = 5.0;
    Polarization polarization = Polarization::Vertical;
};

// Fresnel reflection coefficient of a lossless half-space at grazing angle psi (rad).
std::complex<double> fresnel(double psi, const GroundModel &g);

RayTap los_tap(const Vec3 &tx, const Vec3 &vtx, const Vec3 &rx, const Vec3 &vrx, double lambda, double phi0);

// Image method: the tx endpoint is mirrored across z = 0.
RayTap gr_tap(const Vec3 &tx, const Vec3 &vtx, const Vec3 &rx, const Vec3 &vrx, double lambda, double phi0,
              const GroundModel &g);

struct NlosGeometry
{
    Vec3 tx, vtx, rx, vrx;
    Vec3 sa, va; // tx-side scatterer
    Vec3 sz, vz; // rx-side scatterer
};

// Twin-sided ray: tx -> sa -> sz -> rx, plus the random virtual-link excess delay.
RayTap nlos_tap(const NlosGeometry &g, double virtual_delay, const params::PowerDelayParams &pd, double shadow_db,
                double phi0, double lambda, bool scatterer_doppler);

double nlos_power(double delay, const params::PowerDelayParams &pd, double shadow_db);

// Weights LoS by Omega/(Omega+1), GR by eta_gr/(Omega+1), NLoS by (1-eta_gr)/(Omega+1) over unit-sum ray
// powers. Weights are renormalised over the components present. Zero amplitudes outside the window.
LinkCir assemble_link_cir(std::vector<RayTap> taps, double omega_linear, double eta_gr, bool in_window);

std::vector<double> frequency_grid(double fc, double bandwidth, std::size_t n);

// Serial reference.
TransferFunction transfer_function(const LinkCir &l, const std::vector<double> &freq, double chi, double fc);
// OpenMP over frequency points; bit-identical to the serial reference.
TransferFunction transfer_function_omp(const LinkCir &l, const std::vector<double> &freq, double chi, double fc);

struct ComponentMask
{
    bool los = true;
    bool gr = true;
    bool nlos = true;
};

// H(t, f_c). The carrier term cancels the literal path phase, leaving phi0 and the Doppler integral.
std::complex<double> carrier_response(const LinkCir &l, ComponentMask mask = {});

// Throws AssemblyError naming the missing (j, i).
CirMatrix assemble_matrix(const std::vector<LinkCir> &links, std::size_t n_uav, std::size_t n_vehicle, double time);

// Sum of squared amplitudes.
double total_power(const LinkCir &l);

} // namespace uvchan::cir
