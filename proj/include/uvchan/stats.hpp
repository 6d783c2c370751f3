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

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvchan::stats
{

using cplx = std::complex<double>;

enum class CorrelationKind
{
    TACF,
    SpaceCCF,
    FCF,
    TSFCF
};

struct CorrelationCurve
{
    CorrelationKind kind = CorrelationKind::TACF;
    double anchor = 0.0;     // t (s) or f (Hz) of the reference sample
    std::vector<double> lag; // s or Hz
    std::vector<cplx> value;
    bool normalized = true;
};

// Sample mean of conj(x_r) * y_r over realisations, in realisation order.
// Normalised by sqrt(mean|x|^2 * mean|y|^2). Needs >= 2 realisations.
cplx correlate(std::span<const cplx> x, std::span<const cplx> y, bool normalized = true);

// Realisation-major samples on a uniform axis: trace[r][n].
using Trace = std::vector<cplx>;
// trace[r][n][k]: realisation r, time n, frequency k.
using Grid = std::vector<std::vector<cplx>>;

struct TsfLag
{
    std::size_t dt = 0; // snapshots
    std::size_t df = 0; // frequency bins
};

// R(t, f; dt, df) between two links a and b. Throws std::out_of_range when anchor + lag leaves the data.
CorrelationCurve tsf_cf(const std::vector<Grid> &a, const std::vector<Grid> &b, std::size_t anchor_t,
                        std::size_t anchor_f, const std::vector<TsfLag> &lags, double dt, double df,
                        bool normalized = true);

CorrelationCurve tacf(const std::vector<Trace> &traces, std::size_t anchor, std::size_t max_lag, double dt,
                      bool normalized = true);
CorrelationCurve fcf(const std::vector<Trace> &spectra, std::size_t anchor_bin, std::size_t max_lag, double df,
                     bool normalized = true);
// Zero-lag correlation between two links' samples at one (t, f).
cplx space_ccf(std::span<const cplx> link_a, std::span<const cplx> link_b, bool normalized = true);

// ----- Delay spread and TSI --------------------------------------------------------

struct DelaySpreadTrace
{
    std::vector<double> time;
    std::vector<double> a2;      // s
    std::vector<char> defined;   // 0 where no NLoS power
};

// sqrt(sum p tau^2 / sum p - (sum p tau / sum p)^2); nullopt when the total power is zero.
std::optional<double> delay_spread(std::span<const double> power, std::span<const double> delay);

// NLoS taps of every link jointly, weighted by squared amplitudes.
std::optional<double> delay_spread(const cir::CirMatrix &m);
std::vector<std::optional<double>> delay_spread_per_link(const cir::CirMatrix &m);

struct TsiSample
{
    double anchor = 0.0;
    double tsi = 0.0;
    bool censored = false;
    bool defined = true;
};

// First snapshot after the anchor where |A2(t+dt) - A2(t)| / A2(t) exceeds the threshold.
// An undefined A2 later in the trace counts as an exceedance.
TsiSample tsi(const DelaySpreadTrace &trace, std::size_t anchor, double threshold = 0.1);

// ----- DPSD ------------------------------------------------------------------------

struct DpsdArray
{
    double anchor = 0.0;
    std::vector<double> freq;  // Hz, symmetric around 0
    std::vector<double> power; // linear, sums to the zero-lag TACF
};

// Hermitian extension of the lag curve, Blackman window, zero padding, DFT. Throws for a non-uniform lag grid.
DpsdArray dpsd(const CorrelationCurve &tacf, std::size_t zero_pad = 4);

// Geometric over arithmetic mean of the DPSD for |f| <= band_hz.
double spectral_flatness(const DpsdArray &d, double band_hz);

double to_db(double linear);

} // namespace uvchan::stats
