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

#include "uvchan/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace uvchan::stats
{

cplx correlate(std::span<const cplx> x, std::span<const cplx> y, bool normalized)
{
    if (x.size() != y.size())
        throw std::invalid_argument("correlate: realisation counts differ");
    if (x.size() < 2)
        throw std::invalid_argument("correlate: at least 2 realisations required");
    cplx acc{0.0, 0.0};
    double px = 0.0, py = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r)
    {
        acc += std::conj(x[r]) * y[r];
        px += std::norm(x[r]);
        py += std::norm(y[r]);
    }
    const double n = static_cast<double>(x.size());
    acc /= n;
    if (!normalized)
        return acc;
    const double den = std::sqrt((px / n) * (py / n));
    return den > 0.0 ? acc / den : cplx{0.0, 0.0};
}

CorrelationCurve tsf_cf(const std::vector<Grid> &a, const std::vector<Grid> &b, std::size_t anchor_t,
                        std::size_t anchor_f, const std::vector<TsfLag> &lags, double dt, double df, bool normalized)
{
    if (a.size() != b.size())
        throw std::invalid_argument("tsf_cf: realisation counts differ");
    CorrelationCurve c;
    c.kind = CorrelationKind::TSFCF;
    c.anchor = static_cast<double>(anchor_t) * dt;
    c.normalized = normalized;
    std::vector<cplx> x(a.size()), y(a.size());
    for (const auto &lag : lags)
    {
        for (std::size_t r = 0; r < a.size(); ++r)
        {
            const auto &ga = a[r];
            const auto &gb = b[r];
            if (anchor_t >= ga.size() || anchor_f >= ga[anchor_t].size() || anchor_t + lag.dt >= gb.size() ||
                anchor_f + lag.df >= gb[anchor_t + lag.dt].size())
                throw std::out_of_range("tsf_cf: anchor + lag outside the run");
            x[r] = ga[anchor_t][anchor_f];
            y[r] = gb[anchor_t + lag.dt][anchor_f + lag.df];
        }
        c.lag.push_back(static_cast<double>(lag.dt) * dt + static_cast<double>(lag.df) * df);
        c.value.push_back(correlate(x, y, normalized));
    }
    return c;
}

namespace
{

CorrelationCurve lag_curve(CorrelationKind kind, const std::vector<Trace> &traces, std::size_t anchor,
                           std::size_t max_lag, double step, bool normalized)
{
    CorrelationCurve c;
    c.kind = kind;
    c.anchor = static_cast<double>(anchor) * step;
    c.normalized = normalized;
    std::vector<cplx> x(traces.size()), y(traces.size());
    for (std::size_t k = 0; k <= max_lag; ++k)
    {
        for (std::size_t r = 0; r < traces.size(); ++r)
        {
            if (anchor + k >= traces[r].size())
                throw std::out_of_range("correlation: anchor + lag outside the run");
            x[r] = traces[r][anchor];
            y[r] = traces[r][anchor + k];
        }
        c.lag.push_back(static_cast<double>(k) * step);
        c.value.push_back(correlate(x, y, normalized));
    }
    return c;
}

} // namespace

CorrelationCurve tacf(const std::vector<Trace> &traces, std::size_t anchor, std::size_t max_lag, double dt,
                      bool normalized)
{
    return lag_curve(CorrelationKind::TACF, traces, anchor, max_lag, dt, normalized);
}

CorrelationCurve fcf(const std::vector<Trace> &spectra, std::size_t anchor_bin, std::size_t max_lag, double df,
                     bool normalized)
{
    return lag_curve(CorrelationKind::FCF, spectra, anchor_bin, max_lag, df, normalized);
}

cplx space_ccf(std::span<const cplx> link_a, std::span<const cplx> link_b, bool normalized)
{
    return correlate(link_a, link_b, normalized);
}

// ----- Delay spread ----------------------------------------------------------------

std::optional<double> delay_spread(std::span<const double> power, std::span<const double> delay)
{
    if (power.size() != delay.size())
        throw std::invalid_argument("delay_spread: size mismatch");
    double p_sum = 0.0;
    double t_ref = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < power.size(); ++k)
        if (power[k] > 0.0)
        {
            p_sum += power[k];
            t_ref = std::min(t_ref, delay[k]);
        }
    if (!(p_sum > 0.0))
        return std::nullopt;
    // Moments about the earliest delay to limit cancellation.
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k)
    {
        if (!(power[k] > 0.0))
            continue;
        const double w = power[k] / p_sum;
        const double d = delay[k] - t_ref;
        m1 += w * d;
        m2 += w * d * d;
    }
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

namespace
{

void collect_nlos(const cir::LinkCir &l, std::vector<double> &p, std::vector<double> &d)
{
    for (const auto &t : l.taps)
        if (t.kind == cir::TapKind::NLoS)
        {
            p.push_back(t.amplitude * t.amplitude);
            d.push_back(t.delay);
        }
}

} // namespace

std::optional<double> delay_spread(const cir::CirMatrix &m)
{
    std::vector<double> p, d;
    for (const auto &row : m.grid)
        for (const auto &l : row)
            collect_nlos(l, p, d);
    return delay_spread(p, d);
}

std::vector<std::optional<double>> delay_spread_per_link(const cir::CirMatrix &m)
{
    std::vector<std::optional<double>> out;
    for (const auto &row : m.grid)
        for (const auto &l : row)
        {
            std::vector<double> p, d;
            collect_nlos(l, p, d);
            out.push_back(delay_spread(p, d));
        }
    return out;
}

TsiSample tsi(const DelaySpreadTrace &trace, std::size_t anchor, double threshold)
{
    if (anchor >= trace.a2.size() || trace.time.size() != trace.a2.size() || trace.defined.size() != trace.a2.size())
        throw std::out_of_range("tsi: anchor outside the trace");
    TsiSample s;
    s.anchor = trace.time[anchor];
    const double ref = trace.a2[anchor];
    if (!trace.defined[anchor] || !(ref > 0.0))
    {
        s.defined = false;
        return s;
    }
    for (std::size_t m = anchor + 1; m < trace.a2.size(); ++m)
    {
        if (!trace.defined[m] || std::abs(trace.a2[m] - ref) / ref > threshold)
        {
            s.tsi = trace.time[m] - trace.time[anchor];
            return s;
        }
    }
    s.censored = true;
    s.tsi = trace.time.back() - trace.time[anchor];
    return s;
}

// ----- DPSD ------------------------------------------------------------------------

DpsdArray dpsd(const CorrelationCurve &tacf, std::size_t zero_pad)
{
    const std::size_t n_lag = tacf.value.size();
    if (n_lag < 2 || tacf.lag.size() != n_lag)
        throw std::invalid_argument("dpsd: at least two lags required");
    const double dt = tacf.lag[1] - tacf.lag[0];
    if (!(dt > 0.0) || tacf.lag[0] != 0.0)
        throw std::invalid_argument("dpsd: lag grid must start at 0 and increase");
    for (std::size_t k = 1; k < n_lag; ++k)
        if (std::abs((tacf.lag[k] - tacf.lag[k - 1]) - dt) > 1e-9 * dt)
            throw std::invalid_argument("dpsd: non-uniform lag grid");

    const std::size_t L = n_lag - 1;
    const std::size_t N = std::max<std::size_t>(1, zero_pad) * (2 * L + 1) + 1; // odd: symmetric axis
    fftw_complex *buf = fftw_alloc_complex(N);
    for (std::size_t n = 0; n < N; ++n)
        buf[n][0] = buf[n][1] = 0.0;
    auto window = [L](std::size_t k) {
        const double x = std::numbers::pi * static_cast<double>(k) / static_cast<double>(L);
        return 0.42 + 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
    };
    for (std::size_t k = 0; k <= L; ++k)
    {
        const cplx v = tacf.value[k] * window(k);
        buf[k][0] = v.real();
        buf[k][1] = v.imag();
        if (k > 0)
        {
            buf[N - k][0] = v.real();
            buf[N - k][1] = -v.imag();
        }
    }
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(N), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    DpsdArray d;
    d.anchor = tacf.anchor;
    d.freq.resize(N);
    d.power.resize(N);
    const std::size_t half = (N - 1) / 2;
    const double df = 1.0 / (static_cast<double>(N) * dt);
    for (std::size_t m = 0; m < N; ++m)
    {
        // Output index m maps to bin (m - half); source bin index modulo N.
        const std::size_t src = (m + N - half) % N;
        d.freq[m] = (static_cast<double>(m) - static_cast<double>(half)) * df;
        d.power[m] = buf[src][0] / static_cast<double>(N);
    }
    fftw_free(buf);
    return d;
}

double spectral_flatness(const DpsdArray &d, double band_hz)
{
    double peak = 0.0;
    for (std::size_t m = 0; m < d.power.size(); ++m)
        if (std::abs(d.freq[m]) <= band_hz)
            peak = std::max(peak, d.power[m]);
    if (!(peak > 0.0))
        return 0.0;
    const double floor = 1e-12 * peak;
    double log_sum = 0.0, sum = 0.0;
    std::size_t n = 0;
    for (std::size_t m = 0; m < d.power.size(); ++m)
    {
        if (std::abs(d.freq[m]) > band_hz)
            continue;
        const double p = std::max(d.power[m], floor);
        log_sum += std::log(p);
        sum += p;
        ++n;
    }
    return std::exp(log_sum / static_cast<double>(n)) / (sum / static_cast<double>(n));
}

double to_db(double linear)
{
    return 10.0 * std::log10(std::max(std::abs(linear), 1e-300));
}

} // namespace uvchan::stats
