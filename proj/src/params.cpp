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

#include "uvchan/params.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace uvchan::params
{

namespace
{

template <class E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<std::pair<E, std::string_view>, N> &names)
{
    for (const auto &[e, n] : names)
        if (n == s)
            return e;
    return std::nullopt;
}

constexpr std::array<std::pair<Condition, std::string_view>, 3> condition_names{
    {{Condition::Low, "low"}, {Condition::Medium, "medium"}, {Condition::High, "high"}}};

constexpr std::array<std::pair<ScattererClass, std::string_view>, 3> class_names{
    {{ScattererClass::Static, "static"},
     {ScattererClass::TerrestrialDynamic, "terrestrial-dynamic"},
     {ScattererClass::AerialDynamic, "aerial-dynamic"}}};

constexpr std::array<std::pair<Family, std::string_view>, 8> family_names{{{Family::ScattererNumber, "scatterer-number"},
                                                                            {Family::ClusterNumber, "cluster-number"},
                                                                            {Family::Distance, "distance"},
                                                                            {Family::Aaod, "aaod"},
                                                                            {Family::Aaoa, "aaoa"},
                                                                            {Family::Eaod, "eaod"},
                                                                            {Family::Eaoa, "eaoa"},
                                                                            {Family::PowerDelay, "power-delay"}}};

template <class E, std::size_t N>
std::string_view name_of(E e, const std::array<std::pair<E, std::string_view>, N> &names)
{
    for (const auto &[v, n] : names)
        if (v == e)
            return n;
    return "?";
}

std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_number(const nlohmann::json &rec, const std::string &field, const std::string &where)
{
    if (!rec.contains(field))
        throw ParseError(where + ": missing field '" + field + "'");
    const auto &v = rec.at(field);
    if (v.is_number())
        return v.get<double>();
    if (!v.is_string())
        throw ParseError(where + ": field '" + field + "' is not a decimal number");
    const auto s = v.get<std::string>();
    double out = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(out))
        throw ParseError(where + ": field '" + field + "' is not a decimal number: '" + s + "'");
    return out;
}

} // namespace

std::string_view to_string(Condition c) { return name_of(c, condition_names); }
std::string_view to_string(ScattererClass c) { return name_of(c, class_names); }
std::string_view to_string(Family f) { return name_of(f, family_names); }
std::optional<Condition> parse_condition(std::string_view s) { return lookup(s, condition_names); }
std::optional<ScattererClass> parse_class(std::string_view s) { return lookup(s, class_names); }
std::optional<Family> parse_family(std::string_view s) { return lookup(s, family_names); }

std::string key_name(const Key &k)
{
    return std::string(to_string(k.fam)) + "/" + std::string(to_string(k.cls)) + "/" + std::string(to_string(k.cond));
}

// ----- CDFs -------------------------------------------------------------------

double logistic_cdf(double x, const LogisticParams &p) { return 1.0 / (1.0 + std::exp(-(x - p.mu) / p.gamma)); }

double gamma_cdf(double x, const GammaParams &p)
{
    if (x < 0.0)
        throw std::domain_error("gamma_cdf: negative argument");
    if (x == 0.0)
        return 0.0;
    return boost::math::gamma_p(p.alpha, p.beta * x);
}

double rayleigh_cdf(double x, const RayleighParams &p)
{
    if (x < 0.0)
        throw std::domain_error("rayleigh_cdf: negative argument");
    return -std::expm1(-x * x / (2.0 * p.sigma * p.sigma));
}

double gaussian_cdf(double x, const GaussianParams &p)
{
    return 0.5 * std::erfc(-(x - p.mu) / (p.sigma * std::sqrt(2.0)));
}

double cdf(const Record &r, double x)
{
    return std::visit(
        [x](const auto &p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LogisticParams>)
                return logistic_cdf(x, p);
            else if constexpr (std::is_same_v<T, GammaParams>)
                return x <= 0.0 ? 0.0 : gamma_cdf(x, p);
            else if constexpr (std::is_same_v<T, RayleighParams>)
                return x <= 0.0 ? 0.0 : rayleigh_cdf(x, p);
            else if constexpr (std::is_same_v<T, GaussianParams>)
                return gaussian_cdf(x, p);
            else
                return p.sigma_e > 0.0 ? gaussian_cdf(x, GaussianParams{0.0, p.sigma_e}) : (x >= 0.0 ? 1.0 : 0.0);
        },
        r);
}

double sample(const Record &r, Stream &s)
{
    return std::visit(
        [&s](const auto &p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LogisticParams>)
            {
                const double u = s.uniform();
                return p.mu + p.gamma * std::log(u / (1.0 - u));
            }
            else if constexpr (std::is_same_v<T, GammaParams>)
                return boost::math::gamma_p_inv(p.alpha, s.uniform()) / p.beta;
            else if constexpr (std::is_same_v<T, RayleighParams>)
                return p.sigma * std::sqrt(-2.0 * std::log1p(-s.uniform()));
            else if constexpr (std::is_same_v<T, GaussianParams>)
                return p.mu + p.sigma * s.normal();
            else
                return p.sigma_e * s.normal();
        },
        r);
}

bool redraws_negative(Family f)
{
    return f == Family::ScattererNumber || f == Family::ClusterNumber || f == Family::Distance;
}

void validate(const Record &r)
{
    std::visit(
        [](const auto &p) {
            using T = std::decay_t<decltype(p)>;
            auto bad = [](bool c, const char *what) {
                if (c)
                    throw std::invalid_argument(what);
            };
            if constexpr (std::is_same_v<T, LogisticParams>)
                bad(!(p.gamma > 0.0) || !std::isfinite(p.mu), "logistic: gamma must be > 0");
            else if constexpr (std::is_same_v<T, GammaParams>)
                bad(!(p.alpha > 0.0 && p.beta > 0.0), "gamma: alpha and beta must be > 0");
            else if constexpr (std::is_same_v<T, RayleighParams>)
                bad(!(p.sigma > 0.0), "rayleigh: sigma must be > 0");
            else if constexpr (std::is_same_v<T, GaussianParams>)
                bad(!(p.sigma > 0.0) || !std::isfinite(p.mu), "gaussian: sigma must be > 0");
            else
                bad(!(p.xi > 0.0 && p.sigma_e >= 0.0) || !std::isfinite(p.eta), "power-delay: xi > 0, sigma_e >= 0");
        },
        r);
}

std::size_t expected_alternative(ScattererClass cls, Family fam)
{
    switch (fam)
    {
    case Family::ScattererNumber:
    case Family::ClusterNumber:
        return 0;
    case Family::Distance:
        return cls == ScattererClass::Static ? 1 : 2;
    case Family::Aaod:
    case Family::Aaoa:
    case Family::Eaod:
    case Family::Eaoa:
        return 3;
    case Family::PowerDelay:
        return 4;
    }
    return 0;
}

// ----- ParameterTable -----------------------------------------------------------

void ParameterTable::set(const Key &k, const Record &r)
{
    if (!defined(k.cls, k.cond))
        throw AbsentParameter("no parameters exist for " + key_name(k));
    if (r.index() != expected_alternative(k.cls, k.fam))
        throw std::invalid_argument("wrong distribution kind for " + key_name(k));
    validate(r);
    records_[k] = r;
}

std::optional<Record> ParameterTable::find(const Key &k) const
{
    auto it = records_.find(k);
    if (it == records_.end())
        return std::nullopt;
    return it->second;
}

const Record &ParameterTable::at(const Key &k) const
{
    auto it = records_.find(k);
    if (it == records_.end())
        throw AbsentParameter("absent parameter " + key_name(k));
    return it->second;
}

double ParameterTable::draw(ScattererClass cls, Condition cond, Family fam, Stream &s) const
{
    const Record &r = at({cls, cond, fam});
    double x = sample(r, s);
    if (!redraws_negative(fam))
        return x;
    // P(x < 0) < 0.5 for every tabulated row, so this terminates quickly.
    for (int i = 0; i < 10000 && x < 0.0; ++i)
        x = sample(r, s);
    return x < 0.0 ? 0.0 : x;
}

// ----- serialization -------------------------------------------------------------

nlohmann::json table_to_json(const ParameterTable &t)
{
    nlohmann::json recs = nlohmann::json::array();
    for (const auto &[k, r] : t.records())
    {
        nlohmann::json j;
        j["class"] = to_string(k.cls);
        j["condition"] = to_string(k.cond);
        j["family"] = to_string(k.fam);
        std::visit(
            [&j](const auto &p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, LogisticParams>)
                {
                    j["distribution"] = "logistic";
                    j["mu"] = format_number(p.mu);
                    j["gamma"] = format_number(p.gamma);
                }
                else if constexpr (std::is_same_v<T, GammaParams>)
                {
                    j["distribution"] = "gamma";
                    j["alpha"] = format_number(p.alpha);
                    j["beta"] = format_number(p.beta);
                }
                else if constexpr (std::is_same_v<T, RayleighParams>)
                {
                    j["distribution"] = "rayleigh";
                    j["sigma"] = format_number(p.sigma);
                }
                else if constexpr (std::is_same_v<T, GaussianParams>)
                {
                    j["distribution"] = "gaussian";
                    j["mu"] = format_number(p.mu);
                    j["sigma"] = format_number(p.sigma);
                }
                else
                {
                    j["distribution"] = "power-delay";
                    j["xi"] = format_number(p.xi);
                    j["eta"] = format_number(p.eta);
                    j["sigma_e"] = format_number(p.sigma_e);
                }
            },
            r);
        recs.push_back(std::move(j));
    }
    nlohmann::json out;
    out["schema_version"] = 1;
    out["records"] = std::move(recs);
    return out;
}

ParameterTable table_from_json(const nlohmann::json &j)
{
    if (!j.is_object())
        throw ParseError("parameter file: top level must be an object");
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != 1)
        throw ParseError("schema_version: expected 1");
    if (!j.contains("records") || !j.at("records").is_array())
        throw ParseError("records: expected an array");

    ParameterTable t;
    std::set<Key> seen;
    std::size_t idx = 0;
    for (const auto &rec : j.at("records"))
    {
        const std::string where0 = "records[" + std::to_string(idx++) + "]";
        auto str_field = [&](const char *f) {
            if (!rec.is_object() || !rec.contains(f) || !rec.at(f).is_string())
                throw ParseError(where0 + ": missing string field '" + f + "'");
            return rec.at(f).get<std::string>();
        };
        const auto cls_s = str_field("class");
        const auto cond_s = str_field("condition");
        const auto fam_s = str_field("family");
        auto cls = parse_class(cls_s);
        auto cond = parse_condition(cond_s);
        auto fam = parse_family(fam_s);
        if (!cls)
            throw ParseError(where0 + ": unknown class '" + cls_s + "'");
        if (!cond)
            throw ParseError(where0 + ": unknown condition '" + cond_s + "'");
        if (!fam)
            throw ParseError(where0 + ": unknown family '" + fam_s + "'");
        const Key k{*cls, *cond, *fam};
        const std::string where = key_name(k);
        if (!defined(k.cls, k.cond))
            throw ParseError(where + ": combination has no parameters and must be omitted");
        if (!seen.insert(k).second)
            throw ParseError(where + ": duplicate record");

        Record r;
        switch (expected_alternative(k.cls, k.fam))
        {
        case 0:
            r = LogisticParams{parse_number(rec, "mu", where), parse_number(rec, "gamma", where)};
            break;
        case 1:
            r = GammaParams{parse_number(rec, "alpha", where), parse_number(rec, "beta", where)};
            break;
        case 2:
            r = RayleighParams{parse_number(rec, "sigma", where)};
            break;
        case 3:
            r = GaussianParams{parse_number(rec, "mu", where), parse_number(rec, "sigma", where)};
            break;
        default:
            r = PowerDelayParams{parse_number(rec, "xi", where), parse_number(rec, "eta", where),
                                 parse_number(rec, "sigma_e", where)};
            break;
        }
        try
        {
            t.set(k, r);
        }
        catch (const std::exception &e)
        {
            throw ParseError(where + ": " + e.what());
        }
    }

    for (auto fam : all_families)
        for (auto cls : all_classes)
            for (auto cond : all_conditions)
                if (defined(cls, cond) && !seen.count(Key{cls, cond, fam}))
                    throw ParseError(key_name(Key{cls, cond, fam}) + ": missing required record");
    return t;
}

void save_table(const ParameterTable &t, const std::filesystem::path &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot open for writing: " + path.string());
    f << table_to_json(t).dump(2) << '\n';
    if (!f)
        throw std::runtime_error("write failed: " + path.string());
}

ParameterTable load_table(const std::filesystem::path &path)
{
    std::ifstream f(path);
    if (!f)
        throw ParseError("cannot open parameter file: " + path.string());
    nlohmann::json j;
    try
    {
        f >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ParseError(path.string() + ": malformed structured text: " + e.what());
    }
    return table_from_json(j);
}

// ----- power-delay fit ------------------------------------------------------------

PowerDelayParams fit_power_delay(std::span<const std::pair<double, double>> delay_power)
{
    const std::size_t n = delay_power.size();
    if (n < 2)
        throw FitError("fit_power_delay: need at least 2 points");
    double mx = 0.0, my = 0.0;
    double tmin = delay_power.front().first, tmax = tmin;
    for (const auto &[tau, p] : delay_power)
    {
        tmin = std::min(tmin, tau);
        tmax = std::max(tmax, tau);
        if (!(p > 0.0) || !(tau >= 0.0))
            throw FitError("fit_power_delay: powers must be > 0 and delays >= 0");
        mx += tau;
        my += -std::log(p);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto &[tau, p] : delay_power)
    {
        const double dx = tau - mx;
        sxx += dx * dx;
        sxy += dx * (-std::log(p) - my);
    }
    if (!(tmax > tmin) || !(sxx > 0.0))
        throw FitError("fit_power_delay: degenerate delays");
    const double xi = sxy / sxx;
    const double eta = my - xi * mx;
    double sigma_e = 0.0;
    if (n > 2)
    {
        double ssr = 0.0;
        for (const auto &[tau, p] : delay_power)
        {
            const double r = -std::log(p) - (xi * tau + eta);
            ssr += r * r;
        }
        sigma_e = std::sqrt(ssr / static_cast<double>(n - 2)) * 10.0 / std::log(10.0);
    }
    return {xi, eta, sigma_e};
}

} // namespace uvchan::params
