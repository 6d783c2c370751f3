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

#include "uvchan/rng.hpp"

#include <array>
#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <json.hpp>

namespace uvchan::params
{

enum class Condition
{
    Low,
    Medium,
    High
};

enum class ScattererClass
{
    Static,
    TerrestrialDynamic,
    AerialDynamic
};

enum class Family
{
    ScattererNumber,
    ClusterNumber,
    Distance,
    Aaod,
    Aaoa,
    Eaod,
    Eaoa,
    PowerDelay
};

inline constexpr std::array<Condition, 3> all_conditions{Condition::Low, Condition::Medium, Condition::High};
inline constexpr std::array<ScattererClass, 3> all_classes{ScattererClass::Static, ScattererClass::TerrestrialDynamic,
                                                           ScattererClass::AerialDynamic};
inline constexpr std::array<Family, 8> all_families{Family::ScattererNumber, Family::ClusterNumber, Family::Distance,
                                                    Family::Aaod,            Family::Aaoa,          Family::Eaod,
                                                    Family::Eaoa,            Family::PowerDelay};

std::string_view to_string(Condition c);
std::string_view to_string(ScattererClass c);
std::string_view to_string(Family f);
std::optional<Condition> parse_condition(std::string_view s);
std::optional<ScattererClass> parse_class(std::string_view s);
std::optional<Family> parse_family(std::string_view s);

struct LogisticParams
{
    double mu;
    double gamma; // > 0
    bool operator==(const LogisticParams &) const = default;
};

struct GammaParams
{
    double alpha; // shape, > 0
    double beta;  // rate, > 0
    bool operator==(const GammaParams &) const = default;
};

struct RayleighParams
{
    double sigma; // > 0
    bool operator==(const RayleighParams &) const = default;
};

struct GaussianParams
{
    double mu;
    double sigma; // > 0
    bool operator==(const GaussianParams &) const = default;
};

struct PowerDelayParams
{
    double xi;      // 1/s, > 0
    double eta;     // dimensionless
    double sigma_e; // dB, >= 0
    bool operator==(const PowerDelayParams &) const = default;
};

using Record = std::variant<LogisticParams, GammaParams, RayleighParams, GaussianParams, PowerDelayParams>;

// Aerial-dynamic rows do not exist at Low.
class AbsentParameter : public std::out_of_range
{
  public:
    using std::out_of_range::out_of_range;
};

class ParseError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// ----- CDFs -----------------------------------------------------------------
double logistic_cdf(double x, const LogisticParams &p);
double gamma_cdf(double x, const GammaParams &p);       // x >= 0, throws std::domain_error
double rayleigh_cdf(double x, const RayleighParams &p); // x >= 0, throws std::domain_error
double gaussian_cdf(double x, const GaussianParams &p);

// Power-delay records: CDF of the shadowing term Z ~ N(0, sigma_e^2), dB.
double cdf(const Record &r, double x);

// Inverse-transform draw; no truncation.
double sample(const Record &r, Stream &s);

// Redraw-on-negative applies to count and distance families only.
bool redraws_negative(Family f);

// Throws std::invalid_argument for non-positive scale/shape parameters.
void validate(const Record &r);

struct Key
{
    ScattererClass cls;
    Condition cond;
    Family fam;
    auto operator<=>(const Key &) const = default;
};

std::string key_name(const Key &k);

// Which record alternative a (class, family) pair holds.
std::size_t expected_alternative(ScattererClass cls, Family fam);

inline bool defined(ScattererClass cls, Condition cond)
{
    return !(cls == ScattererClass::AerialDynamic && cond == Condition::Low);
}

class ParameterTable
{
  public:
    void set(const Key &k, const Record &r);
    std::optional<Record> find(const Key &k) const;
    const Record &at(const Key &k) const; // throws AbsentParameter

    template <class T>
    const T &get(ScattererClass cls, Condition cond, Family fam) const
    {
        return std::get<T>(at({cls, cond, fam}));
    }

    // Sampling with the family's negative-value rule applied.
    double draw(ScattererClass cls, Condition cond, Family fam, Stream &s) const;

    const std::map<Key, Record> &records() const { return records_; }
    bool operator==(const ParameterTable &) const = default;

  private:
    std::map<Key, Record> records_;
};

const ParameterTable &default_table();

nlohmann::json table_to_json(const ParameterTable &t);
ParameterTable table_from_json(const nlohmann::json &j); // throws ParseError naming the key
void save_table(const ParameterTable &t, const std::filesystem::path &path);
ParameterTable load_table(const std::filesystem::path &path);

// OLS of -ln P on tau. Needs >= 2 points with distinct delays; sigma_e is 0 for 2 points.
PowerDelayParams fit_power_delay(std::span<const std::pair<double, double>> delay_power);

} // namespace uvchan::params
