#pragma once

#include "safeml/error.hpp"
#include "safeml/surrogate.hpp"
#include "safeml/tabular.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace safeml {

/// Structure planted by a generator, for recovery checks.
struct GroundTruth {
    std::map<std::string, std::vector<double>> numeric_thresholds;
    std::map<std::string, std::map<std::string, std::size_t>> level_groups;
};

struct Generated {
    Dataset data;
    GroundTruth truth;
};

namespace detail {

inline std::vector<std::string> numbered_levels(const std::string& prefix, std::size_t count)
{
    std::vector<std::string> out;
    for (std::size_t l = 0; l < count; ++l) {
        std::string num = std::to_string(l);
        out.push_back(prefix + std::string(num.size() < 2 ? 2 - num.size() : 0, '0') + num);
    }
    return out;
}

} // namespace detail

// SIMULD2: X1 ~ U(-5, 5) + N(0, 0.3); X2 has 40 levels L00..L39 drawn
// uniformly, level j belonging to group j mod 3. The class depends on a step
// function of X1 with breaks at -3 and 2.5 whose middle piece pulls the
// opposite way from the outer ones, plus a group effect:
//   logit = 3 * (s + 2 * (group - 1)),  s = -1 on [-3, 2.5), +1 elsewhere.

constexpr double simuld2_low_break = -3.0;
constexpr double simuld2_high_break = 2.5;
constexpr std::size_t simuld2_levels = 40;

/// Piece of the X1 step function: 0 below -3, 1 on [-3, 2.5), 2 from 2.5 up.
inline int simuld2_step(double x1)
{
    if (x1 < simuld2_low_break)
        return 0;
    return x1 < simuld2_high_break ? 1 : 2;
}

inline std::size_t simuld2_group(std::size_t level) { return level % 3; }

inline double simuld2_logit(double x1, std::size_t level)
{
    const double s = simuld2_step(x1) == 1 ? -1.0 : 1.0;
    return 3.0 * (s + 2.0 * (static_cast<double>(simuld2_group(level)) - 1.0));
}

inline Generated gen_simuld2(std::size_t n = 500, std::uint64_t seed = 0)
{
    if (n < 50)
        fail(ErrorCode::invalid_argument, "SIMULD2 needs n >= 50");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::uniform_int_distribution<std::size_t> level(0, simuld2_levels - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    const auto labels = detail::numbered_levels("L", simuld2_levels);
    Schema schema{{"X1", ColumnKind::numeric, {}}, {"X2", ColumnKind::categorical, labels}};
    std::vector<double> cells;
    std::vector<double> y;
    cells.reserve(2 * n);
    y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = unif(rng) + noise(rng);
        const std::size_t lv = level(rng);
        const double p = sigmoid(simuld2_logit(x1, lv));
        cells.push_back(x1);
        cells.push_back(static_cast<double>(lv));
        y.push_back(coin(rng) < p ? 1.0 : 0.0);
    }
    GroundTruth truth;
    truth.numeric_thresholds["X1"] = {simuld2_low_break, simuld2_high_break};
    for (std::size_t l = 0; l < simuld2_levels; ++l)
        truth.level_groups["X2"][labels[l]] = simuld2_group(l);
    return {Dataset(std::move(schema), std::move(cells), std::move(y), TargetKind::binary, "y"), std::move(truth)};
}

// SIMULD1: two numeric features on U(-5, 5);
//   logit = 3 * (X1 >= 1 ? 1 : -1) + 0.8 * X2.

constexpr double simuld1_break = 1.0;

inline Generated gen_simuld1(std::size_t n = 500, std::uint64_t seed = 0)
{
    if (n < 50)
        fail(ErrorCode::invalid_argument, "SIMULD1 needs n >= 50");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Schema schema{{"X1", ColumnKind::numeric, {}}, {"X2", ColumnKind::numeric, {}}};
    std::vector<double> cells;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = unif(rng);
        const double x2 = unif(rng);
        const double logit = 3.0 * (x1 >= simuld1_break ? 1.0 : -1.0) + 0.8 * x2;
        cells.push_back(x1);
        cells.push_back(x2);
        y.push_back(coin(rng) < sigmoid(logit) ? 1.0 : 0.0);
    }
    GroundTruth truth;
    truth.numeric_thresholds["X1"] = {simuld1_break};
    return {Dataset(std::move(schema), std::move(cells), std::move(y), TargetKind::binary, "y"), std::move(truth)};
}

// Apartments: price per square metre from construction year (piecewise
// constant, breaks at 1940 and 1990), district (10 levels in 3 price groups)
// and a mild linear surface effect, plus N(0, 300) noise.

constexpr double apartments_year_breaks[] = {1940.0, 1990.0};
constexpr std::size_t apartments_districts = 10;

inline std::size_t apartments_group(std::size_t district)
{
    static constexpr std::size_t groups[apartments_districts] = {0, 2, 1, 0, 1, 2, 0, 1, 0, 2};
    return groups[district];
}

inline double apartments_price(double year, double surface, std::size_t district)
{
    const double year_effect = year < 1940.0 ? 800.0 : (year < 1990.0 ? 0.0 : 2000.0);
    static constexpr double group_effect[] = {0.0, 1000.0, 2500.0};
    return 5000.0 + year_effect + group_effect[apartments_group(district)] - 10.0 * surface;
}

inline Generated gen_apartments(std::size_t n = 1000, std::uint64_t seed = 0)
{
    if (n < 50)
        fail(ErrorCode::invalid_argument, "apartments needs n >= 50");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> year(1920, 2010);
    std::uniform_real_distribution<double> surface(20.0, 150.0);
    std::uniform_int_distribution<std::size_t> district(0, apartments_districts - 1);
    std::normal_distribution<double> noise(0.0, 300.0);
    const auto labels = detail::numbered_levels("D", apartments_districts);
    Schema schema{{"year", ColumnKind::numeric, {}},
                  {"surface", ColumnKind::numeric, {}},
                  {"district", ColumnKind::categorical, labels}};
    std::vector<double> cells;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
        const double yr = year(rng);
        const double sf = std::round(surface(rng));
        const std::size_t d = district(rng);
        cells.insert(cells.end(), {yr, sf, static_cast<double>(d)});
        y.push_back(apartments_price(yr, sf, d) + noise(rng));
    }
    GroundTruth truth;
    truth.numeric_thresholds["year"] = {apartments_year_breaks[0], apartments_year_breaks[1]};
    for (std::size_t l = 0; l < apartments_districts; ++l)
        truth.level_groups["district"][labels[l]] = apartments_group(l);
    return {Dataset(std::move(schema), std::move(cells), std::move(y), TargetKind::continuous, "m2_price"),
            std::move(truth)};
}

} // namespace safeml
