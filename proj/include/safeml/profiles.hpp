#pragma once

#include "safeml/csv.hpp"
#include "safeml/error.hpp"
#include "safeml/model_api.hpp"
#include "safeml/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace safeml {

/// Estimated partial dependence of one numeric feature on a grid.
struct Profile {
    std::string feature;
    std::vector<double> grid;   ///< strictly increasing
    std::vector<double> values; ///< values[k] = mean response with the feature forced to grid[k]
};

/// Mean response with a categorical feature forced to each of its levels.
struct LevelProfile {
    std::string feature;
    std::vector<std::string> levels; ///< schema order
    std::vector<double> responses;
};

constexpr std::size_t default_grid_points = 1000;

/// All distinct finite values when there are at most `max_points` of them,
/// otherwise `max_points` type-7 quantiles at evenly spaced probabilities,
/// deduplicated.
inline std::vector<double> make_grid(std::span<const double> column_values, std::size_t max_points)
{
    if (max_points == 0)
        fail(ErrorCode::invalid_argument, "max_points must be positive");
    std::vector<double> sorted;
    sorted.reserve(column_values.size());
    for (double v : column_values)
        if (std::isfinite(v))
            sorted.push_back(v);
    if (sorted.empty())
        fail(ErrorCode::empty_column, "no finite values to build a grid from");
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() <= max_points)
        return distinct;

    std::vector<double> grid;
    grid.reserve(max_points);
    const double last = static_cast<double>(sorted.size() - 1);
    for (std::size_t k = 0; k < max_points; ++k) {
        const double prob = max_points == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(max_points - 1);
        const double h = last * prob;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double q = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
        if (grid.empty() || q > grid.back())
            grid.push_back(q);
    }
    return grid;
}

namespace detail {

/// For each candidate value, forces column `j` of every background row to it,
/// predicts, and averages in ascending row order. Candidates are split across
/// workers when the oracle allows concurrent calls; each mean is still summed
/// by a single worker, so the result does not depend on `workers`.
inline std::vector<double> forced_means(const PredictionOracle& oracle, const Dataset& background, std::size_t j,
                                        std::span<const double> candidates, unsigned workers)
{
    if (background.n() == 0)
        fail(ErrorCode::invalid_argument, "empty background");
    std::vector<double> out(candidates.size());
    auto run = [&](std::size_t begin, std::size_t end) {
        std::vector<double> cells(background.cells().begin(), background.cells().end());
        const std::size_t p = background.p();
        for (std::size_t k = begin; k < end; ++k) {
            for (std::size_t i = 0; i < background.n(); ++i)
                cells[i * p + j] = candidates[k];
            const auto pred = predict_batch(oracle, background.schema(), cells, background.n());
            double sum = 0.0;
            for (double v : pred)
                sum += v;
            out[k] = sum / static_cast<double>(background.n());
        }
    };
    const std::size_t m = candidates.size();
    const std::size_t threads = oracle.concurrent() ? std::min<std::size_t>(std::max(workers, 1u), m) : 1;
    if (threads <= 1) {
        run(0, m);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (m + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(m, begin + chunk);
            pool.emplace_back([&, t, begin, end] {
                try {
                    run(begin, end);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace detail

inline Profile numeric_profile(const PredictionOracle& oracle, const Dataset& background, std::string_view feature,
                               std::span<const double> grid, unsigned workers = 1)
{
    const auto j = find_column(background.schema(), feature);
    if (!j)
        fail(ErrorCode::schema_mismatch, "no feature '" + std::string(feature) + "'");
    if (background.column(*j).is_categorical())
        fail(ErrorCode::invalid_argument, "feature '" + std::string(feature) + "' is categorical");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            fail(ErrorCode::invalid_argument, "grid must be strictly increasing");
    Profile prof{std::string(feature), std::vector<double>(grid.begin(), grid.end()), {}};
    prof.values = detail::forced_means(oracle, background, *j, grid, workers);
    return prof;
}

inline LevelProfile categorical_profile(const PredictionOracle& oracle, const Dataset& background,
                                        std::string_view feature, unsigned workers = 1)
{
    const auto j = find_column(background.schema(), feature);
    if (!j)
        fail(ErrorCode::schema_mismatch, "no feature '" + std::string(feature) + "'");
    const auto& col = background.column(*j);
    if (!col.is_categorical())
        fail(ErrorCode::invalid_argument, "feature '" + std::string(feature) + "' is numeric");
    std::vector<double> indices(col.levels.size());
    for (std::size_t l = 0; l < indices.size(); ++l)
        indices[l] = static_cast<double>(l);
    return {col.name, col.levels, detail::forced_means(oracle, background, *j, indices, workers)};
}

/// Two-column CSV "grid,value".
inline void write_profile(std::ostream& out, const Profile& prof)
{
    out << "grid,value\n";
    for (std::size_t k = 0; k < prof.grid.size(); ++k)
        out << csv::format_number(prof.grid[k]) << ',' << csv::format_number(prof.values[k]) << '\n';
}

/// Two-column CSV "level,value".
inline void write_profile(std::ostream& out, const LevelProfile& prof)
{
    out << "level,value\n";
    for (std::size_t l = 0; l < prof.levels.size(); ++l) {
        csv::write_field(out, prof.levels[l]);
        out << ',' << csv::format_number(prof.responses[l]) << '\n';
    }
}

template <class P>
void emit_profile(const P& prof, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::invalid_argument, "cannot write '" + path + "'");
    write_profile(out, prof);
}

} // namespace safeml
