#pragma once

#include "safeml/error.hpp"
#include "safeml/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace safeml {

struct SegmentationResult {
    std::vector<std::size_t> cut_indices; ///< a cut after index k separates k and k + 1
    std::vector<double> segment_means;    ///< in the original scale
    double objective = 0.0;               ///< standardized SSE + penalty * cuts
};

namespace detail {

/// Zero mean, unit (population) variance. Empty when the input is constant.
inline std::vector<double> standardize(std::span<const double> values)
{
    const auto m = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    const double mean = sum / m;
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / m);
    if (!(sd > 0.0))
        return {};
    std::vector<double> z(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        z[i] = (values[i] - mean) / sd;
    return z;
}

/// Two-pass SSE of z[begin, end).
inline double segment_sse(std::span<const double> z, std::size_t begin, std::size_t end)
{
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        sum += z[i];
    const double mu = sum / static_cast<double>(end - begin);
    double sse = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        sse += (z[i] - mu) * (z[i] - mu);
    return sse;
}

/// Costs closer than this are treated as equal, so exact ties are resolved by
/// segment count and cut order rather than by rounding noise.
inline double tie_tolerance(std::size_t m) { return 1e-9 * (1.0 + static_cast<double>(m)); }

inline std::vector<double> segment_means(std::span<const double> values, std::span<const std::size_t> cuts)
{
    std::vector<double> means;
    std::size_t begin = 0;
    for (std::size_t s = 0; s <= cuts.size(); ++s) {
        const std::size_t end = s < cuts.size() ? cuts[s] + 1 : values.size();
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i)
            sum += values[i];
        means.push_back(sum / static_cast<double>(end - begin));
        begin = end;
    }
    return means;
}

} // namespace detail

/// Exact penalized least-squares segmentation of a sequence into constant
/// pieces (optimal partitioning, O(m^2) with prefix-sum segment costs).
///
/// Values are standardized first so one penalty means the same thing for any
/// response scale. Among segmentations whose costs agree to within rounding,
/// the one with fewer segments wins, then the lexicographically smallest cut
/// list. A constant or single-point sequence yields no cuts.
inline SegmentationResult segment_profile(std::span<const double> values, double penalty)
{
    if (values.empty())
        fail(ErrorCode::invalid_argument, "cannot segment an empty sequence");
    if (!(penalty >= 0.0) || !std::isfinite(penalty))
        fail(ErrorCode::invalid_argument, "penalty must be finite and non-negative");
    for (double v : values)
        if (!std::isfinite(v))
            fail(ErrorCode::non_finite_input, "profile contains a non-finite value");

    const std::size_t m = values.size();
    const auto z = detail::standardize(values);
    if (m == 1 || z.empty())
        return {{}, detail::segment_means(values, {}), 0.0};

    std::vector<double> s1(m + 1, 0.0);
    std::vector<double> s2(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        s1[i + 1] = s1[i] + z[i];
        s2[i + 1] = s2[i] + z[i] * z[i];
    }
    auto cost = [&](std::size_t begin, std::size_t end) {
        if (end - begin == 1)
            return 0.0;
        const double a = s1[end] - s1[begin];
        return std::max(0.0, s2[end] - s2[begin] - a * a / static_cast<double>(end - begin));
    };

    struct State {
        double cost = 0.0;
        std::size_t segments = 0;
        std::vector<std::size_t> cuts;
    };
    const double tol = detail::tie_tolerance(m);
    std::vector<State> best(m + 1);
    for (std::size_t t = 1; t <= m; ++t) {
        State& cur = best[t];
        bool first = true;
        for (std::size_t s = 0; s < t; ++s) {
            const State& prev = best[s];
            const double c = prev.cost + cost(s, t) + (s > 0 ? penalty : 0.0);
            const std::size_t segments = prev.segments + 1;
            bool take = first || c < cur.cost - tol;
            if (!take && std::abs(c - cur.cost) <= tol) {
                if (segments != cur.segments) {
                    take = segments < cur.segments;
                } else {
                    // Same length lists: compare prev.cuts ++ [s-1] with cur.cuts.
                    std::vector<std::size_t> cand = prev.cuts;
                    if (s > 0)
                        cand.push_back(s - 1);
                    take = cand < cur.cuts;
                }
            }
            if (take) {
                first = false;
                cur.cost = c;
                cur.segments = segments;
                cur.cuts = prev.cuts;
                if (s > 0)
                    cur.cuts.push_back(s - 1);
            }
        }
    }

    SegmentationResult out;
    out.cut_indices = std::move(best[m].cuts);
    double sse = 0.0;
    std::size_t begin = 0;
    for (std::size_t k = 0; k <= out.cut_indices.size(); ++k) {
        const std::size_t end = k < out.cut_indices.size() ? out.cut_indices[k] + 1 : m;
        sse += detail::segment_sse(z, begin, end);
        begin = end;
    }
    out.objective = sse + penalty * static_cast<double>(out.cut_indices.size());
    out.segment_means = detail::segment_means(values, out.cut_indices);
    return out;
}

/// Midpoints between grid[cut] and grid[cut + 1].
inline std::vector<double> cuts_to_thresholds(std::span<const double> grid, std::span<const std::size_t> cuts)
{
    std::vector<double> thresholds;
    thresholds.reserve(cuts.size());
    for (std::size_t k : cuts) {
        if (k + 1 >= grid.size())
            fail(ErrorCode::invalid_argument, "cut index " + std::to_string(k) + " out of range");
        thresholds.push_back(0.5 * (grid[k] + grid[k + 1]));
    }
    return thresholds;
}

struct LevelGrouping {
    std::vector<std::string> levels; ///< schema order
    std::vector<std::size_t> group_of; ///< per level; 0 is the lowest-mean group
    std::vector<double> group_means;

    std::size_t group_count() const noexcept { return group_means.size(); }
};

/// Groups levels with similar responses. In one dimension the optimal
/// clusters are contiguous in response order, so levels are sorted by response
/// and the sorted sequence is segmented exactly.
inline LevelGrouping merge_levels(const LevelProfile& prof, double penalty)
{
    const std::size_t L = prof.levels.size();
    if (L == 0 || prof.responses.size() != L)
        fail(ErrorCode::invalid_argument, "level profile for '" + prof.feature + "' is empty or ragged");
    for (double v : prof.responses)
        if (!std::isfinite(v))
            fail(ErrorCode::non_finite_input, "level response for '" + prof.feature + "' is not finite");

    std::vector<std::size_t> order(L);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return prof.responses[a] < prof.responses[b]; });
    std::vector<double> sorted(L);
    for (std::size_t k = 0; k < L; ++k)
        sorted[k] = prof.responses[order[k]];

    const auto seg = segment_profile(sorted, penalty);
    LevelGrouping out{prof.levels, std::vector<std::size_t>(L, 0), seg.segment_means};
    std::size_t group = 0;
    for (std::size_t k = 0; k < L; ++k) {
        out.group_of[order[k]] = group;
        if (group < seg.cut_indices.size() && seg.cut_indices[group] == k)
            ++group;
    }
    return out;
}

} // namespace safeml
