#pragma once

#include "safeml/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace safeml {

struct EvalReport {
    std::string model;
    std::string metric;
    double value = 0.0;
};

namespace detail {

inline void check_pair(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.empty())
        fail(ErrorCode::invalid_argument, "metric inputs must have equal, non-zero length");
}

inline void check_binary(std::span<const double> y)
{
    for (double v : y)
        if (v != 0.0 && v != 1.0)
            fail(ErrorCode::invalid_argument, "labels must be 0 or 1");
}

} // namespace detail

inline double mse(std::span<const double> y_true, std::span<const double> y_pred)
{
    detail::check_pair(y_true, y_pred);
    double s = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double r = y_true[i] - y_pred[i];
        s += r * r;
    }
    return s / static_cast<double>(y_true.size());
}

/// A probability at the threshold counts as class 1.
inline double accuracy(std::span<const double> y_true, std::span<const double> p_pred, double threshold = 0.5)
{
    detail::check_pair(y_true, p_pred);
    detail::check_binary(y_true);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i)
        hits += ((p_pred[i] >= threshold ? 1.0 : 0.0) == y_true[i]) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

/// Mann-Whitney form: P(score+ > score-) + P(tie)/2, from average ranks.
inline double auc(std::span<const double> y_true, std::span<const double> scores)
{
    detail::check_pair(y_true, scores);
    detail::check_binary(y_true);
    const std::size_t n = y_true.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    double n_pos = 0.0;
    for (std::size_t k = 0; k < n;) {
        std::size_t end = k + 1;
        while (end < n && scores[order[end]] == scores[order[k]])
            ++end;
        // ranks k+1 .. end share their average
        const double avg = 0.5 * static_cast<double>(k + 1 + end);
        for (std::size_t t = k; t < end; ++t)
            if (y_true[order[t]] == 1.0) {
                pos_rank_sum += avg;
                n_pos += 1.0;
            }
        k = end;
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0)
        fail(ErrorCode::single_class, "AUC needs both classes");
    return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

/// Improvement factor over the baseline; above 1 means lower MSE than the baseline.
inline double mse_ratio(double baseline_mse, double model_mse)
{
    if (!(baseline_mse >= 0.0) || !(model_mse >= 0.0))
        fail(ErrorCode::invalid_argument, "MSE values must be non-negative");
    if (model_mse == 0.0)
        return baseline_mse == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return baseline_mse / model_mse;
}

} // namespace safeml
