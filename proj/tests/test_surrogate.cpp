#include "safeml/generators.hpp"
#include "safeml/surrogate.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace safeml;

namespace {

Dataset numeric_data(const std::vector<double>& x, const std::vector<double>& y, TargetKind kind)
{
    return Dataset({{"x", ColumnKind::numeric, {}}}, x, y, kind, "y");
}

/// Best single squared-error split on one column, by brute force over every
/// midpoint; returns the threshold.
double best_sse_threshold(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_leaf)
{
    std::vector<double> vals(x);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    double best = std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
        const double t = 0.5 * (vals[k] + vals[k + 1]);
        double sl = 0, sr = 0, nl = 0, nr = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            (x[i] <= t ? (sl += y[i], nl += 1) : (sr += y[i], nr += 1));
        if (nl < min_leaf || nr < min_leaf)
            continue;
        double sse = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double mu = x[i] <= t ? sl / nl : sr / nr;
            sse += (y[i] - mu) * (y[i] - mu);
        }
        if (sse < best - 1e-12) {
            best = sse;
            best_t = t;
        }
    }
    return best_t;
}

} // namespace

TEST(Gbt, ConstantTarget)
{
    const auto d = numeric_data({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, std::vector<double>(10, 3.0), TargetKind::continuous);
    const auto m = fit_gbt(d, GbtConfig{20, 3, 0.1, 1, 0});
    for (double x : {-100.0, 0.0, 5.5, 1e6})
        EXPECT_EQ(m.predict_row(std::vector<double>{x}), 3.0);
}

TEST(Gbt, StumpSplitsAtStep)
{
    const auto d = numeric_data({-2, -1, 1, 2}, {0, 0, 1, 1}, TargetKind::continuous);
    const auto m = fit_gbt(d, GbtConfig{1, 1, 1.0, 1, 0});
    ASSERT_EQ(m.trees.size(), 1u);
    const auto& root = m.trees[0].nodes[0];
    ASSERT_FALSE(root.is_leaf());
    EXPECT_GT(root.threshold, -1.0);
    EXPECT_LT(root.threshold, 1.0);
    EXPECT_EQ(m.predict_row(std::vector<double>{-1.5}), 0.0);
    EXPECT_EQ(m.predict_row(std::vector<double>{1.5}), 1.0);
}

TEST(Gbt, RootSplitMatchesExhaustiveSearch)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> x(40), y(40);
        for (std::size_t i = 0; i < 40; ++i) {
            x[i] = std::round(nd(rng) * 4.0);
            y[i] = (x[i] > 1.0 ? 2.0 : 0.0) + nd(rng);
        }
        const auto m = fit_gbt(numeric_data(x, y, TargetKind::continuous), GbtConfig{1, 1, 1.0, 3, 0});
        const auto& root = m.trees[0].nodes[0];
        ASSERT_FALSE(root.is_leaf());
        EXPECT_EQ(root.threshold, best_sse_threshold(x, y, 3)) << rep;
    }
}

TEST(Gbt, ZeroTreesGiveBaseScore)
{
    const auto reg = numeric_data({1, 2, 3, 4}, {1, 2, 3, 6}, TargetKind::continuous);
    EXPECT_EQ(fit_gbt(reg, GbtConfig{0, 3, 0.1, 1, 0}).predict_row(std::vector<double>{9.0}), 3.0);
    const auto cls = numeric_data({1, 2, 3, 4}, {0, 1, 1, 1}, TargetKind::binary);
    const auto m = fit_gbt(cls, GbtConfig{0, 3, 0.1, 1, 0});
    EXPECT_NEAR(m.base_score, std::log(3.0), 1e-12);
    EXPECT_NEAR(m.predict_row(std::vector<double>{0.0}), 0.75, 1e-12);
}

TEST(Gbt, TrainingLossNeverIncreases)
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        for (const auto& data : {gen_simuld2(300, seed).data, gen_apartments(300, seed).data}) {
            for (double lr : {0.1, 1.0}) {
                const auto m = fit_gbt(data, GbtConfig{40, 4, lr, 2, 0});
                ASSERT_EQ(m.train_loss.size(), 41u);
                for (std::size_t t = 1; t < m.train_loss.size(); ++t)
                    EXPECT_LE(m.train_loss[t], m.train_loss[t - 1]);
                EXPECT_LT(m.train_loss.back(), m.train_loss.front());
            }
        }
    }
}

TEST(Gbt, Simuld2TrainAccuracy)
{
    const auto parts = split(gen_simuld2(500, 0).data, 0.3, 0);
    const auto m = fit_gbt(parts.train, GbtConfig{});
    const auto p = m.predict(parts.train);
    double hits = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        hits += ((p[i] >= 0.5 ? 1.0 : 0.0) == parts.train.target()[i]);
    EXPECT_GT(hits / static_cast<double>(p.size()), 0.9);
    for (double v : p) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Gbt, CategoricalSplitSeparatesGroups)
{
    // level effect only: levels a,c high, b,d low
    std::vector<double> cells, y;
    for (int i = 0; i < 80; ++i) {
        cells.push_back(i % 4);
        y.push_back(i % 2 == 0 ? 10.0 : 0.0);
    }
    const Dataset d({{"c", ColumnKind::categorical, {"a", "b", "c", "d"}}}, cells, y, TargetKind::continuous);
    const auto m = fit_gbt(d, GbtConfig{1, 1, 1.0, 1, 0});
    const auto& root = m.trees[0].nodes[0];
    ASSERT_FALSE(root.is_leaf());
    EXPECT_EQ(root.left_levels[0], root.left_levels[2]);
    EXPECT_EQ(root.left_levels[1], root.left_levels[3]);
    EXPECT_NE(root.left_levels[0], root.left_levels[1]);
    EXPECT_EQ(m.predict_row(std::vector<double>{0}), 10.0);
    EXPECT_EQ(m.predict_row(std::vector<double>{3}), 0.0);
}

TEST(Gbt, DeterministicAndSerializable)
{
    const auto data = gen_simuld2(300, 7).data;
    const auto a = fit_gbt(data, GbtConfig{30, 3, 0.2, 5, 1});
    const auto b = fit_gbt(data, GbtConfig{30, 3, 0.2, 5, 1});
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    const auto back = GbtModel::from_json(json::parse(a.to_json().dump()));
    EXPECT_EQ(back.predict(data), a.predict(data));
    EXPECT_EQ(back.to_json(), a.to_json());
    EXPECT_THROW(GbtModel::from_json(json{{"format", "other"}}), Error);
}

TEST(Gbt, PredictRemapsLevelsByLabel)
{
    std::vector<double> cells, y;
    for (int i = 0; i < 40; ++i) {
        cells.push_back(i % 2);
        y.push_back(i % 2 ? 5.0 : 1.0);
    }
    const Dataset d({{"c", ColumnKind::categorical, {"p", "q"}}}, cells, y, TargetKind::continuous);
    const auto m = fit_gbt(d, GbtConfig{5, 1, 1.0, 1, 0});
    const Schema other{{"c", ColumnKind::categorical, {"a", "q", "p"}}};
    EXPECT_EQ(m.predict(other, std::vector<double>{1.0, 2.0}, 2), (std::vector<double>{5.0, 1.0}));
    try {
        m.predict(other, std::vector<double>{0.0}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unknown_level);
    }
}

TEST(Gbt, Errors)
{
    const auto d = numeric_data({1, 2, 3}, {1, 2, 3}, TargetKind::continuous);
    EXPECT_EQ([&] {
        try {
            fit_gbt(d, GbtConfig{});
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::invalid_argument;
    }(), ErrorCode::degenerate_data);
    EXPECT_THROW(fit_gbt(d, GbtConfig{10, 2, 0.0, 1, 0}), Error);
    EXPECT_THROW(fit_gbt(d, GbtConfig{10, 2, 1.5, 1, 0}), Error);
    EXPECT_THROW(fit_gbt(d, GbtConfig{-1, 2, 0.1, 1, 0}), Error);
}
