#include "safeml/generators.hpp"
#include "safeml/profiles.hpp"
#include "safeml/surrogate.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

using namespace safeml;

namespace {

Dataset random_numeric(std::mt19937_64& rng, std::size_t n, std::size_t p)
{
    std::normal_distribution<double> nd(0.0, 3.0);
    Schema schema;
    for (std::size_t j = 0; j < p; ++j)
        schema.push_back({"x" + std::to_string(j), ColumnKind::numeric, {}});
    std::vector<double> cells(n * p), y(n, 0.0);
    for (auto& c : cells)
        c = nd(rng);
    return Dataset(schema, cells, y, TargetKind::continuous);
}

} // namespace

TEST(MakeGrid, Examples)
{
    EXPECT_EQ(make_grid(std::vector<double>{1, 3, 2, 3}, 10), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(make_grid(std::vector<double>{4, 4, 4}, 10), (std::vector<double>{4}));
    EXPECT_THROW(make_grid(std::vector<double>{}, 10), Error);
    EXPECT_THROW(make_grid(std::vector<double>{1.0}, 0), Error);
}

TEST(MakeGrid, QuantilesMatchOracle)
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    std::vector<double> v(10000);
    for (auto& x : v)
        x = nd(rng);
    const auto grid = make_grid(v, 100);
    ASSERT_EQ(grid.size(), 100u);
    for (std::size_t k = 1; k < grid.size(); ++k)
        EXPECT_LT(grid[k - 1], grid[k]);
    for (std::size_t k = 0; k < 100; ++k)
        EXPECT_EQ(grid[k], oracle::quantile7(v, static_cast<double>(k) / 99.0));
    EXPECT_EQ(grid.front(), *std::min_element(v.begin(), v.end()));
    EXPECT_EQ(grid.back(), *std::max_element(v.begin(), v.end()));
}

TEST(MakeGrid, DeduplicatesHeavyTies)
{
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i)
        v.push_back(i < 900 ? 0.0 : i);
    const auto grid = make_grid(v, 20);
    EXPECT_LE(grid.size(), 20u);
    for (std::size_t k = 1; k < grid.size(); ++k)
        EXPECT_LT(grid[k - 1], grid[k]);
    EXPECT_EQ(grid.front(), 0.0);
}

TEST(NumericProfile, ConstantAndIdentityOracles)
{
    std::mt19937_64 rng(1);
    const auto bg = random_numeric(rng, 7, 3);
    const std::vector<double> grid{-1.0, 0.5, 2.0};
    const ConstantOracle c(4.0, ResponseKind::raw_regression);
    EXPECT_EQ(numeric_profile(c, bg, "x1", grid).values, std::vector<double>(3, 4.0));
    const FunctionOracle ident([](std::span<const double> r) { return r[1]; }, ResponseKind::raw_regression);
    EXPECT_EQ(numeric_profile(ident, bg, "x1", grid).values, grid);
}

TEST(NumericProfile, ThreeRowAdditiveExample)
{
    const Dataset bg({{"x1", ColumnKind::numeric, {}}, {"x2", ColumnKind::numeric, {}}}, {5, 1, 6, 2, 7, 6},
                     {0, 0, 0}, TargetKind::continuous);
    const FunctionOracle add([](std::span<const double> r) { return r[0] + r[1]; }, ResponseKind::raw_regression);
    const auto prof = numeric_profile(add, bg, "x1", std::vector<double>{0.0, 1.0});
    EXPECT_EQ(prof.values, (std::vector<double>{3.0, 4.0}));
}

TEST(NumericProfile, MatchesDoubleLoop)
{
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> rows(1, 20), pts(1, 10), feat(0, 2);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 50; ++rep) {
        const auto bg = random_numeric(rng, rows(rng), 3);
        const double a = nd(rng), b = nd(rng), c = nd(rng);
        const FunctionOracle add([=](std::span<const double> r) { return a * r[0] + b * std::sin(r[1]) + c * r[2] * r[2]; },
                                 ResponseKind::raw_regression);
        std::vector<double> grid(pts(rng));
        std::iota(grid.begin(), grid.end(), -2.0);
        const std::size_t j = feat(rng);
        const auto prof = numeric_profile(add, bg, "x" + std::to_string(j), grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < bg.n(); ++i) {
                std::vector<double> r(bg.row(i).begin(), bg.row(i).end());
                r[j] = grid[k];
                s += a * r[0] + b * std::sin(r[1]) + c * r[2] * r[2];
            }
            EXPECT_NEAR(prof.values[k], s / static_cast<double>(bg.n()), 1e-12);
        }
    }
}

TEST(NumericProfile, Properties)
{
    std::mt19937_64 rng(6);
    const auto data = gen_apartments(200, 2).data;
    const auto oracle = gbt_as_oracle(fit_gbt(data, GbtConfig{30, 3, 0.1, 5, 0}));
    const auto grid = make_grid(data.column_values(0), 50);

    // one-row background equals the model's own curve on that row
    const auto one = data.subset(std::vector<std::size_t>{17});
    const auto single = numeric_profile(oracle, one, "year", grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> r(one.row(0).begin(), one.row(0).end());
        r[0] = grid[k];
        EXPECT_EQ(single.values[k], oracle.model().predict_row(r));
    }

    // row order of the background does not matter
    std::vector<std::size_t> perm(data.n());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto a = numeric_profile(oracle, data, "year", grid);
    const auto b = numeric_profile(oracle, data.subset(perm), "year", grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        EXPECT_NEAR(a.values[k], b.values[k], 1e-12 * std::abs(a.values[k])); // summation order only

    // worker count does not change a single bit
    EXPECT_EQ(numeric_profile(oracle, data, "year", grid, 4).values, a.values);

    // additive oracle: shape equals its own term up to a shift
    const FunctionOracle add([](std::span<const double> r) { return std::sqrt(std::abs(r[0])) + 3.0 * r[1]; },
                             ResponseKind::raw_regression);
    const auto s = numeric_profile(add, data, "year", grid);
    const double shift = s.values[0] - std::sqrt(grid[0]);
    for (std::size_t k = 0; k < grid.size(); ++k)
        EXPECT_NEAR(s.values[k] - std::sqrt(grid[k]), shift, 1e-9);
}

TEST(NumericProfile, Errors)
{
    const auto data = gen_apartments(100, 1).data;
    const ConstantOracle c(1.0, ResponseKind::raw_regression);
    EXPECT_THROW(numeric_profile(c, data, "nope", std::vector<double>{1.0}), Error);
    EXPECT_THROW(numeric_profile(c, data, "district", std::vector<double>{1.0}), Error);
    EXPECT_THROW(numeric_profile(c, data, "year", std::vector<double>{2.0, 1.0}), Error);
}

TEST(CategoricalProfile, Examples)
{
    const Dataset bg({{"c", ColumnKind::categorical, {"A", "B"}}, {"x", ColumnKind::numeric, {}}},
                     {0, 1, 1, 2, 1, 3}, {0, 0, 0}, TargetKind::continuous);
    const ConstantOracle c(2.0, ResponseKind::raw_regression);
    const auto pc = categorical_profile(c, bg, "c");
    EXPECT_EQ(pc.levels, (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(pc.responses, (std::vector<double>{2.0, 2.0}));
    const FunctionOracle ind([](std::span<const double> r) { return r[0] == 0.0 ? 1.0 : 0.0; },
                             ResponseKind::probability);
    EXPECT_EQ(categorical_profile(ind, bg, "c").responses, (std::vector<double>{1.0, 0.0}));
    EXPECT_THROW(categorical_profile(c, bg, "x"), Error);
}

TEST(CategoricalProfile, Simuld2ResponsesBandByGroup)
{
    const auto g = gen_simuld2(500, 0);
    const auto parts = split(g.data, 0.3, 0);
    const auto oracle = gbt_as_oracle(fit_gbt(parts.train, GbtConfig{}));
    const auto prof = categorical_profile(oracle, parts.train, "X2");
    double mean[3] = {0, 0, 0}, cnt[3] = {0, 0, 0};
    for (std::size_t l = 0; l < prof.levels.size(); ++l) {
        const auto grp = g.truth.level_groups.at("X2").at(prof.levels[l]);
        mean[grp] += prof.responses[l];
        cnt[grp] += 1;
    }
    for (int k = 0; k < 3; ++k)
        mean[k] /= cnt[k];
    EXPECT_LT(mean[0] + 0.2, mean[1]);
    EXPECT_LT(mean[1] + 0.2, mean[2]);
}

TEST(EmitProfile, WritesCsv)
{
    const Profile p{"x", {1.0, 2.5}, {0.25, 3.0}};
    std::ostringstream out;
    write_profile(out, p);
    EXPECT_EQ(out.str(), "grid,value\n1,0.25\n2.5,3\n");
    const LevelProfile lp{"c", {"a", "b,c"}, {1.0, 2.0}};
    std::ostringstream out2;
    write_profile(out2, lp);
    EXPECT_EQ(out2.str(), "level,value\na,1\n\"b,c\",2\n");
}
