#pragma once

#include "safeml/error.hpp"
#include "safeml/model_api.hpp"
#include "safeml/schema_json.hpp"
#include "safeml/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace safeml {

struct GbtConfig {
    int n_trees = 100;
    int max_depth = 4;
    double learning_rate = 0.1;
    int min_leaf = 5;
    std::uint64_t seed = 0; ///< kept for reproducibility records; fitting draws no randomness

    void validate() const
    {
        if (n_trees < 0 || max_depth < 0 || min_leaf < 1 || !(learning_rate > 0.0 && learning_rate <= 1.0))
            fail(ErrorCode::invalid_argument, "GBT config out of range (n_trees >= 0, max_depth >= 0, "
                                              "min_leaf >= 1, learning_rate in (0,1])");
    }

    friend bool operator==(const GbtConfig&, const GbtConfig&) = default;
};

enum class Loss { squared, logistic };

inline double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct TreeNode {
    int feature = -1; ///< -1 marks a leaf
    double threshold = 0.0; ///< numeric split: value <= threshold goes left
    std::vector<std::uint8_t> left_levels; ///< categorical split: membership per level index
    int left = -1;
    int right = -1;
    double value = 0.0; ///< leaf weight

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes; ///< nodes[0] is the root

    double eval(std::span<const double> row) const
    {
        std::size_t k = 0;
        while (!nodes[k].is_leaf()) {
            const auto& nd = nodes[k];
            const double x = row[static_cast<std::size_t>(nd.feature)];
            bool left = nd.left_levels.empty() ? x <= nd.threshold : nd.left_levels[static_cast<std::size_t>(x)] != 0;
            k = static_cast<std::size_t>(left ? nd.left : nd.right);
        }
        return nodes[k].value;
    }

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

namespace detail {

/// Maps level indices of `incoming` onto the model's schema by label.
inline std::vector<std::vector<double>> level_remap(const Schema& model, const Schema& incoming)
{
    if (model.size() != incoming.size())
        fail(ErrorCode::schema_mismatch, "expected " + std::to_string(model.size()) + " columns, got " +
                                             std::to_string(incoming.size()));
    std::vector<std::vector<double>> remap(model.size());
    for (std::size_t j = 0; j < model.size(); ++j) {
        if (model[j].name != incoming[j].name || model[j].kind != incoming[j].kind)
            fail(ErrorCode::schema_mismatch, "column " + std::to_string(j) + " is '" + incoming[j].name +
                                                 "', expected '" + model[j].name + "' of the same kind");
        if (!model[j].is_categorical())
            continue;
        for (const auto& label : incoming[j].levels) {
            auto idx = model[j].level_index(label);
            // Labels the model never saw are flagged and rejected only if a row uses them.
            remap[j].push_back(idx ? static_cast<double>(*idx) : -1.0);
        }
    }
    return remap;
}

} // namespace detail

/// Gradient boosted trees on squared or logistic loss. Immutable once fitted.
class GbtModel {
public:
    Loss loss = Loss::squared;
    double base_score = 0.0;
    std::vector<RegressionTree> trees;
    Schema schema;
    GbtConfig config;
    std::vector<double> train_loss; ///< mean training loss after 0, 1, ... trees; not serialized

    double raw_score(std::span<const double> row) const
    {
        double s = base_score;
        for (const auto& t : trees)
            s += t.eval(row);
        return s;
    }

    /// Mean for squared loss, probability for logistic loss.
    double predict_row(std::span<const double> row) const
    {
        const double s = raw_score(row);
        return loss == Loss::logistic ? sigmoid(s) : s;
    }

    std::vector<double> predict(const Schema& rows_schema, std::span<const double> cells, std::size_t rows) const
    {
        const std::size_t p = schema.size();
        std::vector<double> out(rows);
        if (rows_schema == schema) {
            for (std::size_t i = 0; i < rows; ++i)
                out[i] = predict_row(cells.subspan(i * p, p));
            return out;
        }
        const auto remap = detail::level_remap(schema, rows_schema);
        std::vector<double> buf(p);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                const double x = cells[i * p + j];
                if (!schema[j].is_categorical()) {
                    buf[j] = x;
                    continue;
                }
                buf[j] = remap[j][static_cast<std::size_t>(x)];
                if (buf[j] < 0.0)
                    fail(ErrorCode::unknown_level, "column '" + schema[j].name + "', label '" +
                                                       rows_schema[j].levels[static_cast<std::size_t>(x)] + "'");
            }
            out[i] = predict_row(buf);
        }
        return out;
    }

    std::vector<double> predict(const Dataset& data) const { return predict(data.schema(), data.cells(), data.n()); }

    json to_json() const
    {
        json jt = json::array();
        for (const auto& t : trees) {
            json nodes = json::array();
            for (const auto& nd : t.nodes) {
                if (nd.is_leaf()) {
                    nodes.push_back({{"leaf", nd.value}});
                    continue;
                }
                json jn = {{"feature", nd.feature}, {"left", nd.left}, {"right", nd.right}};
                if (nd.left_levels.empty()) {
                    jn["threshold"] = nd.threshold;
                } else {
                    std::vector<std::string> labels;
                    const auto& levels = schema[static_cast<std::size_t>(nd.feature)].levels;
                    for (std::size_t l = 0; l < levels.size(); ++l)
                        if (nd.left_levels[l])
                            labels.push_back(levels[l]);
                    jn["left_levels"] = labels;
                }
                nodes.push_back(std::move(jn));
            }
            jt.push_back(std::move(nodes));
        }
        return {{"format", "safeml-gbt"},
                {"version", 1},
                {"loss", loss == Loss::logistic ? "logistic" : "squared"},
                {"base_score", base_score},
                {"config",
                 {{"n_trees", config.n_trees},
                  {"max_depth", config.max_depth},
                  {"learning_rate", config.learning_rate},
                  {"min_leaf", config.min_leaf},
                  {"seed", config.seed}}},
                {"schema", schema_to_json(schema)},
                {"trees", std::move(jt)}};
    }

    static GbtModel from_json(const json& j)
    {
        try {
            if (j.at("format") != "safeml-gbt")
                fail(ErrorCode::malformed_file, "not a safeml-gbt model");
            if (j.at("version") != 1)
                fail(ErrorCode::schema_version_mismatch, "GBT model version " + j.at("version").dump());
            GbtModel m;
            m.loss = j.at("loss") == "logistic" ? Loss::logistic : Loss::squared;
            m.base_score = j.at("base_score").get<double>();
            const auto& c = j.at("config");
            m.config = {c.at("n_trees").get<int>(), c.at("max_depth").get<int>(), c.at("learning_rate").get<double>(),
                        c.at("min_leaf").get<int>(), c.at("seed").get<std::uint64_t>()};
            m.schema = schema_from_json(j.at("schema"));
            for (const auto& jt : j.at("trees")) {
                RegressionTree t;
                for (const auto& jn : jt) {
                    TreeNode nd;
                    if (jn.contains("leaf")) {
                        nd.value = jn.at("leaf").get<double>();
                    } else {
                        nd.feature = jn.at("feature").get<int>();
                        nd.left = jn.at("left").get<int>();
                        nd.right = jn.at("right").get<int>();
                        if (nd.feature < 0 || static_cast<std::size_t>(nd.feature) >= m.schema.size())
                            fail(ErrorCode::malformed_file, "split feature out of range");
                        const auto& col = m.schema[static_cast<std::size_t>(nd.feature)];
                        if (jn.contains("left_levels")) {
                            nd.left_levels.assign(col.levels.size(), 0);
                            for (const auto& label : jn.at("left_levels")) {
                                auto idx = col.level_index(label.get<std::string>());
                                if (!idx)
                                    fail(ErrorCode::malformed_file, "unknown level in split");
                                nd.left_levels[*idx] = 1;
                            }
                        } else {
                            nd.threshold = jn.at("threshold").get<double>();
                        }
                    }
                    t.nodes.push_back(std::move(nd));
                }
                const int count = static_cast<int>(t.nodes.size());
                for (const auto& nd : t.nodes)
                    if (!nd.is_leaf() && (nd.left <= 0 || nd.right <= 0 || nd.left >= count || nd.right >= count))
                        fail(ErrorCode::malformed_file, "child index out of range");
                if (t.nodes.empty())
                    fail(ErrorCode::malformed_file, "empty tree");
                m.trees.push_back(std::move(t));
            }
            return m;
        } catch (const json::exception& e) {
            fail(ErrorCode::malformed_file, e.what());
        }
    }
};

namespace detail {

class TreeGrower {
public:
    TreeGrower(const Dataset& data, std::span<const double> grad, std::span<const double> hess,
               const GbtConfig& config)
        : data_(data), grad_(grad), hess_(hess), config_(config)
    {
    }

    RegressionTree grow()
    {
        tree_.nodes.clear();
        std::vector<std::size_t> rows(data_.n());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        build(rows, 0);
        return std::move(tree_);
    }

private:
    struct Split {
        double gain = 1e-12;
        int feature = -1;
        double threshold = 0.0;
        std::vector<std::uint8_t> left_levels;
    };

    int build(const std::vector<std::size_t>& rows, int depth)
    {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double g = 0.0;
        double h = 0.0;
        for (std::size_t i : rows) {
            g += grad_[i];
            h += hess_[i];
        }
        tree_.nodes[static_cast<std::size_t>(id)].value = -g / h;
        const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
        if (depth >= config_.max_depth || rows.size() < 2 * min_leaf)
            return id;

        Split best;
        for (std::size_t j = 0; j < data_.p(); ++j) {
            if (data_.column(j).is_categorical())
                categorical_split(rows, j, g, h, best);
            else
                numeric_split(rows, j, g, h, best);
        }
        if (best.feature < 0)
            return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        const auto f = static_cast<std::size_t>(best.feature);
        for (std::size_t i : rows) {
            const double x = data_.cell(i, f);
            bool goes_left = best.left_levels.empty() ? x <= best.threshold
                                                      : best.left_levels[static_cast<std::size_t>(x)] != 0;
            (goes_left ? left : right).push_back(i);
        }
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        auto& nd = tree_.nodes[static_cast<std::size_t>(id)];
        nd.feature = best.feature;
        nd.threshold = best.threshold;
        nd.left_levels = std::move(best.left_levels);
        nd.left = l;
        nd.right = r;
        return id;
    }

    static double score(double g, double h) { return g * g / h; }

    void numeric_split(const std::vector<std::size_t>& rows, std::size_t j, double g, double h, Split& best) const
    {
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(rows.size());
        for (std::size_t i : rows)
            order.emplace_back(data_.cell(i, j), i);
        std::sort(order.begin(), order.end());
        const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
        const double parent = score(g, h);
        double gl = 0.0;
        double hl = 0.0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            gl += grad_[order[k].second];
            hl += hess_[order[k].second];
            const std::size_t n_left = k + 1;
            if (n_left < min_leaf || order.size() - n_left < min_leaf || order[k].first == order[k + 1].first)
                continue;
            const double gain = score(gl, hl) + score(g - gl, h - hl) - parent;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = static_cast<int>(j);
                best.threshold = 0.5 * (order[k].first + order[k + 1].first);
                best.left_levels.clear();
            }
        }
    }

    /// Levels present in the node are ordered by mean gradient and scanned as
    /// an ordinal; absent levels go right.
    void categorical_split(const std::vector<std::size_t>& rows, std::size_t j, double g, double h,
                           Split& best) const
    {
        const std::size_t n_levels = data_.column(j).levels.size();
        std::vector<double> lg(n_levels, 0.0);
        std::vector<double> lh(n_levels, 0.0);
        std::vector<std::size_t> count(n_levels, 0);
        for (std::size_t i : rows) {
            const auto l = static_cast<std::size_t>(data_.cell(i, j));
            lg[l] += grad_[i];
            lh[l] += hess_[i];
            ++count[l];
        }
        std::vector<std::size_t> present;
        for (std::size_t l = 0; l < n_levels; ++l)
            if (count[l] > 0)
                present.push_back(l);
        std::stable_sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
            return lg[a] / static_cast<double>(count[a]) < lg[b] / static_cast<double>(count[b]);
        });
        const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
        const double parent = score(g, h);
        double gl = 0.0;
        double hl = 0.0;
        std::size_t n_left = 0;
        for (std::size_t k = 0; k + 1 < present.size(); ++k) {
            const std::size_t l = present[k];
            gl += lg[l];
            hl += lh[l];
            n_left += count[l];
            if (n_left < min_leaf || rows.size() - n_left < min_leaf)
                continue;
            const double gain = score(gl, hl) + score(g - gl, h - hl) - parent;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = static_cast<int>(j);
                best.threshold = 0.0;
                best.left_levels.assign(n_levels, 0);
                for (std::size_t q = 0; q <= k; ++q)
                    best.left_levels[present[q]] = 1;
            }
        }
    }

    const Dataset& data_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    const GbtConfig& config_;
    RegressionTree tree_;
};

inline double mean_loss(Loss loss, std::span<const double> y, std::span<const double> score)
{
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (loss == Loss::squared) {
            const double r = y[i] - score[i];
            s += 0.5 * r * r;
        } else {
            s += softplus(score[i]) - y[i] * score[i];
        }
    }
    return s / static_cast<double>(y.size());
}

} // namespace detail

/// Fits boosted trees on the negative gradients of the loss implied by the
/// target kind. Leaf weights are Newton steps (-G/H) scaled by the learning
/// rate; a round whose step would raise the training loss is halved until it
/// does not, so the recorded training loss never increases.
inline GbtModel fit_gbt(const Dataset& train, const GbtConfig& config)
{
    config.validate();
    const std::size_t n = train.n();
    if (n < 2 * static_cast<std::size_t>(config.min_leaf))
        fail(ErrorCode::degenerate_data, std::to_string(n) + " rows < 2 * min_leaf");

    GbtModel model;
    model.schema = train.schema();
    model.config = config;
    model.loss = train.target_kind() == TargetKind::binary ? Loss::logistic : Loss::squared;
    const auto y = train.target();
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    if (model.loss == Loss::squared) {
        model.base_score = mean;
    } else {
        const double rate = std::clamp(mean, 1e-6, 1.0 - 1e-6);
        model.base_score = std::log(rate / (1.0 - rate));
    }

    std::vector<double> score(n, model.base_score);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    std::vector<double> step(n);
    std::vector<double> trial(n);
    double current = detail::mean_loss(model.loss, y, score);
    model.train_loss.push_back(current);

    for (int t = 0; t < config.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            if (model.loss == Loss::squared) {
                grad[i] = score[i] - y[i];
                hess[i] = 1.0;
            } else {
                const double pr = sigmoid(score[i]);
                grad[i] = pr - y[i];
                hess[i] = std::max(pr * (1.0 - pr), 1e-16);
            }
        }
        auto tree = detail::TreeGrower(train, grad, hess, config).grow();
        for (auto& nd : tree.nodes)
            nd.value *= config.learning_rate;
        for (std::size_t i = 0; i < n; ++i)
            step[i] = tree.eval(train.row(i));

        double scale = 1.0;
        double next = current;
        for (int attempt = 0; attempt < 40; ++attempt, scale *= 0.5) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = score[i] + scale * step[i];
            next = detail::mean_loss(model.loss, y, trial);
            if (next <= current)
                break;
        }
        if (next > current) {
            scale = 0.0;
            next = current;
        }
        for (auto& nd : tree.nodes)
            nd.value *= scale;
        for (std::size_t i = 0; i < n; ++i)
            score[i] += scale * step[i];
        current = next;
        model.train_loss.push_back(current);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

class GbtOracle final : public PredictionOracle {
public:
    explicit GbtOracle(GbtModel model) : model_(std::move(model)) {}

    ResponseKind response_kind() const override
    {
        return model_.loss == Loss::logistic ? ResponseKind::probability : ResponseKind::raw_regression;
    }
    std::vector<double> predict(const Schema& schema, std::span<const double> cells,
                                std::size_t rows) const override
    {
        return model_.predict(schema, cells, rows);
    }
    const GbtModel& model() const noexcept { return model_; }

private:
    GbtModel model_;
};

inline GbtOracle gbt_as_oracle(GbtModel model) { return GbtOracle(std::move(model)); }

} // namespace safeml
