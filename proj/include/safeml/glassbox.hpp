#pragma once

#include "safeml/csv.hpp"
#include "safeml/error.hpp"
#include "safeml/schema_json.hpp"
#include "safeml/surrogate.hpp"
#include "safeml/tabular.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace safeml {

/// Numeric design for the glass-box fits, without the intercept column.
struct DesignMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd x; ///< rows x names.size()

    std::size_t rows() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t cols() const noexcept { return names.size(); }
};

/// Numeric columns are copied; a categorical column with L levels becomes
/// L - 1 indicators `<name>__lvl_<label>` against its first level.
inline DesignMatrix design_matrix(const Dataset& data)
{
    DesignMatrix d;
    std::vector<std::pair<std::size_t, std::ptrdiff_t>> plan; // (source column, level or -1)
    for (std::size_t j = 0; j < data.p(); ++j) {
        const auto& col = data.column(j);
        if (!col.is_categorical()) {
            d.names.push_back(col.name);
            plan.emplace_back(j, -1);
            continue;
        }
        for (std::size_t l = 1; l < col.levels.size(); ++l) {
            d.names.push_back(col.name + "__lvl_" + col.levels[l]);
            plan.emplace_back(j, static_cast<std::ptrdiff_t>(l));
        }
    }
    d.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.n()), static_cast<Eigen::Index>(plan.size()));
    for (std::size_t i = 0; i < data.n(); ++i)
        for (std::size_t c = 0; c < plan.size(); ++c) {
            const auto [j, level] = plan[c];
            const double v = data.cell(i, j);
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                level < 0 ? v : (v == static_cast<double>(level) ? 1.0 : 0.0);
        }
    return d;
}

namespace detail {

inline Eigen::MatrixXd with_intercept(const DesignMatrix& d)
{
    Eigen::MatrixXd a(d.x.rows(), d.x.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(d.x.cols()) = d.x;
    return a;
}

inline Eigen::VectorXd to_vector(std::span<const double> y)
{
    return Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

inline void check_rows(const DesignMatrix& d, std::span<const double> y)
{
    if (d.rows() != y.size())
        fail(ErrorCode::invalid_argument, "design has " + std::to_string(d.rows()) + " rows, target " +
                                              std::to_string(y.size()));
    if (y.empty())
        fail(ErrorCode::degenerate_data, "no rows");
}

inline json coefficients_json(double intercept, const std::vector<std::string>& names,
                              const std::vector<double>& coefficients)
{
    json coefs = json::array();
    for (std::size_t c = 0; c < names.size(); ++c)
        coefs.push_back({{"name", names[c]}, {"value", coefficients[c]}});
    return {{"intercept", intercept}, {"coefficients", std::move(coefs)}};
}

inline void coefficient_table(std::ostream& out, double intercept, const std::vector<std::string>& names,
                              const std::vector<double>& coefficients)
{
    std::size_t width = std::string("(intercept)").size();
    for (const auto& n : names)
        width = std::max(width, n.size());
    out << std::left << std::setw(static_cast<int>(width)) << "(intercept)" << "  " << csv::format_number(intercept)
        << '\n';
    for (std::size_t c = 0; c < names.size(); ++c)
        out << std::left << std::setw(static_cast<int>(width)) << names[c] << "  "
            << csv::format_number(coefficients[c]) << '\n';
}

inline void check_names(const std::vector<std::string>& model, const DesignMatrix& d)
{
    if (model != d.names)
        fail(ErrorCode::schema_mismatch, "design columns differ from the columns the model was fitted on");
}

} // namespace detail

struct LinearModel {
    double intercept = 0.0;
    std::vector<std::string> names;
    std::vector<double> coefficients;

    std::vector<double> predict(const DesignMatrix& d) const
    {
        detail::check_names(names, d);
        std::vector<double> out(d.rows(), intercept);
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t c = 0; c < names.size(); ++c)
                out[i] += coefficients[c] * d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        return out;
    }

    json to_json() const
    {
        auto j = detail::coefficients_json(intercept, names, coefficients);
        j["kind"] = "linear";
        return j;
    }

    void report(std::ostream& out) const { detail::coefficient_table(out, intercept, names, coefficients); }
};

/// Minimizes |y - b0 - X b|^2 + ridge |b|^2 (intercept unpenalized) by
/// column-pivoted Householder QR on the ridge-augmented system.
inline LinearModel fit_linear(const DesignMatrix& d, std::span<const double> y, double ridge = 0.0)
{
    detail::check_rows(d, y);
    if (!(ridge >= 0.0))
        fail(ErrorCode::invalid_argument, "ridge must be non-negative");
    const auto n = static_cast<Eigen::Index>(d.rows());
    const auto q = static_cast<Eigen::Index>(d.cols());
    const Eigen::Index extra = ridge > 0.0 ? q : 0;
    if (ridge == 0.0 && n < q + 1)
        fail(ErrorCode::rank_deficient, std::to_string(n) + " rows for " + std::to_string(q + 1) +
                                            " parameters; use a positive ridge");

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + extra, q + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + extra);
    a.topRows(n) = detail::with_intercept(d);
    b.head(n) = detail::to_vector(y);
    if (extra > 0)
        a.bottomRightCorner(q, q) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(q, q);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < q + 1)
        fail(ErrorCode::rank_deficient, "design matrix has rank " + std::to_string(qr.rank()) + " < " +
                                            std::to_string(q + 1) + "; use a positive ridge");
    const Eigen::VectorXd beta = qr.solve(b);

    LinearModel m;
    m.intercept = beta(0);
    m.names = d.names;
    m.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
    return m;
}

struct LogisticModel {
    double intercept = 0.0;
    std::vector<std::string> names;
    std::vector<double> coefficients;
    bool converged = false;
    int iterations = 0;
    std::vector<double> objective_trace; ///< damped log-likelihood at the start and after each iteration

    std::vector<double> predict_proba(const DesignMatrix& d) const
    {
        detail::check_names(names, d);
        std::vector<double> out(d.rows());
        for (std::size_t i = 0; i < d.rows(); ++i) {
            double eta = intercept;
            for (std::size_t c = 0; c < names.size(); ++c)
                eta += coefficients[c] * d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
            out[i] = sigmoid(eta);
        }
        return out;
    }

    json to_json() const
    {
        auto j = detail::coefficients_json(intercept, names, coefficients);
        j["kind"] = "logistic";
        j["converged"] = converged;
        j["iterations"] = iterations;
        return j;
    }

    void report(std::ostream& out) const
    {
        detail::coefficient_table(out, intercept, names, coefficients);
        out << "(converged: " << (converged ? "yes" : "no") << ", iterations: " << iterations << ")\n";
    }
};

struct LogisticOptions {
    double tol = 1e-8;
    int max_iter = 100;
    double ridge = 1e-8;
};

namespace detail {

/// sum(y * eta - log(1 + e^eta)) - ridge/2 * |b|^2, intercept excluded.
inline double damped_loglik(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                            double ridge)
{
    const Eigen::VectorXd eta = a * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        ll += y(i) * eta(i) - softplus(eta(i));
    return ll - 0.5 * ridge * beta.tail(beta.size() - 1).squaredNorm();
}

} // namespace detail

/// Iteratively reweighted least squares (Newton on the ridge-damped
/// log-likelihood). Each step is halved until the objective does not drop, so
/// the trace is monotone. Converged when the largest coefficient change falls
/// below `tol`; otherwise the best iterate is returned with converged = false.
inline LogisticModel fit_logistic(const DesignMatrix& d, std::span<const double> y, const LogisticOptions& opt = {})
{
    detail::check_rows(d, y);
    const bool has0 = std::find(y.begin(), y.end(), 0.0) != y.end();
    const bool has1 = std::find(y.begin(), y.end(), 1.0) != y.end();
    for (double v : y)
        if (v != 0.0 && v != 1.0)
            fail(ErrorCode::invalid_argument, "logistic target must be 0/1");
    if (!has0 || !has1)
        fail(ErrorCode::single_class, "logistic regression needs both classes");

    const Eigen::MatrixXd a = detail::with_intercept(d);
    const Eigen::VectorXd yv = detail::to_vector(y);
    const Eigen::Index k = a.cols();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd penalty_diag = Eigen::VectorXd::Constant(k, opt.ridge);
    penalty_diag(0) = 0.0;

    LogisticModel m;
    m.names = d.names;
    double obj = detail::damped_loglik(a, yv, beta, opt.ridge);
    m.objective_trace.push_back(obj);
    for (int it = 0; it < opt.max_iter; ++it) {
        const Eigen::VectorXd eta = a * beta;
        Eigen::VectorXd p(eta.size());
        Eigen::VectorXd w(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            p(i) = sigmoid(eta(i));
            w(i) = p(i) * (1.0 - p(i));
        }
        const Eigen::VectorXd grad = a.transpose() * (yv - p) - penalty_diag.cwiseProduct(beta);
        Eigen::MatrixXd hess = a.transpose() * w.asDiagonal() * a;
        hess.diagonal() += penalty_diag;
        // A tiny diagonal keeps the solve defined when the intercept column is
        // the only one and every weight has underflowed.
        hess.diagonal().array() += 1e-12;
        const Eigen::VectorXd delta = hess.ldlt().solve(grad);

        double step = 1.0;
        Eigen::VectorXd next = beta;
        double next_obj = obj;
        bool improved = false;
        for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
            next = beta + step * delta;
            next_obj = detail::damped_loglik(a, yv, next, opt.ridge);
            if (std::isfinite(next_obj) && next_obj >= obj) {
                improved = true;
                break;
            }
        }
        m.iterations = it + 1;
        if (!improved) {
            m.converged = (step * delta).cwiseAbs().maxCoeff() < opt.tol;
            break;
        }
        const double change = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        obj = next_obj;
        m.objective_trace.push_back(obj);
        if (change < opt.tol) {
            m.converged = true;
            break;
        }
    }
    m.intercept = beta(0);
    m.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
    return m;
}

struct TreeModel {
    struct Node {
        int column = -1; ///< -1 marks a leaf
        double threshold = 0.0; ///< value <= threshold goes left
        int left = -1;
        int right = -1;
        double count0 = 0.0;
        double count1 = 0.0;

        bool is_leaf() const noexcept { return column < 0; }
    };

    std::vector<Node> nodes; ///< nodes[0] is the root
    std::vector<std::string> names;
    int max_depth = 4;
    int min_leaf = 5;

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const
    {
        std::size_t k = 0;
        while (!nodes[k].is_leaf())
            k = static_cast<std::size_t>(row(nodes[k].column) <= nodes[k].threshold ? nodes[k].left
                                                                                    : nodes[k].right);
        return nodes[k].count1 / (nodes[k].count0 + nodes[k].count1);
    }

    /// Leaf fraction of class 1.
    std::vector<double> predict_proba(const DesignMatrix& d) const
    {
        detail::check_names(names, d);
        std::vector<double> out(d.rows());
        for (std::size_t i = 0; i < d.rows(); ++i)
            out[i] = predict_row(d.x.row(static_cast<Eigen::Index>(i)));
        return out;
    }

    json to_json() const
    {
        json jn = json::array();
        for (const auto& nd : nodes) {
            if (nd.is_leaf())
                jn.push_back({{"count0", nd.count0}, {"count1", nd.count1}});
            else
                jn.push_back({{"column", names[static_cast<std::size_t>(nd.column)]},
                              {"threshold", nd.threshold},
                              {"left", nd.left},
                              {"right", nd.right},
                              {"count0", nd.count0},
                              {"count1", nd.count1}});
        }
        return {{"kind", "tree"}, {"max_depth", max_depth}, {"min_leaf", min_leaf}, {"nodes", std::move(jn)}};
    }

    void report(std::ostream& out) const { report_node(out, 0, 0); }

private:
    void report_node(std::ostream& out, std::size_t k, int depth) const
    {
        const auto& nd = nodes[k];
        const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
        if (nd.is_leaf()) {
            out << indent << "leaf: " << nd.count0 << " x class 0, " << nd.count1 << " x class 1\n";
            return;
        }
        const auto& name = names[static_cast<std::size_t>(nd.column)];
        out << indent << name << " <= " << csv::format_number(nd.threshold) << '\n';
        report_node(out, static_cast<std::size_t>(nd.left), depth + 1);
        out << indent << name << " > " << csv::format_number(nd.threshold) << '\n';
        report_node(out, static_cast<std::size_t>(nd.right), depth + 1);
    }
};

namespace detail {

class CartGrower {
public:
    CartGrower(const DesignMatrix& d, std::span<const double> y, TreeModel& tree) : d_(d), y_(y), tree_(tree) {}

    int build(const std::vector<std::size_t>& rows, int depth)
    {
        const int id = static_cast<int>(tree_.nodes.size());
        TreeModel::Node node;
        for (std::size_t i : rows)
            (y_[i] == 1.0 ? node.count1 : node.count0) += 1.0;
        tree_.nodes.push_back(node);
        const auto min_leaf = static_cast<std::size_t>(tree_.min_leaf);
        if (depth >= tree_.max_depth || rows.size() < 2 * min_leaf || node.count0 == 0.0 || node.count1 == 0.0)
            return id;

        const double n = static_cast<double>(rows.size());
        const double parent = n * gini(node.count1, n);
        // Gains within rounding of each other tie; the earlier candidate keeps the split.
        const double tol = 1e-12 * n;
        double best_gain = tol;
        int best_col = -1;
        double best_threshold = 0.0;
        std::vector<std::pair<double, std::size_t>> order(rows.size());
        for (std::size_t c = 0; c < d_.cols(); ++c) {
            for (std::size_t k = 0; k < rows.size(); ++k)
                order[k] = {d_.x(static_cast<Eigen::Index>(rows[k]), static_cast<Eigen::Index>(c)), rows[k]};
            std::sort(order.begin(), order.end());
            double left1 = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                left1 += y_[order[k].second];
                const std::size_t nl = k + 1;
                const std::size_t nr = order.size() - nl;
                if (nl < min_leaf || nr < min_leaf || order[k].first == order[k + 1].first)
                    continue;
                const double fl = static_cast<double>(nl);
                const double fr = static_cast<double>(nr);
                const double gain =
                    parent - fl * gini(left1, fl) - fr * gini(node.count1 - left1, fr);
                if (gain > best_gain + (best_col < 0 ? 0.0 : tol)) {
                    best_gain = gain;
                    best_col = static_cast<int>(c);
                    best_threshold = 0.5 * (order[k].first + order[k + 1].first);
                }
            }
        }
        if (best_col < 0)
            return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t i : rows)
            (d_.x(static_cast<Eigen::Index>(i), best_col) <= best_threshold ? left : right).push_back(i);
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        auto& nd = tree_.nodes[static_cast<std::size_t>(id)];
        nd.column = best_col;
        nd.threshold = best_threshold;
        nd.left = l;
        nd.right = r;
        return id;
    }

private:
    static double gini(double ones, double n)
    {
        const double p = ones / n;
        return 2.0 * p * (1.0 - p);
    }

    const DesignMatrix& d_;
    std::span<const double> y_;
    TreeModel& tree_;
};

} // namespace detail

/// Greedy CART with Gini impurity. Ties keep the first candidate found,
/// i.e. the lowest column index, then the lowest threshold.
inline TreeModel fit_tree(const DesignMatrix& d, std::span<const double> y, int max_depth = 4, int min_leaf = 5)
{
    detail::check_rows(d, y);
    if (max_depth < 0 || min_leaf < 1)
        fail(ErrorCode::invalid_argument, "max_depth must be >= 0 and min_leaf >= 1");
    if (d.rows() < 2 * static_cast<std::size_t>(min_leaf))
        fail(ErrorCode::degenerate_data, std::to_string(d.rows()) + " rows < 2 * min_leaf");
    for (double v : y)
        if (v != 0.0 && v != 1.0)
            fail(ErrorCode::invalid_argument, "tree target must be 0/1");
    TreeModel tree;
    tree.names = d.names;
    tree.max_depth = max_depth;
    tree.min_leaf = min_leaf;
    std::vector<std::size_t> rows(d.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    detail::CartGrower(d, y, tree).build(rows, 0);
    return tree;
}

} // namespace safeml
