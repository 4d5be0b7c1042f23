#pragma once

#include "safeml/csv.hpp"
#include "safeml/error.hpp"
#include "safeml/generators.hpp"
#include "safeml/glassbox.hpp"
#include "safeml/metrics.hpp"
#include "safeml/model_api.hpp"
#include "safeml/profiles.hpp"
#include "safeml/schema_json.hpp"
#include "safeml/surrogate.hpp"
#include "safeml/tabular.hpp"
#include "safeml/transforms.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace safeml {

enum class Task { regression, classification };
enum class RefinedKind { linear, logistic, tree };

inline std::string_view to_string(Task t) { return t == Task::classification ? "cls" : "reg"; }
inline std::string_view to_string(RefinedKind k)
{
    switch (k) {
    case RefinedKind::linear: return "linear";
    case RefinedKind::logistic: return "logistic";
    case RefinedKind::tree: return "tree";
    }
    return "?";
}

struct SweepSpec {
    double lo = 0.01;
    double hi = 10.0;
    int k = 25;

    std::vector<double> penalties() const
    {
        if (k < 1 || !(lo >= 0.0) || !(hi >= lo))
            fail(ErrorCode::invalid_argument, "sweep needs k >= 1 and 0 <= lo <= hi");
        if (k == 1)
            return {lo};
        std::vector<double> out(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
        return out;
    }
};

struct RunConfig {
    std::string data_path;      ///< CSV input, or
    std::string generator;      ///< simuld1 | simuld2 | apartments
    std::size_t gen_rows = 0;   ///< 0 = generator default
    std::string target;         ///< defaults to the generator's target name
    Task task = Task::classification;
    double penalty = 1.0;
    std::string surrogate = "gbt"; ///< "gbt" or "cmd:<shell command>"
    GbtConfig gbt;
    RefinedKind refined = RefinedKind::logistic;
    double split = 0.3;
    double holdout = 0.0; ///< > 0 selects the sweep penalty on a slice of the training rows
    std::uint64_t seed = 0;
    std::string out_dir; ///< empty = write nothing
    bool svg = false;
    int tree_depth = 4;
    int tree_min_leaf = 5;
    ExtractOptions extract;
};

using GlassboxModel = std::variant<LinearModel, LogisticModel, TreeModel>;

struct FittedGlassbox {
    GlassboxModel model;
    std::vector<std::string> columns; ///< design columns kept for fitting
    std::vector<std::string> notes;

    std::vector<double> predict(const DesignMatrix& d) const;
    json to_json() const;
    void report(std::ostream& out) const;
};

struct PipelineResult {
    double penalty = 0.0;
    std::vector<EvalReport> metrics; ///< test-set metrics, model x metric
    TransformSet transforms;
    FittedGlassbox baseline;
    FittedGlassbox refined;
    std::vector<std::string> warnings;

    double value(std::string_view model, std::string_view metric) const
    {
        for (const auto& r : metrics)
            if (r.model == model && r.metric == metric)
                return r.value;
        fail(ErrorCode::invalid_argument, "no metric " + std::string(metric) + " for " + std::string(model));
    }
};

struct SweepRow {
    double penalty = 0.0;
    double refined_primary = 0.0;   ///< accuracy or MSE on the test split
    double refined_secondary = 0.0; ///< AUC or MSE ratio on the test split
    double selection_primary = 0.0; ///< same metrics on the selection split
    double selection_secondary = 0.0;
    std::size_t thresholds = 0;
    std::size_t groups = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t best = 0;
    PipelineResult best_run;
};

namespace detail {

inline std::string stage_error(std::string_view stage, const Error& e)
{
    return "[" + std::string(stage) + "] " + e.message();
}

template <class F>
auto staged(std::string_view stage, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), stage_error(stage, e));
    }
}

inline DesignMatrix select_columns(const DesignMatrix& d, const std::vector<std::string>& keep)
{
    DesignMatrix out;
    out.names = keep;
    out.x.resize(d.x.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        auto it = std::find(d.names.begin(), d.names.end(), keep[c]);
        if (it == d.names.end())
            fail(ErrorCode::schema_mismatch, "design column '" + keep[c] + "' missing");
        out.x.col(static_cast<Eigen::Index>(c)) = d.x.col(it - d.names.begin());
    }
    return out;
}

/// Drops columns constant on the training rows and exact duplicates of an
/// earlier column; both would make the unregularized fits singular.
inline std::vector<std::string> usable_columns(const DesignMatrix& d, std::vector<std::string>& notes)
{
    std::vector<std::string> keep;
    std::vector<Eigen::Index> kept_idx;
    for (Eigen::Index c = 0; c < d.x.cols(); ++c) {
        const auto col = d.x.col(c);
        const auto& name = d.names[static_cast<std::size_t>(c)];
        if (d.x.rows() > 0 && (col.array() == col(0)).all()) {
            notes.push_back("column '" + name + "' is constant on the training rows; dropped");
            continue;
        }
        bool dup = false;
        for (Eigen::Index k : kept_idx)
            if (d.x.col(k) == col) {
                notes.push_back("column '" + name + "' duplicates '" + d.names[static_cast<std::size_t>(k)] +
                                "'; dropped");
                dup = true;
                break;
            }
        if (dup)
            continue;
        keep.push_back(name);
        kept_idx.push_back(c);
    }
    return keep;
}

inline FittedGlassbox fit_glassbox(const DesignMatrix& full, std::span<const double> y, const RunConfig& config)
{
    FittedGlassbox fit;
    fit.columns = usable_columns(full, fit.notes);
    const auto d = select_columns(full, fit.columns);
    switch (config.refined) {
    case RefinedKind::linear:
        try {
            fit.model = fit_linear(d, y);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::rank_deficient)
                throw;
            fit.notes.push_back("design is rank deficient; refitted with ridge 1e-8");
            fit.model = fit_linear(d, y, 1e-8);
        }
        break;
    case RefinedKind::logistic: fit.model = fit_logistic(d, y); break;
    case RefinedKind::tree: fit.model = fit_tree(d, y, config.tree_depth, config.tree_min_leaf); break;
    }
    return fit;
}

} // namespace detail

inline std::vector<double> FittedGlassbox::predict(const DesignMatrix& full) const
{
    const auto d = detail::select_columns(full, columns);
    return std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, LinearModel>)
                return m.predict(d);
            else
                return m.predict_proba(d);
        },
        model);
}

inline json FittedGlassbox::to_json() const
{
    auto j = std::visit([](const auto& m) { return m.to_json(); }, model);
    j["notes"] = notes;
    return j;
}

inline void FittedGlassbox::report(std::ostream& out) const
{
    std::visit([&](const auto& m) { m.report(out); }, model);
    for (const auto& n : notes)
        out << "note: " << n << '\n';
}

/// Profile CSV ("grid,value"), a blank line, then the thresholds
/// ("threshold"). With `svg_path`, also a static line plot with a vertical
/// rule at every threshold.
inline void emit_pdp_plot(const Profile& profile, std::span<const double> thresholds, const std::string& path,
                          const std::string& svg_path = {})
{
    {
        std::ofstream out(path);
        if (!out)
            fail(ErrorCode::invalid_argument, "cannot write '" + path + "'");
        write_profile(out, profile);
        out << "\nthreshold\n";
        for (double t : thresholds)
            out << csv::format_number(t) << '\n';
    }
    if (svg_path.empty() || profile.grid.empty())
        return;
    std::ofstream svg(svg_path);
    if (!svg)
        fail(ErrorCode::invalid_argument, "cannot write '" + svg_path + "'");
    const double w = 640.0;
    const double h = 400.0;
    const double pad = 40.0;
    const auto [xmin_it, xmax_it] = std::minmax_element(profile.grid.begin(), profile.grid.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(profile.values.begin(), profile.values.end());
    const double xmin = *xmin_it;
    const double xspan = std::max(*xmax_it - xmin, 1e-12);
    const double ymin = *ymin_it;
    const double yspan = std::max(*ymax_it - ymin, 1e-12);
    auto sx = [&](double x) { return pad + (x - xmin) / xspan * (w - 2 * pad); };
    auto sy = [&](double y) { return h - pad - (y - ymin) / yspan * (h - 2 * pad); };
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < profile.grid.size(); ++k)
        svg << (k ? " " : "") << sx(profile.grid[k]) << ',' << sy(profile.values[k]);
    svg << "\"/>\n";
    for (double t : thresholds)
        svg << "<line x1=\"" << sx(t) << "\" y1=\"" << pad << "\" x2=\"" << sx(t) << "\" y2=\"" << h - pad
            << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << pad << "\" y=\"" << pad / 2 << "\">" << profile.feature << "</text>\n</svg>\n";
}

namespace detail {

inline std::string file_stem(std::string_view name)
{
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

struct Prepared {
    Dataset train;
    Dataset test;
    std::optional<Dataset> select; ///< holdout slice for penalty selection
    std::unique_ptr<PredictionOracle> oracle;
    std::optional<GbtModel> gbt;
    std::vector<FeatureProfile> profiles;
    FittedGlassbox baseline;
    std::vector<EvalReport> fixed_metrics; ///< baseline and surrogate on test
    std::vector<EvalReport> fixed_select;  ///< baseline and surrogate on the selection slice
};

inline Dataset load_input(const RunConfig& config)
{
    if (!config.data_path.empty() && !config.generator.empty())
        fail(ErrorCode::invalid_argument, "give either a data file or a generator, not both");
    if (!config.data_path.empty()) {
        if (config.target.empty())
            fail(ErrorCode::missing_target, "a target column name is required with a data file");
        return load_csv(config.data_path, config.target);
    }
    const std::size_t n = config.gen_rows;
    if (config.generator == "simuld2")
        return gen_simuld2(n ? n : 500, config.seed).data;
    if (config.generator == "simuld1")
        return gen_simuld1(n ? n : 500, config.seed).data;
    if (config.generator == "apartments")
        return gen_apartments(n ? n : 1000, config.seed).data;
    fail(ErrorCode::invalid_argument, "unknown generator '" + config.generator + "'");
}

inline void check_task(const RunConfig& config, const Dataset& data)
{
    if (config.task == Task::classification) {
        if (data.target_kind() != TargetKind::binary)
            fail(ErrorCode::invalid_argument, "classification needs a 0/1 target");
        if (config.refined == RefinedKind::linear)
            fail(ErrorCode::invalid_argument, "classification refines with logistic or tree");
    } else if (config.refined != RefinedKind::linear) {
        fail(ErrorCode::invalid_argument, "regression refines with linear");
    }
}

inline std::vector<EvalReport> evaluate(const std::string& model, Task task, std::span<const double> y,
                                        std::span<const double> pred)
{
    if (task == Task::classification)
        return {{model, "accuracy", accuracy(y, pred)}, {model, "auc", auc(y, pred)}};
    return {{model, "mse", mse(y, pred)}};
}

/// Adds `mse_ratio` rows (baseline MSE / model MSE) for regression.
inline void add_ratios(std::vector<EvalReport>& metrics)
{
    double base = -1.0;
    for (const auto& r : metrics)
        if (r.model == "baseline" && r.metric == "mse")
            base = r.value;
    if (base < 0.0)
        return;
    std::vector<EvalReport> ratios;
    for (const auto& r : metrics)
        if (r.metric == "mse")
            ratios.push_back({r.model, "mse_ratio", mse_ratio(base, r.value)});
    metrics.insert(metrics.end(), ratios.begin(), ratios.end());
}

inline Prepared prepare(const RunConfig& config)
{
    auto data = staged("load", [&] { return load_input(config); });
    staged("config", [&] { check_task(config, data); });
    auto parts = staged("split", [&] { return split(data, config.split, config.seed); });
    std::optional<Dataset> select;
    if (config.holdout > 0.0) {
        auto inner = staged("split", [&] { return split(parts.train, config.holdout, config.seed + 1); });
        parts.train = std::move(inner.train);
        select = std::move(inner.test);
    }
    Prepared prep{std::move(parts.train), std::move(parts.test), std::move(select), {}, {}, {}, {}, {}, {}};
    const auto& train = prep.train;

    prep.baseline = staged("baseline", [&] { return fit_glassbox(design_matrix(train), train.target(), config); });
    auto base_eval = [&](const Dataset& d) {
        return evaluate("baseline", config.task, d.target(), prep.baseline.predict(design_matrix(d)));
    };
    prep.fixed_metrics = staged("baseline", [&] { return base_eval(prep.test); });

    staged("surrogate", [&] {
        if (config.surrogate == "gbt") {
            prep.gbt = fit_gbt(train, config.gbt);
            prep.oracle = std::make_unique<GbtOracle>(*prep.gbt);
        } else if (config.surrogate.starts_with("cmd:")) {
            prep.oracle = open_external_oracle(config.surrogate.substr(4), config.task == Task::classification
                                                                                ? ResponseKind::probability
                                                                                : ResponseKind::raw_regression);
        } else {
            fail(ErrorCode::invalid_argument, "surrogate must be 'gbt' or 'cmd:<command>'");
        }
    });
    auto surr_eval = [&](const Dataset& d) {
        return evaluate("surrogate", config.task, d.target(), predict_batch(*prep.oracle, d));
    };
    staged("surrogate", [&] {
        auto m = surr_eval(prep.test);
        prep.fixed_metrics.insert(prep.fixed_metrics.end(), m.begin(), m.end());
        if (prep.select) {
            prep.fixed_select = base_eval(*prep.select);
            auto s = surr_eval(*prep.select);
            prep.fixed_select.insert(prep.fixed_select.end(), s.begin(), s.end());
        }
    });
    prep.profiles = staged("profiles", [&] { return compute_profiles(*prep.oracle, train, config.extract); });
    return prep;
}

inline PipelineResult refine(const Prepared& prep, const RunConfig& config, double penalty,
                             std::vector<EvalReport>* select_metrics = nullptr)
{
    PipelineResult res;
    res.penalty = penalty;
    res.baseline = prep.baseline;
    res.transforms = staged("extract", [&] {
        return transforms_from_profiles(prep.profiles, prep.train.schema(), penalty, config.extract);
    });
    const auto train_t = staged("transform", [&] { return apply_transforms(res.transforms, prep.train); });
    for (const auto& c : constant_columns(train_t))
        res.warnings.push_back("transformed column '" + c + "' is constant on the training split");
    res.refined = staged("refine", [&] { return fit_glassbox(design_matrix(train_t), train_t.target(), config); });
    auto eval_on = [&](const Dataset& d) {
        const auto t = apply_transforms(res.transforms, d);
        return evaluate("refined", config.task, t.target(), res.refined.predict(design_matrix(t)));
    };
    res.metrics = prep.fixed_metrics;
    staged("evaluate", [&] {
        auto m = eval_on(prep.test);
        res.metrics.insert(res.metrics.end(), m.begin(), m.end());
        if (select_metrics && prep.select) {
            *select_metrics = prep.fixed_select;
            auto s = eval_on(*prep.select);
            select_metrics->insert(select_metrics->end(), s.begin(), s.end());
            add_ratios(*select_metrics);
        }
    });
    add_ratios(res.metrics);
    return res;
}

inline void write_outputs(const Prepared& prep, const RunConfig& config, const PipelineResult& res)
{
    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "report.csv");
        out << "model,metric,value\n";
        for (const auto& r : res.metrics)
            out << r.model << ',' << r.metric << ',' << csv::format_number(r.value) << '\n';
    }
    {
        std::ofstream out(dir / "report.txt");
        out << "# safeml run\n";
        out << "# data: " << (config.data_path.empty() ? "generator " + config.generator : config.data_path) << '\n';
        out << "# target: " << prep.train.target_name() << ", task: " << to_string(config.task) << '\n';
        out << "# rows: train " << prep.train.n() << ", test " << prep.test.n();
        if (prep.select)
            out << ", selection " << prep.select->n();
        out << " (split " << csv::format_number(config.split) << ", seed " << config.seed << ")\n";
        out << "# surrogate: " << config.surrogate;
        if (config.surrogate == "gbt")
            out << " (trees " << config.gbt.n_trees << ", depth " << config.gbt.max_depth << ", learning rate "
                << csv::format_number(config.gbt.learning_rate) << ", min leaf " << config.gbt.min_leaf << ")";
        out << '\n';
        out << "# refined: " << to_string(config.refined) << ", penalty " << csv::format_number(res.penalty)
            << ", grid points " << config.extract.max_points << '\n';
        out << "# encoding: reference (first interval / lowest group / first level omitted)\n";
        out << "# mse_ratio = baseline MSE / model MSE (above 1 beats the baseline)\n\n";
        out << "model      metric     value\n";
        for (const auto& r : res.metrics) {
            std::string m = r.model;
            std::string k = r.metric;
            m.resize(std::max<std::size_t>(m.size(), 10), ' ');
            k.resize(std::max<std::size_t>(k.size(), 10), ' ');
            out << m << ' ' << k << ' ' << csv::format_number(r.value) << '\n';
        }
        out << "\n## transforms\n";
        for (const auto& ft : res.transforms.transforms) {
            out << ft.feature << ": ";
            if (const auto* nb = std::get_if<NumericBins>(&ft.kind)) {
                out << "bins at";
                for (double t : nb->thresholds)
                    out << ' ' << csv::format_number(t);
            } else if (const auto* lm = std::get_if<LevelMerge>(&ft.kind)) {
                out << lm->group_count << " groups";
            } else if (std::holds_alternative<Drop>(ft.kind)) {
                out << "dropped (flat response)";
            } else {
                out << "passthrough";
            }
            out << '\n';
        }
        out << "\n## refined model\n";
        res.refined.report(out);
        out << "\n## baseline model\n";
        res.baseline.report(out);
        for (const auto& w : res.warnings)
            out << "warning: " << w << '\n';
    }
    save_transforms(res.transforms, (dir / "transforms.json").string());
    write_json_file((dir / "refined_model.json").string(), res.refined.to_json());
    write_json_file((dir / "baseline_model.json").string(), res.baseline.to_json());
    if (prep.gbt)
        write_json_file((dir / "surrogate.json").string(), prep.gbt->to_json());

    for (std::size_t j = 0; j < prep.profiles.size(); ++j) {
        const auto& ft = res.transforms.transforms[j];
        const auto stem = file_stem(ft.feature);
        if (const auto* prof = std::get_if<Profile>(&prep.profiles[j])) {
            std::vector<double> thresholds;
            if (const auto* nb = std::get_if<NumericBins>(&ft.kind))
                thresholds = nb->thresholds;
            emit_pdp_plot(*prof, thresholds, (dir / ("pdp_" + stem + ".csv")).string(),
                          config.svg ? (dir / ("pdp_" + stem + ".svg")).string() : std::string{});
        } else if (const auto* lp = std::get_if<LevelProfile>(&prep.profiles[j])) {
            std::ofstream out(dir / ("levels_" + stem + ".csv"));
            out << "level,value,group\n";
            const auto* lm = std::get_if<LevelMerge>(&ft.kind);
            for (std::size_t l = 0; l < lp->levels.size(); ++l) {
                csv::write_field(out, lp->levels[l]);
                out << ',' << csv::format_number(lp->responses[l]) << ','
                    << (lm ? lm->group_of.at(lp->levels[l]) : 0) << '\n';
            }
        }
    }
}

inline std::size_t count_thresholds(const TransformSet& t)
{
    std::size_t n = 0;
    for (const auto& ft : t.transforms)
        if (const auto* nb = std::get_if<NumericBins>(&ft.kind))
            n += nb->thresholds.size();
    return n;
}

inline std::size_t count_groups(const TransformSet& t)
{
    std::size_t n = 0;
    for (const auto& ft : t.transforms)
        if (const auto* lm = std::get_if<LevelMerge>(&ft.kind))
            n += lm->group_count;
    return n;
}

} // namespace detail

/// Split, fit baseline and surrogate, extract transforms at the configured
/// penalty, refit the glass-box on transformed features and evaluate all three
/// on the test split. Writes reports when `out_dir` is set.
inline PipelineResult run_pipeline(const RunConfig& config)
{
    const auto prep = detail::prepare(config);
    auto res = detail::refine(prep, config, config.penalty);
    if (!config.out_dir.empty())
        detail::staged("report", [&] { detail::write_outputs(prep, config, res); });
    return res;
}

/// Repeats extraction and refitting for every penalty of the sweep (profiles
/// are computed once). The best penalty maximizes refined accuracy or
/// minimizes refined MSE; ties go to the larger penalty, i.e. the coarser
/// transform. Selection uses the holdout slice when configured, the
/// test split otherwise.
inline SweepResult run_sweep(const RunConfig& config, const SweepSpec& spec)
{
    const auto penalties = spec.penalties();
    const auto prep = detail::prepare(config);
    const bool cls = config.task == Task::classification;
    SweepResult out;
    std::vector<PipelineResult> runs;
    for (double lambda : penalties) {
        std::vector<EvalReport> sel;
        auto res = detail::refine(prep, config, lambda, &sel);
        SweepRow row;
        row.penalty = lambda;
        row.refined_primary = res.value("refined", cls ? "accuracy" : "mse");
        row.refined_secondary = res.value("refined", cls ? "auc" : "mse_ratio");
        if (prep.select) {
            PipelineResult tmp;
            tmp.metrics = sel;
            row.selection_primary = tmp.value("refined", cls ? "accuracy" : "mse");
            row.selection_secondary = tmp.value("refined", cls ? "auc" : "mse_ratio");
        } else {
            row.selection_primary = row.refined_primary;
            row.selection_secondary = row.refined_secondary;
        }
        row.thresholds = detail::count_thresholds(res.transforms);
        row.groups = detail::count_groups(res.transforms);
        out.rows.push_back(row);
        runs.push_back(std::move(res));
    }
    for (std::size_t k = 1; k < out.rows.size(); ++k) {
        const auto& a = out.rows[k];
        const auto& b = out.rows[out.best];
        const bool better =
            cls ? a.selection_primary >= b.selection_primary : a.selection_primary <= b.selection_primary;
        if (better)
            out.best = k;
    }
    out.best_run = runs[out.best];

    if (!config.out_dir.empty()) {
        detail::staged("report", [&] {
            detail::write_outputs(prep, config, out.best_run);
            std::ofstream csvout(std::filesystem::path(config.out_dir) / "sweep.csv");
            const char* m1 = cls ? "accuracy" : "mse";
            const char* m2 = cls ? "auc" : "mse_ratio";
            csvout << "penalty,refined_" << m1 << ",refined_" << m2;
            if (prep.select)
                csvout << ",selection_" << m1 << ",selection_" << m2;
            csvout << ",baseline_" << m1 << ",surrogate_" << m1 << ",thresholds,groups,best\n";
            const auto& first = runs.front();
            for (std::size_t k = 0; k < out.rows.size(); ++k) {
                const auto& r = out.rows[k];
                csvout << csv::format_number(r.penalty) << ',' << csv::format_number(r.refined_primary) << ','
                       << csv::format_number(r.refined_secondary);
                if (prep.select)
                    csvout << ',' << csv::format_number(r.selection_primary) << ','
                           << csv::format_number(r.selection_secondary);
                csvout << ',' << csv::format_number(first.value("baseline", m1)) << ','
                       << csv::format_number(first.value("surrogate", m1)) << ',' << r.thresholds << ','
                       << r.groups << ',' << (k == out.best ? 1 : 0) << '\n';
            }
        });
    }
    return out;
}

} // namespace safeml
