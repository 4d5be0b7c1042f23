// safeml: surrogate-assisted feature extraction pipeline runner.

#include "safeml/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace safeml;

struct CliRun {
    RunConfig config;
    std::string task = "cls";
    std::string refined;
    SweepSpec sweep;
};

void add_run_flags(CLI::App* app, CliRun& r)
{
    auto& c = r.config;
    auto* data = app->add_option("--data", c.data_path, "input CSV");
    auto* gen = app->add_option("--gen", c.generator, "synthetic generator")
                    ->check(CLI::IsMember({"simuld1", "simuld2", "apartments"}));
    data->excludes(gen);
    app->add_option("--rows", c.gen_rows, "generator rows (0 = generator default)");
    app->add_option("--target", c.target, "target column");
    app->add_option("--task", r.task, "cls or reg")->check(CLI::IsMember({"cls", "reg"}));
    app->add_option("--surrogate", c.surrogate, "gbt or cmd:<command>")->capture_default_str();
    app->add_option("--refined", r.refined, "linear, logistic or tree (default by task)")
        ->check(CLI::IsMember({"linear", "logistic", "tree"}));
    app->add_option("--split", c.split, "test fraction")->capture_default_str();
    app->add_option("--holdout", c.holdout, "fraction of training rows held out for penalty selection");
    app->add_option("--seed", c.seed, "split and generator seed")->capture_default_str();
    app->add_option("--out", c.out_dir, "output directory")->required();
    app->add_flag("--svg", c.svg, "also write SVG profile plots");
    app->add_option("--grid-points", c.extract.max_points, "profile grid size")->capture_default_str();
    app->add_option("--workers", c.extract.workers, "profile worker threads")->capture_default_str();
    app->add_flag("--keep-flat", c.extract.keep_flat_raw, "pass flat features through instead of dropping");
    app->add_option("--trees", c.gbt.n_trees, "GBT trees")->capture_default_str();
    app->add_option("--depth", c.gbt.max_depth, "GBT depth")->capture_default_str();
    app->add_option("--learning-rate", c.gbt.learning_rate, "GBT learning rate")->capture_default_str();
    app->add_option("--min-leaf", c.gbt.min_leaf, "GBT minimum leaf size")->capture_default_str();
    app->add_option("--tree-depth", c.tree_depth, "refined tree depth")->capture_default_str();
    app->add_option("--tree-min-leaf", c.tree_min_leaf, "refined tree minimum leaf")->capture_default_str();
}

void finish_config(CliRun& r)
{
    auto& c = r.config;
    if (c.data_path.empty() && c.generator.empty())
        fail(ErrorCode::invalid_argument, "[config] one of --data or --gen is required");
    c.task = r.task == "reg" ? Task::regression : Task::classification;
    if (r.refined.empty())
        c.refined = c.task == Task::regression ? RefinedKind::linear : RefinedKind::logistic;
    else
        c.refined = r.refined == "linear" ? RefinedKind::linear
                  : r.refined == "tree"   ? RefinedKind::tree
                                          : RefinedKind::logistic;
    c.gbt.seed = c.seed;
}

void print_metrics(const PipelineResult& res)
{
    for (const auto& m : res.metrics)
        std::cout << m.model << ' ' << m.metric << ' ' << csv::format_number(m.value) << '\n';
    for (const auto& w : res.warnings)
        std::cerr << "warning: " << w << '\n';
}

int pdp_command(const std::string& model_path, const std::string& data_path, const std::string& feature,
                const std::string& out, std::size_t points)
{
    const auto model = detail::staged("load", [&] { return GbtModel::from_json(read_json_file(model_path)); });
    const auto data = detail::staged("load", [&] { return load_csv_with_schema(data_path, model.schema); });
    const auto j = find_column(model.schema, feature);
    if (!j)
        fail(ErrorCode::schema_mismatch, "[pdp] no feature '" + feature + "'");
    const GbtOracle oracle(model);
    detail::staged("pdp", [&] {
        if (model.schema[*j].is_categorical()) {
            emit_profile(categorical_profile(oracle, data, feature), out);
        } else {
            const auto grid = make_grid(data.column_values(*j), points);
            emit_profile(numeric_profile(oracle, data, feature, grid), out);
        }
    });
    return 0;
}

int transform_command(const std::string& tpath, const std::string& data_path, const std::string& target,
                      const std::string& out)
{
    const auto tset = detail::staged("load", [&] { return load_transforms(tpath); });
    const auto data =
        detail::staged("load", [&] { return load_csv_with_schema(data_path, tset.source_schema, target); });
    const auto t = detail::staged("transform", [&] { return apply_transforms(tset, data); });
    detail::staged("write", [&] { save_csv(out, t); });
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"safeml: surrogate-assisted feature extraction"};
    app.require_subcommand(1);

    CliRun run;
    auto* run_cmd = app.add_subcommand("run", "fit baseline, surrogate and refined models at one penalty");
    add_run_flags(run_cmd, run);
    run_cmd->add_option("--penalty", run.config.penalty, "segmentation penalty")->capture_default_str();

    CliRun sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "repeat extraction over a penalty grid");
    add_run_flags(sweep_cmd, sw);
    sweep_cmd->add_option("--penalty-lo", sw.sweep.lo, "lowest penalty")->capture_default_str();
    sweep_cmd->add_option("--penalty-hi", sw.sweep.hi, "highest penalty")->capture_default_str();
    sweep_cmd->add_option("--penalty-k", sw.sweep.k, "number of penalties")->capture_default_str();

    std::string model_path, data_path, feature, out_path, tpath, target;
    std::size_t points = default_grid_points;
    auto* pdp_cmd = app.add_subcommand("pdp", "partial dependence profile of a saved surrogate");
    pdp_cmd->add_option("--model", model_path, "surrogate JSON")->required();
    pdp_cmd->add_option("--data", data_path, "background CSV")->required();
    pdp_cmd->add_option("--feature", feature, "feature name")->required();
    pdp_cmd->add_option("--out", out_path, "output CSV")->required();
    pdp_cmd->add_option("--grid-points", points, "profile grid size")->capture_default_str();

    auto* tr_cmd = app.add_subcommand("transform", "apply saved transforms to a CSV");
    tr_cmd->add_option("--transforms", tpath, "transforms JSON")->required();
    tr_cmd->add_option("--data", data_path, "input CSV")->required();
    tr_cmd->add_option("--target", target, "target column to carry over");
    tr_cmd->add_option("--out", out_path, "output CSV")->required();

    std::string gen_name;
    std::size_t gen_rows = 0;
    std::uint64_t gen_seed = 0;
    auto* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset to CSV");
    gen_cmd->add_option("--gen", gen_name, "generator")
        ->required()
        ->check(CLI::IsMember({"simuld1", "simuld2", "apartments"}));
    gen_cmd->add_option("--rows", gen_rows, "rows (0 = generator default)");
    gen_cmd->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen_cmd->add_option("--out", out_path, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            finish_config(run);
            print_metrics(run_pipeline(run.config));
        } else if (sweep_cmd->parsed()) {
            finish_config(sw);
            const auto res = run_sweep(sw.config, sw.sweep);
            std::cout << "best penalty " << csv::format_number(res.rows[res.best].penalty) << '\n';
            print_metrics(res.best_run);
        } else if (pdp_cmd->parsed()) {
            return pdp_command(model_path, data_path, feature, out_path, points);
        } else if (tr_cmd->parsed()) {
            return transform_command(tpath, data_path, target, out_path);
        } else if (gen_cmd->parsed()) {
            RunConfig c;
            c.generator = gen_name;
            c.gen_rows = gen_rows;
            c.seed = gen_seed;
            const auto data = detail::load_input(c);
            detail::staged("write", [&] { save_csv(out_path, data); });
        }
    } catch (const Error& e) {
        std::cerr << "safeml: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "safeml: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
