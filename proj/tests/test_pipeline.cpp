#include "safeml/generators.hpp"
#include "safeml/pipeline.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace safeml;
namespace fs = std::filesystem;

namespace {

const GbtConfig simuld2_gbt{100, 2, 0.1, 20, 0};

fs::path fresh_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("safeml_pipe_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Runs the CLI with stdout/stderr captured into `dir`; returns the exit code.
int cli(const std::string& args, const fs::path& dir)
{
    const std::string cmd = std::string(SAFEML_CLI) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                            (dir / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

RunConfig simuld2_config(std::uint64_t seed)
{
    RunConfig c;
    c.generator = "simuld2";
    c.task = Task::classification;
    c.refined = RefinedKind::logistic;
    c.gbt = simuld2_gbt;
    c.gbt.seed = seed;
    c.seed = seed;
    return c;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            cells.push_back(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace

TEST(Pipeline, Simuld2ReportsThreeModels)
{
    auto c = simuld2_config(0);
    c.penalty = 0.5;
    const auto res = run_pipeline(c);
    for (const char* model : {"baseline", "surrogate", "refined"})
        for (const char* metric : {"accuracy", "auc"}) {
            const double v = res.value(model, metric);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    EXPECT_EQ(res.metrics.size(), 6u);
    EXPECT_GE(res.value("refined", "accuracy"), res.value("baseline", "accuracy"));
    EXPECT_GE(res.value("refined", "auc"), res.value("baseline", "auc"));
}

TEST(Pipeline, TrueFeaturesBeatRawOnSimuld2)
{
    // sanity check of the benchmark itself: a logistic model on the
    // ground-truth encoding must clearly beat the raw-feature model
    const auto g = gen_simuld2(500, 0);
    const auto parts = split(g.data, 0.3, 0);
    auto truth_design = [](const Dataset& d) {
        DesignMatrix m;
        m.names = {"mid", "grp1", "grp2"};
        m.x.resize(static_cast<Eigen::Index>(d.n()), 3);
        for (std::size_t i = 0; i < d.n(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto grp = simuld2_group(static_cast<std::size_t>(d.cell(i, 1)));
            m.x(r, 0) = simuld2_step(d.cell(i, 0)) == 1 ? 1.0 : 0.0;
            m.x(r, 1) = grp == 1 ? 1.0 : 0.0;
            m.x(r, 2) = grp == 2 ? 1.0 : 0.0;
        }
        return m;
    };
    const auto bayes = fit_logistic(truth_design(parts.train), parts.train.target());
    const auto naive = fit_logistic(design_matrix(parts.train), parts.train.target());
    const double acc_bayes = accuracy(parts.test.target(), bayes.predict_proba(truth_design(parts.test)));
    const double acc_naive = accuracy(parts.test.target(), naive.predict_proba(design_matrix(parts.test)));
    EXPECT_GT(acc_bayes, acc_naive + 0.1);
}

TEST(Pipeline, BostonReportsMseAndRatio)
{
    RunConfig c;
    c.data_path = std::string(SAFEML_DATA_DIR) + "/boston.csv";
    c.target = "medv";
    c.task = Task::regression;
    c.refined = RefinedKind::linear;
    c.penalty = 1.0;
    const auto res = run_pipeline(c);
    for (const char* model : {"baseline", "surrogate", "refined"}) {
        EXPECT_GT(res.value(model, "mse"), 0.0);
        EXPECT_NEAR(res.value(model, "mse_ratio"), res.value("baseline", "mse") / res.value(model, "mse"), 1e-12);
    }
    EXPECT_EQ(res.value("baseline", "mse_ratio"), 1.0);
}

TEST(Pipeline, ConstantTargetCompletes)
{
    const auto g = gen_apartments(200, 1);
    const auto dir = fresh_dir("constant");
    std::vector<double> cells(g.data.cells().begin(), g.data.cells().end());
    const Dataset flat(g.data.schema(), cells, std::vector<double>(g.data.n(), 5.0), TargetKind::continuous, "price");
    save_csv((dir / "flat.csv").string(), flat);
    RunConfig c;
    c.data_path = (dir / "flat.csv").string();
    c.target = "price";
    c.task = Task::regression;
    c.refined = RefinedKind::linear;
    c.out_dir = (dir / "out").string();
    const auto res = run_pipeline(c);
    for (const char* model : {"baseline", "surrogate", "refined"})
        EXPECT_NEAR(res.value(model, "mse"), 0.0, 1e-18) << model;
    for (const auto& ft : res.transforms.transforms)
        EXPECT_TRUE(std::holds_alternative<Drop>(ft.kind));
    EXPECT_TRUE(fs::exists(dir / "out" / "report.csv"));
}

TEST(Pipeline, TaskMismatchIsStageTagged)
{
    // classification on a continuous target
    auto c = simuld2_config(0);
    c.generator = "apartments";
    try {
        run_pipeline(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find('['), std::string::npos) << e.what();
    }
}

TEST(Sweep, SingletonEqualsRun)
{
    auto c = simuld2_config(3);
    c.penalty = 0.7;
    const auto single = run_sweep(c, SweepSpec{0.7, 0.7, 1});
    const auto run = run_pipeline(c);
    ASSERT_EQ(single.rows.size(), 1u);
    EXPECT_EQ(single.best_run.transforms, run.transforms);
    ASSERT_EQ(single.best_run.metrics.size(), run.metrics.size());
    for (std::size_t k = 0; k < run.metrics.size(); ++k) {
        EXPECT_EQ(single.best_run.metrics[k].model, run.metrics[k].model);
        EXPECT_EQ(single.best_run.metrics[k].value, run.metrics[k].value);
    }
}

TEST(Sweep, PenaltyGrid)
{
    const auto p = SweepSpec{}.penalties();
    ASSERT_EQ(p.size(), 25u);
    EXPECT_EQ(p.front(), 0.01);
    EXPECT_EQ(p.back(), 10.0);
    EXPECT_NEAR(p[1] - p[0], 9.99 / 24.0, 1e-15);
    EXPECT_THROW((SweepSpec{1.0, 0.5, 3}.penalties()), Error);
    EXPECT_THROW((SweepSpec{0.0, 1.0, 0}.penalties()), Error);
}

TEST(Sweep, BestRowDominatesCsv)
{
    for (const std::string task : {"cls", "reg"}) {
        const auto dir = fresh_dir("sweep_" + task);
        const std::string src = task == "cls" ? "--gen simuld2 --seed 1 --depth 2 --min-leaf 20"
                                              : "--data " + std::string(SAFEML_DATA_DIR) + "/boston.csv --target medv";
        ASSERT_EQ(cli("sweep " + src + " --task " + task + " --penalty-k 9 --out " + (dir / "out").string(), dir), 0)
            << slurp(dir / "stderr.txt");
        const auto rows = read_rows(dir / "out" / "sweep.csv");
        ASSERT_EQ(rows.size(), 10u);
        const auto& head = rows[0];
        const auto col = [&](const std::string& name) {
            return static_cast<std::size_t>(std::find(head.begin(), head.end(), name) - head.begin());
        };
        const std::size_t metric = col(task == "cls" ? "refined_accuracy" : "refined_mse");
        const std::size_t best = col("best");
        ASSERT_LT(metric, head.size());
        ASSERT_LT(best, head.size());
        int flagged = 0;
        double best_value = 0.0;
        for (std::size_t r = 1; r < rows.size(); ++r)
            if (rows[r][best] == "1") {
                ++flagged;
                best_value = std::stod(rows[r][metric]);
            }
        ASSERT_EQ(flagged, 1);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const double v = std::stod(rows[r][metric]);
            if (task == "cls")
                EXPECT_GE(best_value, v);
            else
                EXPECT_LE(best_value, v);
        }
        EXPECT_NE(slurp(dir / "stdout.txt").find("best penalty"), std::string::npos);
    }
}

TEST(Sweep, HoldoutAddsSelectionColumns)
{
    auto c = simuld2_config(2);
    c.holdout = 0.25;
    const auto dir = fresh_dir("holdout");
    c.out_dir = dir.string();
    const auto res = run_sweep(c, SweepSpec{0.01, 10.0, 5});
    const auto rows = read_rows(dir / "sweep.csv");
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_NE(std::find(rows[0].begin(), rows[0].end(), "selection_accuracy"), rows[0].end());
    for (const auto& r : res.rows)
        EXPECT_LE(r.selection_primary, res.rows[res.best].selection_primary);
}

TEST(Cli, RunIsDeterministic)
{
    const auto dir = fresh_dir("determinism");
    const std::string args = "run --gen simuld2 --seed 4 --penalty 0.5 --svg --out ";
    ASSERT_EQ(cli(args + (dir / "a").string(), dir), 0) << slurp(dir / "stderr.txt");
    ASSERT_EQ(cli(args + (dir / "b").string(), dir), 0) << slurp(dir / "stderr.txt");
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        const auto other = dir / "b" / e.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
        ++files;
    }
    EXPECT_EQ(files, static_cast<std::size_t>(std::distance(fs::directory_iterator(dir / "b"), {})));
    for (const char* f : {"report.csv", "report.txt", "transforms.json", "refined_model.json",
                          "baseline_model.json", "surrogate.json", "pdp_X1.csv", "pdp_X1.svg", "levels_X2.csv"})
        EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
    const auto report = read_rows(dir / "a" / "report.csv");
    EXPECT_EQ(report[0], (std::vector<std::string>{"model", "metric", "value"}));
    EXPECT_EQ(report.size(), 7u);
}

TEST(Cli, ErrorsExitNonzeroWithStage)
{
    const auto dir = fresh_dir("errors");
    EXPECT_NE(cli("run --data /nonexistent.csv --target y --out " + (dir / "o").string(), dir), 0);
    const auto err = slurp(dir / "stderr.txt");
    EXPECT_NE(err.find("[load]"), std::string::npos) << err;

    EXPECT_NE(cli("run --gen simuld2 --surrogate cmd:/nonexistent/oracle --out " + (dir / "o").string(), dir), 0);
    EXPECT_NE(slurp(dir / "stderr.txt").find("[surrogate]"), std::string::npos) << slurp(dir / "stderr.txt");

    EXPECT_NE(cli("run --gen apartments --task cls --out " + (dir / "o").string(), dir), 0);
    EXPECT_NE(cli("bogus", dir), 0);
}

TEST(Cli, PdpAndTransformSubcommands)
{
    const auto dir = fresh_dir("subcommands");
    ASSERT_EQ(cli("gen --gen apartments --rows 300 --seed 2 --out " + (dir / "apt.csv").string(), dir), 0)
        << slurp(dir / "stderr.txt");
    const auto data = load_csv((dir / "apt.csv").string(), "m2_price");
    ASSERT_EQ(data.n(), 300u);
    ASSERT_EQ(cli("run --data " + (dir / "apt.csv").string() +
                      " --target m2_price --task reg --penalty 0.3 --out " + (dir / "out").string(),
                  dir),
              0)
        << slurp(dir / "stderr.txt");

    // pdp of the saved surrogate equals the library profile of the same model
    ASSERT_EQ(cli("pdp --model " + (dir / "out" / "surrogate.json").string() + " --data " + (dir / "apt.csv").string() +
                      " --feature surface --grid-points 20 --out " + (dir / "pdp.csv").string(),
                  dir),
              0)
        << slurp(dir / "stderr.txt");
    const auto model = GbtModel::from_json(read_json_file((dir / "out" / "surrogate.json").string()));
    const GbtOracle oracle(model);
    const auto j = *find_column(data.schema(), "surface");
    const auto prof = numeric_profile(oracle, data, "surface", make_grid(data.column_values(j), 20));
    std::ostringstream want;
    write_profile(want, prof);
    EXPECT_EQ(slurp(dir / "pdp.csv"), want.str());

    ASSERT_EQ(cli("transform --transforms " + (dir / "out" / "transforms.json").string() + " --data " +
                      (dir / "apt.csv").string() + " --target m2_price --out " + (dir / "t.csv").string(),
                  dir),
              0)
        << slurp(dir / "stderr.txt");
    const auto t = load_transforms((dir / "out" / "transforms.json").string());
    std::ostringstream want_t;
    write_csv(want_t, apply_transforms(t, data));
    EXPECT_EQ(slurp(dir / "t.csv"), want_t.str());
}

TEST(Cli, ExternalSurrogate)
{
    // an external oracle echoing X1 acts as the surrogate f(x) = X1
    const auto dir = fresh_dir("external");
    auto c = simuld2_config(0);
    c.generator = "apartments";
    c.task = Task::regression;
    c.refined = RefinedKind::linear;
    c.surrogate = "cmd:" + std::string(SAFEML_ECHO_ORACLE) + " 0";
    c.out_dir = dir.string();
    const auto res = run_pipeline(c);
    EXPECT_FALSE(fs::exists(dir / "surrogate.json"));
    // a linear profile is cut somewhere at a small penalty; the other features are flat
    EXPECT_TRUE(std::holds_alternative<NumericBins>(res.transforms.transforms[0].kind));
    for (std::size_t k = 1; k < res.transforms.transforms.size(); ++k)
        EXPECT_TRUE(std::holds_alternative<Drop>(res.transforms.transforms[k].kind));
}

TEST(EmitPdpPlot, CsvAndSvg)
{
    const auto dir = fresh_dir("plot");
    const Profile p{"x", {0.0, 1.0, 2.0}, {0.5, 0.5, 2.0}};
    const std::vector<double> t{1.5};
    emit_pdp_plot(p, t, (dir / "p.csv").string(), (dir / "p.svg").string());
    EXPECT_EQ(slurp(dir / "p.csv"), "grid,value\n0,0.5\n1,0.5\n2,2\n\nthreshold\n1.5\n");
    const auto svg = slurp(dir / "p.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("<line"), std::string::npos);
}
