#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "indecide/errors.hpp"
#include "indecide/experiments.hpp"

using namespace indecide;

namespace {

std::string csv_of(const SimResult& r) {
    std::ostringstream a;
    write_records_csv(a, r);
    write_aggregates_csv(a, r);
    return a.str();
}

const BandRow& find_band(const SimResult& r, const std::string& arm, double delta, const std::string& metric) {
    for (const auto& b : r.aggregates)
        if (b.arm == arm && b.delta == delta && b.metric == metric) return b;
    throw std::runtime_error("band not found");
}

}  // namespace

TEST(NearestRank, Percentiles) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(nearest_rank(v, 0.0), 1);
    EXPECT_EQ(nearest_rank(v, 0.05), 1);
    EXPECT_EQ(nearest_rank(v, 0.5), 5);
    EXPECT_EQ(nearest_rank(v, 0.95), 10);
    EXPECT_EQ(nearest_rank(v, 1.0), 10);
    EXPECT_TRUE(std::isnan(nearest_rank({}, 0.5)));
}

TEST(Mixture, PosteriorAndDraws) {
    EXPECT_EQ(mixture_eta(1.0, 0.0), 0.5);
    const double x = 0.7, d = 1.3;
    const double p1 = std::exp(-0.5 * (x - d) * (x - d)), p2 = std::exp(-0.5 * (x + d) * (x + d));
    EXPECT_NEAR(mixture_eta(d, x), p1 / (p1 + p2), 1e-15);
    RandomStream rng(1, 0);
    const auto m = draw_mixture(rng, 2.0, 20000);
    double s1 = 0, n1 = 0;
    for (std::size_t i = 0; i < m.x.size(); ++i)
        if (m.label[i] == 1) s1 += m.x[i], ++n1;
    EXPECT_NEAR(n1 / 20000, 0.5, 0.015);
    EXPECT_NEAR(s1 / n1, 2.0, 0.03);
}

TEST(Scorer, Names) {
    for (auto s : {Scorer::oracle_eta, Scorer::lda, Scorer::logistic}) EXPECT_EQ(parse_scorer(scorer_name(s)), s);
    EXPECT_THROW(parse_scorer("forest"), Error);
}

TEST(Determinism, SweepsIdenticalAcrossWorkerCounts) {
    SimConfig cfg;
    cfg.n_train = cfg.n_cal = cfg.n_test = 300;
    cfg.reps = 6;
    cfg.delta_grid = {0.5, 1.5};
    cfg.seed = 99;
    cfg.workers = 1;
    const auto a1 = csv_of(run_accuracy_sweep(cfg)), n1 = csv_of(run_np_sweep(cfg));
    cfg.workers = 4;
    EXPECT_EQ(csv_of(run_accuracy_sweep(cfg)), a1);
    EXPECT_EQ(csv_of(run_np_sweep(cfg)), n1);
    cfg.seed = 100;
    EXPECT_NE(csv_of(run_accuracy_sweep(cfg)), a1);
}

TEST(AccuracySweep, OracleScorerControlsError) {
    SimConfig cfg;
    cfg.n_cal = cfg.n_test = 1000;
    cfg.reps = 200;
    cfg.delta_grid = {0.5, 1.0, 2.0};
    cfg.scorer = Scorer::oracle_eta;
    cfg.seed = 3;
    cfg.workers = 0;
    const auto r = run_accuracy_sweep(cfg);
    for (double d : {0.5, 1.0}) EXPECT_NEAR(find_band(r, "oracle", d, "error").mean, 0.1, 0.01) << d;
    // the Bayes error at delta 2 is 0.023, below alpha, so nothing needs to abstain
    EXPECT_LE(find_band(r, "oracle", 2.0, "error").mean, 0.1);
    EXPECT_LE(find_band(r, "oracle", 2.0, "gamma_hat").p50, 0.01);
}

TEST(NpSweep, LooseTargetsNeedNoIndecision) {
    SimConfig cfg;
    cfg.n_train = cfg.n_cal = cfg.n_test = 500;
    cfg.reps = 10;
    cfg.delta_grid = {2.0, 3.0};
    cfg.alpha1 = cfg.alpha2 = 0.5;
    cfg.seed = 4;
    const auto r = run_np_sweep(cfg);
    for (const auto& rec : r.records)
        if (rec.arm == "indecision") EXPECT_EQ(rec.gamma_hat, 0.0);
    EXPECT_GT(find_band(r, "achievable", 2.0, "type2").count, 0u);
}

TEST(IntroTradeoff, UnitSeparation) {
    IntroConfig cfg;
    cfg.delta_grid = {1.0, 2.3263478740408408};
    cfg.n_empirical = 200000;
    cfg.seed = 5;
    const auto rows = run_intro_tradeoff(cfg);
    EXPECT_NEAR(rows[0].bayes_accuracy, 0.841, 0.0005);
    EXPECT_NEAR(rows[0].selective_accuracy, 0.99, 1e-9);
    EXPECT_GT(rows[0].gamma_star, 0.5);
    EXPECT_GT(rows[0].gamma_star_distance, rows[0].gamma_star);
    EXPECT_NEAR(rows[0].empirical_gamma, rows[0].gamma_star, 0.03);
    EXPECT_NEAR(rows[0].empirical_error, 0.01, 0.003);
    EXPECT_NEAR(rows[1].gamma_star, 0.0, 1e-6);
}

TEST(PhaseExperiment, PanelsAndEnvelope) {
    PhaseExperimentConfig cfg;
    cfg.grid_points = 12;
    const auto panels = run_phase_experiment(cfg);
    ASSERT_EQ(panels.size(), 2u);
    EXPECT_EQ(panels[0].grid.cells.size(), 144u);
    EXPECT_EQ(panels[1].envelope.size(), 12u);
    const auto dir = std::filesystem::temp_directory_path() / "indecide_phase_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto files = write_phase_outputs(panels, dir);
    EXPECT_GE(files.size(), 3u);
    std::ifstream csv(dir / "phase_low_c.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "c,m,gamma,t,risk_ratio_raw,risk_ratio_capped");
}

TEST(PluginGap, RunsAndIsDeterministic) {
    PluginGapConfig cfg;
    cfg.n_train = {50, 500};
    cfg.reps = 20;
    cfg.seed = 6;
    const auto a = run_plugin_gap(cfg);
    cfg.workers = 3;
    const auto b = run_plugin_gap(cfg);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].median_gap, b[i].median_gap);
        EXPECT_GE(a[i].median_gap, -1e-12);
        EXPECT_EQ(a[i].count, 20u);
    }
}

TEST(Workers, Resolution) {
    EXPECT_EQ(resolve_workers(3), 3u);
    setenv("INDECIDE_WORKERS", "5", 1);
    EXPECT_EQ(resolve_workers(0), 5u);
    setenv("INDECIDE_WORKERS", "junk", 1);
    EXPECT_EQ(resolve_workers(0), 1u);
    unsetenv("INDECIDE_WORKERS");
    EXPECT_EQ(resolve_workers(0), 1u);
}

TEST(SimConfig, Validation) {
    SimConfig cfg;
    cfg.alpha = 1.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    SimConfig empty;
    empty.delta_grid.clear();
    EXPECT_THROW(empty.validate(), DomainError);
}
