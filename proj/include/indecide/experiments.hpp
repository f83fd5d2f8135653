#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "indecide/gmm_oracle.hpp"
#include "indecide/random.hpp"

namespace indecide {

enum class Scorer { oracle_eta, lda, logistic };

Scorer parse_scorer(const std::string& name);
std::string scorer_name(Scorer s);

struct SimConfig {
    std::size_t n_train = 1000;
    std::size_t n_cal = 1000;
    std::size_t n_test = 1000;
    std::size_t reps = 200;
    std::vector<double> delta_grid{0.5, 1.0, 1.5, 2.0};
    double alpha = 0.1;
    double alpha1 = 0.1;
    double alpha2 = 0.1;
    Scorer scorer = Scorer::lda;
    std::uint64_t seed = 0;
    /// 0 means one worker per hardware thread.
    unsigned workers = 1;

    void validate() const;
};

/// Draws from the symmetric mixture with equal priors: label 1 ~ N(+delta, 1), label 2 ~ N(-delta, 1).
struct MixtureDraw {
    std::vector<double> x;
    std::vector<int> label;
};
MixtureDraw draw_mixture(RandomStream& rng, double delta, std::size_t n);

/// Exact posterior of class 1 under the mixture.
double mixture_eta(double delta, double x);

/// One arm evaluated on one (delta, replication) cell. Metrics are NaN when not applicable.
struct RepRecord {
    std::string arm;
    double delta = 0.0;
    std::size_t rep = 0;
    /// ok, infeasible, or failed.
    std::string status = "ok";
    double gamma_hat = 0.0;
    double test_gamma = 0.0;
    /// Misclassification among decided test points.
    double error = 0.0;
    double type1 = 0.0;
    double type1_conditional = 0.0;
    double type2 = 0.0;
};

/// Mean and nearest-rank 5/50/95 percentiles of one metric over replications.
struct BandRow {
    std::string arm;
    double delta = 0.0;
    std::string metric;
    std::size_t count = 0;
    double mean = 0.0;
    double p05 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
};

struct SimResult {
    std::string experiment;
    std::vector<RepRecord> records;
    std::vector<BandRow> aggregates;
};

/// Nearest-rank percentile of sorted values, q in [0, 1].
double nearest_rank(const std::vector<double>& sorted, double q);

/// Per replication and delta: Algorithm 1 on the calibration split, evaluated on the
/// test split. The exact-posterior arm always runs; a learned arm runs too unless the
/// scorer is the exact posterior.
SimResult run_accuracy_sweep(const SimConfig& cfg);

/// Arms np_baseline (grid cell k = 0), indecision (Algorithm 2) and bayes (eta >= 1/2),
/// plus the pooled band of test type II over every valid grid cell (arm `achievable`).
SimResult run_np_sweep(const SimConfig& cfg);

struct IntroConfig {
    std::vector<double> delta_grid;
    double target_error = 0.01;
    std::size_t n_empirical = 1000000;
    std::uint64_t seed = 0;
};

struct IntroRow {
    double delta = 0.0;
    double bayes_accuracy = 0.0;
    double gamma_star = 0.0;
    double selective_accuracy = 0.0;
    /// gamma_star when delta is read as the distance between the centers.
    double gamma_star_distance = 0.0;
    double empirical_gamma = 0.0;
    double empirical_error = 0.0;
};

std::vector<IntroRow> run_intro_tradeoff(const IntroConfig& cfg);

struct PhasePanel {
    std::string name;
    PhaseGrid grid;
    std::vector<EnvelopePoint> envelope;
};

struct PhaseExperimentConfig {
    std::size_t grid_points = 200;
    double level_low_c = 1e-7;
    double level_high_c = 1e-15;
};

/// Two panels: c in (0.05, 0.45) at level_low_c and c in (0.55, 0.95) at level_high_c,
/// m in (0, 1), with the exact optimal exponent per c.
std::vector<PhasePanel> run_phase_experiment(const PhaseExperimentConfig& cfg);

struct PluginGapConfig {
    double delta = 1.0;
    double gamma = 0.3;
    std::vector<std::size_t> n_train{100, 1000, 10000};
    std::size_t reps = 100;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct PluginGapRow {
    std::size_t n_train = 0;
    std::size_t count = 0;
    double median_gap = 0.0;
    double mean_gap = 0.0;
};

/// LDA fitted on n points, fixed-gamma calibration on n more; the gap is the exact
/// risk of the calibrated rule minus the optimal risk at the rule's own indecision mass.
std::vector<PluginGapRow> run_plugin_gap(const PluginGapConfig& cfg);

void write_records_csv(std::ostream& out, const SimResult& result);
void write_aggregates_csv(std::ostream& out, const SimResult& result);
void write_intro_csv(std::ostream& out, const std::vector<IntroRow>& rows);
void write_phase_csv(std::ostream& out, const PhasePanel& panel);
void write_envelope_csv(std::ostream& out, const std::vector<PhasePanel>& panels);

/// Writes CSVs and SVG charts for each experiment into `dir`; returns the files written.
std::vector<std::filesystem::path> write_sim_outputs(const SimResult& result, const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_intro_outputs(const std::vector<IntroRow>& rows, const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_phase_outputs(const std::vector<PhasePanel>& panels,
                                                       const std::filesystem::path& dir);

/// Worker count from an explicit value, else INDECIDE_WORKERS, else 1.
unsigned resolve_workers(int requested);

}  // namespace indecide
