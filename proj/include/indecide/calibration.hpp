#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace indecide {

/// Binary calibration data: estimated class-1 posteriors and labels in {1, 2}.
struct BinarySample {
    std::vector<double> score;
    std::vector<int> label;

    void validate(bool need_both_labels) const;
    std::size_t size() const { return score.size(); }
};

/// K-class score vectors; labels in 1..K, or empty when unlabeled.
struct MulticlassSample {
    std::vector<std::vector<double>> scores;
    std::vector<int> label;

    void validate() const;
    std::size_t size() const { return scores.size(); }
};

/// Raw scalar observations for monotone-likelihood-ratio families
/// (class 1 toward low x, class 2 toward high x).
struct MlrSample {
    std::vector<double> x;
    std::vector<int> label;

    void validate(bool need_both_labels) const;
    std::size_t size() const { return x.size(); }
};

/// Decide iff max(eta, 1 - eta) >= tau. Predictions are 1, 2, or 0 for abstain.
struct SelectiveBinaryRule {
    double tau = 0.5;
    int predict(double eta) const;
};

/// 2 if eta <= tau1, 1 if eta > tau2, abstain in between.
struct NpRule {
    double tau1 = 0.0;
    double tau2 = 1.0;
    int predict(double eta) const;
};

/// Abstain when the max score is at or below `threshold`, else argmax (1-based).
struct MulticlassRule {
    double threshold = 0.0;
    int predict(const std::vector<double>& scores) const;
};

/// On raw x: 2 if x >= tau1, 1 if x < tau2, abstain in between.
struct MlrNpRule {
    double tau1 = 0.0;
    double tau2 = 0.0;
    int predict(double x) const;
};

/// On raw x: 2 if x >= tau, 1 if x <= -tau, abstain in between.
struct MlrAccuracyRule {
    double tau = 0.0;
    int predict(double x) const;
};

using Rule = std::variant<SelectiveBinaryRule, NpRule, MulticlassRule, MlrNpRule, MlrAccuracyRule>;

/// Name used in rule files: accuracy, np, multiclass, mlr-np, mlr-accuracy.
std::string rule_kind(const Rule& rule);

/// Numeric table of per-candidate diagnostics.
struct Trace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
};

struct CalibrationReport {
    std::string mode;
    Rule rule;
    double gamma_hat = 0.0;
    /// Error estimates at the selected candidate, in a fixed order.
    std::vector<std::pair<std::string, double>> achieved;
    bool feasible = false;
    Trace trace;

    /// Throws std::out_of_range for an unknown name.
    double achieved_value(const std::string& name) const;
};

/// Algorithm 1: candidate thresholds are the sorted confidences; the first one
/// whose running-minimum conditional error is at most alpha is returned.
CalibrationReport calibrate_accuracy(const BinarySample& cal, double alpha);

/// Abstains on the ceil(gamma * n) least confident points; ties at the cut abstain too.
CalibrationReport calibrate_accuracy_fixed_gamma(const BinarySample& cal, double gamma);

struct NpOptions {
    /// High-probability type-I rank: the budget holds with probability >= 1 - delta.
    std::optional<double> umbrella_delta;
    /// Independent sample used only to estimate type II at each grid cell.
    std::optional<BinarySample> type2_holdout;
};

/// One cell of the Algorithm 2 grid, gamma_k = k / n.
struct NpCell {
    std::size_t k = 0;
    std::size_t k_tilde = 0;
    bool valid = false;
    double gamma = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    /// Class-1 points predicted 2, over all class-1 points.
    double type1 = 0.0;
    /// Class-1 points predicted 2, over decided class-1 points.
    double type1_conditional = 0.0;
    /// Class-2 points predicted 1, over decided class-2 points.
    double type2 = 0.0;
};

/// The full grid k = 0..n on a binary sample.
std::vector<NpCell> np_grid(const BinarySample& cal, double alpha1, const NpOptions& opt = {});

/// Algorithm 2: the smallest grid cell whose type-II estimate is at most alpha2.
CalibrationReport calibrate_np(const BinarySample& cal, double alpha1, double alpha2, const NpOptions& opt = {});

CalibrationReport calibrate_multiclass_fixed_gamma(const MulticlassSample& cal, double gamma);

/// Algorithm 2 on raw observations ordered by x. Also reports the empirical
/// NP power at alpha1 and whether any indecision is needed to reach 1 - alpha2.
CalibrationReport calibrate_np_mlr(const MlrSample& cal, double alpha1, double alpha2);

/// Algorithm 1 with confidence |x| and prediction by the sign of x.
CalibrationReport calibrate_accuracy_mlr(const MlrSample& cal, double alpha);

}  // namespace indecide
