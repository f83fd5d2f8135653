#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "indecide/report_io.hpp"

namespace indecide {

/// Feature rows with labels in {1, 2}.
struct LabeledFeatures {
    std::vector<std::vector<double>> x;
    std::vector<int> label;

    std::size_t size() const { return x.size(); }
    std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }
    /// Nonempty, equal-length finite rows, and `min_per_class` points of each class.
    void validate(std::size_t min_per_class) const;
};

/// Gaussian discriminant with a shared covariance.
struct LdaModel {
    std::vector<double> mean1;
    std::vector<double> mean2;
    /// Pooled within-class covariance, row-major d x d.
    std::vector<double> covariance;
    double prior1 = 0.5;
    double prior2 = 0.5;
    /// Set when the pooled covariance was singular and a ridge was added.
    bool regularized = false;
    /// eta(x) = sigmoid(weights . x + bias).
    std::vector<double> weights;
    double bias = 0.0;
};

LdaModel fit_lda(const LabeledFeatures& train);

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    bool converged = false;
    int iterations = 0;
    /// Max-norm gradient of the per-sample objective at the returned parameters.
    double gradient_norm = 0.0;
};

constexpr double kLogisticRidge = 1e-8;

/// Damped Newton on the mean log-likelihood with a small ridge. Returns the
/// last iterate with converged = false when max_iter is exhausted.
LogisticModel fit_logistic(const LabeledFeatures& train, double tol = 1e-8, int max_iter = 100);

/// Estimated P(Y = 1 | x). Throws DomainError on a dimension mismatch.
double predict_eta(const LdaModel& model, const std::vector<double>& x);
double predict_eta(const LogisticModel& model, const std::vector<double>& x);

/// Numerically safe logistic function.
double sigmoid(double z);

using Model = std::variant<LdaModel, LogisticModel>;

double predict_eta(const Model& model, const std::vector<double>& x);
KeyValueDoc model_document(const Model& model);
Model model_from_document(const KeyValueDoc& doc);

/// CSV with columns f_1..f_d and an optional `label` column (required when `need_labels`).
LabeledFeatures read_features_csv(std::istream& in, bool need_labels);

}  // namespace indecide
