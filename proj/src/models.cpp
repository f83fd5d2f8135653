#include "indecide/models.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include <Eigen/Dense>

#include "indecide/csv.hpp"
#include "indecide/errors.hpp"

namespace indecide {
namespace {

constexpr double kLdaRidge = 1e-6;

double dot(const std::vector<double>& w, const std::vector<double>& x) {
    if (w.size() != x.size()) {
        std::ostringstream os;
        os << "predict_eta: model expects " << w.size() << " features, got " << x.size();
        throw DomainError(os.str());
    }
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    return s;
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string indexed(const char* prefix, std::size_t j) { return std::string(prefix) + "." + std::to_string(j + 1); }

}  // namespace

void LabeledFeatures::validate(std::size_t min_per_class) const {
    if (x.empty()) throw DomainError("training data is empty");
    const std::size_t d = dim();
    if (d == 0) throw DomainError("feature vectors are empty");
    if (label.size() != x.size()) throw DomainError("label count does not match the number of rows");
    std::size_t n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != d) throw DomainError("feature rows differ in length");
        for (double v : x[i])
            if (!std::isfinite(v)) throw DomainError("features must be finite");
        if (label[i] == 1) ++n1;
        else if (label[i] == 2) ++n2;
        else throw DomainError("labels must be 1 or 2");
    }
    if (n1 < min_per_class || n2 < min_per_class) {
        std::ostringstream os;
        os << "need at least " << min_per_class << " points of each class, got " << n1 << " and " << n2;
        throw DomainError(os.str());
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

LdaModel fit_lda(const LabeledFeatures& train) {
    train.validate(2);
    const std::size_t n = train.size();
    const auto d = static_cast<Eigen::Index>(train.dim());
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(d), m2 = Eigen::VectorXd::Zero(d);
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Map<const Eigen::VectorXd> xi(train.x[i].data(), d);
        if (train.label[i] == 1) {
            m1 += xi;
            ++n1;
        } else {
            m2 += xi;
        }
    }
    const std::size_t n2 = n - n1;
    m1 /= static_cast<double>(n1);
    m2 /= static_cast<double>(n2);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Map<const Eigen::VectorXd> xi(train.x[i].data(), d);
        const Eigen::VectorXd r = xi - (train.label[i] == 1 ? m1 : m2);
        s.noalias() += r * r.transpose();
    }
    s /= static_cast<double>(n - 2);

    LdaModel m;
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    const double scale = std::max(1.0, s.diagonal().cwiseAbs().maxCoeff());
    const bool singular = llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() < 1e-12 * std::sqrt(scale);
    if (singular) {
        s += kLdaRidge * Eigen::MatrixXd::Identity(d, d);
        llt.compute(s);
        m.regularized = true;
        if (llt.info() != Eigen::Success) throw DomainError("fit_lda: covariance is not positive definite after regularization");
    }
    const Eigen::VectorXd w = llt.solve(m1 - m2);
    m.mean1 = to_vector(m1);
    m.mean2 = to_vector(m2);
    m.covariance.assign(s.data(), s.data() + s.size());
    m.prior1 = static_cast<double>(n1) / static_cast<double>(n);
    m.prior2 = static_cast<double>(n2) / static_cast<double>(n);
    m.weights = to_vector(w);
    m.bias = -0.5 * (m1 + m2).dot(w) + std::log(m.prior1 / m.prior2);
    return m;
}

LogisticModel fit_logistic(const LabeledFeatures& train, double tol, int max_iter) {
    train.validate(1);
    if (!(tol > 0.0) || max_iter < 1) throw DomainError("fit_logistic: need tol > 0 and max_iter >= 1");
    const auto n = static_cast<Eigen::Index>(train.size());
    const auto d = static_cast<Eigen::Index>(train.dim());
    Eigen::MatrixXd x(n, d + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = train.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        x(i, d) = 1.0;
        y(i) = train.label[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    auto objective = [&](const Eigen::VectorXd& beta) {
        const Eigen::VectorXd z = x * beta;
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) ll -= y(i) > 0.5 ? softplus(-z(i)) : softplus(z(i));
        return ll * inv_n - 0.5 * kLogisticRidge * beta.squaredNorm();
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
    double f = objective(beta);
    LogisticModel out;
    Eigen::VectorXd grad;
    for (int it = 0;; ++it) {
        const Eigen::VectorXd z = x * beta;
        Eigen::VectorXd p(n), wts(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p(i) = sigmoid(z(i));
            wts(i) = p(i) * (1.0 - p(i));
        }
        grad = x.transpose() * (y - p) * inv_n - kLogisticRidge * beta;
        out.iterations = it;
        if (grad.lpNorm<Eigen::Infinity>() <= tol) {
            out.converged = true;
            break;
        }
        if (it >= max_iter) break;
        Eigen::MatrixXd h = x.transpose() * wts.asDiagonal() * x * inv_n;
        h.diagonal().array() += kLogisticRidge;
        const Eigen::VectorXd step = h.ldlt().solve(grad);
        double s = 1.0;
        Eigen::VectorXd next = beta + step;
        double fn = objective(next);
        for (int halve = 0; halve < 50 && !(fn >= f); ++halve) {
            s *= 0.5;
            next = beta + s * step;
            fn = objective(next);
        }
        if (!(fn >= f)) break;
        beta = next;
        f = fn;
    }
    out.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    out.weights = to_vector(beta.head(d));
    out.bias = beta(d);
    return out;
}

double predict_eta(const LdaModel& model, const std::vector<double>& x) { return sigmoid(dot(model.weights, x) + model.bias); }

double predict_eta(const LogisticModel& model, const std::vector<double>& x) {
    return sigmoid(dot(model.weights, x) + model.bias);
}

double predict_eta(const Model& model, const std::vector<double>& x) {
    return std::visit([&](const auto& m) { return predict_eta(m, x); }, model);
}

KeyValueDoc model_document(const Model& model) {
    KeyValueDoc d;
    d.set("format_version", std::to_string(kDocumentVersion));
    if (const auto* lda = std::get_if<LdaModel>(&model)) {
        d.set("kind", "lda");
        d.set("dim", std::to_string(lda->weights.size()));
        d.set("prior1", lda->prior1);
        d.set("prior2", lda->prior2);
        d.set("regularized", lda->regularized ? "true" : "false");
        for (std::size_t j = 0; j < lda->mean1.size(); ++j) d.set(indexed("mean1", j), lda->mean1[j]);
        for (std::size_t j = 0; j < lda->mean2.size(); ++j) d.set(indexed("mean2", j), lda->mean2[j]);
        for (std::size_t j = 0; j < lda->covariance.size(); ++j) d.set(indexed("covariance", j), lda->covariance[j]);
        for (std::size_t j = 0; j < lda->weights.size(); ++j) d.set(indexed("weight", j), lda->weights[j]);
        d.set("bias", lda->bias);
    } else {
        const auto& lr = std::get<LogisticModel>(model);
        d.set("kind", "logistic");
        d.set("dim", std::to_string(lr.weights.size()));
        d.set("converged", lr.converged ? "true" : "false");
        d.set("iterations", std::to_string(lr.iterations));
        d.set("gradient_norm", lr.gradient_norm);
        for (std::size_t j = 0; j < lr.weights.size(); ++j) d.set(indexed("weight", j), lr.weights[j]);
        d.set("bias", lr.bias);
    }
    return d;
}

Model model_from_document(const KeyValueDoc& doc) {
    if (doc.get("format_version") != std::to_string(kDocumentVersion)) throw SchemaError("unsupported model version");
    const std::string& kind = doc.get("kind");
    const long long dim = parse_int(doc.get("dim"));
    if (dim < 1) throw SchemaError("model dim must be positive");
    const auto d = static_cast<std::size_t>(dim);
    auto read_vec = [&](const char* prefix, std::size_t len) {
        std::vector<double> v(len);
        for (std::size_t j = 0; j < len; ++j) v[j] = doc.get_double(indexed(prefix, j));
        return v;
    };
    if (kind == "lda") {
        LdaModel m;
        m.prior1 = doc.get_double("prior1");
        m.prior2 = doc.get_double("prior2");
        m.regularized = doc.get("regularized") == "true";
        m.mean1 = read_vec("mean1", d);
        m.mean2 = read_vec("mean2", d);
        m.covariance = read_vec("covariance", d * d);
        m.weights = read_vec("weight", d);
        m.bias = doc.get_double("bias");
        return m;
    }
    if (kind == "logistic") {
        LogisticModel m;
        m.converged = doc.get("converged") == "true";
        m.iterations = static_cast<int>(parse_int(doc.get("iterations")));
        m.gradient_norm = doc.get_double("gradient_norm");
        m.weights = read_vec("weight", d);
        m.bias = doc.get_double("bias");
        return m;
    }
    throw SchemaError("unknown model kind '" + kind + "'");
}

LabeledFeatures read_features_csv(std::istream& in, bool need_labels) {
    const CsvTable t = read_csv(in);
    std::vector<std::size_t> cols;
    for (std::size_t j = 1;; ++j) {
        const std::size_t c = t.column("f_" + std::to_string(j));
        if (c == std::string::npos) break;
        cols.push_back(c);
    }
    if (cols.empty()) throw SchemaError("feature table needs columns f_1..f_d", 1);
    const std::size_t label_col = need_labels ? t.require_column("label") : t.column("label");
    LabeledFeatures out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::vector<double> row;
        row.reserve(cols.size());
        for (std::size_t c : cols) {
            const double v = parse_double(t.rows[r][c], t.lines[r]);
            if (!std::isfinite(v)) throw SchemaError("features must be finite", t.lines[r]);
            row.push_back(v);
        }
        out.x.push_back(std::move(row));
        if (label_col != std::string::npos) {
            const long long y = parse_int(t.rows[r][label_col], t.lines[r]);
            if (y != 1 && y != 2) throw SchemaError("label must be 1 or 2", t.lines[r]);
            out.label.push_back(static_cast<int>(y));
        }
    }
    return out;
}

}  // namespace indecide
