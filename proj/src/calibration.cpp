#include "indecide/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>

#include "indecide/errors.hpp"

namespace indecide {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTol = 1e-12;

void check_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
        std::ostringstream os;
        os << name << " must lie in (0, 1), got " << v;
        throw DomainError(os.str());
    }
}

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        std::ostringstream os;
        os << "gamma must lie in [0, 1), got " << gamma;
        throw DomainError(os.str());
    }
}

void check_labels(const std::vector<int>& label, std::size_t n, int k, bool need_all) {
    if (label.size() != n) throw DomainError("sample: label count does not match the number of records");
    std::vector<bool> seen(static_cast<std::size_t>(k) + 1, false);
    for (int y : label) {
        if (y < 1 || y > k) {
            std::ostringstream os;
            os << "sample: label " << y << " outside 1.." << k;
            throw DomainError(os.str());
        }
        seen[static_cast<std::size_t>(y)] = true;
    }
    if (need_all)
        for (int y = 1; y <= k; ++y)
            if (!seen[static_cast<std::size_t>(y)]) throw DomainError("sample: every class must be present");
}

std::vector<std::size_t> stable_order(const std::vector<double>& key) {
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    return order;
}

std::size_t ceil_count(double gamma, std::size_t n) {
    const double a = std::ceil(gamma * static_cast<double>(n) - 1e-9);
    return static_cast<std::size_t>(std::max(0.0, std::min(a, static_cast<double>(n))));
}

struct AccuracyCore {
    bool feasible = false;
    double tau = 0.0;
    std::size_t abstained = 0;
    double error = 0.0;
    Trace trace;
};

// Algorithm 1 on precomputed confidences; the prediction at each point does not
// depend on the threshold, only whether it is made.
AccuracyCore accuracy_core(const std::vector<double>& conf, const std::vector<bool>& correct, double alpha) {
    const std::size_t n = conf.size();
    const auto order = stable_order(conf);
    std::vector<std::size_t> wrong_suffix(n + 1, 0);
    for (std::size_t p = n; p-- > 0;) wrong_suffix[p] = wrong_suffix[p + 1] + (correct[order[p]] ? 0 : 1);

    AccuracyCore out;
    out.trace.columns = {"i", "tau", "decided", "errors", "risk", "running_min"};
    out.trace.rows.reserve(n);
    double running = kInf;
    std::size_t group = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (p == 0 || conf[order[p]] != conf[order[p - 1]]) group = p;
        const std::size_t decided = n - group;
        const std::size_t errors = wrong_suffix[group];
        const double risk = decided ? static_cast<double>(errors) / static_cast<double>(decided) : 0.0;
        running = std::min(running, risk);
        out.trace.rows.push_back({static_cast<double>(p + 1), conf[order[p]], static_cast<double>(decided),
                                  static_cast<double>(errors), risk, running});
        if (!out.feasible && running <= alpha) {
            out.feasible = true;
            out.tau = conf[order[p]];
            out.abstained = group;
            out.error = risk;
        }
    }
    if (!out.feasible) {
        out.abstained = n;
        out.error = running;
    }
    return out;
}

struct FixedCore {
    double tau = 0.0;
    std::size_t abstained = 0;
    double error = 0.0;
};

// Abstains on the ceil(gamma n) least confident points and on any ties with the last of them.
FixedCore fixed_gamma_core(const std::vector<double>& conf, const std::vector<bool>& correct, double gamma,
                           double all_abstain_tau) {
    const std::size_t n = conf.size();
    const auto order = stable_order(conf);
    const std::size_t a = ceil_count(gamma, n);
    FixedCore out;
    std::size_t cut = a;
    if (a == 0) {
        out.tau = conf[order[0]];
    } else {
        const double last = conf[order[a - 1]];
        while (cut < n && conf[order[cut]] <= last) ++cut;
        out.tau = cut < n ? conf[order[cut]] : all_abstain_tau;
    }
    out.abstained = cut;
    std::size_t wrong = 0;
    for (std::size_t p = cut; p < n; ++p) wrong += correct[order[p]] ? 0 : 1;
    const std::size_t decided = n - cut;
    out.error = decided ? static_cast<double>(wrong) / static_cast<double>(decided) : 0.0;
    return out;
}

int binary_prediction(double eta) { return eta >= 0.5 ? 1 : 2; }

// Largest r with P(Bin(n1, a) <= r - 1) <= delta, i.e. the r-th smallest class-1
// score exceeds the a-quantile with probability at most delta. Zero when none.
std::size_t umbrella_rank(std::size_t n1, double a, double delta) {
    if (a <= 0.0) return 0;
    if (a >= 1.0) return n1;
    const boost::math::binomial_distribution<double> bin(static_cast<double>(n1), a);
    auto ok = [&](std::size_t r) { return boost::math::cdf(bin, static_cast<double>(r - 1)) <= delta; };
    if (!ok(1)) return 0;
    std::size_t lo = 1, hi = n1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (ok(mid)) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

// Algorithm 2 over ranks of `key` (ascending key = toward class 2). Thresholds are
// reported in key units; callers translate them.
std::vector<NpCell> np_grid_core(const std::vector<double>& key, const std::vector<int>& label, double alpha1,
                                 const NpOptions& opt, bool key_is_eta) {
    const std::size_t n = key.size();
    const auto order = stable_order(key);
    std::vector<std::size_t> c1(n + 1, 0), c2(n + 1, 0);
    for (std::size_t r = 1; r <= n; ++r) {
        const int y = label[order[r - 1]];
        c1[r] = c1[r - 1] + (y == 1 ? 1 : 0);
        c2[r] = c2[r - 1] + (y == 2 ? 1 : 0);
    }
    const std::size_t n1 = c1[n];
    const double dn1 = static_cast<double>(n1);

    std::vector<double> holdout2;
    if (opt.type2_holdout) {
        if (!key_is_eta) throw DomainError("type-II holdout is only supported for score samples");
        const BinarySample& h = *opt.type2_holdout;
        h.validate(false);
        for (std::size_t i = 0; i < h.size(); ++i)
            if (h.label[i] == 2) holdout2.push_back(h.score[i]);
        if (holdout2.empty()) throw DomainError("type-II holdout needs class-2 records");
        std::sort(holdout2.begin(), holdout2.end());
    }

    std::vector<NpCell> cells(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        NpCell& cell = cells[k];
        cell.k = k;
        cell.gamma = static_cast<double>(k) / static_cast<double>(n);
        const double target = (1.0 - cell.gamma) * alpha1;
        std::size_t kt = 0;
        if (opt.umbrella_delta) {
            const std::size_t r = umbrella_rank(n1, target, *opt.umbrella_delta);
            if (r > 0) kt = static_cast<std::size_t>(std::upper_bound(c1.begin(), c1.end(), r - 1) - c1.begin()) - 1;
        } else {
            const auto budget = static_cast<std::size_t>(std::floor(target * dn1 + 1e-9));
            kt = static_cast<std::size_t>(std::upper_bound(c1.begin(), c1.end(), budget) - c1.begin()) - 1;
        }
        cell.k_tilde = kt;
        cell.tau1 = kt > 0 ? key[order[kt - 1]] : -kInf;
        cell.valid = kt + k <= n;
        if (!cell.valid) {
            cell.tau2 = cell.type1 = cell.type1_conditional = cell.type2 = kNaN;
            continue;
        }
        cell.tau2 = kt + k > 0 ? key[order[kt + k - 1]] : -kInf;
        const std::size_t class1_pred2 = c1[kt];
        const std::size_t class1_decided = class1_pred2 + (c1[n] - c1[kt + k]);
        cell.type1 = n1 ? static_cast<double>(class1_pred2) / dn1 : 0.0;
        cell.type1_conditional =
            class1_decided ? static_cast<double>(class1_pred2) / static_cast<double>(class1_decided) : 0.0;
        if (opt.type2_holdout) {
            const auto below = static_cast<std::size_t>(
                std::upper_bound(holdout2.begin(), holdout2.end(), cell.tau1) - holdout2.begin());
            const auto above = static_cast<std::size_t>(
                holdout2.end() - std::upper_bound(holdout2.begin(), holdout2.end(), cell.tau2));
            const std::size_t decided = below + above;
            cell.type2 = decided ? static_cast<double>(above) / static_cast<double>(decided) : 0.0;
        } else {
            const std::size_t class2_pred1 = c2[n] - c2[kt + k];
            const std::size_t class2_decided = c2[kt] + class2_pred1;
            cell.type2 = class2_decided ? static_cast<double>(class2_pred1) / static_cast<double>(class2_decided) : 0.0;
        }
    }
    return cells;
}

Trace np_trace(const std::vector<NpCell>& cells) {
    Trace t;
    t.columns = {"k", "gamma", "k_tilde", "tau1", "tau2", "type1", "type1_conditional", "type2", "valid"};
    t.rows.reserve(cells.size());
    for (const NpCell& c : cells)
        t.rows.push_back({static_cast<double>(c.k), c.gamma, static_cast<double>(c.k_tilde), c.tau1, c.tau2, c.type1,
                          c.type1_conditional, c.type2, c.valid ? 1.0 : 0.0});
    return t;
}

// Index of the selected cell and whether it meets alpha2.
std::pair<std::size_t, bool> select_np(const std::vector<NpCell>& cells, double alpha2) {
    std::size_t best = cells.size();
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!cells[k].valid) continue;
        if (cells[k].type2 <= alpha2 + kTol) return {k, true};
        if (best == cells.size() || cells[k].type2 < cells[best].type2) best = k;
    }
    if (best == cells.size()) throw InfeasibleError("calibrate_np: no valid grid cell");
    return {best, false};
}

}  // namespace

void BinarySample::validate(bool need_both_labels) const {
    if (score.empty()) throw DomainError("sample is empty");
    for (double s : score)
        if (!(s >= 0.0 && s <= 1.0)) {
            std::ostringstream os;
            os << "sample: score " << s << " outside [0, 1]";
            throw DomainError(os.str());
        }
    check_labels(label, score.size(), 2, need_both_labels);
}

void MulticlassSample::validate() const {
    if (scores.empty()) throw DomainError("sample is empty");
    const std::size_t k = scores.front().size();
    if (k < 2) throw DomainError("sample: need at least two classes");
    for (const auto& v : scores) {
        if (v.size() != k) throw DomainError("sample: score vectors differ in length");
        double sum = 0.0;
        for (double s : v) {
            if (!(s >= 0.0 && s <= 1.0)) throw DomainError("sample: scores must lie in [0, 1]");
            sum += s;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw DomainError("sample: score vector does not sum to 1");
    }
    if (!label.empty()) check_labels(label, scores.size(), static_cast<int>(k), false);
}

void MlrSample::validate(bool need_both_labels) const {
    if (x.empty()) throw DomainError("sample is empty");
    for (double v : x)
        if (std::isnan(v)) throw DomainError("sample: observation is NaN");
    check_labels(label, x.size(), 2, need_both_labels);
}

int SelectiveBinaryRule::predict(double eta) const {
    if (eta >= tau) return 1;
    if (1.0 - eta >= tau) return 2;
    return 0;
}

int NpRule::predict(double eta) const {
    if (eta <= tau1) return 2;
    if (eta > tau2) return 1;
    return 0;
}

int MulticlassRule::predict(const std::vector<double>& scores) const {
    const auto it = std::max_element(scores.begin(), scores.end());
    if (*it <= threshold) return 0;
    return static_cast<int>(it - scores.begin()) + 1;
}

int MlrNpRule::predict(double x) const {
    if (x >= tau1) return 2;
    if (x < tau2) return 1;
    return 0;
}

int MlrAccuracyRule::predict(double x) const {
    if (x >= tau) return 2;
    if (x <= -tau) return 1;
    return 0;
}

std::string rule_kind(const Rule& rule) {
    struct V {
        std::string operator()(const SelectiveBinaryRule&) const { return "accuracy"; }
        std::string operator()(const NpRule&) const { return "np"; }
        std::string operator()(const MulticlassRule&) const { return "multiclass"; }
        std::string operator()(const MlrNpRule&) const { return "mlr-np"; }
        std::string operator()(const MlrAccuracyRule&) const { return "mlr-accuracy"; }
    };
    return std::visit(V{}, rule);
}

std::size_t Trace::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("trace has no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

double CalibrationReport::achieved_value(const std::string& name) const {
    for (const auto& [key, value] : achieved)
        if (key == name) return value;
    throw std::out_of_range("report has no achieved value " + name);
}

CalibrationReport calibrate_accuracy(const BinarySample& cal, double alpha) {
    cal.validate(false);
    check_open_unit(alpha, "alpha");
    const std::size_t n = cal.size();
    std::vector<double> conf(n);
    std::vector<bool> correct(n);
    for (std::size_t i = 0; i < n; ++i) {
        conf[i] = std::max(cal.score[i], 1.0 - cal.score[i]);
        correct[i] = binary_prediction(cal.score[i]) == cal.label[i];
    }
    AccuracyCore core = accuracy_core(conf, correct, alpha);
    CalibrationReport rep;
    rep.mode = "accuracy";
    rep.feasible = core.feasible;
    rep.rule = SelectiveBinaryRule{core.feasible ? core.tau : std::nextafter(1.0, 2.0)};
    rep.gamma_hat = static_cast<double>(core.abstained) / static_cast<double>(n);
    rep.achieved = {{"conditional_error", core.error}};
    rep.trace = std::move(core.trace);
    return rep;
}

CalibrationReport calibrate_accuracy_fixed_gamma(const BinarySample& cal, double gamma) {
    cal.validate(false);
    check_gamma(gamma);
    const std::size_t n = cal.size();
    std::vector<double> conf(n);
    std::vector<bool> correct(n);
    for (std::size_t i = 0; i < n; ++i) {
        conf[i] = std::max(cal.score[i], 1.0 - cal.score[i]);
        correct[i] = binary_prediction(cal.score[i]) == cal.label[i];
    }
    const FixedCore core = fixed_gamma_core(conf, correct, gamma, std::nextafter(1.0, 2.0));
    CalibrationReport rep;
    rep.mode = "accuracy";
    rep.feasible = true;
    rep.rule = SelectiveBinaryRule{core.tau};
    rep.gamma_hat = static_cast<double>(core.abstained) / static_cast<double>(n);
    rep.achieved = {{"conditional_error", core.error}};
    return rep;
}

std::vector<NpCell> np_grid(const BinarySample& cal, double alpha1, const NpOptions& opt) {
    cal.validate(true);
    check_open_unit(alpha1, "alpha1");
    if (opt.umbrella_delta) check_open_unit(*opt.umbrella_delta, "umbrella delta");
    return np_grid_core(cal.score, cal.label, alpha1, opt, true);
}

CalibrationReport calibrate_np(const BinarySample& cal, double alpha1, double alpha2, const NpOptions& opt) {
    check_open_unit(alpha2, "alpha2");
    const std::vector<NpCell> cells = np_grid(cal, alpha1, opt);
    const auto [idx, ok] = select_np(cells, alpha2);
    const NpCell& c = cells[idx];
    CalibrationReport rep;
    rep.mode = "np";
    rep.feasible = ok;
    rep.rule = NpRule{c.tau1, c.tau2};
    rep.gamma_hat = c.gamma;
    rep.achieved = {{"type1", c.type1}, {"type1_conditional", c.type1_conditional}, {"type2", c.type2}};
    rep.trace = np_trace(cells);
    return rep;
}

CalibrationReport calibrate_multiclass_fixed_gamma(const MulticlassSample& cal, double gamma) {
    cal.validate();
    check_gamma(gamma);
    const std::size_t n = cal.size();
    std::vector<double> top(n);
    for (std::size_t i = 0; i < n; ++i) top[i] = *std::max_element(cal.scores[i].begin(), cal.scores[i].end());
    std::vector<double> sorted = top;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t a = ceil_count(gamma, n);
    const MulticlassRule rule{a == 0 ? -kInf : sorted[a - 1]};

    std::size_t abstained = 0, decided = 0, wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int p = rule.predict(cal.scores[i]);
        if (p == 0) {
            ++abstained;
            continue;
        }
        ++decided;
        if (!cal.label.empty() && p != cal.label[i]) ++wrong;
    }
    CalibrationReport rep;
    rep.mode = "multiclass";
    rep.feasible = true;
    rep.rule = rule;
    rep.gamma_hat = static_cast<double>(abstained) / static_cast<double>(n);
    if (!cal.label.empty())
        rep.achieved = {{"conditional_error", decided ? static_cast<double>(wrong) / static_cast<double>(decided) : 0.0}};
    return rep;
}

CalibrationReport calibrate_np_mlr(const MlrSample& cal, double alpha1, double alpha2) {
    cal.validate(true);
    check_open_unit(alpha1, "alpha1");
    check_open_unit(alpha2, "alpha2");
    std::vector<double> key(cal.size());
    for (std::size_t i = 0; i < cal.size(); ++i) key[i] = -cal.x[i];
    std::vector<NpCell> cells = np_grid_core(key, cal.label, alpha1, {}, false);
    for (NpCell& c : cells) {
        c.tau1 = -c.tau1;
        c.tau2 = -c.tau2;
    }
    const auto [idx, ok] = select_np(cells, alpha2);
    const NpCell& c = cells[idx];
    const NpCell& base = cells.front();
    // At k = 0 every class-2 point is decided, so the power is 1 - type2 there.
    const double power = 1.0 - base.type2;

    CalibrationReport rep;
    rep.mode = "mlr-np";
    rep.feasible = ok;
    rep.rule = MlrNpRule{c.tau1, c.tau2};
    rep.gamma_hat = c.gamma;
    rep.achieved = {{"type1", c.type1},
                    {"type1_conditional", c.type1_conditional},
                    {"type2", c.type2},
                    {"np_power", power},
                    {"needs_indecision", power < 1.0 - alpha2 - kTol ? 1.0 : 0.0}};
    rep.trace = np_trace(cells);
    return rep;
}

CalibrationReport calibrate_accuracy_mlr(const MlrSample& cal, double alpha) {
    cal.validate(false);
    check_open_unit(alpha, "alpha");
    const std::size_t n = cal.size();
    std::vector<double> conf(n);
    std::vector<bool> correct(n);
    for (std::size_t i = 0; i < n; ++i) {
        conf[i] = std::abs(cal.x[i]);
        correct[i] = (cal.x[i] >= 0.0 ? 2 : 1) == cal.label[i];
    }
    AccuracyCore core = accuracy_core(conf, correct, alpha);
    CalibrationReport rep;
    rep.mode = "mlr-accuracy";
    rep.feasible = core.feasible;
    rep.rule = MlrAccuracyRule{core.feasible ? core.tau : kInf};
    rep.gamma_hat = static_cast<double>(core.abstained) / static_cast<double>(n);
    rep.achieved = {{"conditional_error", core.error}};
    rep.trace = std::move(core.trace);
    return rep;
}

}  // namespace indecide
