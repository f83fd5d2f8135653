#include "indecide/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "indecide/calibration.hpp"
#include "indecide/csv.hpp"
#include "indecide/errors.hpp"
#include "indecide/models.hpp"
#include "indecide/normal.hpp"
#include "indecide/svg.hpp"

namespace indecide {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kMetrics[] = {"gamma_hat", "test_gamma", "error", "type1", "type1_conditional", "type2"};

double metric_of(const RepRecord& r, const std::string& m) {
    if (m == "gamma_hat") return r.gamma_hat;
    if (m == "test_gamma") return r.test_gamma;
    if (m == "error") return r.error;
    if (m == "type1") return r.type1;
    if (m == "type1_conditional") return r.type1_conditional;
    return r.type2;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (std::size_t i; !failed && (i = next++) < count;) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

LabeledFeatures as_features(const MixtureDraw& d) {
    LabeledFeatures f;
    f.x.reserve(d.x.size());
    for (double v : d.x) f.x.push_back({v});
    f.label = d.label;
    return f;
}

using EtaFn = std::function<double(double)>;

EtaFn fit_scorer(Scorer s, double delta, const MixtureDraw& train) {
    switch (s) {
        case Scorer::oracle_eta: return [delta](double x) { return mixture_eta(delta, x); };
        case Scorer::lda: {
            const LdaModel m = fit_lda(as_features(train));
            return [w = m.weights[0], b = m.bias](double x) { return sigmoid(w * x + b); };
        }
        case Scorer::logistic: {
            const LogisticModel m = fit_logistic(as_features(train));
            return [w = m.weights[0], b = m.bias](double x) { return sigmoid(w * x + b); };
        }
    }
    throw DomainError("unknown scorer");
}

BinarySample scored(const MixtureDraw& d, const EtaFn& eta) {
    BinarySample s;
    s.score.reserve(d.x.size());
    for (double v : d.x) s.score.push_back(eta(v));
    s.label = d.label;
    return s;
}

// Test-set metrics of a rule given per-point predictions (0 = abstain).
void evaluate(RepRecord& r, const std::vector<int>& pred, const std::vector<int>& label) {
    std::size_t abstain = 0, decided = 0, wrong = 0, c1 = 0, c1_dec = 0, c1_to2 = 0, c2_dec = 0, c2_to1 = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const int y = label[i], p = pred[i];
        if (y == 1) ++c1;
        if (p == 0) {
            ++abstain;
            continue;
        }
        ++decided;
        if (p != y) ++wrong;
        if (y == 1) {
            ++c1_dec;
            if (p == 2) ++c1_to2;
        } else {
            ++c2_dec;
            if (p == 1) ++c2_to1;
        }
    }
    auto ratio = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    r.test_gamma = ratio(abstain, pred.size());
    r.error = ratio(wrong, decided);
    r.type1 = ratio(c1_to2, c1);
    r.type1_conditional = ratio(c1_to2, c1_dec);
    r.type2 = ratio(c2_to1, c2_dec);
}

template <class R>
std::vector<int> predict_all(const R& rule, const std::vector<double>& score) {
    std::vector<int> p(score.size());
    for (std::size_t i = 0; i < score.size(); ++i) p[i] = rule.predict(score[i]);
    return p;
}

RepRecord failed_record(const std::string& arm, double delta, std::size_t rep) {
    RepRecord r;
    r.arm = arm;
    r.delta = delta;
    r.rep = rep;
    r.status = "failed";
    r.gamma_hat = r.test_gamma = r.error = r.type1 = r.type1_conditional = r.type2 = kNaN;
    return r;
}

BandRow band(const std::string& arm, double delta, const std::string& metric, std::vector<double> values) {
    BandRow b;
    b.arm = arm;
    b.delta = delta;
    b.metric = metric;
    b.count = values.size();
    if (values.empty()) {
        b.mean = b.p05 = b.p50 = b.p95 = kNaN;
        return b;
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    b.mean = sum / static_cast<double>(values.size());
    b.p05 = nearest_rank(values, 0.05);
    b.p50 = nearest_rank(values, 0.50);
    b.p95 = nearest_rank(values, 0.95);
    return b;
}

// records[d][rep] holds that cell's arms in a fixed order.
SimResult assemble(const std::string& name, const SimConfig& cfg,
                   const std::vector<std::vector<std::vector<RepRecord>>>& records) {
    SimResult res;
    res.experiment = name;
    for (std::size_t d = 0; d < cfg.delta_grid.size(); ++d) {
        std::vector<std::string> arms;
        for (const auto& cell : records[d])
            for (const auto& r : cell) {
                res.records.push_back(r);
                if (std::find(arms.begin(), arms.end(), r.arm) == arms.end()) arms.push_back(r.arm);
            }
        for (const auto& arm : arms) {
            std::vector<double> ok;
            std::size_t total = 0;
            for (const auto& cell : records[d])
                for (const auto& r : cell)
                    if (r.arm == arm) {
                        ++total;
                        ok.push_back(r.status == "ok" ? 1.0 : 0.0);
                    }
            for (const char* m : kMetrics) {
                std::vector<double> vals;
                for (const auto& cell : records[d])
                    for (const auto& r : cell)
                        if (r.arm == arm && r.status != "failed" && !std::isnan(metric_of(r, m))) vals.push_back(metric_of(r, m));
                res.aggregates.push_back(band(arm, cfg.delta_grid[d], m, std::move(vals)));
            }
            res.aggregates.push_back(band(arm, cfg.delta_grid[d], "feasible", std::move(ok)));
        }
    }
    return res;
}

void check_prob(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError(std::string("SimConfig: ") + name + " must lie in (0, 1)");
}

std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write '" + path.string() + "'");
    out << text;
    return path;
}

}  // namespace

Scorer parse_scorer(const std::string& name) {
    if (name == "oracle-eta") return Scorer::oracle_eta;
    if (name == "lda") return Scorer::lda;
    if (name == "logistic") return Scorer::logistic;
    throw SchemaError("unknown scorer '" + name + "' (expected oracle-eta, lda or logistic)");
}

std::string scorer_name(Scorer s) {
    switch (s) {
        case Scorer::oracle_eta: return "oracle-eta";
        case Scorer::lda: return "lda";
        case Scorer::logistic: return "logistic";
    }
    return "unknown";
}

void SimConfig::validate() const {
    if (n_train < 1 || n_cal < 1 || n_test < 1 || reps < 1) throw DomainError("SimConfig: counts must be at least 1");
    if (delta_grid.empty()) throw DomainError("SimConfig: delta_grid is empty");
    for (double d : delta_grid)
        if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("SimConfig: delta values must be positive");
    check_prob(alpha, "alpha");
    check_prob(alpha1, "alpha1");
    check_prob(alpha2, "alpha2");
}

double mixture_eta(double delta, double x) { return sigmoid(2.0 * delta * x); }

MixtureDraw draw_mixture(RandomStream& rng, double delta, std::size_t n) {
    MixtureDraw d;
    d.x.resize(n);
    d.label.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool first = rng.uniform() < 0.5;
        d.label[i] = first ? 1 : 2;
        d.x[i] = (first ? delta : -delta) + rng.normal();
    }
    return d;
}

double nearest_rank(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return kNaN;
    const double rank = std::ceil(q * static_cast<double>(sorted.size()));
    const auto idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
    return sorted[std::min(idx, sorted.size() - 1)];
}

SimResult run_accuracy_sweep(const SimConfig& cfg) {
    cfg.validate();
    const std::size_t nd = cfg.delta_grid.size();
    std::vector<std::vector<std::vector<RepRecord>>> records(nd, std::vector<std::vector<RepRecord>>(cfg.reps));
    const bool learned = cfg.scorer != Scorer::oracle_eta;
    parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
        RandomStream rng = seeded_stream(cfg.seed, rep);
        for (std::size_t d = 0; d < nd; ++d) {
            const double delta = cfg.delta_grid[d];
            const MixtureDraw train = learned ? draw_mixture(rng, delta, cfg.n_train) : MixtureDraw{};
            const MixtureDraw cal = draw_mixture(rng, delta, cfg.n_cal);
            const MixtureDraw test = draw_mixture(rng, delta, cfg.n_test);
            std::vector<std::pair<std::string, Scorer>> arms{{"oracle", Scorer::oracle_eta}};
            if (learned) arms.emplace_back(scorer_name(cfg.scorer), cfg.scorer);
            for (const auto& [arm, scorer] : arms) {
                try {
                    const EtaFn eta = fit_scorer(scorer, delta, train);
                    const BinarySample cal_s = scored(cal, eta), test_s = scored(test, eta);
                    const CalibrationReport rep_cal = calibrate_accuracy(cal_s, cfg.alpha);
                    RepRecord r;
                    r.arm = arm;
                    r.delta = delta;
                    r.rep = rep;
                    r.status = rep_cal.feasible ? "ok" : "infeasible";
                    r.gamma_hat = rep_cal.gamma_hat;
                    evaluate(r, predict_all(std::get<SelectiveBinaryRule>(rep_cal.rule), test_s.score), test.label);
                    records[d][rep].push_back(r);
                } catch (const std::exception&) {
                    records[d][rep].push_back(failed_record(arm, delta, rep));
                }
            }
        }
    });
    return assemble("accuracy-sweep", cfg, records);
}

SimResult run_np_sweep(const SimConfig& cfg) {
    cfg.validate();
    const std::size_t nd = cfg.delta_grid.size();
    std::vector<std::vector<std::vector<RepRecord>>> records(nd, std::vector<std::vector<RepRecord>>(cfg.reps));
    std::vector<std::vector<std::vector<double>>> achievable(nd, std::vector<std::vector<double>>(cfg.reps));
    parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
        RandomStream rng = seeded_stream(cfg.seed, rep);
        for (std::size_t d = 0; d < nd; ++d) {
            const double delta = cfg.delta_grid[d];
            const MixtureDraw train =
                cfg.scorer != Scorer::oracle_eta ? draw_mixture(rng, delta, cfg.n_train) : MixtureDraw{};
            const MixtureDraw cal = draw_mixture(rng, delta, cfg.n_cal);
            const MixtureDraw test = draw_mixture(rng, delta, cfg.n_test);
            auto& out = records[d][rep];
            try {
                const EtaFn eta = fit_scorer(cfg.scorer, delta, train);
                const BinarySample cal_s = scored(cal, eta), test_s = scored(test, eta);
                const CalibrationReport chosen = calibrate_np(cal_s, cfg.alpha1, cfg.alpha2);
                const std::vector<NpCell> cells = np_grid(cal_s, cfg.alpha1);

                auto record = [&](const std::string& arm, const std::string& status, double gamma_hat,
                                  const std::vector<int>& pred) {
                    RepRecord r;
                    r.arm = arm;
                    r.delta = delta;
                    r.rep = rep;
                    r.status = status;
                    r.gamma_hat = gamma_hat;
                    evaluate(r, pred, test.label);
                    out.push_back(r);
                };
                const NpCell& base = cells.front();
                record("np_baseline", base.type2 <= cfg.alpha2 ? "ok" : "infeasible", 0.0,
                       predict_all(NpRule{base.tau1, base.tau2}, test_s.score));
                record("indecision", chosen.feasible ? "ok" : "infeasible", chosen.gamma_hat,
                       predict_all(std::get<NpRule>(chosen.rule), test_s.score));
                std::vector<int> bayes(test_s.size());
                for (std::size_t i = 0; i < bayes.size(); ++i) bayes[i] = test_s.score[i] >= 0.5 ? 1 : 2;
                record("bayes", "ok", 0.0, bayes);

                std::vector<double> s2;
                for (std::size_t i = 0; i < test_s.size(); ++i)
                    if (test.label[i] == 2) s2.push_back(test_s.score[i]);
                std::sort(s2.begin(), s2.end());
                auto& band_vals = achievable[d][rep];
                for (const NpCell& c : cells) {
                    if (!c.valid) continue;
                    const auto to2 = static_cast<std::size_t>(std::upper_bound(s2.begin(), s2.end(), c.tau1) - s2.begin());
                    const auto to1 = static_cast<std::size_t>(s2.end() - std::upper_bound(s2.begin(), s2.end(), c.tau2));
                    band_vals.push_back(to1 + to2 ? static_cast<double>(to1) / static_cast<double>(to1 + to2) : 0.0);
                }
            } catch (const std::exception&) {
                out.clear();
                for (const char* arm : {"np_baseline", "indecision", "bayes"}) out.push_back(failed_record(arm, delta, rep));
            }
        }
    });
    SimResult res = assemble("np-sweep", cfg, records);
    for (std::size_t d = 0; d < nd; ++d) {
        std::vector<double> pooled;
        for (const auto& v : achievable[d]) pooled.insert(pooled.end(), v.begin(), v.end());
        res.aggregates.push_back(band("achievable", cfg.delta_grid[d], "type2", std::move(pooled)));
    }
    return res;
}

std::vector<IntroRow> run_intro_tradeoff(const IntroConfig& cfg) {
    if (cfg.delta_grid.empty()) throw DomainError("IntroConfig: delta_grid is empty");
    if (!(cfg.target_error > 0.0 && cfg.target_error < 1.0)) throw DomainError("IntroConfig: target_error must lie in (0, 1)");
    std::vector<IntroRow> rows;
    for (std::size_t d = 0; d < cfg.delta_grid.size(); ++d) {
        const double delta = cfg.delta_grid[d];
        IntroRow row;
        row.delta = delta;
        const GmmSpec spec{delta};
        row.bayes_accuracy = 1.0 - bayes_risk(spec);
        const OracleOperatingPoint p = gamma_for_target_risk(spec, cfg.target_error);
        row.gamma_star = p.gamma;
        row.selective_accuracy = 1.0 - p.risk;
        row.gamma_star_distance = gamma_for_target_risk(GmmSpec{delta / 2.0}, cfg.target_error).gamma;
        row.empirical_gamma = row.empirical_error = kNaN;
        if (cfg.n_empirical > 0) {
            RandomStream rng = seeded_stream(cfg.seed, d);
            const EtaFn eta = [delta](double x) { return mixture_eta(delta, x); };
            const MixtureDraw cal = draw_mixture(rng, delta, cfg.n_empirical);
            const MixtureDraw test = draw_mixture(rng, delta, cfg.n_empirical);
            const CalibrationReport rep = calibrate_accuracy(scored(cal, eta), cfg.target_error);
            if (rep.feasible) {
                RepRecord r;
                evaluate(r, predict_all(std::get<SelectiveBinaryRule>(rep.rule), scored(test, eta).score), test.label);
                row.empirical_gamma = r.test_gamma;
                row.empirical_error = r.error;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<PhasePanel> run_phase_experiment(const PhaseExperimentConfig& cfg) {
    if (cfg.grid_points < 2) throw DomainError("PhaseExperimentConfig: need at least two grid points");
    std::vector<PhasePanel> panels;
    const struct {
        const char* name;
        double level, lo, hi;
    } specs[] = {{"low_c", cfg.level_low_c, 0.05, 0.45}, {"high_c", cfg.level_high_c, 0.55, 0.95}};
    for (const auto& s : specs) {
        PhasePanel panel;
        panel.name = s.name;
        PhaseGridConfig g;
        g.delta_target = s.level;
        g.c_grid = interior_grid(s.lo, s.hi, cfg.grid_points);
        g.m_grid = interior_grid(0.0, 1.0, cfg.grid_points);
        panel.grid = phase_grid(g);
        for (double c : g.c_grid) panel.envelope.push_back(phase_envelope_point(s.level, c));
        panels.push_back(std::move(panel));
    }
    return panels;
}

std::vector<PluginGapRow> run_plugin_gap(const PluginGapConfig& cfg) {
    if (cfg.n_train.empty() || cfg.reps < 1) throw DomainError("PluginGapConfig: need sizes and replications");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw DomainError("PluginGapConfig: gamma must lie in [0, 1)");
    const GmmSpec spec{cfg.delta};
    spec.validate();
    const std::size_t ns = cfg.n_train.size();
    std::vector<std::vector<double>> gaps(ns, std::vector<double>(cfg.reps, kNaN));
    parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
        RandomStream rng = seeded_stream(cfg.seed, rep);
        for (std::size_t s = 0; s < ns; ++s) {
            const std::size_t n = cfg.n_train[s];
            const MixtureDraw train = draw_mixture(rng, cfg.delta, n);
            const MixtureDraw cal = draw_mixture(rng, cfg.delta, n);
            try {
                const LdaModel m = fit_lda(as_features(train));
                const double w = m.weights[0], b = m.bias;
                const EtaFn eta = [w, b](double x) { return sigmoid(w * x + b); };
                const double tau = std::get<SelectiveBinaryRule>(calibrate_accuracy_fixed_gamma(scored(cal, eta), cfg.gamma).rule).tau;
                if (!(tau < 1.0) || w == 0.0) continue;
                const double l = std::log(tau / (1.0 - tau));
                // Predict 1 where w x + b >= l, 2 where w x + b <= -l.
                const double a1 = (l - b) / w, a2 = (-l - b) / w;
                auto above = [](double mu, double a) { return normal_tail(a - mu); };
                auto below = [](double mu, double a) { return normal_tail(mu - a); };
                const double d = cfg.delta;
                double err = 0.0, decided = 0.0;
                if (w > 0.0) {
                    err = 0.5 * (below(d, a2) + above(-d, a1));
                    decided = 0.5 * (above(d, a1) + below(d, a2) + above(-d, a1) + below(-d, a2));
                } else {
                    err = 0.5 * (above(d, a2) + below(-d, a1));
                    decided = 0.5 * (below(d, a1) + above(d, a2) + below(-d, a1) + above(-d, a2));
                }
                if (!(decided > 0.0)) continue;
                gaps[s][rep] = err / decided - oracle_risk(spec, 1.0 - decided);
            } catch (const std::exception&) {
            }
        }
    });
    std::vector<PluginGapRow> rows;
    for (std::size_t s = 0; s < ns; ++s) {
        std::vector<double> v;
        for (double g : gaps[s])
            if (!std::isnan(g)) v.push_back(g);
        const BandRow b = band("lda", cfg.delta, "gap", v);
        rows.push_back({cfg.n_train[s], b.count, b.p50, b.mean});
    }
    return rows;
}

void write_records_csv(std::ostream& out, const SimResult& result) {
    write_csv_row(out, {"arm", "delta", "rep", "status", "gamma_hat", "test_gamma", "error", "type1",
                        "type1_conditional", "type2"});
    for (const auto& r : result.records)
        write_csv_row(out, {r.arm, format_double(r.delta), std::to_string(r.rep), r.status, format_double(r.gamma_hat),
                            format_double(r.test_gamma), format_double(r.error), format_double(r.type1),
                            format_double(r.type1_conditional), format_double(r.type2)});
}

void write_aggregates_csv(std::ostream& out, const SimResult& result) {
    write_csv_row(out, {"arm", "delta", "metric", "count", "mean", "p05", "p50", "p95"});
    for (const auto& b : result.aggregates)
        write_csv_row(out, {b.arm, format_double(b.delta), b.metric, std::to_string(b.count), format_double(b.mean),
                            format_double(b.p05), format_double(b.p50), format_double(b.p95)});
}

void write_intro_csv(std::ostream& out, const std::vector<IntroRow>& rows) {
    write_csv_row(out, {"delta", "bayes_accuracy", "gamma_star", "selective_accuracy", "gamma_star_distance",
                        "empirical_gamma", "empirical_error"});
    for (const auto& r : rows)
        write_csv_row(out, {format_double(r.delta), format_double(r.bayes_accuracy), format_double(r.gamma_star),
                            format_double(r.selective_accuracy), format_double(r.gamma_star_distance),
                            format_double(r.empirical_gamma), format_double(r.empirical_error)});
}

void write_phase_csv(std::ostream& out, const PhasePanel& panel) {
    write_csv_row(out, {"c", "m", "gamma", "t", "risk_ratio_raw", "risk_ratio_capped"});
    for (const auto& cell : panel.grid.cells)
        write_csv_row(out, {format_double(cell.c), format_double(cell.m),
                            format_double(cell.resolved ? cell.gamma : kNaN), format_double(cell.resolved ? cell.t : kNaN),
                            format_double(cell.resolved ? cell.ratio_raw : kNaN),
                            format_double(cell.resolved ? cell.ratio_capped : kNaN)});
}

void write_envelope_csv(std::ostream& out, const std::vector<PhasePanel>& panels) {
    write_csv_row(out, {"panel", "level", "c", "gamma_star", "decided_star", "m_hat", "m_star", "m_lower"});
    for (const auto& p : panels)
        for (const auto& e : p.envelope)
            write_csv_row(out, {p.name, format_double(p.grid.config.delta_target), format_double(e.c),
                                format_double(e.gamma_star), format_double(e.decided_star), format_double(e.m_hat),
                                format_double(e.m_star), format_double(e.m_lower)});
}

std::vector<std::filesystem::path> write_sim_outputs(const SimResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    std::ostringstream rec, agg;
    write_records_csv(rec, result);
    write_aggregates_csv(agg, result);
    files.push_back(write_text(dir / (result.experiment + "_records.csv"), rec.str()));
    files.push_back(write_text(dir / (result.experiment + "_aggregate.csv"), agg.str()));

    std::vector<std::string> metrics = result.experiment == "np-sweep"
                                           ? std::vector<std::string>{"type1_conditional", "type2", "gamma_hat"}
                                           : std::vector<std::string>{"error", "test_gamma"};
    for (const auto& metric : metrics) {
        std::vector<SvgSeries> series;
        for (const auto& b : result.aggregates) {
            if (b.metric != metric) continue;
            auto it = std::find_if(series.begin(), series.end(), [&](const SvgSeries& s) { return s.name == b.arm; });
            if (it == series.end()) {
                series.push_back(SvgSeries{b.arm, {}, {}, {}, {}, b.arm == "oracle" || b.arm == "achievable"});
                it = series.end() - 1;
            }
            it->x.push_back(b.delta);
            it->y.push_back(metric == "type2" && b.arm == "achievable" ? b.p50 : b.mean);
            it->lo.push_back(b.p05);
            it->hi.push_back(b.p95);
        }
        const SvgAxes axes{result.experiment + ": " + metric + " (mean, 90% band)", "delta", metric};
        files.push_back(write_text(dir / (result.experiment + "_" + metric + ".svg"), line_chart_svg(axes, series)));
    }
    return files;
}

std::vector<std::filesystem::path> write_intro_outputs(const std::vector<IntroRow>& rows, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    write_intro_csv(csv, rows);
    std::vector<std::filesystem::path> files{write_text(dir / "intro_tradeoff.csv", csv.str())};
    SvgSeries acc{"bayes accuracy", {}, {}, {}, {}, true}, gam{"indecision for target", {}, {}, {}, {}, false};
    for (const auto& r : rows) {
        acc.x.push_back(r.delta);
        acc.y.push_back(r.bayes_accuracy);
        gam.x.push_back(r.delta);
        gam.y.push_back(r.gamma_star);
    }
    files.push_back(write_text(dir / "intro_tradeoff.svg",
                               line_chart_svg({"accuracy without indecision and indecision needed", "delta", "probability"},
                                              {acc, gam})));
    return files;
}

std::vector<std::filesystem::path> write_phase_outputs(const std::vector<PhasePanel>& panels,
                                                       const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    for (const auto& p : panels) {
        std::ostringstream csv;
        write_phase_csv(csv, p);
        files.push_back(write_text(dir / ("phase_" + p.name + ".csv"), csv.str()));
        std::vector<double> values;
        values.reserve(p.grid.cells.size());
        for (const auto& c : p.grid.cells) values.push_back(c.resolved ? c.ratio_capped : kNaN);
        SvgSeries ms{"m*", {}, {}, {}, {}, false}, ml{"m lower", {}, {}, {}, {}, true}, mh{"m exact", {}, {}, {}, {}, false};
        for (const auto& e : p.envelope) {
            ms.x.push_back(e.c);
            ms.y.push_back(e.m_star);
            ml.x.push_back(e.c);
            ml.y.push_back(e.m_lower);
            mh.x.push_back(e.c);
            mh.y.push_back(e.m_hat);
        }
        std::ostringstream title;
        title << "risk / level, level " << format_double(p.grid.config.delta_target);
        files.push_back(write_text(dir / ("phase_" + p.name + ".svg"),
                                   heatmap_svg({title.str(), "c", "m"}, p.grid.config.c_grid, p.grid.config.m_grid,
                                               values, p.grid.config.cap_low, 1.0, p.grid.config.cap_high, {ms, ml, mh})));
    }
    std::ostringstream env;
    write_envelope_csv(env, panels);
    files.push_back(write_text(dir / "phase_envelope.csv", env.str()));
    return files;
}

unsigned resolve_workers(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("INDECIDE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace indecide
