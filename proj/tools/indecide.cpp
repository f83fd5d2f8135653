// Command-line front end: calibrate, apply, experiment, oracle, fit, predict.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "indecide/calibration.hpp"
#include "indecide/csv.hpp"
#include "indecide/errors.hpp"
#include "indecide/experiments.hpp"
#include "indecide/gmm_oracle.hpp"
#include "indecide/manifest.hpp"
#include "indecide/models.hpp"
#include "indecide/report_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace indecide;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

int label_at(const CsvTable& t, std::size_t col, std::size_t r, int classes) {
    const long long y = parse_int(t.rows[r][col], t.lines[r]);
    if (y < 1 || y > classes) throw SchemaError("label must lie in 1.." + std::to_string(classes), t.lines[r]);
    return static_cast<int>(y);
}

double unit_score(const CsvTable& t, std::size_t col, std::size_t r) {
    const double s = parse_double(t.rows[r][col], t.lines[r]);
    if (!(s >= 0.0 && s <= 1.0)) throw SchemaError("score must lie in [0, 1]", t.lines[r]);
    return s;
}

BinarySample read_binary(const CsvTable& t) {
    const std::size_t sc = t.require_column("score"), lc = t.require_column("label");
    BinarySample s;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        s.score.push_back(unit_score(t, sc, r));
        s.label.push_back(label_at(t, lc, r, 2));
    }
    return s;
}

std::vector<std::size_t> class_columns(const CsvTable& t) {
    std::vector<std::size_t> cols;
    for (std::size_t k = 1;; ++k) {
        const std::size_t c = t.column("s_" + std::to_string(k));
        if (c == std::string::npos) break;
        cols.push_back(c);
    }
    if (cols.size() < 2) throw SchemaError("multiclass input needs columns s_1..s_K with K >= 2", 1);
    return cols;
}

MulticlassSample read_multiclass(const CsvTable& t) {
    const auto cols = class_columns(t);
    const std::size_t lc = t.column("label");
    MulticlassSample s;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::vector<double> v;
        double sum = 0.0;
        for (std::size_t c : cols) {
            v.push_back(unit_score(t, c, r));
            sum += v.back();
        }
        if (std::abs(sum - 1.0) > 1e-9) throw SchemaError("score vector must sum to 1", t.lines[r]);
        s.scores.push_back(std::move(v));
        if (lc != std::string::npos) s.label.push_back(label_at(t, lc, r, static_cast<int>(cols.size())));
    }
    return s;
}

MlrSample read_mlr(const CsvTable& t, bool need_labels) {
    const std::size_t xc = t.require_column("x");
    const std::size_t lc = need_labels ? t.require_column("label") : std::string::npos;
    MlrSample s;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double x = parse_double(t.rows[r][xc], t.lines[r]);
        if (std::isnan(x)) throw SchemaError("x must be a number", t.lines[r]);
        s.x.push_back(x);
        if (need_labels) s.label.push_back(label_at(t, lc, r, 2));
    }
    return s;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write '" + path.string() + "'");
    out << text;
}

std::string doc_text(const KeyValueDoc& d, const std::string& title) {
    std::ostringstream os;
    d.write(os, title);
    return os.str();
}

// ---- calibrate ----

struct CalibrateArgs {
    std::string mode;
    std::string input;
    std::optional<double> alpha, gamma, alpha1, alpha2, umbrella_delta;
    std::string holdout;
    std::string out_dir = "calibration";
};

double need(const std::optional<double>& v, const char* flag, const std::string& mode) {
    if (!v) throw CLI::ValidationError(std::string(flag), "required in " + mode + " mode");
    return *v;
}

int cmd_calibrate(const CalibrateArgs& a) {
    const CsvTable t = read_csv_file(a.input);
    CalibrationReport rep;
    json eff = {{"mode", a.mode}};
    if (a.mode == "accuracy") {
        if (a.alpha.has_value() == a.gamma.has_value())
            throw CLI::ValidationError("--alpha/--gamma", "accuracy mode takes exactly one of them");
        const BinarySample s = read_binary(t);
        rep = a.alpha ? calibrate_accuracy(s, *a.alpha) : calibrate_accuracy_fixed_gamma(s, *a.gamma);
        a.alpha ? eff["alpha"] = *a.alpha : eff["gamma"] = *a.gamma;
    } else if (a.mode == "np") {
        NpOptions opt;
        opt.umbrella_delta = a.umbrella_delta;
        if (!a.holdout.empty()) opt.type2_holdout = read_binary(read_csv_file(a.holdout));
        rep = calibrate_np(read_binary(t), need(a.alpha1, "--alpha1", a.mode), need(a.alpha2, "--alpha2", a.mode), opt);
        eff["alpha1"] = *a.alpha1;
        eff["alpha2"] = *a.alpha2;
        if (a.umbrella_delta) eff["umbrella_delta"] = *a.umbrella_delta;
    } else if (a.mode == "multiclass") {
        rep = calibrate_multiclass_fixed_gamma(read_multiclass(t), need(a.gamma, "--gamma", a.mode));
        eff["gamma"] = *a.gamma;
    } else if (a.mode == "mlr-np") {
        rep = calibrate_np_mlr(read_mlr(t, true), need(a.alpha1, "--alpha1", a.mode), need(a.alpha2, "--alpha2", a.mode));
        eff["alpha1"] = *a.alpha1;
        eff["alpha2"] = *a.alpha2;
    } else {
        rep = calibrate_accuracy_mlr(read_mlr(t, true), need(a.alpha, "--alpha", a.mode));
        eff["alpha"] = *a.alpha;
    }

    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    RunManifest m;
    m.subcommand = "calibrate";
    m.effective_config = eff.dump();
    m.inputs.push_back(a.input);
    if (!a.holdout.empty()) m.inputs.push_back(a.holdout);

    const std::string report = doc_text(report_document(rep), "indecide calibration report");
    write_file(dir / "report.txt", report);
    write_file(dir / "rule.txt", doc_text(rule_document(rep.rule), "indecide rule"));
    m.outputs = {dir / "report.txt", dir / "rule.txt"};
    if (!rep.trace.rows.empty()) {
        std::ostringstream tr;
        write_trace_csv(tr, rep.trace);
        write_file(dir / "trace.csv", tr.str());
        m.outputs.push_back(dir / "trace.csv");
    }
    m.write(dir);
    std::cout << report;
    return rep.feasible ? kExitOk : kExitInfeasible;
}

// ---- apply ----

int cmd_apply(const std::string& rule_path, const std::string& input, const std::string& output) {
    std::ifstream rin(rule_path);
    if (!rin) throw SchemaError("cannot open '" + rule_path + "'");
    const Rule rule = rule_from_document(KeyValueDoc::read(rin));
    const CsvTable t = read_csv_file(input);

    std::vector<int> decisions;
    if (const auto* r = std::get_if<MulticlassRule>(&rule)) {
        const auto cols = class_columns(t);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            std::vector<double> v;
            for (std::size_t c : cols) v.push_back(unit_score(t, c, i));
            decisions.push_back(r->predict(v));
        }
    } else if (std::holds_alternative<MlrNpRule>(rule) || std::holds_alternative<MlrAccuracyRule>(rule)) {
        const MlrSample s = read_mlr(t, false);
        for (double x : s.x)
            decisions.push_back(std::visit(
                [x](const auto& r) {
                    using T = std::decay_t<decltype(r)>;
                    if constexpr (std::is_same_v<T, MlrNpRule> || std::is_same_v<T, MlrAccuracyRule>) return r.predict(x);
                    else return 0;
                },
                rule));
    } else {
        const std::size_t sc = t.require_column("score");
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const double s = unit_score(t, sc, i);
            decisions.push_back(std::holds_alternative<NpRule>(rule) ? std::get<NpRule>(rule).predict(s)
                                                                     : std::get<SelectiveBinaryRule>(rule).predict(s));
        }
    }

    std::ostringstream os;
    write_csv_row(os, {"row", "decision"});
    std::size_t abstained = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        abstained += decisions[i] == 0;
        write_csv_row(os, {std::to_string(i + 1), decisions[i] == 0 ? "abstain" : std::to_string(decisions[i])});
    }
    const double frac = decisions.empty() ? 0.0 : static_cast<double>(abstained) / static_cast<double>(decisions.size());
    os << "# abstained " << abstained << " of " << decisions.size() << ", fraction " << format_double(frac) << '\n';
    if (output.empty()) std::cout << os.str();
    else write_file(output, os.str());
    return kExitOk;
}

// ---- experiment ----

struct ExperimentArgs {
    std::string name;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool full = false;
    int workers = 0;
};

json load_config(const std::string& path, const std::set<std::string>& allowed) {
    if (path.empty()) return json::object();
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw SchemaError("unknown config key '" + k + "'");
    return j;
}

template <class T>
void take(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw SchemaError(std::string("config key '") + key + "' has the wrong type");
    }
}

std::vector<double> default_delta_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 12; ++i) g.push_back(0.25 * i);
    return g;
}

int cmd_experiment(const ExperimentArgs& a) {
    const fs::path dir = a.out_dir.empty() ? fs::path("results") / a.name : fs::path(a.out_dir);
    RunManifest m;
    m.subcommand = "experiment " + a.name;
    m.config_path = a.config;
    json eff;
    std::vector<fs::path> outputs;

    if (a.name == "accuracy-sweep" || a.name == "np-sweep") {
        const json j = load_config(a.config, {"n_train", "n_cal", "n_test", "reps", "delta_grid", "alpha", "alpha1",
                                              "alpha2", "scorer", "seed"});
        SimConfig cfg;
        cfg.delta_grid = default_delta_grid();
        cfg.reps = a.full ? 1000 : 200;
        take(j, "n_train", cfg.n_train);
        take(j, "n_cal", cfg.n_cal);
        take(j, "n_test", cfg.n_test);
        take(j, "reps", cfg.reps);
        take(j, "delta_grid", cfg.delta_grid);
        take(j, "alpha", cfg.alpha);
        take(j, "alpha1", cfg.alpha1);
        take(j, "alpha2", cfg.alpha2);
        std::string scorer = scorer_name(cfg.scorer);
        take(j, "scorer", scorer);
        cfg.scorer = parse_scorer(scorer);
        take(j, "seed", cfg.seed);
        if (a.seed) cfg.seed = *a.seed;
        cfg.workers = resolve_workers(a.workers);
        cfg.validate();
        eff = {{"n_train", cfg.n_train}, {"n_cal", cfg.n_cal},   {"n_test", cfg.n_test}, {"reps", cfg.reps},
               {"delta_grid", cfg.delta_grid}, {"alpha", cfg.alpha}, {"alpha1", cfg.alpha1}, {"alpha2", cfg.alpha2},
               {"scorer", scorer_name(cfg.scorer)}, {"seed", cfg.seed}};
        m.seed = std::to_string(cfg.seed);
        const SimResult res = a.name == "accuracy-sweep" ? run_accuracy_sweep(cfg) : run_np_sweep(cfg);
        outputs = write_sim_outputs(res, dir);
    } else if (a.name == "phase") {
        const json j = load_config(a.config, {"grid_points", "level_low_c", "level_high_c"});
        PhaseExperimentConfig cfg;
        cfg.grid_points = a.full ? 1000 : 200;
        take(j, "grid_points", cfg.grid_points);
        take(j, "level_low_c", cfg.level_low_c);
        take(j, "level_high_c", cfg.level_high_c);
        eff = {{"grid_points", cfg.grid_points}, {"level_low_c", cfg.level_low_c}, {"level_high_c", cfg.level_high_c}};
        outputs = write_phase_outputs(run_phase_experiment(cfg), dir);
    } else if (a.name == "intro-tradeoff") {
        const json j = load_config(a.config, {"delta_grid", "target_error", "n_empirical", "seed"});
        IntroConfig cfg;
        cfg.delta_grid = default_delta_grid();
        take(j, "delta_grid", cfg.delta_grid);
        take(j, "target_error", cfg.target_error);
        take(j, "n_empirical", cfg.n_empirical);
        take(j, "seed", cfg.seed);
        if (a.seed) cfg.seed = *a.seed;
        eff = {{"delta_grid", cfg.delta_grid}, {"target_error", cfg.target_error}, {"n_empirical", cfg.n_empirical},
               {"seed", cfg.seed}};
        m.seed = std::to_string(cfg.seed);
        outputs = write_intro_outputs(run_intro_tradeoff(cfg), dir);
    } else {
        const json j = load_config(a.config, {"delta", "gamma", "n_train", "reps", "seed"});
        PluginGapConfig cfg;
        take(j, "delta", cfg.delta);
        take(j, "gamma", cfg.gamma);
        take(j, "n_train", cfg.n_train);
        take(j, "reps", cfg.reps);
        take(j, "seed", cfg.seed);
        if (a.seed) cfg.seed = *a.seed;
        cfg.workers = resolve_workers(a.workers);
        eff = {{"delta", cfg.delta}, {"gamma", cfg.gamma}, {"n_train", cfg.n_train}, {"reps", cfg.reps}, {"seed", cfg.seed}};
        m.seed = std::to_string(cfg.seed);
        const auto rows = run_plugin_gap(cfg);
        fs::create_directories(dir);
        std::ostringstream os;
        write_csv_row(os, {"n_train", "count", "median_gap", "mean_gap"});
        for (const auto& r : rows)
            write_csv_row(os, {std::to_string(r.n_train), std::to_string(r.count), format_double(r.median_gap),
                               format_double(r.mean_gap)});
        write_file(dir / "plugin_gap.csv", os.str());
        outputs = {dir / "plugin_gap.csv"};
    }
    m.effective_config = eff.dump();
    m.outputs = outputs;
    m.write(dir);
    for (const auto& p : outputs) std::cout << p.string() << '\n';
    return kExitOk;
}

// ---- oracle ----

struct OracleArgs {
    std::optional<double> delta, gamma, target_risk, t, phase_c, level;
};

int cmd_oracle(const OracleArgs& a) {
    KeyValueDoc d;
    if (a.phase_c) {
        if (!a.level) throw CLI::ValidationError("--level", "required with --phase-c");
        const EnvelopePoint e = phase_envelope_point(*a.level, *a.phase_c);
        d.set("c", e.c);
        d.set("level", *a.level);
        d.set("delta", separation_for(e.c, *a.level));
        d.set("gamma_star", e.gamma_star);
        d.set("decided_star", e.decided_star);
        d.set("m_hat", e.m_hat);
        d.set("m_star", e.m_star);
        d.set("m_lower", e.m_lower);
        d.write(std::cout, "indecide phase envelope point");
        return kExitOk;
    }
    if (!a.delta) throw CLI::ValidationError("--delta", "required");
    const int given = a.gamma.has_value() + a.target_risk.has_value() + a.t.has_value();
    if (given != 1) throw CLI::ValidationError("--gamma/--target-risk/--t", "give exactly one");
    const GmmSpec spec{*a.delta};
    const OracleOperatingPoint p = a.gamma         ? threshold_for_gamma(spec, *a.gamma)
                                   : a.target_risk ? gamma_for_target_risk(spec, *a.target_risk)
                                                   : operating_point_at_t(spec, *a.t);
    d.set("delta", spec.delta);
    d.set("t", p.t);
    d.set("gamma", p.gamma);
    d.set("decided", p.decided);
    d.set("risk", p.risk);
    d.set("bayes_risk", bayes_risk(spec));
    d.write(std::cout, "indecide oracle operating point");
    return kExitOk;
}

// ---- fit / predict ----

int cmd_fit(const std::string& kind, const std::string& input, const std::string& output, double tol, int max_iter) {
    std::ifstream in(input);
    if (!in) throw SchemaError("cannot open '" + input + "'");
    const LabeledFeatures f = read_features_csv(in, true);
    Model model;
    if (kind == "lda") {
        const LdaModel m = fit_lda(f);
        if (m.regularized) std::cerr << "warning: pooled covariance is singular; added ridge 1e-06\n";
        model = m;
    } else {
        const LogisticModel m = fit_logistic(f, tol, max_iter);
        if (!m.converged) std::cerr << "warning: logistic fit stopped after " << m.iterations << " iterations\n";
        model = m;
    }
    write_file(output, doc_text(model_document(model), "indecide model"));
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input, const std::string& output) {
    std::ifstream min(model_path);
    if (!min) throw SchemaError("cannot open '" + model_path + "'");
    const Model model = model_from_document(KeyValueDoc::read(min));
    std::ifstream in(input);
    if (!in) throw SchemaError("cannot open '" + input + "'");
    const LabeledFeatures f = read_features_csv(in, false);
    std::ostringstream os;
    const bool labeled = !f.label.empty();
    write_csv_row(os, labeled ? std::vector<std::string>{"row", "score", "label"} : std::vector<std::string>{"row", "score"});
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::vector<std::string> row{std::to_string(i + 1), format_double(predict_eta(model, f.x[i]))};
        if (labeled) row.push_back(std::to_string(f.label[i]));
        write_csv_row(os, row);
    }
    if (output.empty()) std::cout << os.str();
    else write_file(output, os.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"indecide: calibrate classifiers that may abstain"};
    app.set_version_flag("--version", kToolkitVersion);
    app.require_subcommand(1);

    CalibrateArgs ca;
    auto* cal = app.add_subcommand("calibrate", "Calibrate a rule from a scores CSV");
    cal->add_option("--mode", ca.mode, "accuracy, np, multiclass, mlr-np or mlr-accuracy")
        ->required()
        ->check(CLI::IsMember({"accuracy", "np", "multiclass", "mlr-np", "mlr-accuracy"}));
    cal->add_option("--input", ca.input, "CSV with score,label (or s_1..s_K[,label], or x,label)")
        ->required()
        ->check(CLI::ExistingFile);
    cal->add_option("--alpha", ca.alpha, "Target conditional error");
    cal->add_option("--gamma", ca.gamma, "Fixed indecision fraction");
    cal->add_option("--alpha1", ca.alpha1, "Type I target");
    cal->add_option("--alpha2", ca.alpha2, "Type II target");
    cal->add_option("--umbrella-delta", ca.umbrella_delta, "np: type I rank holding with probability 1 - delta");
    cal->add_option("--holdout", ca.holdout, "np: separate score,label CSV for type II estimates")
        ->check(CLI::ExistingFile);
    cal->add_option("--out-dir", ca.out_dir, "Directory for report, rule, trace and manifest")->capture_default_str();

    std::string rule_path, apply_in, apply_out;
    auto* apply = app.add_subcommand("apply", "Apply a saved rule to a scores CSV");
    apply->add_option("--rule", rule_path, "Rule file written by calibrate")->required()->check(CLI::ExistingFile);
    apply->add_option("--input", apply_in, "Scores CSV")->required()->check(CLI::ExistingFile);
    apply->add_option("--output", apply_out, "Decisions CSV (default: stdout)");

    ExperimentArgs ea;
    auto* exp = app.add_subcommand("experiment", "Run a seeded simulation study");
    exp->add_option("name", ea.name, "phase, accuracy-sweep, np-sweep, intro-tradeoff or plugin-gap")
        ->required()
        ->check(CLI::IsMember({"phase", "accuracy-sweep", "np-sweep", "intro-tradeoff", "plugin-gap"}));
    exp->add_option("--config", ea.config, "JSON config")->check(CLI::ExistingFile);
    exp->add_option("--seed", ea.seed, "Overrides the config seed");
    exp->add_option("--out-dir", ea.out_dir, "Output directory (default: results/<name>)");
    exp->add_flag("--full", ea.full, "Full-size replications and grids");
    exp->add_option("--workers", ea.workers, "Worker threads (default: $INDECIDE_WORKERS or 1)");

    OracleArgs oa;
    auto* orc = app.add_subcommand("oracle", "Exact operating points of the symmetric Gaussian mixture");
    orc->add_option("--delta", oa.delta, "Half the distance between the class means");
    orc->add_option("--gamma", oa.gamma, "Indecision mass");
    orc->add_option("--target-risk", oa.target_risk, "Smallest indecision reaching this conditional risk");
    orc->add_option("--t", oa.t, "Abstain on |x| < t");
    orc->add_option("--phase-c", oa.phase_c, "Envelope point at separation c sqrt(2 log(1/level))");
    orc->add_option("--level", oa.level, "Target level for --phase-c");

    std::string fit_kind = "lda", fit_in, fit_out;
    double fit_tol = 1e-8;
    int fit_iter = 100;
    auto* fit = app.add_subcommand("fit", "Fit a built-in scorer on f_1..f_d,label");
    fit->add_option("--model", fit_kind, "lda or logistic")->check(CLI::IsMember({"lda", "logistic"}))->capture_default_str();
    fit->add_option("--input", fit_in, "Feature CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--output", fit_out, "Model file")->required();
    fit->add_option("--tol", fit_tol, "logistic: gradient tolerance")->capture_default_str();
    fit->add_option("--max-iter", fit_iter, "logistic: Newton iteration cap")->capture_default_str();

    std::string pred_model, pred_in, pred_out;
    auto* pred = app.add_subcommand("predict", "Score a feature CSV with a saved model");
    pred->add_option("--model", pred_model, "Model file")->required()->check(CLI::ExistingFile);
    pred->add_option("--input", pred_in, "Feature CSV")->required()->check(CLI::ExistingFile);
    pred->add_option("--output", pred_out, "Scores CSV (default: stdout)");

    try {
        app.parse(argc, argv);
        if (*cal) return cmd_calibrate(ca);
        if (*apply) return cmd_apply(rule_path, apply_in, apply_out);
        if (*exp) return cmd_experiment(ea);
        if (*orc) return cmd_oracle(oa);
        if (*fit) return cmd_fit(fit_kind, fit_in, fit_out, fit_tol, fit_iter);
        if (*pred) return cmd_predict(pred_model, pred_in, pred_out);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
