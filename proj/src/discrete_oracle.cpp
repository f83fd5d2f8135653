#include "indecide/discrete_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "indecide/csv.hpp"
#include "indecide/errors.hpp"

namespace indecide {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-12;

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        std::ostringstream os;
        os << "indecision mass must lie in [0, 1), got " << gamma;
        throw DomainError(os.str());
    }
}

std::size_t argmax(const std::vector<double>& w) {
    return static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
}

// Greedy abstention on the lowest normalized max share; shared by the binary and K-class oracles.
OracleResult oracle_by_confidence(const DiscreteJoint& joint, double gamma) {
    check_gamma(gamma);
    const auto& atoms = joint.atoms();
    const std::size_t n = atoms.size();
    std::vector<double> conf(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double tot = atoms[i].total();
        if (tot > 0.0) conf[i] = *std::max_element(atoms[i].mass.begin(), atoms[i].mass.end()) / tot;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (conf[a] != conf[b]) return conf[a] < conf[b];
        return atoms[a].id < atoms[b].id;
    });

    OracleResult res;
    res.rule.abstain_fraction.assign(n, 0.0);
    res.rule.prediction.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.rule.prediction[i] = static_cast<int>(argmax(atoms[i].mass)) + 1;
    res.rule.threshold = conf.empty() ? 0.0 : conf[order.front()];

    double need = gamma;
    for (std::size_t i : order) {
        if (need <= 0.0) break;
        const double tot = atoms[i].total();
        if (tot <= 0.0) continue;
        const double take = std::min(tot, need);
        res.rule.abstain_fraction[i] = take >= tot ? 1.0 : take / tot;
        res.rule.threshold = conf[i];
        need -= take;
    }
    if (need > kMassTol) throw DomainError("oracle: indecision mass exceeds the available mass");

    double wrong = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double tot = atoms[i].total();
        const double best = atoms[i].mass[static_cast<std::size_t>(res.rule.prediction[i] - 1)];
        wrong += (1.0 - res.rule.abstain_fraction[i]) * (tot - best);
    }
    res.risk = wrong / (1.0 - gamma);
    return res;
}

void require_binary(const DiscreteJoint& joint, const char* who) {
    if (joint.classes() != 2) throw DomainError(std::string(who) + ": needs exactly two classes");
}

bool within(double v, double lo, double hi) { return v >= lo - kMassTol && v <= hi + kMassTol; }

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double unconstrained_brute(const DiscreteJoint& joint, double gamma) {
    const auto& atoms = joint.atoms();
    const std::size_t n = atoms.size();
    std::vector<double> tot(n), loss(n);
    for (std::size_t i = 0; i < n; ++i) {
        tot[i] = atoms[i].total();
        loss[i] = tot[i] - *std::max_element(atoms[i].mass.begin(), atoms[i].mass.end());
    }
    const double total_loss = std::accumulate(loss.begin(), loss.end(), 0.0);
    double best = kInf;
    for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
        double mass = 0.0, removed = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (s >> i & 1U) {
                mass += tot[i];
                removed += loss[i];
            }
        const double rest = gamma - mass;
        if (rest < -kMassTol) continue;
        if (std::abs(rest) <= kMassTol) best = std::min(best, total_loss - removed);
        if (rest <= 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (s >> j & 1U || tot[j] <= 0.0) continue;
            const double f = rest / tot[j];
            if (f > 1.0 + kMassTol) continue;
            best = std::min(best, total_loss - removed - clamp01(f) * loss[j]);
        }
    }
    return best / (1.0 - gamma);
}

// Per-atom contributions of each action: 0 = predict class 2, 1 = abstain, 2 = predict class 1.
struct ActionTable {
    std::array<double, 3> type1;  // class-1 mass predicted class 2
    std::array<double, 3> gamma;  // abstained mass
    std::array<double, 3> type2;  // class-2 mass predicted class 1
};

double constrained_brute(const DiscreteJoint& joint, double gamma, const NpConstraint& c) {
    require_binary(joint, "brute_force_min");
    if (!(c.alpha1 >= 0.0 && c.alpha1 <= 1.0)) throw DomainError("brute_force_min: alpha1 must lie in [0, 1]");
    const auto& atoms = joint.atoms();
    const std::size_t n = atoms.size();
    const double budget = c.alpha1 * (1.0 - gamma);
    const bool exact = c.mode == TypeOneConstraint::exactly;

    std::vector<ActionTable> tab(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w1 = atoms[i].mass[0], w2 = atoms[i].mass[1];
        tab[i].type1 = {w1, 0.0, 0.0};
        tab[i].gamma = {0.0, w1 + w2, 0.0};
        tab[i].type2 = {0.0, 0.0, w2};
    }

    auto type1_ok = [&](double t) { return exact ? std::abs(t - budget) <= kMassTol : t <= budget + kMassTol; };
    double best = kInf;
    auto consider = [&](double t, double g, double o) {
        if (std::abs(g - gamma) <= kMassTol && type1_ok(t)) best = std::min(best, o);
    };
    // Solves a*x + b*y = e, c*x + d*y = f; false when singular.
    auto solve2 = [](double a, double b, double cc, double d, double e, double f, double& x, double& y) {
        const double det = a * d - b * cc;
        if (std::abs(det) < 1e-300) return false;
        x = (e * d - b * f) / det;
        y = (a * f - e * cc) / det;
        return true;
    };

    std::vector<int> s(n, 0);
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
        std::size_t rem = code;
        double t0 = 0.0, g0 = 0.0, o0 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<int>(rem % 3);
            rem /= 3;
            t0 += tab[i].type1[s[i]];
            g0 += tab[i].gamma[s[i]];
            o0 += tab[i].type2[s[i]];
        }
        consider(t0, g0, o0);

        for (std::size_t i = 0; i < n; ++i) {
            const int a = s[i];
            for (int b = 0; b < 3; ++b) {
                if (b == a) continue;
                const double dt = tab[i].type1[b] - tab[i].type1[a];
                const double dg = tab[i].gamma[b] - tab[i].gamma[a];
                const double dox = tab[i].type2[b] - tab[i].type2[a];
                // One split atom closing the indecision equation.
                if (dg != 0.0) {
                    const double x = (gamma - g0) / dg;
                    if (within(x, 0.0, 1.0)) consider(t0 + x * dt, g0 + x * dg, o0 + x * dox);
                }
                // One split atom closing the type-I equation.
                if (dt != 0.0) {
                    const double x = (budget - t0) / dt;
                    if (within(x, 0.0, 1.0)) consider(budget, g0 + x * dg, o0 + x * dox);
                }
                // Two split atoms closing both equations.
                for (std::size_t j = i + 1; j < n; ++j) {
                    const int a2 = s[j];
                    for (int b2 = 0; b2 < 3; ++b2) {
                        if (b2 == a2) continue;
                        const double dt2 = tab[j].type1[b2] - tab[j].type1[a2];
                        const double dg2 = tab[j].gamma[b2] - tab[j].gamma[a2];
                        const double do2 = tab[j].type2[b2] - tab[j].type2[a2];
                        double x = 0.0, y = 0.0;
                        if (!solve2(dg, dg2, dt, dt2, gamma - g0, budget - t0, x, y)) continue;
                        if (!within(x, 0.0, 1.0) || !within(y, 0.0, 1.0)) continue;
                        consider(t0 + x * dt + y * dt2, g0 + x * dg + y * dg2, o0 + x * dox + y * do2);
                    }
                }
            }
            // One atom split across all three actions.
            const int b = (a + 1) % 3, c3 = (a + 2) % 3;
            const double dtb = tab[i].type1[b] - tab[i].type1[a], dtc = tab[i].type1[c3] - tab[i].type1[a];
            const double dgb = tab[i].gamma[b] - tab[i].gamma[a], dgc = tab[i].gamma[c3] - tab[i].gamma[a];
            const double dob = tab[i].type2[b] - tab[i].type2[a], doc = tab[i].type2[c3] - tab[i].type2[a];
            double x = 0.0, y = 0.0;
            if (solve2(dgb, dgc, dtb, dtc, gamma - g0, budget - t0, x, y) && within(x, 0.0, 1.0) &&
                within(y, 0.0, 1.0) && x + y <= 1.0 + kMassTol)
                consider(t0 + x * dtb + y * dtc, g0 + x * dgb + y * dgc, o0 + x * dob + y * doc);
        }
    }
    return best / (1.0 - gamma);
}

}  // namespace

double Atom::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

DiscreteJoint::DiscreteJoint(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.size() < 2) throw DomainError("DiscreteJoint: need at least two atoms");
    classes_ = atoms_.front().mass.size();
    if (classes_ < 2) throw DomainError("DiscreteJoint: need at least two classes");
    double sum = 0.0;
    for (const Atom& a : atoms_) {
        if (a.mass.size() != classes_) throw DomainError("DiscreteJoint: atoms disagree on the number of classes");
        for (double w : a.mass) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                std::ostringstream os;
                os << "DiscreteJoint: atom " << a.id << " has an invalid weight " << w;
                throw DomainError(os.str());
            }
            sum += w;
        }
    }
    if (std::abs(sum - 1.0) > kMassTol) {
        std::ostringstream os;
        os.precision(17);
        os << "DiscreteJoint: weights sum to " << sum << ", expected 1";
        throw DomainError(os.str());
    }
}

DiscreteJoint DiscreteJoint::from_weights(const std::vector<std::vector<double>>& weights) {
    std::vector<Atom> atoms;
    atoms.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) atoms.push_back(Atom{i, weights[i]});
    return DiscreteJoint(std::move(atoms));
}

double DiscreteJoint::class_mass(std::size_t k) const {
    if (k >= classes_) throw DomainError("DiscreteJoint::class_mass: class index out of range");
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.mass[k];
    return s;
}

std::vector<double> eta_of(const std::vector<double>& weights) {
    const double tot = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(tot > 0.0)) throw DomainError("eta_of: atom has no mass");
    std::vector<double> eta(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) eta[k] = weights[k] / tot;
    return eta;
}

double IndecisionRule::abstained_mass(const DiscreteJoint& joint) const {
    double g = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i) g += abstain_fraction[i] * joint[i].total();
    return g;
}

OracleResult oracle_binary(const DiscreteJoint& joint, double gamma) {
    require_binary(joint, "oracle_binary");
    return oracle_by_confidence(joint, gamma);
}

OracleResult oracle_multiclass(const DiscreteJoint& joint, double gamma) { return oracle_by_confidence(joint, gamma); }

NpOracleResult oracle_np(const DiscreteJoint& joint, double alpha1, double gamma, TypeOneConstraint mode) {
    require_binary(joint, "oracle_np");
    check_gamma(gamma);
    if (!(alpha1 >= 0.0 && alpha1 <= 1.0)) throw DomainError("oracle_np: alpha1 must lie in [0, 1]");
    const auto& atoms = joint.atoms();
    const std::size_t n = atoms.size();
    std::vector<double> eta(n, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
        const double tot = atoms[i].total();
        if (tot > 0.0) eta[i] = atoms[i].mass[0] / tot;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (eta[a] != eta[b]) return eta[a] < eta[b];
        return atoms[a].id < atoms[b].id;
    });

    NpOracleResult res;
    NpRuleDiscrete& r = res.rule;
    r.to_class2.assign(n, 0.0);
    r.abstain.assign(n, 0.0);
    r.to_class1.assign(n, 0.0);
    r.tau1 = 0.0;
    r.tau2 = 1.0;

    const double budget = alpha1 * (1.0 - gamma);
    const double cap = 1.0 - gamma;
    double spent = 0.0, claimed = 0.0;
    std::size_t pos = 0;
    std::vector<double> left(n);
    for (std::size_t i = 0; i < n; ++i) left[i] = atoms[i].total();

    // Class 2 from the low-eta end until the type-I budget or the decided mass runs out.
    for (; pos < n; ++pos) {
        const std::size_t i = order[pos];
        const double tot = left[i];
        if (tot <= 0.0) continue;
        double x = 1.0;
        const double w1 = atoms[i].mass[0];
        if (w1 > 0.0) x = std::min(x, (budget - spent) / w1);
        x = std::min(x, (cap - claimed) / tot);
        x = clamp01(x);
        if (x <= 0.0) break;
        r.to_class2[i] = x;
        spent += x * w1;
        claimed += x * tot;
        r.tau1 = eta[i];
        left[i] = (1.0 - x) * tot;
        if (x < 1.0) break;
    }
    if (mode == TypeOneConstraint::exactly && spent < budget - kMassTol)
        throw InfeasibleError("oracle_np: the type-I budget cannot be spent in full at this indecision mass");
    r.type1_mass = spent;

    // Abstain on the next gamma of mass.
    double need = gamma;
    for (; pos < n && need > 0.0; ++pos) {
        const std::size_t i = order[pos];
        const double tot = atoms[i].total();
        if (left[i] <= 0.0 || tot <= 0.0) continue;
        const double take = std::min(left[i], need);
        r.abstain[i] = take / tot;
        need -= take;
        left[i] -= take;
        if (left[i] > 0.0) break;
    }
    if (need > kMassTol) throw DomainError("oracle_np: indecision mass exceeds the available mass");

    // Class 1 on whatever remains.
    bool first = true;
    double type2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        const double tot = atoms[i].total();
        if (tot <= 0.0) continue;
        const double f = std::max(0.0, 1.0 - r.to_class2[i] - r.abstain[i]);
        if (f <= kMassTol * 1e-3) continue;
        r.to_class1[i] = f;
        type2 += f * atoms[i].mass[1];
        if (first) {
            r.tau2 = eta[i];
            first = false;
        }
    }
    res.type2 = type2 / (1.0 - gamma);
    return res;
}

double brute_force_min(const DiscreteJoint& joint, double gamma, std::optional<NpConstraint> constraint) {
    check_gamma(gamma);
    if (joint.size() > kBruteForceMaxAtoms) throw DomainError("brute_force_min: too many atoms for exhaustive search");
    return constraint ? constrained_brute(joint, gamma, *constraint) : unconstrained_brute(joint, gamma);
}

DiscreteJoint read_joint_csv(std::istream& in) {
    const CsvTable t = read_csv(in);
    const std::size_t id_col = t.require_column("id");
    std::vector<std::size_t> w_cols;
    for (std::size_t k = 1;; ++k) {
        const std::size_t c = t.column("w_" + std::to_string(k));
        if (c == std::string::npos) break;
        w_cols.push_back(c);
    }
    if (w_cols.size() < 2) throw SchemaError("joint table needs columns w_1 and w_2", 1);
    std::vector<Atom> atoms;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Atom a;
        const long long id = parse_int(t.rows[r][id_col], t.lines[r]);
        if (id < 0) throw SchemaError("atom id must be non-negative", t.lines[r]);
        a.id = static_cast<std::size_t>(id);
        for (std::size_t c : w_cols) {
            const double w = parse_double(t.rows[r][c], t.lines[r]);
            if (!(w >= 0.0) || !std::isfinite(w)) throw SchemaError("weights must be finite and non-negative", t.lines[r]);
            a.mass.push_back(w);
        }
        atoms.push_back(std::move(a));
    }
    try {
        return DiscreteJoint(std::move(atoms));
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }
}

void write_joint_csv(std::ostream& out, const DiscreteJoint& joint) {
    std::vector<std::string> head{"id"};
    for (std::size_t k = 1; k <= joint.classes(); ++k) head.push_back("w_" + std::to_string(k));
    write_csv_row(out, head);
    for (const Atom& a : joint.atoms()) {
        std::vector<std::string> row{std::to_string(a.id)};
        for (double w : a.mass) row.push_back(format_double(w));
        write_csv_row(out, row);
    }
}

}  // namespace indecide
