#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace indecide {

/// One support point: class-weighted masses w_k = p_k f_k(x), k = 1..K.
struct Atom {
    std::size_t id = 0;
    std::vector<double> mass;

    double total() const;
};

/// Finite-support joint law of (X, Y). Masses over all atoms and classes sum to 1.
class DiscreteJoint {
public:
    explicit DiscreteJoint(std::vector<Atom> atoms);

    /// Atoms with ids 0..n-1 from a row-per-atom weight table.
    static DiscreteJoint from_weights(const std::vector<std::vector<double>>& weights);

    std::size_t size() const { return atoms_.size(); }
    std::size_t classes() const { return classes_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const Atom& operator[](std::size_t i) const { return atoms_[i]; }

    double class_mass(std::size_t k) const;

private:
    std::vector<Atom> atoms_;
    std::size_t classes_ = 0;
};

/// Normalized class shares of one atom. Throws DomainError on an all-zero atom.
std::vector<double> eta_of(const std::vector<double>& weights);

/// Per-atom action of a classification rule with abstention.
/// `abstain_fraction[i]` is the share of atom i's mass sent to abstention; the
/// rest is assigned to `prediction[i]` (1-based argmax class).
struct IndecisionRule {
    std::vector<double> abstain_fraction;
    std::vector<int> prediction;
    /// Confidence level at which abstention stops (normalized max share).
    double threshold = 0.0;

    double abstained_mass(const DiscreteJoint& joint) const;
};

struct OracleResult {
    IndecisionRule rule;
    double risk = 0.0;
};

/// Optimal binary rule at indecision mass gamma: abstain on the atoms whose
/// smaller class share is largest, splitting one boundary atom fractionally.
OracleResult oracle_binary(const DiscreteJoint& joint, double gamma);

/// Optimal K-class rule at indecision mass gamma: abstain on the atoms with the
/// smallest normalized max share, predict the argmax class elsewhere.
OracleResult oracle_multiclass(const DiscreteJoint& joint, double gamma);

/// How the unconditional type-I mass alpha1 * (1 - gamma) binds.
enum class TypeOneConstraint {
    /// Class-1 mass sent to class 2 may not exceed the budget.
    at_most,
    /// Class-1 mass sent to class 2 must equal the budget.
    exactly,
};

/// Two-threshold rule on eta = w_1 / (w_1 + w_2). Per atom, fractions of mass
/// predicted class 2 (low eta), abstained, and predicted class 1 (high eta).
struct NpRuleDiscrete {
    std::vector<double> to_class2;
    std::vector<double> abstain;
    std::vector<double> to_class1;
    double tau1 = 0.0;
    double tau2 = 0.0;
    /// Class-1 mass predicted as class 2.
    double type1_mass = 0.0;
};

struct NpOracleResult {
    NpRuleDiscrete rule;
    /// Class-2 mass predicted as class 1, divided by 1 - gamma.
    double type2 = 0.0;
};

/// Minimizes type-II risk at indecision mass gamma under the type-I budget
/// alpha1 * (1 - gamma). In `exactly` mode throws InfeasibleError when the
/// budget cannot be spent in full.
NpOracleResult oracle_np(const DiscreteJoint& joint, double alpha1, double gamma,
                         TypeOneConstraint mode = TypeOneConstraint::at_most);

struct NpConstraint {
    double alpha1 = 0.0;
    TypeOneConstraint mode = TypeOneConstraint::exactly;
};

/// Exhaustive minimizer used as an independent check of the oracles.
///
/// Without a constraint: minimal conditional misclassification at abstention
/// mass exactly gamma, over every subset of fully abstained atoms plus one
/// fractional atom. With a constraint: minimal type-II risk over every vertex
/// of the rule polytope (each atom fully assigned except at most two split
/// atoms), subject to the type-I budget. Limited to 12 atoms.
double brute_force_min(const DiscreteJoint& joint, double gamma, std::optional<NpConstraint> constraint = std::nullopt);

constexpr std::size_t kBruteForceMaxAtoms = 12;

/// CSV with header `id,w_1,...,w_K`, one row per atom.
DiscreteJoint read_joint_csv(std::istream& in);
void write_joint_csv(std::ostream& out, const DiscreteJoint& joint);

}  // namespace indecide
