#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "symlen/milnor.hpp"
#include "symlen/witness.hpp"

namespace symlen {

/// A decomposition together with the replayable proof that p * (lifted
/// terms) equals the target in K_n F / p^{m+1}. Reading the terms as the
/// Shift pre-image additionally assumes mu_{p^{m+1}} in F (recorded in
/// `assumptions`, never checked).
struct CertifiedDecomposition {
    std::string theorem;
    KClassExpr target;  // at p^{m+1}
    KClassExpr terms;   // at p^m, one symbol per term
    Certificate certificate;
    long long bound_used = 0;
    std::vector<std::string> assumptions;
};

nlohmann::json decomposition_to_json(const CertifiedDecomposition& d);
CertifiedDecomposition decomposition_from_json(const nlohmann::json& j);

struct PlanNode {
    std::string tag;
    long long bound = 0;
    std::vector<PlanNode> children;

    long long total() const;
};

nlohmann::json plan_to_json(const PlanNode& p);

/// Closed-form symbol-length bounds per theorem tag ("t1", "t2",
/// "corollary", "t3", "t4", "t5").
long long bound(const std::string& theorem, int n, int i = 0);

/// Dry-run orchestration tree; touches no field arithmetic or witnesses.
PlanNode plan(const std::string& theorem, int n, int i = 0);

/// Base case: target {alpha, beta} with beta = x^2 - alpha y^2.
CertifiedDecomposition t1_base(const FieldElement& alpha, const FieldElement& beta, const FieldElement& x,
                               const FieldElement& y, int m);

/// Single-symbol decomposition, at most 2^{n-1} terms.
CertifiedDecomposition t1(const Symbol& symbol, const WitnessBundle& bundle);

/// Target {alphas} - {betas, alpha_{i+1}..alpha_n}, both at 2^{m+1}.
CertifiedDecomposition t2(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int i,
                          int m, const WitnessBundle& bundle);

/// Two-symbol class S1 - S2 of equal grade n, routed through t2 at i = n.
CertifiedDecomposition corollary_length2(const KClassExpr& e, const WitnessBundle& bundle);

/// Sum of three symbols, split along a linkage witness.
CertifiedDecomposition t3(const std::vector<std::vector<FieldElement>>& symbols, const nlohmann::json& linkage,
                          int m, const WitnessBundle& bundle);

/// P1 + P2 - (P3 + P4) of grade-2 symbols along a Sivatski chain.
CertifiedDecomposition t4(const std::vector<std::vector<FieldElement>>& pairs, const nlohmann::json& chain, int m,
                          const WitnessBundle& bundle);

// internal fragment machinery shared with the mod-3 pipeline
struct Fragment {
    std::vector<Term> terms;      // base modulus, +1 coefficients
    std::vector<MoveStep> steps;  // lift of `terms` -> `produced`
    std::vector<Term> produced;   // raised modulus
};

Fragment negate_fragment(const Fragment& f, const FieldRef& field, const Modulus& up, int grade);
CertifiedDecomposition assemble(const std::string& theorem, const FieldRef& field, const Modulus& base, int grade,
                                const std::vector<Fragment>& fragments,
                                const std::function<void(class CertBuilder&)>& finish, const KClassExpr& target,
                                long long bound_used);

/// Step recorder that applies as it goes; engines build certificates
/// against live state so every emitted step is validated immediately.
class CertBuilder {
public:
    explicit CertBuilder(KClassExpr start) : cur_(std::move(start)) {}

    const KClassExpr& state() const { return cur_; }
    void apply(MoveStep s);
    void apply_all(std::vector<MoveStep> steps);
    std::vector<MoveStep> take_steps() { return std::move(steps_); }

    /// Find the 1-based index of a term with the given coefficient and symbol.
    int find_term(long long coeff, const Symbol& s) const;

private:
    KClassExpr cur_;
    std::vector<MoveStep> steps_;
};

}  // namespace symlen
