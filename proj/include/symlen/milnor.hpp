#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "symlen/field.hpp"

namespace symlen {

/// p^m, the torsion modulus of the ambient K-group quotient.
struct Modulus {
    int p = 2;
    int m = 1;

    Modulus() = default;
    Modulus(int p_, int m_);

    long long value() const;  // p^m
    Modulus raised() const { return Modulus(p, m + 1); }

    bool operator==(const Modulus& o) const { return p == o.p && m == o.m; }
    bool operator!=(const Modulus& o) const { return !(*this == o); }
    std::string str() const { return std::to_string(p) + "^" + std::to_string(m); }
};

/// {a_1,...,a_n} with nonzero entries sharing one field.
class Symbol {
public:
    Symbol(Modulus mod, std::vector<FieldElement> entries);

    const Modulus& modulus() const { return mod_; }
    const std::vector<FieldElement>& entries() const { return entries_; }
    const FieldElement& entry(int i) const;  // 1-based slot index
    int grade() const { return int(entries_.size()); }
    const FieldRef& field() const { return entries_.front().field(); }

    Symbol with_entry(int i, FieldElement e) const;  // 1-based
    bool operator==(const Symbol& o) const;
    std::string str() const;

private:
    Modulus mod_;
    std::vector<FieldElement> entries_;
};

struct Term {
    long long coeff = 0;
    Symbol symbol;

    Term(long long c, Symbol s) : coeff(c), symbol(std::move(s)) {}
};

/// Ordered integer combination of symbols of one grade and modulus. This is
/// an expression, not a normal form: term order matters and nothing is
/// collected implicitly. Zero-coefficient terms are never stored.
class KClassExpr {
public:
    KClassExpr();  // empty expression over Q at 2^1, grade 1
    KClassExpr(FieldRef field, Modulus mod, int grade, std::vector<Term> terms = {});
    static KClassExpr single(Symbol s);

    const FieldRef& field() const { return field_; }
    const Modulus& modulus() const { return mod_; }
    int grade() const { return grade_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int size() const { return int(terms_.size()); }

    /// Number of symbols counted with multiplicity |coeff|.
    long long symbol_count() const;

    bool operator==(const KClassExpr& o) const;
    std::string str() const;

private:
    friend KClassExpr apply_move(const KClassExpr&, const struct MoveStep&);
    FieldRef field_;
    Modulus mod_;
    int grade_ = 1;
    std::vector<Term> terms_;
};

enum class MoveRule { BilinSplit, BilinMerge, Steinberg, MinusAlpha, UnitSlot, Swap, CoeffMod, SumIdentity };

const char* rule_name(MoveRule r);
MoveRule rule_from_name(const std::string& s);

/// One elementary relation move. Conventions (term and slot indices are
/// 1-based; `terms` and `slots` below list what each rule expects):
///
///   BilinSplit  terms=[k] slots=[i] params=[u]: factor entry a=u*(a/u),
///               replacing term k by two adjacent copies with entries u, a/u.
///   BilinSplit  terms=[k,c'] slots=[]: split coefficient c into c', c-c'
///               (two adjacent terms with the same symbol).
///   BilinMerge  terms=[j,k] slots=[i]: terms j,k equal off slot i; with
///               equal coefficients the entries multiply, with opposite
///               coefficients they divide. Result replaces j, k is removed.
///   BilinMerge  terms=[j,k] slots=[]: identical symbols; coefficients add
///               (both terms removed when the sum is zero).
///   Steinberg   terms=[k] slots=[i,j]: delete term k, entry_j = 1 - entry_i.
///   Steinberg   terms=[pos,c] slots=[i,j] params=entries: insert the zero
///               term c*{entries} at pos (params[j] = 1 - params[i]).
///   MinusAlpha  like Steinberg with entry_j = -entry_i.
///   UnitSlot    like Steinberg with a single slot holding 1.
///   Swap        terms=[k] slots=[i]: transpose entries i, i+1 and negate
///               the coefficient.
///   CoeffMod    terms=[k] or [k,c']: replace the coefficient by c mod p^m
///               (or by any c' congruent to it); term removed when zero.
///   SumIdentity terms=[k] slots=[i,i+1] params=[a,b]: rewrite entries
///               (a,b) to (a+b, -b/a); `expansion` holds its derivation by
///               primitive moves and is replayed by the checker.
struct MoveStep {
    MoveRule rule = MoveRule::Swap;
    std::vector<long long> terms;
    std::vector<int> slots;
    std::vector<FieldElement> params;
    std::vector<MoveStep> expansion;
};

KClassExpr apply_move(const KClassExpr& e, const MoveStep& s);

/// Replayable proof that `start` and `end` denote the same class.
struct Certificate {
    Modulus modulus;  // of start/end
    FieldRef field;
    KClassExpr start;
    KClassExpr end;
    std::vector<MoveStep> steps;
};

struct CheckResult {
    bool valid = false;
    int step_index = -1;  // failing step, or -1 for an endpoint mismatch
    std::string reason;
};

CheckResult check_certificate(const Certificate& c);

KClassExpr shift_map(const KClassExpr& e);
KClassExpr exp_map(const KClassExpr& e);
KClassExpr cup(const KClassExpr& e1, const KClassExpr& e2);

/// Sound (not complete) canonical form over Q: entries expand over the
/// multiplicative basis {-1, 2, 3, 5, ...}, entries sort with sign
/// bookkeeping, like terms merge, coefficients reduce mod p^m. Equal normal
/// forms imply equal classes; the Steinberg relation is not decided.
KClassExpr normalize_over_Q(const KClassExpr& e);

// --- move-sequence builders (each returns steps valid for the expression
//     state it is given; callers apply them in order) ---

/// Expansion of {a,b} -> {a+b, -b/a} at adjacent slots (i, i+1) of term k.
MoveStep make_sum_identity_step(const KClassExpr& e, int term, int slot);

/// Primitive steps for the inverse rewrite {A,B} -> {A/(1-B), -AB/(1-B)}.
std::vector<MoveStep> sum_identity_inverse_steps(const KClassExpr& e, int term, int slot);

/// Re-target a step list so it acts on terms [offset+1, ...].
std::vector<MoveStep> shift_term_indices(std::vector<MoveStep> steps, long long offset);

/// Transform a step list so it stays valid after every symbol in the
/// expression gains fixed trailing entries (cup with a fixed tail).
std::vector<MoveStep> embed_trailing(std::vector<MoveStep> steps, const std::vector<FieldElement>& tail);

/// Transform a step list so it acts on the coefficient-negated expression.
std::vector<MoveStep> negate_steps(std::vector<MoveStep> steps, const Modulus& mod);

// --- serialization ---

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);
nlohmann::json expr_terms_to_json(const KClassExpr& e);
KClassExpr expr_terms_from_json(const nlohmann::json& j, const FieldRef& f, const Modulus& mod, int grade_hint);
nlohmann::json field_to_json(const FieldRef& f);
FieldRef field_from_json(const nlohmann::json& j);

/// Grammar: class := term (("+"|"-") term)*;
/// term := [int "*"] "{" elem ("," elem)* "}" "@" p "^" m.
KClassExpr parse_class_expr(const std::string& text, const FieldRef& f);

}  // namespace symlen
