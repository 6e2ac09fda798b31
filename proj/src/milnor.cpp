#include "symlen/milnor.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace symlen {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---- Modulus / Symbol / KClassExpr ----

Modulus::Modulus(int p_, int m_) : p(p_), m(m_)
{
    if (p != 2 && p != 3) throw Error(Err::InvalidArgument, "modulus prime must be 2 or 3");
    if (m < 1) throw Error(Err::InvalidArgument, "modulus exponent must be >= 1");
}

long long Modulus::value() const
{
    long long v = 1;
    for (int i = 0; i < m; ++i) v *= p;
    return v;
}

Symbol::Symbol(Modulus mod, std::vector<FieldElement> entries) : mod_(mod), entries_(std::move(entries))
{
    if (entries_.empty()) throw Error(Err::InvalidArgument, "symbol needs at least one entry");
    for (const auto& e : entries_) {
        if (!same_field(e.field(), entries_.front().field()))
            throw Error(Err::DescriptorMismatch, "symbol entries live in different fields");
        if (e.is_zero()) throw Error(Err::InvalidArgument, "symbol entries must be nonzero");
    }
}

const FieldElement& Symbol::entry(int i) const
{
    if (i < 1 || i > grade()) throw Error(Err::IndexOutOfRange, "slot " + std::to_string(i));
    return entries_[size_t(i - 1)];
}

Symbol Symbol::with_entry(int i, FieldElement e) const
{
    if (i < 1 || i > grade()) throw Error(Err::IndexOutOfRange, "slot " + std::to_string(i));
    auto entries = entries_;
    entries[size_t(i - 1)] = std::move(e);
    return Symbol(mod_, std::move(entries));
}

bool Symbol::operator==(const Symbol& o) const
{
    return mod_ == o.mod_ && entries_ == o.entries_;
}

std::string Symbol::str() const
{
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < entries_.size(); ++i) {
        if (i) os << ",";
        os << entries_[i].str();
    }
    os << "}@" << mod_.str();
    return os.str();
}

KClassExpr::KClassExpr() : field_(FieldDescriptor::rationals()), mod_(), grade_(1) {}

KClassExpr::KClassExpr(FieldRef field, Modulus mod, int grade, std::vector<Term> terms)
    : field_(std::move(field)), mod_(mod), grade_(grade), terms_(std::move(terms))
{
    if (grade_ < 1) throw Error(Err::InvalidArgument, "grade must be >= 1");
    for (const auto& t : terms_) {
        if (t.coeff == 0) throw Error(Err::InvalidArgument, "zero coefficient term");
        if (t.symbol.grade() != grade_) throw Error(Err::InvalidArgument, "mixed grades in expression");
        if (!(t.symbol.modulus() == mod_)) throw Error(Err::ModulusMismatch, "mixed moduli in expression");
        if (!same_field(t.symbol.field(), field_))
            throw Error(Err::DescriptorMismatch, "expression terms live in different fields");
    }
}

KClassExpr KClassExpr::single(Symbol s)
{
    FieldRef f = s.field();
    Modulus mod = s.modulus();
    int grade = s.grade();
    std::vector<Term> terms;
    terms.emplace_back(1, std::move(s));
    return KClassExpr(f, mod, grade, std::move(terms));
}

long long KClassExpr::symbol_count() const
{
    long long n = 0;
    for (const auto& t : terms_) n += t.coeff < 0 ? -t.coeff : t.coeff;
    return n;
}

bool KClassExpr::operator==(const KClassExpr& o) const
{
    if (!(mod_ == o.mod_) || grade_ != o.grade_ || terms_.size() != o.terms_.size()) return false;
    if (!same_field(field_, o.field_)) return false;
    for (size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != o.terms_[i].coeff || !(terms_[i].symbol == o.terms_[i].symbol)) return false;
    return true;
}

std::string KClassExpr::str() const
{
    if (terms_.empty()) return "0@" + mod_.str();
    std::ostringstream os;
    for (size_t i = 0; i < terms_.size(); ++i) {
        long long c = terms_[i].coeff;
        if (i == 0) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        long long a = c < 0 ? -c : c;
        if (a != 1) os << a << "*";
        os << terms_[i].symbol.str();
    }
    return os.str();
}

// ---- moves ----

const char* rule_name(MoveRule r)
{
    switch (r) {
        case MoveRule::BilinSplit: return "BilinSplit";
        case MoveRule::BilinMerge: return "BilinMerge";
        case MoveRule::Steinberg: return "Steinberg";
        case MoveRule::MinusAlpha: return "MinusAlpha";
        case MoveRule::UnitSlot: return "UnitSlot";
        case MoveRule::Swap: return "Swap";
        case MoveRule::CoeffMod: return "CoeffMod";
        case MoveRule::SumIdentity: return "SumIdentity";
    }
    return "?";
}

MoveRule rule_from_name(const std::string& s)
{
    for (MoveRule r : {MoveRule::BilinSplit, MoveRule::BilinMerge, MoveRule::Steinberg, MoveRule::MinusAlpha,
                       MoveRule::UnitSlot, MoveRule::Swap, MoveRule::CoeffMod, MoveRule::SumIdentity})
        if (s == rule_name(r)) return r;
    throw Error(Err::ParseError, "unknown move rule '" + s + "'");
}

namespace {

[[noreturn]] void violated(MoveRule r, const std::string& detail)
{
    throw Error(Err::SideConditionViolated, std::string(rule_name(r)) + ": " + detail);
}

size_t term_index(const KClassExpr& e, long long k, MoveRule r)
{
    if (k < 1 || k > e.size()) throw Error(Err::IndexOutOfRange, std::string(rule_name(r)) + ": term " + std::to_string(k));
    return size_t(k - 1);
}

int slot_index(const KClassExpr& e, int i, MoveRule r)
{
    if (i < 1 || i > e.grade()) throw Error(Err::IndexOutOfRange, std::string(rule_name(r)) + ": slot " + std::to_string(i));
    return i;
}

// Steinberg / MinusAlpha / UnitSlot share the delete/insert shape; `ok`
// decides whether a given entry list satisfies the relation.
KClassExpr delete_or_insert(const KClassExpr& e, const MoveStep& s,
                            const std::function<bool(const std::vector<FieldElement>&)>& ok)
{
    std::vector<Term> terms = e.terms();
    if (s.params.empty()) {
        if (s.terms.size() != 1) violated(s.rule, "expected terms=[k]");
        size_t k = term_index(e, s.terms[0], s.rule);
        if (!ok(terms[k].symbol.entries())) violated(s.rule, "relation does not hold at term " + std::to_string(s.terms[0]));
        terms.erase(terms.begin() + long(k));
    } else {
        if (s.terms.size() != 2) violated(s.rule, "insert expects terms=[pos,coeff]");
        long long pos = s.terms[0], coeff = s.terms[1];
        if (pos < 1 || pos > e.size() + 1) throw Error(Err::IndexOutOfRange, "insert position " + std::to_string(pos));
        if (coeff == 0) violated(s.rule, "insert coefficient is zero");
        if (int(s.params.size()) != e.grade()) violated(s.rule, "insert entry count != grade");
        for (const auto& p : s.params) {
            if (!same_field(p.field(), e.field())) violated(s.rule, "insert entries in wrong field");
            if (p.is_zero()) violated(s.rule, "insert entries must be nonzero");
        }
        if (!ok(s.params)) violated(s.rule, "inserted term is not a relation instance");
        terms.insert(terms.begin() + long(pos - 1), Term(coeff, Symbol(e.modulus(), s.params)));
    }
    return KClassExpr(e.field(), e.modulus(), e.grade(), std::move(terms));
}

}  // namespace

KClassExpr apply_move(const KClassExpr& e, const MoveStep& s)
{
    const FieldElement one = FieldElement::one(e.field());
    std::vector<Term> terms = e.terms();

    switch (s.rule) {
        case MoveRule::BilinSplit: {
            if (s.slots.empty()) {
                // coefficient split c -> c', c - c'
                if (s.terms.size() != 2) violated(s.rule, "expected terms=[k,c']");
                size_t k = term_index(e, s.terms[0], s.rule);
                long long c = terms[k].coeff, c1 = s.terms[1];
                if (c1 == 0 || c1 == c) violated(s.rule, "split produces a zero coefficient");
                Term rest(c - c1, terms[k].symbol);
                terms[k].coeff = c1;
                terms.insert(terms.begin() + long(k) + 1, rest);
                break;
            }
            if (s.terms.size() != 1 || s.slots.size() != 1 || s.params.size() != 1)
                violated(s.rule, "expected terms=[k], slots=[i], params=[u]");
            size_t k = term_index(e, s.terms[0], s.rule);
            int i = slot_index(e, s.slots[0], s.rule);
            const FieldElement& u = s.params[0];
            if (!same_field(u.field(), e.field())) violated(s.rule, "factor in wrong field");
            if (u.is_zero()) violated(s.rule, "factor must be nonzero");
            FieldElement v = terms[k].symbol.entry(i) / u;
            Term second(terms[k].coeff, terms[k].symbol.with_entry(i, v));
            terms[k].symbol = terms[k].symbol.with_entry(i, u);
            terms.insert(terms.begin() + long(k) + 1, second);
            break;
        }

        case MoveRule::BilinMerge: {
            if (s.terms.size() != 2) violated(s.rule, "expected terms=[j,k]");
            size_t j = term_index(e, s.terms[0], s.rule);
            size_t k = term_index(e, s.terms[1], s.rule);
            if (j == k) violated(s.rule, "terms must be distinct");
            if (s.slots.empty()) {
                // like-term collection
                if (!(terms[j].symbol == terms[k].symbol)) violated(s.rule, "collected symbols differ");
                long long c = terms[j].coeff + terms[k].coeff;
                if (c == 0) {
                    size_t hi = std::max(j, k), lo = std::min(j, k);
                    terms.erase(terms.begin() + long(hi));
                    terms.erase(terms.begin() + long(lo));
                } else {
                    terms[j].coeff = c;
                    terms.erase(terms.begin() + long(k));
                }
                break;
            }
            if (s.slots.size() != 1) violated(s.rule, "expected slots=[i]");
            int i = slot_index(e, s.slots[0], s.rule);
            for (int t = 1; t <= e.grade(); ++t)
                if (t != i && terms[j].symbol.entry(t) != terms[k].symbol.entry(t))
                    violated(s.rule, "entries differ off the merge slot");
            FieldElement merged(FieldElement::one(e.field()));
            if (terms[j].coeff == terms[k].coeff)
                merged = terms[j].symbol.entry(i) * terms[k].symbol.entry(i);
            else if (terms[j].coeff == -terms[k].coeff)
                merged = terms[j].symbol.entry(i) / terms[k].symbol.entry(i);
            else
                violated(s.rule, "coefficients neither equal nor opposite");
            terms[j].symbol = terms[j].symbol.with_entry(i, merged);
            terms.erase(terms.begin() + long(k));
            break;
        }

        case MoveRule::Steinberg: {
            if (s.slots.size() != 2 || s.slots[0] == s.slots[1]) violated(s.rule, "expected slots=[i,j]");
            int i = slot_index(e, s.slots[0], s.rule), jj = slot_index(e, s.slots[1], s.rule);
            return delete_or_insert(e, s, [&](const std::vector<FieldElement>& en) {
                return en[size_t(jj - 1)] == one - en[size_t(i - 1)];
            });
        }

        case MoveRule::MinusAlpha: {
            if (s.slots.size() != 2 || s.slots[0] == s.slots[1]) violated(s.rule, "expected slots=[i,j]");
            int i = slot_index(e, s.slots[0], s.rule), jj = slot_index(e, s.slots[1], s.rule);
            return delete_or_insert(e, s, [&](const std::vector<FieldElement>& en) {
                return en[size_t(jj - 1)] == -en[size_t(i - 1)];
            });
        }

        case MoveRule::UnitSlot: {
            if (s.slots.size() != 1) violated(s.rule, "expected slots=[i]");
            int i = slot_index(e, s.slots[0], s.rule);
            return delete_or_insert(e, s, [&](const std::vector<FieldElement>& en) {
                return en[size_t(i - 1)].is_one();
            });
        }

        case MoveRule::Swap: {
            if (s.terms.size() != 1 || s.slots.size() != 1) violated(s.rule, "expected terms=[k], slots=[i]");
            size_t k = term_index(e, s.terms[0], s.rule);
            int i = s.slots[0];
            if (i < 1 || i + 1 > e.grade()) throw Error(Err::IndexOutOfRange, "Swap: slots " + std::to_string(i));
            auto entries = terms[k].symbol.entries();
            std::swap(entries[size_t(i - 1)], entries[size_t(i)]);
            terms[k] = Term(-terms[k].coeff, Symbol(e.modulus(), std::move(entries)));
            break;
        }

        case MoveRule::CoeffMod: {
            if (s.terms.size() != 1 && s.terms.size() != 2) violated(s.rule, "expected terms=[k] or [k,c']");
            size_t k = term_index(e, s.terms[0], s.rule);
            long long pm = e.modulus().value();
            long long c = terms[k].coeff;
            long long target;
            if (s.terms.size() == 1) {
                target = ((c % pm) + pm) % pm;
            } else {
                target = s.terms[1];
                if (((target - c) % pm + pm) % pm != 0) violated(s.rule, "replacement not congruent mod " + std::to_string(pm));
            }
            if (target == 0)
                terms.erase(terms.begin() + long(k));
            else
                terms[k].coeff = target;
            break;
        }

        case MoveRule::SumIdentity: {
            if (s.terms.size() != 1 || s.slots.size() != 2 || s.params.size() != 2)
                violated(s.rule, "expected terms=[k], slots=[i,i+1], params=[a,b]");
            size_t k = term_index(e, s.terms[0], s.rule);
            int i = slot_index(e, s.slots[0], s.rule);
            if (s.slots[1] != i + 1 || i + 1 > e.grade()) violated(s.rule, "slots must be adjacent");
            const FieldElement &a = s.params[0], &b = s.params[1];
            if (terms[k].symbol.entry(i) != a || terms[k].symbol.entry(i + 1) != b)
                violated(s.rule, "stated (a,b) do not match the entries");
            FieldElement c = a + b;
            if (c.is_zero()) violated(s.rule, "a+b must be nonzero");
            if (s.expansion.empty()) violated(s.rule, "missing primitive expansion");
            for (const auto& st : s.expansion)
                if (st.rule == MoveRule::SumIdentity) violated(s.rule, "expansion must be primitive");
            KClassExpr replayed = e;
            for (const auto& st : s.expansion) replayed = apply_move(replayed, st);
            Term direct(terms[k].coeff,
                        terms[k].symbol.with_entry(i, c).with_entry(i + 1, -(b / a)));
            std::vector<Term> expect = e.terms();
            expect[k] = direct;
            if (!(replayed == KClassExpr(e.field(), e.modulus(), e.grade(), expect)))
                violated(s.rule, "expansion does not realize the rewrite");
            return replayed;
        }
    }
    return KClassExpr(e.field(), e.modulus(), e.grade(), std::move(terms));
}

CheckResult check_certificate(const Certificate& c)
{
    if (!(c.start.modulus() == c.modulus) || !(c.end.modulus() == c.modulus))
        return {false, -1, "certificate modulus disagrees with endpoints"};
    if (c.start.grade() != c.end.grade()) return {false, -1, "endpoint grades differ"};
    if (!same_field(c.start.field(), c.field) || !same_field(c.end.field(), c.field))
        return {false, -1, "endpoint fields disagree"};
    KClassExpr cur = c.start;
    for (size_t i = 0; i < c.steps.size(); ++i) {
        try {
            cur = apply_move(cur, c.steps[i]);
        } catch (const Error& err) {
            return {false, int(i), err.what()};
        }
    }
    if (!(cur == c.end)) return {false, -1, "replay endpoint differs from stated end"};
    return {true, -1, ""};
}

// ---- Shift / Exp / cup ----

KClassExpr shift_map(const KClassExpr& e)
{
    Modulus up = e.modulus().raised();
    std::vector<Term> terms;
    terms.reserve(e.terms().size());
    for (const auto& t : e.terms())
        terms.emplace_back(t.coeff * e.modulus().p, Symbol(up, t.symbol.entries()));
    return KClassExpr(e.field(), up, e.grade(), std::move(terms));
}

KClassExpr exp_map(const KClassExpr& e)
{
    Modulus down(e.modulus().p, 1);
    std::vector<Term> terms;
    for (const auto& t : e.terms()) {
        long long c = ((t.coeff % down.p) + down.p) % down.p;
        if (c == 0) continue;
        terms.emplace_back(c, Symbol(down, t.symbol.entries()));
    }
    return KClassExpr(e.field(), down, e.grade(), std::move(terms));
}

KClassExpr cup(const KClassExpr& e1, const KClassExpr& e2)
{
    if (!(e1.modulus() == e2.modulus())) throw Error(Err::ModulusMismatch, "cup needs one modulus");
    if (!same_field(e1.field(), e2.field())) throw Error(Err::DescriptorMismatch, "cup needs one field");
    std::vector<Term> terms;
    for (const auto& t1 : e1.terms())
        for (const auto& t2 : e2.terms()) {
            auto entries = t1.symbol.entries();
            entries.insert(entries.end(), t2.symbol.entries().begin(), t2.symbol.entries().end());
            terms.emplace_back(t1.coeff * t2.coeff, Symbol(e1.modulus(), std::move(entries)));
        }
    return KClassExpr(e1.field(), e1.modulus(), e1.grade() + e2.grade(), std::move(terms));
}

// ---- normal form over Q ----

namespace {

// signed factorization over the basis {-1, 2, 3, 5, ...}
std::vector<std::pair<mpq_class, long>> factor_rational(const mpq_class& q)
{
    std::vector<std::pair<mpq_class, long>> out;
    if (q < 0) out.emplace_back(mpq_class(-1), 1);
    auto factor_int = [&](mpz_class n, long sgn) {
        n = abs(n);
        for (mpz_class p = 2; p * p <= n && p < 1000000; p += (p == 2 ? 1 : 2)) {
            long e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            if (e) out.emplace_back(mpq_class(p), sgn * e);
        }
        if (n > 1) {
            if (!mpz_probab_prime_p(n.get_mpz_t(), 30))
                throw Error(Err::InvalidArgument, "entry has a hard composite factor: " + n.get_str());
            out.emplace_back(mpq_class(n), sgn);
        }
    };
    factor_int(q.get_num(), 1);
    factor_int(q.get_den(), -1);
    return out;
}

}  // namespace

KClassExpr normalize_over_Q(const KClassExpr& e)
{
    if (e.field()->kind() != FieldKind::Rationals)
        throw Error(Err::FieldNotRationals, "normal form is defined over Q");
    long long pm = e.modulus().value();

    std::map<std::vector<mpq_class>, long long> acc;
    for (const auto& t : e.terms()) {
        // factor every slot, then expand multilinearly
        std::vector<std::vector<std::pair<mpq_class, long>>> fac;
        for (const auto& en : t.symbol.entries()) fac.push_back(factor_rational(en.rational()));
        bool dead = std::any_of(fac.begin(), fac.end(), [](const auto& v) { return v.empty(); });
        if (dead) continue;  // some slot is 1

        std::vector<size_t> idx(fac.size(), 0);
        while (true) {
            long long coeff = t.coeff;
            std::vector<mpq_class> entries(fac.size());
            for (size_t s = 0; s < fac.size(); ++s) {
                entries[s] = fac[s][idx[s]].first;
                coeff *= fac[s][idx[s]].second;
            }
            if (coeff != 0) {
                // sort entries, counting transpositions
                long swaps = 0;
                for (size_t a = 0; a < entries.size(); ++a)
                    for (size_t b = a + 1; b < entries.size(); ++b)
                        if (entries[a] > entries[b]) {
                            std::swap(entries[a], entries[b]);
                            ++swaps;
                        }
                if (swaps % 2) coeff = -coeff;
                acc[entries] += coeff;
            }
            size_t k = fac.size();
            while (k > 0 && idx[k - 1] + 1 == fac[k - 1].size()) idx[--k] = 0;
            if (k == 0) break;
            ++idx[k - 1];
        }
    }

    std::vector<Term> terms;
    for (auto& [entries, coeff] : acc) {
        // repeated entries and -1 entries generate 2-torsion symbols
        bool torsion2 = false;
        for (size_t i = 0; i + 1 < entries.size(); ++i)
            if (entries[i] == entries[i + 1]) torsion2 = true;
        for (const auto& en : entries)
            if (en == -1) torsion2 = true;
        long long c = coeff;
        if (torsion2) c = e.modulus().p == 2 ? ((c % 2) + 2) % 2 : 0;
        c = ((c % pm) + pm) % pm;
        if (c == 0) continue;
        std::vector<FieldElement> fe;
        fe.reserve(entries.size());
        for (const auto& q : entries) fe.push_back(FieldElement::from_rational(e.field(), q));
        terms.emplace_back(c, Symbol(e.modulus(), std::move(fe)));
    }
    return KClassExpr(e.field(), e.modulus(), e.grade(), std::move(terms));
}

// ---- move-sequence builders ----

MoveStep make_sum_identity_step(const KClassExpr& e, int term, int slot)
{
    size_t k = term_index(e, term, MoveRule::SumIdentity);
    const Symbol& S = e.terms()[k].symbol;
    if (slot < 1 || slot + 1 > e.grade()) throw Error(Err::IndexOutOfRange, "SumIdentity slot");
    FieldElement a = S.entry(slot), b = S.entry(slot + 1);
    FieldElement c = a + b;
    if (c.is_zero()) throw Error(Err::SideConditionViolated, "SumIdentity: a+b = 0");

    int i = slot;
    std::vector<MoveStep> ex;
    ex.push_back({MoveRule::BilinSplit, {term}, {i}, {c}, {}});
    ex.push_back({MoveRule::BilinSplit, {term + 1}, {i + 1}, {c}, {}});
    ex.push_back({MoveRule::Steinberg, {term + 2}, {i, i + 1}, {}, {}});
    ex.push_back({MoveRule::Swap, {term + 1}, {i}, {}, {}});
    ex.push_back({MoveRule::BilinMerge, {term, term + 1}, {i + 1}, {}, {}});
    ex.push_back({MoveRule::BilinSplit, {term}, {i + 1}, {-(b / a)}, {}});
    ex.push_back({MoveRule::MinusAlpha, {term + 1}, {i, i + 1}, {}, {}});
    return {MoveRule::SumIdentity, {term}, {i, i + 1}, {a, b}, std::move(ex)};
}

std::vector<MoveStep> sum_identity_inverse_steps(const KClassExpr& e, int term, int slot)
{
    size_t k = term_index(e, term, MoveRule::SumIdentity);
    const Symbol& S = e.terms()[k].symbol;
    if (slot < 1 || slot + 1 > e.grade()) throw Error(Err::IndexOutOfRange, "slot");
    const FieldElement one = FieldElement::one(e.field());
    FieldElement A = S.entry(slot), B = S.entry(slot + 1);
    if (B == one) throw Error(Err::SideConditionViolated, "inverse rewrite needs B != 1");
    FieldElement a = A / (one - B);
    FieldElement b = A - a;  // equals -AB/(1-B), nonzero since B != 0
    FieldElement c = A;
    long long g = e.terms()[k].coeff;
    int i = slot;

    auto with = [&](int at, const FieldElement& v1, int at2, const FieldElement& v2) {
        auto en = S.entries();
        en[size_t(at - 1)] = v1;
        en[size_t(at2 - 1)] = v2;
        return en;
    };

    std::vector<MoveStep> out;
    out.push_back({MoveRule::MinusAlpha, {term + 1, g}, {i, i + 1}, with(i, c, i + 1, -c), {}});
    out.push_back({MoveRule::BilinMerge, {term, term + 1}, {i + 1}, {}, {}});
    out.push_back({MoveRule::UnitSlot, {term + 1, -g}, {i + 1}, with(i, c, i + 1, one), {}});
    out.push_back({MoveRule::BilinSplit, {term + 1}, {i + 1}, {a / c}, {}});
    out.push_back({MoveRule::BilinMerge, {term, term + 2}, {i + 1}, {}, {}});
    out.push_back({MoveRule::Swap, {term + 1}, {i}, {}, {}});
    out.push_back({MoveRule::Steinberg, {term + 2, g}, {i, i + 1}, with(i, a / c, i + 1, b / c), {}});
    out.push_back({MoveRule::BilinMerge, {term + 1, term + 2}, {i + 1}, {}, {}});
    out.push_back({MoveRule::BilinMerge, {term, term + 1}, {i}, {}, {}});
    return out;
}

std::vector<MoveStep> shift_term_indices(std::vector<MoveStep> steps, long long offset)
{
    for (auto& s : steps) {
        if (!s.terms.empty()) s.terms[0] += offset;
        if (s.rule == MoveRule::BilinMerge && s.terms.size() == 2) s.terms[1] += offset;
        for (auto& sub : s.expansion) {
            auto shifted = shift_term_indices({sub}, offset);
            sub = shifted[0];
        }
    }
    return steps;
}

std::vector<MoveStep> embed_trailing(std::vector<MoveStep> steps, const std::vector<FieldElement>& tail)
{
    for (auto& s : steps) {
        bool insert_form = (s.rule == MoveRule::Steinberg || s.rule == MoveRule::MinusAlpha ||
                            s.rule == MoveRule::UnitSlot) &&
                           !s.params.empty();
        if (insert_form) s.params.insert(s.params.end(), tail.begin(), tail.end());
        if (!s.expansion.empty()) s.expansion = embed_trailing(std::move(s.expansion), tail);
    }
    return steps;
}

std::vector<MoveStep> negate_steps(std::vector<MoveStep> steps, const Modulus& mod)
{
    (void)mod;
    for (auto& s : steps) {
        bool insert_form = (s.rule == MoveRule::Steinberg || s.rule == MoveRule::MinusAlpha ||
                            s.rule == MoveRule::UnitSlot) &&
                           !s.params.empty();
        if (insert_form && s.terms.size() == 2) s.terms[1] = -s.terms[1];
        if (s.rule == MoveRule::CoeffMod && s.terms.size() == 2) s.terms[1] = -s.terms[1];
        if (s.rule == MoveRule::BilinSplit && s.slots.empty() && s.terms.size() == 2) s.terms[1] = -s.terms[1];
        if (!s.expansion.empty()) s.expansion = negate_steps(std::move(s.expansion), mod);
    }
    return steps;
}

// ---- JSON ----

nlohmann::json field_to_json(const FieldRef& f)
{
    switch (f->kind()) {
        case FieldKind::Rationals: return json{{"kind", "rationals"}};
        case FieldKind::Cyclotomic: return json{{"kind", "cyclotomic"}, {"conductor", f->conductor()}};
        case FieldKind::PrimeField: return json{{"kind", "prime-field"}, {"characteristic", f->characteristic()}};
    }
    throw Error(Err::InvalidArgument, "bad descriptor");
}

FieldRef field_from_json(const nlohmann::json& j)
{
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "rationals") return FieldDescriptor::rationals();
    if (kind == "cyclotomic") return FieldDescriptor::cyclotomic(j.at("conductor").get<long>());
    if (kind == "prime-field") return FieldDescriptor::prime_field(j.at("characteristic").get<long>());
    throw Error(Err::ParseError, "unknown field kind '" + kind + "'");
}

nlohmann::json expr_terms_to_json(const KClassExpr& e)
{
    json out = json::array();
    for (const auto& t : e.terms()) {
        json entries = json::array();
        for (const auto& en : t.symbol.entries()) entries.push_back(en.str());
        out.push_back(json::array({t.coeff, entries}));
    }
    return out;
}

KClassExpr expr_terms_from_json(const nlohmann::json& j, const FieldRef& f, const Modulus& mod, int grade_hint)
{
    std::vector<Term> terms;
    int grade = grade_hint;
    for (const auto& item : j) {
        long long coeff = item.at(0).get<long long>();
        std::vector<FieldElement> entries;
        for (const auto& es : item.at(1)) entries.push_back(FieldElement::parse(f, es.get<std::string>()));
        grade = int(entries.size());
        terms.emplace_back(coeff, Symbol(mod, std::move(entries)));
    }
    return KClassExpr(f, mod, grade, std::move(terms));
}

namespace {

json step_to_json(const MoveStep& s)
{
    json out;
    out["rule"] = rule_name(s.rule);
    out["terms"] = s.terms;
    out["slots"] = s.slots;
    json params = json::array();
    for (const auto& p : s.params) params.push_back(p.str());
    out["params"] = params;
    if (!s.expansion.empty()) {
        json ex = json::array();
        for (const auto& sub : s.expansion) ex.push_back(step_to_json(sub));
        out["expansion"] = ex;
    }
    return out;
}

MoveStep step_from_json(const json& j, const FieldRef& f)
{
    MoveStep s;
    s.rule = rule_from_name(j.at("rule").get<std::string>());
    s.terms = j.at("terms").get<std::vector<long long>>();
    s.slots = j.at("slots").get<std::vector<int>>();
    for (const auto& p : j.at("params")) s.params.push_back(FieldElement::parse(f, p.get<std::string>()));
    if (j.contains("expansion"))
        for (const auto& sub : j.at("expansion")) s.expansion.push_back(step_from_json(sub, f));
    return s;
}

}  // namespace

nlohmann::json certificate_to_json(const Certificate& c)
{
    json out;
    out["version"] = 1;
    out["modulus"] = json{{"p", c.modulus.p}, {"m", c.modulus.m}};
    out["field"] = field_to_json(c.field);
    out["start"] = expr_terms_to_json(c.start);
    out["end"] = expr_terms_to_json(c.end);
    json steps = json::array();
    for (const auto& s : c.steps) steps.push_back(step_to_json(s));
    out["steps"] = steps;
    return out;
}

Certificate certificate_from_json(const nlohmann::json& j)
{
    if (j.at("version").get<int>() != 1) throw Error(Err::ParseError, "unsupported certificate version");
    Modulus mod(j.at("modulus").at("p").get<int>(), j.at("modulus").at("m").get<int>());
    FieldRef f = field_from_json(j.at("field"));
    KClassExpr start = expr_terms_from_json(j.at("start"), f, mod, 1);
    KClassExpr end = expr_terms_from_json(j.at("end"), f, mod, start.grade());
    if (start.empty() && !end.empty()) start = KClassExpr(f, mod, end.grade());
    std::vector<MoveStep> steps;
    for (const auto& s : j.at("steps")) steps.push_back(step_from_json(s, f));
    return Certificate{mod, f, std::move(start), std::move(end), std::move(steps)};
}

// ---- expression grammar ----

namespace {

// split on a delimiter at bracket depth zero
std::vector<std::string> split_top(const std::string& s, char delim)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '[' || ch == '{' || ch == '(') ++depth;
        if (ch == ']' || ch == '}' || ch == ')') --depth;
        if (ch == delim && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

KClassExpr parse_class_expr(const std::string& text, const FieldRef& f)
{
    // cut into signed terms at depth-0 +/-
    std::vector<std::pair<int, std::string>> parts;
    int depth = 0, sign = 1;
    std::string cur;
    for (char ch : text) {
        if (ch == '{' || ch == '[' || ch == '(') ++depth;
        if (ch == '}' || ch == ']' || ch == ')') --depth;
        if (depth == 0 && (ch == '+' || ch == '-') && !strip(cur).empty()) {
            parts.emplace_back(sign, strip(cur));
            sign = ch == '-' ? -1 : 1;
            cur.clear();
        } else if (depth == 0 && ch == '-' && strip(cur).empty()) {
            sign = -sign;
        } else if (depth == 0 && ch == '+' && strip(cur).empty()) {
            // leading plus
        } else {
            cur += ch;
        }
    }
    if (!strip(cur).empty()) parts.emplace_back(sign, strip(cur));
    if (parts.empty()) throw Error(Err::ParseError, "empty class expression");

    std::vector<Term> terms;
    Modulus mod;
    bool mod_set = false;
    for (auto& [sgn, body] : parts) {
        long long coeff = sgn;
        std::string rest = body;
        auto star = rest.find('*');
        auto brace = rest.find('{');
        if (star != std::string::npos && (brace == std::string::npos || star < brace)) {
            coeff = sgn * std::stoll(strip(rest.substr(0, star)));
            rest = strip(rest.substr(star + 1));
        }
        if (rest.empty() || rest[0] != '{') throw Error(Err::ParseError, "expected '{' in term: " + body);
        // matching close brace at depth 0
        int d = 0;
        size_t close = std::string::npos;
        for (size_t i = 0; i < rest.size(); ++i) {
            if (rest[i] == '{' || rest[i] == '[') ++d;
            if (rest[i] == '}' || rest[i] == ']') {
                --d;
                if (d == 0) {
                    close = i;
                    break;
                }
            }
        }
        if (close == std::string::npos) throw Error(Err::ParseError, "unbalanced braces: " + body);
        std::string inner = rest.substr(1, close - 1);
        std::string tail = strip(rest.substr(close + 1));
        if (tail.empty() || tail[0] != '@') throw Error(Err::ParseError, "expected '@p^m' after symbol: " + body);
        auto caret = tail.find('^');
        if (caret == std::string::npos) throw Error(Err::ParseError, "expected '^' in modulus: " + body);
        Modulus tmod(std::stoi(strip(tail.substr(1, caret - 1))), std::stoi(strip(tail.substr(caret + 1))));
        if (mod_set && !(tmod == mod)) throw Error(Err::ParseError, "mixed moduli in expression");
        mod = tmod;
        mod_set = true;

        std::vector<FieldElement> entries;
        for (auto& tok : split_top(inner, ','))
            entries.push_back(FieldElement::parse(f, strip(tok)));
        if (coeff != 0) terms.emplace_back(coeff, Symbol(mod, std::move(entries)));
    }
    if (!mod_set) throw Error(Err::ParseError, "no modulus in expression");
    int grade = terms.empty() ? 1 : terms.front().symbol.grade();
    return KClassExpr(f, mod, grade, std::move(terms));
}

}  // namespace symlen
