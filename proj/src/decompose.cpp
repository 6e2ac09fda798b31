#include "symlen/decompose.hpp"

#include <algorithm>
#include <numeric>

namespace symlen {

using nlohmann::json;

// ---- CertBuilder ----

void CertBuilder::apply(MoveStep s)
{
    cur_ = apply_move(cur_, s);
    steps_.push_back(std::move(s));
}

void CertBuilder::apply_all(std::vector<MoveStep> steps)
{
    for (auto& s : steps) apply(std::move(s));
}

int CertBuilder::find_term(long long coeff, const Symbol& s) const
{
    const auto& ts = cur_.terms();
    for (size_t i = 0; i < ts.size(); ++i)
        if (ts[i].coeff == coeff && ts[i].symbol == s) return int(i + 1);
    throw Error(Err::InvalidArgument, "internal: term not present: " + std::to_string(coeff) + "*" + s.str());
}

// ---- bounds and plans ----

long long bound(const std::string& theorem, int n, int i)
{
    auto pow2 = [](int e) { return 1LL << e; };
    if (theorem == "t1") {
        if (n < 2) throw Error(Err::OutOfRange, "t1 needs n >= 2");
        return pow2(n - 1);
    }
    if (theorem == "t2") {
        if (n < 2 || i < 1 || i > n) throw Error(Err::OutOfRange, "t2 needs n >= 2, 1 <= i <= n");
        long long total = 0;
        for (int k = 1; k <= i; ++k) total += (long long)(i + 1 - k) * pow2(n - k);
        return total;
    }
    if (theorem == "corollary") {
        if (n < 2) throw Error(Err::OutOfRange, "corollary needs n >= 2");
        return (long long)(n - 1) * pow2(n) + 1;
    }
    if (theorem == "t3") {
        if (n < 2) throw Error(Err::OutOfRange, "t3 needs n >= 2");
        return 3 * ((long long)(n - 1) * pow2(n) + 1);
    }
    if (theorem == "t4") return 46;
    if (theorem == "t5") return 15;
    throw Error(Err::OutOfRange, "unknown theorem tag '" + theorem + "'");
}

long long PlanNode::total() const
{
    if (children.empty()) return bound;
    long long t = 0;
    for (const auto& c : children) t += c.total();
    return t;
}

namespace {

PlanNode plan_t1(int n)
{
    PlanNode node{"t1(n=" + std::to_string(n) + ")", bound("t1", n), {}};
    if (n == 2) {
        node.children.push_back({"base", 2, {}});
        return node;
    }
    node.children.push_back({"first-class", 2, {}});
    for (int i = 2; i <= n - 1; ++i) node.children.push_back(plan_t1(i));
    return node;
}

PlanNode plan_t2(int n, int i)
{
    PlanNode node{"t2(n=" + std::to_string(n) + ",i=" + std::to_string(i) + ")", bound("t2", n, i), {}};
    if (i == 1) {
        node.children.push_back(plan_t1(n));
        return node;
    }
    node.children.push_back(plan_t2(n, i - 1));
    for (int k = 1; k <= i; ++k)
        node.children.push_back({"class(slot=" + std::to_string(i + 1 - k) + ")", 1LL << (n - k), {}});
    return node;
}

}  // namespace

PlanNode plan(const std::string& theorem, int n, int i)
{
    if (theorem == "t1") return plan_t1(n);
    if (theorem == "t2") return plan_t2(n, i == 0 ? 1 : i);
    if (theorem == "corollary") return {"corollary(n=" + std::to_string(n) + ")", bound("corollary", n), {plan_t2(n, n)}};
    if (theorem == "t3") {
        PlanNode node{"t3(n=" + std::to_string(n) + ")", bound("t3", n), {}};
        for (int j = 0; j < 3; ++j)
            node.children.push_back({"corollary(n=" + std::to_string(n) + ")", bound("corollary", n), {plan_t2(n, n)}});
        return node;
    }
    if (theorem == "t4") {
        PlanNode node{"t4", 46, {}};
        for (int j = 0; j < 8; ++j) node.children.push_back(plan_t2(2, 2));
        for (int j = 0; j < 3; ++j) node.children.push_back(plan_t1(2));
        return node;
    }
    if (theorem == "t5") {
        PlanNode node{"t5", 15, {}};
        for (int j = 0; j < 5; ++j) node.children.push_back({"difference", 3, {}});
        return node;
    }
    throw Error(Err::OutOfRange, "unknown theorem tag '" + theorem + "'");
}

nlohmann::json plan_to_json(const PlanNode& p)
{
    json out{{"tag", p.tag}, {"total", p.total()}};
    if (!p.children.empty()) {
        json cs = json::array();
        for (const auto& c : p.children) cs.push_back(plan_to_json(c));
        out["children"] = cs;
    }
    return out;
}

// ---- recorded forward steps, mechanically invertible ----

namespace {

struct Recorder {
    CertBuilder& b;
    std::vector<std::pair<MoveStep, KClassExpr>> log;

    explicit Recorder(CertBuilder& builder) : b(builder) {}

    void apply(MoveStep s)
    {
        log.emplace_back(s, b.state());
        b.apply(std::move(s));
    }
};

// Inverts a log of Swap / SumIdentity / deletion steps. `state` is the
// expression after the whole log; the returned steps map it back to the
// state before the first logged step.
std::vector<MoveStep> invert_log(const std::vector<std::pair<MoveStep, KClassExpr>>& log, KClassExpr state)
{
    std::vector<MoveStep> out;
    for (auto it = log.rbegin(); it != log.rend(); ++it) {
        const MoveStep& s = it->first;
        const KClassExpr& before = it->second;
        std::vector<MoveStep> inv;
        switch (s.rule) {
            case MoveRule::Swap:
                inv.push_back(s);
                break;
            case MoveRule::SumIdentity:
                inv = sum_identity_inverse_steps(state, int(s.terms[0]), s.slots[0]);
                break;
            case MoveRule::Steinberg:
            case MoveRule::MinusAlpha:
            case MoveRule::UnitSlot: {
                if (!s.params.empty()) throw Error(Err::InvalidArgument, "internal: cannot invert an insertion");
                size_t k = size_t(s.terms[0] - 1);
                const Term& t = before.terms()[k];
                MoveStep ins;
                ins.rule = s.rule;
                ins.terms = {s.terms[0], t.coeff};
                ins.slots = s.slots;
                ins.params = t.symbol.entries();
                inv.push_back(ins);
                break;
            }
            default:
                throw Error(Err::InvalidArgument, "internal: rule not invertible in a log");
        }
        for (auto& st : inv) state = apply_move(state, st);
        if (!(state == before)) throw Error(Err::InvalidArgument, "internal: log inversion drifted");
        out.insert(out.end(), inv.begin(), inv.end());
    }
    return out;
}

// Order the values so every partial sum is nonzero (total must be nonzero).
std::vector<size_t> plan_partial_sum_order(const std::vector<FieldElement>& values)
{
    size_t r = values.size();
    std::vector<size_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        FieldElement acc = values[perm[0]];
        bool ok = !acc.is_zero();
        for (size_t k = 1; ok && k < r; ++k) {
            acc = acc + values[perm[k]];
            if (acc.is_zero()) ok = false;
        }
        if (ok) return perm;
    } while (std::next_permutation(perm.begin(), perm.end()));
    throw Error(Err::DegenerateSample, "no summation order with nonzero partial sums");
}

// Accumulate the entries at `positions` (1-based slots of term k) into one
// slot via SumIdentity rewrites, returning the final slot of the sum.
int accumulate_slots(Recorder& rec, int k, const std::vector<int>& positions)
{
    int grade = rec.b.state().grade();
    std::vector<int> label(size_t(grade) + 1);
    std::iota(label.begin(), label.end(), 0);
    auto pos_of = [&](int orig) {
        for (int p = 1; p <= grade; ++p)
            if (label[size_t(p)] == orig) return p;
        throw Error(Err::InvalidArgument, "internal: lost slot label");
    };
    auto swap_at = [&](int p) {
        rec.apply({MoveRule::Swap, {k}, {p}, {}, {}});
        std::swap(label[size_t(p)], label[size_t(p) + 1]);
    };

    int acc = positions[0];
    for (size_t idx = 1; idx < positions.size(); ++idx) {
        int target = positions[idx];
        int pa = pos_of(acc), pt = pos_of(target);
        if (pt > pa) {
            while (pos_of(target) > pos_of(acc) + 1) swap_at(pos_of(acc));
            int p = pos_of(acc);
            rec.apply(make_sum_identity_step(rec.b.state(), k, p));
        } else {
            while (pos_of(acc) > pos_of(target) + 1) swap_at(pos_of(acc) - 1);
            int p = pos_of(target);
            rec.apply(make_sum_identity_step(rec.b.state(), k, p));
            acc = target;  // the sum landed on the target slot
        }
    }
    return pos_of(acc);
}

std::string mu_assumption(const Modulus& up)
{
    return "mu_{" + std::to_string(up.p) + "^" + std::to_string(up.m) + "} in F";
}

std::vector<Term> cup_terms(const std::vector<Term>& terms, const std::vector<FieldElement>& tail)
{
    std::vector<Term> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        auto entries = t.symbol.entries();
        entries.insert(entries.end(), tail.begin(), tail.end());
        out.emplace_back(t.coeff, Symbol(t.symbol.modulus(), std::move(entries)));
    }
    return out;
}

Fragment embed_fragment(Fragment f, const std::vector<FieldElement>& tail)
{
    if (tail.empty()) return f;
    f.terms = cup_terms(f.terms, tail);
    f.steps = embed_trailing(std::move(f.steps), tail);
    f.produced = cup_terms(f.produced, tail);
    return f;
}

// replay fragment steps from the lift of its terms, checking it lands on
// `produced`
void check_fragment(const Fragment& f, const FieldRef& field, const Modulus& base, int grade)
{
    KClassExpr lift = shift_map(KClassExpr(field, base, grade, f.terms));
    CertBuilder b(lift);
    b.apply_all(f.steps);
    if (!(b.state() == KClassExpr(field, base.raised(), grade, f.produced)))
        throw Error(Err::InvalidArgument, "internal: fragment misses its produced expression");
}

}  // namespace

// ---- fragment negation and assembly ----

Fragment negate_fragment(const Fragment& f, const FieldRef& field, const Modulus& up, int grade)
{
    (void)grade;
    Fragment out;
    for (const auto& t : f.terms)
        out.terms.emplace_back(t.coeff, t.symbol.with_entry(1, t.symbol.entry(1).inv()));
    long long p = up.p;
    for (size_t k = 1; k <= f.terms.size(); ++k) {
        auto entries = out.terms[k - 1].symbol.entries();
        entries[0] = FieldElement::one(field);
        MoveStep ins{MoveRule::UnitSlot, {(long long)k + 1, -p}, {1}, entries, {}};
        out.steps.push_back(ins);
        out.steps.push_back({MoveRule::BilinMerge, {(long long)k + 1, (long long)k}, {1}, {}, {}});
    }
    auto core = negate_steps(f.steps, up);
    out.steps.insert(out.steps.end(), core.begin(), core.end());
    for (const auto& t : f.produced) out.produced.emplace_back(-t.coeff, t.symbol);
    return out;
}

CertifiedDecomposition assemble(const std::string& theorem, const FieldRef& field, const Modulus& base, int grade,
                                const std::vector<Fragment>& fragments,
                                const std::function<void(CertBuilder&)>& finish, const KClassExpr& target,
                                long long bound_used)
{
    std::vector<Term> all;
    for (const auto& f : fragments) all.insert(all.end(), f.terms.begin(), f.terms.end());
    KClassExpr terms(field, base, grade, all);
    KClassExpr start = shift_map(terms);

    CertBuilder b(start);
    long long offset = 0;
    for (const auto& f : fragments) {
        b.apply_all(shift_term_indices(f.steps, offset));
        offset += (long long)f.produced.size();
    }
    if (finish) finish(b);
    if (!(b.state() == target)) throw Error(Err::InvalidArgument, "internal: composed certificate missed the target");

    if (terms.symbol_count() > bound_used)
        throw Error(Err::InvalidArgument, "internal: decomposition exceeds the stated bound");
    for (const auto& t : terms.terms())
        if (t.coeff != 1) throw Error(Err::InvalidArgument, "internal: decompositions emit +1 terms only");

    CertifiedDecomposition out{theorem, target, terms,
                               Certificate{target.modulus(), field, start, target, b.take_steps()}, bound_used,
                               {mu_assumption(target.modulus())}};
    CheckResult check = check_certificate(out.certificate);
    if (!check.valid) throw Error(Err::InvalidArgument, "internal: emitted certificate invalid: " + check.reason);
    return out;
}

// ---- theorem 1 ----

namespace {

// move script for the grade-2 base case; `terms` lift to {alpha, beta}
Fragment base_pair_fragment(const FieldRef& field, int m, const FieldElement& alpha, const FieldElement& beta,
                            const FieldElement& x, const FieldElement& y)
{
    if (alpha.is_zero() || beta.is_zero()) throw Error(Err::WitnessInvalid, "slots must be nonzero");
    if (x.is_zero() && y.is_zero()) throw Error(Err::BothZero, "norm witness (0,0)");
    if (!(beta == x * x - alpha * y * y)) throw Error(Err::WitnessInvalid, "beta != x^2 - alpha y^2");
    Modulus base(2, m), up = base.raised();

    Fragment f;
    if (y.is_zero())
        f.terms = {Term(1, Symbol(base, {alpha, x}))};
    else if (x.is_zero())
        f.terms = {Term(1, Symbol(base, {alpha, y}))};
    else {
        FieldElement c = x * x / (y * y) - alpha;  // beta / y^2
        FieldElement w = -(c / alpha);
        f.terms = {Term(1, Symbol(base, {alpha, y})), Term(1, Symbol(base, {x / y, w}))};
    }

    CertBuilder b(shift_map(KClassExpr(field, base, 2, f.terms)));
    b.apply({MoveRule::BilinSplit, {1, 1}, {}, {}, {}});
    b.apply({MoveRule::BilinMerge, {1, 2}, {2}, {}, {}});
    if (y.is_zero()) {
        // {alpha, x^2} is already the target
    } else if (x.is_zero()) {
        // {alpha, y^2} -> {alpha, -alpha y^2} + {alpha, -1/alpha}, kill the tail
        b.apply({MoveRule::BilinSplit, {1}, {2}, {beta}, {}});
        b.apply({MoveRule::MinusAlpha, {3, 1}, {1, 2}, {alpha, -alpha}, {}});
        b.apply({MoveRule::BilinMerge, {2, 3}, {2}, {}, {}});
        b.apply({MoveRule::UnitSlot, {2}, {2}, {}, {}});
    } else {
        b.apply({MoveRule::BilinSplit, {2, 1}, {}, {}, {}});
        b.apply({MoveRule::BilinMerge, {2, 3}, {1}, {}, {}});
        b.apply_all(sum_identity_inverse_steps(b.state(), 2, 1));
        b.apply({MoveRule::BilinMerge, {1, 2}, {2}, {}, {}});
    }
    if (!(b.state() == KClassExpr(field, up, 2, {Term(1, Symbol(up, {alpha, beta}))})))
        throw Error(Err::InvalidArgument, "internal: base script missed {alpha, beta}");
    f.produced = {Term(1, Symbol(up, {alpha, beta}))};
    f.steps = b.take_steps();
    return f;
}

struct T1WitnessData {
    enum Kind { Norm, Iso, Rep } kind = Norm;
    FieldElement x, y;
    FormVector iso;
    std::vector<FormVector> ts;
};

bool has_t1_witness(const std::vector<FieldElement>& slots, const WitnessBundle& bundle)
{
    if (slots.size() == 2) return bundle.try_resolve(req_norm_representation(slots[0], slots[1])).has_value();
    std::vector<FieldElement> prefix(slots.begin(), slots.end() - 1);
    if (bundle.try_resolve(req_isotropy_vector(prefix))) return true;
    return bundle.try_resolve(req_t1_representation(slots)).has_value();
}

T1WitnessData resolve_t1_witness(const std::vector<FieldElement>& slots, const WitnessBundle& bundle)
{
    T1WitnessData w;
    const FieldRef& f = slots.front().field();
    if (slots.size() == 2) {
        json d = bundle.resolve(req_norm_representation(slots[0], slots[1]));
        std::tie(w.x, w.y) = norm_rep_from(d, f);
        w.kind = T1WitnessData::Norm;
        return w;
    }
    std::vector<FieldElement> prefix(slots.begin(), slots.end() - 1);
    if (auto d = bundle.try_resolve(req_isotropy_vector(prefix))) {
        w.kind = T1WitnessData::Iso;
        w.iso = vector_from(d->at("vector"), f);
        return w;
    }
    json d = bundle.resolve(req_t1_representation(slots));
    w.kind = T1WitnessData::Rep;
    w.ts = vectors_from(d, f);
    return w;
}

Fragment t1_core(const std::vector<FieldElement>& slots, int m, const WitnessBundle& bundle,
                 const std::vector<FormVector>* explicit_ts);

// anisotropic branch of the induction, with an explicit representation
Fragment t1_aniso(const std::vector<FieldElement>& slots, int m, const WitnessBundle& bundle,
                  const std::vector<FormVector>& ts)
{
    const FieldRef& F = slots.front().field();
    int n = int(slots.size());
    Modulus base(2, m), up = base.raised();
    if (!verify_representation_t1(slots, ts)) throw Error(Err::WitnessInvalid, "t1 representation identity fails");

    // beta_i per the slot-value convention; P = positions with t != 0
    std::vector<FieldElement> beta(size_t(n) + 1, FieldElement::zero(F));
    std::vector<FieldElement> val(size_t(n) + 1, FieldElement::zero(F));
    std::vector<int> P;
    for (int i = 2; i <= n - 1; ++i) {
        const FormVector& t = ts[size_t(i - 1)];
        if (is_zero_vector(t)) {
            beta[size_t(i)] = slots[size_t(i - 1)];
            continue;
        }
        std::vector<FieldElement> pre(slots.begin(), slots.begin() + (i - 1));
        FieldElement v = evaluate(expand(PfisterForm(pre)), t);
        if (v.is_zero()) throw Error(Err::WitnessInvalid, "vanishing slot value phi(t)");
        val[size_t(i)] = v;
        beta[size_t(i)] = v * slots[size_t(i - 1)];
        P.push_back(i);
    }
    beta[size_t(n)] = slots[size_t(n - 1)];

    std::vector<FieldElement> t1_entries{slots[0]};
    for (int i = 2; i <= n; ++i) t1_entries.push_back(beta[size_t(i)]);
    Symbol T1sym(up, t1_entries);

    std::vector<Fragment> fragments;

    // first class {alpha_1, beta_2, ..., beta_n}
    {
        const FormVector& t0 = ts[0];
        FieldElement V = is_zero_vector(t0) ? FieldElement::zero(F)
                                            : evaluate(expand(PfisterForm({slots[0]})), t0);
        Fragment frag;
        if (V.is_zero()) {
            // trivial: -beta_n is a partial sum of the participating betas
            if (P.empty()) throw Error(Err::WitnessInvalid, "degenerate first class");
            CertBuilder scratch(KClassExpr(F, up, n, {Term(1, T1sym)}));
            Recorder rec(scratch);
            std::vector<FieldElement> values;
            for (int i : P) values.push_back(beta[size_t(i)]);
            auto order = plan_partial_sum_order(values);
            std::vector<int> positions;
            for (size_t idx : order) positions.push_back(P[idx]);
            int acc = accumulate_slots(rec, 1, positions);
            rec.apply({MoveRule::MinusAlpha, {1}, {acc, n}, {}, {}});
            frag.steps = invert_log(rec.log, scratch.state());
        } else {
            // congruent to {alpha_1, ..., phi_1(t_0)}: fold everything into
            // one slot holding V, rewrite the pair (alpha_1, V), unfold
            CertBuilder scratch(KClassExpr(F, up, n, {Term(1, T1sym)}));
            Recorder rec(scratch);
            std::vector<FieldElement> values;
            std::vector<int> pos_all;
            for (int i : P) {
                values.push_back(beta[size_t(i)]);
                pos_all.push_back(i);
            }
            values.push_back(beta[size_t(n)]);
            pos_all.push_back(n);
            int acc;
            if (pos_all.size() == 1) {
                acc = n;
                if (!(beta[size_t(n)] == V)) throw Error(Err::WitnessInvalid, "slot mismatch in first class");
            } else {
                auto order = plan_partial_sum_order(values);
                std::vector<int> positions;
                for (size_t idx : order) positions.push_back(pos_all[idx]);
                acc = accumulate_slots(rec, 1, positions);
            }
            while (acc > 2) {
                rec.apply({MoveRule::Swap, {1}, {acc - 1}, {}, {}});
                --acc;
            }
            long long sign = scratch.state().terms()[0].coeff;
            std::vector<FieldElement> middles(scratch.state().terms()[0].symbol.entries().begin() + 2,
                                              scratch.state().terms()[0].symbol.entries().end());
            auto back = invert_log(rec.log, scratch.state());

            Fragment pair;
            if (sign == 1)
                pair = base_pair_fragment(F, m, slots[0], V, t0[0], t0[1]);
            else
                pair = base_pair_fragment(F, m, slots[0].inv(), V, t0[0], slots[0] * t0[1]);
            frag = embed_fragment(pair, middles);
            if (sign == -1) {
                auto entries = frag.produced[0].symbol.entries();
                entries[0] = FieldElement::one(F);
                frag.steps.push_back({MoveRule::UnitSlot, {2, -1}, {1}, entries, {}});
                frag.steps.push_back({MoveRule::BilinMerge, {2, 1}, {1}, {}, {}});
            }
            frag.steps.insert(frag.steps.end(), back.begin(), back.end());
        }
        frag.produced = {Term(1, T1sym)};
        check_fragment(frag, F, base, n);
        fragments.push_back(std::move(frag));
    }

    // classes {alpha_1, ..., alpha_{i-1}, beta_i^{-1} alpha_i, beta-tail}
    for (int i : P) {
        FieldElement gamma = val[size_t(i)].inv();
        std::vector<FieldElement> prefix(slots.begin(), slots.begin() + (i - 1));
        std::vector<FieldElement> sub_alphas(slots.begin(), slots.begin() + i);
        auto sub_ts = derive_recursion_witness(sub_alphas, ts[size_t(i - 1)]);

        Fragment sub;
        if (i == 2)
            sub = base_pair_fragment(F, m, slots[0], gamma, sub_ts[0][0], sub_ts[0][1]);
        else {
            std::vector<FieldElement> rec_slots = prefix;
            rec_slots.push_back(gamma);
            sub = t1_core(rec_slots, m, bundle, &sub_ts);
        }
        std::vector<FieldElement> tail;
        for (int j = i + 1; j <= n; ++j) tail.push_back(beta[size_t(j)]);
        fragments.push_back(embed_fragment(std::move(sub), tail));
    }

    // lift, run fragments, telescope
    std::vector<Term> all;
    for (const auto& f : fragments) all.insert(all.end(), f.terms.begin(), f.terms.end());
    KClassExpr termsExpr(F, base, n, all);
    CertBuilder b(shift_map(termsExpr));
    long long offset = 0;
    for (const auto& f : fragments) {
        b.apply_all(shift_term_indices(f.steps, offset));
        offset += (long long)f.produced.size();
    }
    for (int i : P) b.apply({MoveRule::BilinMerge, {1, 2}, {i}, {}, {}});

    Fragment out;
    out.terms = std::move(all);
    out.steps = b.take_steps();
    out.produced = {Term(1, Symbol(up, slots))};
    if (!(b.state() == KClassExpr(F, up, n, out.produced)))
        throw Error(Err::InvalidArgument, "internal: telescoping missed the target symbol");
    return out;
}

Fragment t1_core(const std::vector<FieldElement>& slots, int m, const WitnessBundle& bundle,
                 const std::vector<FormVector>* explicit_ts)
{
    const FieldRef& F = slots.front().field();
    int n = int(slots.size());
    Modulus base(2, m);

    if (n == 2) {
        if (explicit_ts) {
            const FormVector& t = (*explicit_ts)[0];
            return base_pair_fragment(F, m, slots[0], slots[1], t[0], t[1]);
        }
        T1WitnessData w = resolve_t1_witness(slots, bundle);
        return base_pair_fragment(F, m, slots[0], slots[1], w.x, w.y);
    }
    if (explicit_ts) return t1_aniso(slots, m, bundle, *explicit_ts);

    T1WitnessData w = resolve_t1_witness(slots, bundle);
    if (w.kind == T1WitnessData::Iso) {
        // {slots} = {prefix} cup {last}; recurse on the prefix
        std::vector<FieldElement> prefix(slots.begin(), slots.end() - 1);
        DiagonalForm phi = expand(PfisterForm(prefix));
        if (int(w.iso.size()) != phi.dimension() || is_zero_vector(w.iso) || !evaluate(phi, w.iso).is_zero())
            throw Error(Err::WitnessInvalid, "isotropy vector fails");
        Fragment sub = t1_core(prefix, m, bundle, nullptr);
        Fragment out = embed_fragment(std::move(sub), {slots.back()});
        check_fragment(out, F, base, n);
        return out;
    }
    return t1_aniso(slots, m, bundle, w.ts);
}

}  // namespace

CertifiedDecomposition t1_base(const FieldElement& alpha, const FieldElement& beta, const FieldElement& x,
                               const FieldElement& y, int m)
{
    const FieldRef& F = alpha.field();
    Fragment frag = base_pair_fragment(F, m, alpha, beta, x, y);
    Modulus base(2, m), up = base.raised();
    KClassExpr target(F, up, 2, {Term(1, Symbol(up, {alpha, beta}))});
    return assemble("t1", F, base, 2, {frag}, nullptr, target, bound("t1", 2));
}

CertifiedDecomposition t1(const Symbol& symbol, const WitnessBundle& bundle)
{
    if (symbol.grade() < 2) throw Error(Err::OutOfRange, "t1 needs grade >= 2");
    if (symbol.modulus().p != 2 || symbol.modulus().m < 2)
        throw Error(Err::OutOfRange, "t1 expects a symbol at 2^{m+1}, m >= 1");
    int m = symbol.modulus().m - 1;
    const FieldRef& F = symbol.field();
    Fragment frag = t1_core(symbol.entries(), m, bundle, nullptr);
    KClassExpr target(F, symbol.modulus(), symbol.grade(), {Term(1, symbol)});
    return assemble("t1", F, Modulus(2, m), symbol.grade(), {frag}, nullptr, target, bound("t1", symbol.grade()));
}

// ---- theorem 2 ----

namespace {

Fragment t2_i1_fragment(const std::vector<FieldElement>& alphas, const FieldElement& beta1, int m,
                        const WitnessBundle& bundle)
{
    const FieldRef& F = alphas.front().field();
    int n = int(alphas.size());
    Modulus base(2, m), up = base.raised();

    std::vector<FieldElement> merged = alphas;
    merged[0] = alphas[0] / beta1;
    Fragment frag = t1_core(merged, m, bundle, nullptr);

    KClassExpr lifted = shift_map(KClassExpr(F, base, n, frag.terms));
    CertBuilder b(lifted);
    b.apply_all(frag.steps);
    b.apply({MoveRule::BilinSplit, {1}, {1}, {alphas[0]}, {}});
    std::vector<FieldElement> unit_entries(alphas.begin(), alphas.end());
    unit_entries[0] = FieldElement::one(F);
    b.apply({MoveRule::UnitSlot, {3, -1}, {1}, unit_entries, {}});
    b.apply({MoveRule::BilinMerge, {3, 2}, {1}, {}, {}});

    Fragment out;
    out.terms = frag.terms;
    out.steps = b.take_steps();
    std::vector<FieldElement> bslots = alphas;
    bslots[0] = beta1;
    out.produced = {Term(1, Symbol(up, alphas)), Term(-1, Symbol(up, bslots))};
    if (!(b.state() == KClassExpr(F, up, n, out.produced)))
        throw Error(Err::InvalidArgument, "internal: i=1 split missed the difference");
    return out;
}

// n = i = 2 isomorphic branch; returns the full difference fragment
Fragment t2_n2i2_fragment(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int m,
                          const WitnessBundle& bundle, long long& count_out)
{
    const FieldRef& F = alphas.front().field();
    Modulus base(2, m), up = base.raised();
    const FieldElement one = FieldElement::one(F);

    auto ts = vectors_from(bundle.resolve(req_t2_representation(alphas, betas, 2)), F);
    if (!verify_representation_t2(alphas, betas, 2, ts)) throw Error(Err::WitnessInvalid, "t2 representation fails");

    FieldElement v1, v2, gamma1 = betas[0], gamma2 = betas[1];
    bool p1 = !is_zero_vector(ts[0]), p2 = !is_zero_vector(ts[1]);
    if (p1) {
        v1 = evaluate(expand(PfisterForm({betas[0]})), ts[0]);
        if (v1.is_zero()) throw Error(Err::WitnessInvalid, "phi_1(t_1) = 0");
        gamma1 = v1 * betas[0];
    }
    if (p2) {
        v2 = evaluate(expand(PfisterForm({betas[0], betas[1]})), ts[1]);
        if (v2.is_zero()) throw Error(Err::WitnessInvalid, "phi_2(t_2) = 0");
        gamma2 = v2 * betas[1];
    }
    if (!p1 && !p2) throw Error(Err::WitnessInvalid, "all representation vectors vanish");

    // first class via the exchanged slot and the i=1 machinery
    FieldElement delta1;
    if (p1 && p2)
        delta1 = -(gamma1 / gamma2);
    else if (p1)
        delta1 = betas[1].inv();
    else
        delta1 = betas[0];

    std::vector<Fragment> fragments;
    Fragment c0 = t2_i1_fragment(alphas, delta1, m, bundle);
    {
        // rebuild {delta_1, alpha_2} into {gamma_1, gamma_2} on the minus term
        KClassExpr state(F, up, 2, c0.produced);
        CertBuilder b(state);
        if (p1 && p2) {
            b.apply({MoveRule::UnitSlot, {3, 1}, {1}, {one, alphas[1]}, {}});
            b.apply({MoveRule::BilinMerge, {3, 2}, {1}, {}, {}});
            b.apply({MoveRule::Swap, {2}, {1}, {}, {}});
            b.apply_all(sum_identity_inverse_steps(b.state(), 2, 1));
        } else if (p1) {
            b.apply({MoveRule::UnitSlot, {3, 1}, {1}, {one, alphas[1]}, {}});
            b.apply({MoveRule::BilinMerge, {3, 2}, {1}, {}, {}});
            b.apply({MoveRule::Swap, {2}, {1}, {}, {}});
        }
        auto extra = b.take_steps();
        c0.steps.insert(c0.steps.end(), extra.begin(), extra.end());
        c0.produced = {Term(1, Symbol(up, alphas)), Term(-1, Symbol(up, {gamma1, gamma2}))};
        if (!(b.state() == KClassExpr(F, up, 2, c0.produced)))
            throw Error(Err::InvalidArgument, "internal: slot exchange missed {gamma_1, gamma_2}");
        check_fragment(c0, F, base, 2);
    }
    fragments.push_back(std::move(c0));

    if (p2) {
        FieldElement W2 = v2.inv();
        auto [x, y] = norm_rep_from(bundle.resolve(req_norm_representation(gamma1, W2)), F);
        Fragment c1 = base_pair_fragment(F, m, gamma1, W2, x, y);
        fragments.push_back(negate_fragment(c1, F, up, 2));
    }
    if (p1) {
        FieldElement W1 = v1.inv();
        auto [x, y] = norm_rep_from(bundle.resolve(req_norm_representation(betas[1], W1)), F);
        if (!y.is_zero())
            throw Error(Err::WitnessInvalid, "closing class needs a square witness (y = 0)");
        Fragment c2;
        c2.terms = {Term(1, Symbol(base, {betas[1], x}))};
        CertBuilder b(shift_map(KClassExpr(F, base, 2, c2.terms)));
        b.apply({MoveRule::BilinSplit, {1, 1}, {}, {}, {}});
        b.apply({MoveRule::BilinMerge, {1, 2}, {2}, {}, {}});
        b.apply({MoveRule::Swap, {1}, {1}, {}, {}});
        c2.steps = b.take_steps();
        c2.produced = {Term(-1, Symbol(up, {W1, betas[1]}))};
        check_fragment(c2, F, base, 2);
        fragments.push_back(std::move(c2));
    }

    // assemble into one fragment for the difference
    std::vector<Term> all;
    for (const auto& f : fragments) all.insert(all.end(), f.terms.begin(), f.terms.end());
    count_out = (long long)all.size();
    KClassExpr termsExpr(F, base, 2, all);
    CertBuilder b(shift_map(termsExpr));
    long long offset = 0;
    for (const auto& f : fragments) {
        b.apply_all(shift_term_indices(f.steps, offset));
        offset += (long long)f.produced.size();
    }
    if (p2) b.apply({MoveRule::BilinMerge, {2, 3}, {2}, {}, {}});
    if (p1) b.apply({MoveRule::BilinMerge, {2, 3}, {1}, {}, {}});

    Fragment out;
    out.terms = std::move(all);
    out.steps = b.take_steps();
    out.produced = {Term(1, Symbol(up, alphas)), Term(-1, Symbol(up, betas))};
    if (!(b.state() == KClassExpr(F, up, 2, out.produced)))
        throw Error(Err::InvalidArgument, "internal: n=2, i=2 telescoping missed the difference");
    return out;
}

Fragment t2_fragment(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int i, int m,
                     const WitnessBundle& bundle)
{
    int n = int(alphas.size());
    if (i == 1) return t2_i1_fragment(alphas, betas[0], m, bundle);

    std::vector<FieldElement> second(betas.begin(), betas.end());
    second.insert(second.end(), alphas.begin() + i, alphas.end());
    if (has_t1_witness(alphas, bundle) && has_t1_witness(second, bundle)) {
        Fragment f1 = t1_core(alphas, m, bundle, nullptr);
        Fragment f2 = negate_fragment(t1_core(second, m, bundle, nullptr), alphas.front().field(),
                                      Modulus(2, m + 1), n);
        Fragment out;
        out.terms = f1.terms;
        out.terms.insert(out.terms.end(), f2.terms.begin(), f2.terms.end());
        out.steps = f1.steps;
        auto shifted = shift_term_indices(f2.steps, (long long)f1.produced.size());
        out.steps.insert(out.steps.end(), shifted.begin(), shifted.end());
        out.produced = f1.produced;
        out.produced.insert(out.produced.end(), f2.produced.begin(), f2.produced.end());
        return out;
    }
    if (n == 2 && i == 2) {
        long long count = 0;
        return t2_n2i2_fragment(alphas, betas, m, bundle, count);
    }
    throw MissingWitnessError(req_t2_representation(alphas, betas, i).to_json().dump());
}

}  // namespace

CertifiedDecomposition t2(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int i,
                          int m, const WitnessBundle& bundle)
{
    int n = int(alphas.size());
    if (n < 2 || i < 1 || i > n || int(betas.size()) != i) throw Error(Err::OutOfRange, "t2 needs n >= 2, 1 <= i <= n");
    const FieldRef& F = alphas.front().field();
    Modulus base(2, m), up = base.raised();

    Fragment frag = t2_fragment(alphas, betas, i, m, bundle);
    std::vector<FieldElement> second(betas.begin(), betas.end());
    second.insert(second.end(), alphas.begin() + i, alphas.end());
    KClassExpr target(F, up, n, {Term(1, Symbol(up, alphas)), Term(-1, Symbol(up, second))});
    return assemble("t2", F, base, n, {frag}, nullptr, target, bound("t2", n, i));
}

CertifiedDecomposition corollary_length2(const KClassExpr& e, const WitnessBundle& bundle)
{
    if (e.size() != 2 || e.terms()[0].coeff != 1 || e.terms()[1].coeff != -1)
        throw Error(Err::InvalidArgument, "expected a class of the form S1 - S2");
    if (e.modulus().p != 2 || e.modulus().m < 2) throw Error(Err::OutOfRange, "expected a class at 2^{m+1}");
    int n = e.grade(), m = e.modulus().m - 1;
    CertifiedDecomposition d =
        t2(e.terms()[0].symbol.entries(), e.terms()[1].symbol.entries(), n, m, bundle);
    d.theorem = "corollary";
    d.bound_used = bound("corollary", n);
    return d;
}

// ---- theorem 3 ----

CertifiedDecomposition t3(const std::vector<std::vector<FieldElement>>& symbols, const nlohmann::json& linkage,
                          int m, const WitnessBundle& bundle)
{
    if (symbols.size() != 3) throw Error(Err::InvalidArgument, "t3 needs three symbols");
    const FieldRef& F = symbols[0].front().field();
    int n = int(symbols[0].size());
    Modulus base(2, m), up = base.raised();

    FieldElement a = FieldElement::parse(F, linkage.at("a").get<std::string>());
    FieldElement bb = FieldElement::parse(F, linkage.at("b").get<std::string>());
    auto cs = elems_from(linkage.at("cs"), F);
    if (int(cs.size()) != n - 1) throw Error(Err::WitnessInvalid, "linkage needs n-1 shared slots");

    auto with_head = [&](const FieldElement& h) {
        std::vector<FieldElement> s{h};
        s.insert(s.end(), cs.begin(), cs.end());
        return s;
    };
    std::vector<std::vector<FieldElement>> reps{with_head(a), with_head(bb), with_head((a * bb).inv())};

    std::vector<Fragment> fragments;
    for (int j = 0; j < 3; ++j) fragments.push_back(t2_fragment(symbols[size_t(j)], reps[size_t(j)], n, m, bundle));

    std::vector<Term> target_terms;
    for (int j = 0; j < 3; ++j) target_terms.emplace_back(1, Symbol(up, symbols[size_t(j)]));
    KClassExpr target(F, up, n, target_terms);

    auto finish = [&](CertBuilder& b) {
        int j1 = b.find_term(-1, Symbol(up, reps[0]));
        int k1 = b.find_term(-1, Symbol(up, reps[1]));
        b.apply({MoveRule::BilinMerge, {j1, k1}, {1}, {}, {}});
        std::vector<FieldElement> prod = with_head(a * bb);
        int j2 = b.find_term(-1, Symbol(up, prod));
        int k2 = b.find_term(-1, Symbol(up, reps[2]));
        b.apply({MoveRule::BilinMerge, {j2, k2}, {1}, {}, {}});
        int j3 = b.find_term(-1, Symbol(up, with_head(FieldElement::one(F))));
        b.apply({MoveRule::UnitSlot, {j3}, {1}, {}, {}});
    };
    return assemble("t3", F, base, n, fragments, finish, target, bound("t3", n));
}

// ---- theorem 4 ----

CertifiedDecomposition t4(const std::vector<std::vector<FieldElement>>& pairs, const nlohmann::json& chain, int m,
                          const WitnessBundle& bundle)
{
    if (pairs.size() != 4) throw Error(Err::InvalidArgument, "t4 needs four grade-2 symbols");
    const FieldRef& F = pairs[0].front().field();
    Modulus base(2, m), up = base.raised();

    struct Row {
        FieldElement a, b, c, d, q, x, y;
    };
    std::vector<Row> rows;
    for (const auto& rj : chain.at("rows")) {
        Row r;
        r.a = FieldElement::parse(F, rj.at("a").get<std::string>());
        r.b = FieldElement::parse(F, rj.at("b").get<std::string>());
        r.c = FieldElement::parse(F, rj.at("c").get<std::string>());
        r.d = FieldElement::parse(F, rj.at("d").get<std::string>());
        auto t = vector_from(rj.at("t"), F);
        r.x = t[0];
        r.y = t[1];
        r.q = r.x * r.x - r.a * r.c * r.y * r.y;
        if (r.q.is_zero()) throw Error(Err::WitnessInvalid, "chain form value vanishes");
        rows.push_back(r);
    }
    if (rows.size() != 3) throw Error(Err::WitnessInvalid, "chain needs three rows");

    auto pair_of = [&](const FieldElement& u, const FieldElement& v) { return std::vector<FieldElement>{u, v}; };

    std::vector<Fragment> fragments;
    auto diff = [&](const std::vector<FieldElement>& A, const std::vector<FieldElement>& B, bool negated) {
        Fragment f = t2_fragment(A, B, 2, m, bundle);
        if (negated) f = negate_fragment(f, F, up, 2);
        fragments.push_back(std::move(f));
    };

    // survivors first so the final expression reads P1 + P2 - P3 - P4
    diff(pairs[0], pair_of(rows[0].a, rows[0].b), false);
    diff(pairs[1], pair_of(rows[0].c, rows[0].d), false);
    diff(pairs[2], pair_of(rows[2].a, rows[2].b * rows[2].q), true);
    diff(pairs[3], pair_of(rows[2].c, rows[2].d * rows[2].q), true);
    diff(pair_of(rows[1].a, rows[1].b), pair_of(rows[0].a, rows[0].b * rows[0].q), true);
    diff(pair_of(rows[2].a, rows[2].b), pair_of(rows[1].a, rows[1].b * rows[1].q), true);
    diff(pair_of(rows[1].c, rows[1].d), pair_of(rows[0].c, rows[0].d * rows[0].q), true);
    diff(pair_of(rows[2].c, rows[2].d), pair_of(rows[1].c, rows[1].d * rows[1].q), true);

    // merged classes {a_j c_j, q_j^{-1}}, expanded into their four symbols
    for (const Row& r : rows) {
        FieldElement ac = r.a * r.c, qinv = r.q.inv();
        Fragment f = base_pair_fragment(F, m, ac, qinv, r.x / r.q, r.y / r.q);
        KClassExpr state(F, up, 2, f.produced);
        CertBuilder b(state);
        const FieldElement one = FieldElement::one(F);
        b.apply({MoveRule::BilinSplit, {1}, {1}, {r.a}, {}});
        b.apply({MoveRule::BilinSplit, {1}, {2}, {r.b}, {}});
        b.apply({MoveRule::UnitSlot, {3, -1}, {2}, {r.a, one}, {}});
        b.apply({MoveRule::BilinMerge, {3, 2}, {2}, {}, {}});
        b.apply({MoveRule::BilinSplit, {3}, {2}, {r.d}, {}});
        b.apply({MoveRule::UnitSlot, {5, -1}, {2}, {r.c, one}, {}});
        b.apply({MoveRule::BilinMerge, {5, 4}, {2}, {}, {}});
        auto extra = b.take_steps();
        f.steps.insert(f.steps.end(), extra.begin(), extra.end());
        f.produced = b.state().terms();
        check_fragment(f, F, base, 2);
        fragments.push_back(std::move(f));
    }

    std::vector<Term> target_terms{Term(1, Symbol(up, pairs[0])), Term(1, Symbol(up, pairs[1])),
                                   Term(-1, Symbol(up, pairs[2])), Term(-1, Symbol(up, pairs[3]))};
    KClassExpr target(F, up, 2, target_terms);

    auto finish = [&](CertBuilder& b) {
        auto cancel = [&](const std::vector<FieldElement>& slots) {
            Symbol s(up, slots);
            int j = b.find_term(1, s), k = b.find_term(-1, s);
            b.apply({MoveRule::BilinMerge, {j, k}, {}, {}, {}});
        };
        for (const Row& r : rows) {
            cancel(pair_of(r.a, r.b));
            cancel(pair_of(r.a, r.b * r.q));
            cancel(pair_of(r.c, r.d));
            cancel(pair_of(r.c, r.d * r.q));
        }
    };
    return assemble("t4", F, base, 2, fragments, finish, target, bound("t4", 2));
}

// ---- serialization ----

nlohmann::json decomposition_to_json(const CertifiedDecomposition& d)
{
    return json{{"theorem", d.theorem},       {"target", expr_terms_to_json(d.target)},
                {"terms", expr_terms_to_json(d.terms)}, {"bound", d.bound_used},
                {"certificate", certificate_to_json(d.certificate)}, {"assumptions", d.assumptions}};
}

CertifiedDecomposition decomposition_from_json(const nlohmann::json& j)
{
    CertifiedDecomposition d;
    d.theorem = j.at("theorem").get<std::string>();
    d.certificate = certificate_from_json(j.at("certificate"));
    Modulus up = d.certificate.modulus;
    Modulus base(up.p, up.m - 1);
    d.target = expr_terms_from_json(j.at("target"), d.certificate.field, up, d.certificate.end.grade());
    d.terms = expr_terms_from_json(j.at("terms"), d.certificate.field, base, d.target.grade());
    d.bound_used = j.at("bound").get<long long>();
    for (const auto& a : j.at("assumptions")) d.assumptions.push_back(a.get<std::string>());
    return d;
}

}  // namespace symlen
