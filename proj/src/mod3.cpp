#include "symlen/mod3.hpp"

namespace symlen {

using nlohmann::json;

SymbolAlgebra::SymbolAlgebra(FieldRef f, FieldElement a, FieldElement b, FieldElement r)
    : field(std::move(f)), alpha(std::move(a)), beta(std::move(b)), rho(std::move(r))
{
    if (alpha.is_zero() || beta.is_zero()) throw Error(Err::InvalidArgument, "algebra slots must be nonzero");
    if (rho.is_one() || !(rho * rho * rho).is_one())
        throw Error(Err::InvalidArgument, "rho must be a primitive cube root of unity");
}

AlgebraElement::AlgebraElement(const FieldRef& f) : field_(f), c_(9, FieldElement::zero(f)) {}

AlgebraElement AlgebraElement::scalar(const FieldRef& f, const FieldElement& s)
{
    AlgebraElement e(f);
    e.set(0, 0, s);
    return e;
}

AlgebraElement AlgebraElement::gen_x(const FieldRef& f)
{
    AlgebraElement e(f);
    e.set(1, 0, FieldElement::one(f));
    return e;
}

AlgebraElement AlgebraElement::gen_y(const FieldRef& f)
{
    AlgebraElement e(f);
    e.set(0, 1, FieldElement::one(f));
    return e;
}

bool AlgebraElement::is_scalar() const
{
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if ((i || j) && !at(i, j).is_zero()) return false;
    return true;
}

nlohmann::json AlgebraElement::to_json() const
{
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int j = 0; j < 3; ++j) row.push_back(at(i, j).str());
        rows.push_back(row);
    }
    return rows;
}

AlgebraElement AlgebraElement::from_json(const nlohmann::json& j, const FieldRef& f)
{
    AlgebraElement e(f);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) e.set(i, k, FieldElement::parse(f, j.at(size_t(i)).at(size_t(k)).get<std::string>()));
    return e;
}

AlgebraElement algebra_add(const AlgebraElement& u, const AlgebraElement& v)
{
    AlgebraElement out(u.field());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.set(i, j, u.at(i, j) + v.at(i, j));
    return out;
}

AlgebraElement algebra_mul(const SymbolAlgebra& A, const AlgebraElement& u, const AlgebraElement& v)
{
    if (!same_field(u.field(), A.field) || !same_field(v.field(), A.field))
        throw Error(Err::DescriptorMismatch, "elements live outside the algebra");
    AlgebraElement out(A.field);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (u.at(i, j).is_zero()) continue;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    if (v.at(k, l).is_zero()) continue;
                    // y^j x^k = rho^{jk} x^k y^j
                    FieldElement coeff = u.at(i, j) * v.at(k, l) * A.rho.pow((long)j * k);
                    if ((i + k) / 3) coeff = coeff * A.alpha;
                    if ((j + l) / 3) coeff = coeff * A.beta;
                    int ii = (i + k) % 3, jj = (j + l) % 3;
                    out.set(ii, jj, out.at(ii, jj) + coeff);
                }
        }
    return out;
}

namespace {

// left-regular representation on the monomial basis x^i y^j, column-major
// over basis index 3i+j
std::vector<FieldElement> left_regular_matrix(const SymbolAlgebra& A, const AlgebraElement& u)
{
    std::vector<FieldElement> M(81, FieldElement::zero(A.field));
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            AlgebraElement basis(A.field);
            basis.set(k, l, FieldElement::one(A.field));
            AlgebraElement img = algebra_mul(A, u, basis);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) M[size_t(9 * (3 * i + j) + (3 * k + l))] = img.at(i, j);
        }
    return M;
}

}  // namespace

FieldElement reduced_trace(const SymbolAlgebra& A, const AlgebraElement& u)
{
    auto M = left_regular_matrix(A, u);
    FieldElement tr = FieldElement::zero(A.field);
    for (int d = 0; d < 9; ++d) tr = tr + M[size_t(9 * d + d)];
    return tr / FieldElement::from_int(A.field, 3);
}

FieldElement reduced_norm(const SymbolAlgebra& A, const AlgebraElement& u)
{
    // Faddeev-LeVerrier characteristic polynomial of the 9x9 regular
    // representation, then the cube-root extraction through the first three
    // coefficients.
    const FieldRef& F = A.field;
    auto M = left_regular_matrix(A, u);
    auto mat_mul = [&](const std::vector<FieldElement>& X, const std::vector<FieldElement>& Y) {
        std::vector<FieldElement> Z(81, FieldElement::zero(F));
        for (int i = 0; i < 9; ++i)
            for (int k = 0; k < 9; ++k) {
                if (X[size_t(9 * i + k)].is_zero()) continue;
                for (int j = 0; j < 9; ++j)
                    Z[size_t(9 * i + j)] = Z[size_t(9 * i + j)] + X[size_t(9 * i + k)] * Y[size_t(9 * k + j)];
            }
        return Z;
    };
    auto trace = [&](const std::vector<FieldElement>& X) {
        FieldElement t = FieldElement::zero(F);
        for (int d = 0; d < 9; ++d) t = t + X[size_t(9 * d + d)];
        return t;
    };

    std::vector<FieldElement> Mk = M;
    std::vector<FieldElement> a;  // charpoly t^9 + a1 t^8 + a2 t^7 + a3 t^6 + ...
    for (int k = 1; k <= 3; ++k) {
        FieldElement ak = -(trace(Mk) / FieldElement::from_int(F, k));
        a.push_back(ak);
        if (k == 3) break;
        for (int d = 0; d < 9; ++d) Mk[size_t(9 * d + d)] = Mk[size_t(9 * d + d)] + ak;
        Mk = mat_mul(M, Mk);
    }
    FieldElement three = FieldElement::from_int(F, 3);
    FieldElement e1 = a[0] / three;
    FieldElement e2 = (a[1] - three * e1 * e1) / three;
    FieldElement e3 = (a[2] - e1 * e1 * e1 - FieldElement::from_int(F, 6) * e1 * e2) / three;
    return -e3;
}

T5WitnessReport verify_t5_witness(const SymbolAlgebra& A, const AlgebraElement& z,
                                  const std::array<FieldElement, 3>& coeffs, const FieldElement& gamma)
{
    const FieldRef& F = A.field;
    T5WitnessReport rep;
    rep.delta = FieldElement::zero(F);

    auto fail = [&](const std::string& which) { throw Error(Err::CheckFailed, which); };
    auto record = [&](const std::string& name, bool ok) {
        rep.checks.emplace_back(name, ok);
        if (!ok) fail(name);
    };

    record("norm", reduced_norm(A, z) == gamma);

    AlgebraElement u(F);
    u.set(0, 0, coeffs[0]);
    u.set(1, 0, coeffs[1]);
    u.set(2, 0, coeffs[2]);
    AlgebraElement w = algebra_mul(A, u, z);

    record("trace1", reduced_trace(A, w).is_zero());
    record("trace2", reduced_trace(A, algebra_mul(A, w, w)).is_zero());

    AlgebraElement w3 = algebra_mul(A, algebra_mul(A, w, w), w);
    bool scalar = w3.is_scalar() && !w3.at(0, 0).is_zero();
    record("cube", scalar);
    rep.delta = w3.at(0, 0);

    // delta/gamma = Norm_{E[x]/E}(a0 + b0 x + c0 x^2)
    const FieldElement &a0 = coeffs[0], &b0 = coeffs[1], &c0 = coeffs[2];
    FieldElement nrm = a0 * a0 * a0 + A.alpha * b0 * b0 * b0 + A.alpha * A.alpha * c0 * c0 * c0 -
                       FieldElement::from_int(F, 3) * A.alpha * a0 * b0 * c0;
    record("ratio", rep.delta / gamma == nrm);
    return rep;
}

// ---- theorem 5 ----

CertifiedDecomposition t5_recombine(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma,
                                    int m, const WitnessBundle& bundle)
{
    const FieldRef& F = alpha.field();
    Modulus base(3, m), up = base.raised();

    json zdata = bundle.resolve(req_algebra_element(alpha, beta, gamma));
    AlgebraElement z = AlgebraElement::from_json(zdata.at("z"), F);
    std::array<FieldElement, 3> coeffs{FieldElement::parse(F, zdata.at("coeffs").at(0).get<std::string>()),
                                       FieldElement::parse(F, zdata.at("coeffs").at(1).get<std::string>()),
                                       FieldElement::parse(F, zdata.at("coeffs").at(2).get<std::string>())};
    bool extension = zdata.value("extension", false);

    SymbolAlgebra A(F, alpha, beta, primitive_root_of_unity(F, 3));
    T5WitnessReport wrep = verify_t5_witness(A, z, coeffs, gamma);
    const FieldElement& delta = wrep.delta;

    json chain = bundle.resolve(req_rost_chain(alpha, beta, gamma));
    FieldElement c1 = FieldElement::parse(F, chain.at("c1").get<std::string>());
    FieldElement c2 = FieldElement::parse(F, chain.at("c2").get<std::string>());
    FieldElement c3 = FieldElement::parse(F, chain.at("c3").get<std::string>());

    // the five telescoping differences
    std::vector<std::pair<Symbol, Symbol>> diffs;
    auto sym = [&](const FieldElement& u, const FieldElement& v, const FieldElement& w) {
        return Symbol(up, {u, v, w});
    };
    diffs.emplace_back(sym(alpha, beta, gamma), sym(alpha, beta, delta));
    diffs.emplace_back(sym(alpha, beta, delta), sym(alpha, c1, delta));
    diffs.emplace_back(sym(alpha, c1, delta), sym(c2, c1, delta));
    diffs.emplace_back(sym(c2, c1, delta), sym(c2, c3, delta));
    diffs.emplace_back(sym(c2, c3, delta), sym(delta, c3, delta));

    std::vector<Fragment> fragments;
    for (int r = 1; r <= 5; ++r) {
        json dj = bundle.resolve(req_sub_decomposition(r, alpha, beta, gamma));
        CertifiedDecomposition sub = decomposition_from_json(dj);
        KClassExpr expect(F, up, 3,
                          {Term(1, diffs[size_t(r - 1)].first), Term(-1, diffs[size_t(r - 1)].second)});
        if (!(sub.target == expect)) throw Error(Err::SubDecompositionInvalid, "difference " + std::to_string(r) + " has the wrong target");
        if (sub.terms.symbol_count() > 3)
            throw Error(Err::SubDecompositionInvalid, "difference " + std::to_string(r) + " exceeds three symbols");
        if (!(sub.certificate.start == shift_map(sub.terms)) || !(sub.certificate.end == sub.target))
            throw Error(Err::SubDecompositionInvalid, "difference " + std::to_string(r) + " certificate endpoints drift");
        CheckResult chk = check_certificate(sub.certificate);
        if (!chk.valid) throw Error(Err::SubDecompositionInvalid, "difference " + std::to_string(r) + ": " + chk.reason);
        fragments.push_back(Fragment{sub.terms.terms(), sub.certificate.steps, sub.target.terms()});
    }

    KClassExpr target(F, up, 3, {Term(1, sym(alpha, beta, gamma))});

    auto finish = [&](CertBuilder& b) {
        // telescope the middles
        for (int r = 0; r < 4; ++r) {
            const Symbol& s = diffs[size_t(r)].second;
            int j = b.find_term(1, s), k = b.find_term(-1, s);
            b.apply({MoveRule::BilinMerge, {std::min(j, k), std::max(j, k)}, {}, {}, {}});
        }
        // kill -{delta, c3, delta}: 2-torsion in an odd-modulus group
        int k = b.find_term(-1, diffs[4].second);
        FieldElement minus_one = -FieldElement::one(F);
        b.apply({MoveRule::BilinSplit, {k}, {3}, {minus_one}, {}});
        b.apply({MoveRule::MinusAlpha, {k + 1}, {1, 3}, {}, {}});
        long long pm1 = up.value() - 1;
        b.apply({MoveRule::CoeffMod, {k, pm1}, {}, {}, {}});
        while (true) {
            long long c = b.state().terms()[size_t(k - 1)].coeff;
            if (c > 2) b.apply({MoveRule::BilinSplit, {k, 2}, {}, {}, {}});
            b.apply({MoveRule::BilinSplit, {k, 1}, {}, {}, {}});
            b.apply({MoveRule::BilinMerge, {k, k + 1}, {3}, {}, {}});
            b.apply({MoveRule::UnitSlot, {k}, {3}, {}, {}});
            if (c <= 2) break;
        }
    };

    CertifiedDecomposition out = assemble("t5", F, base, 3, fragments, finish, target, bound("t5", 3));
    if (extension) out.assumptions.push_back("over quadratic extension E; bound over F: 30");
    return out;
}

T5Instance make_degenerate_t5_instance(int m, const FieldRef& field, unsigned long long seed)
{
    Rng rng(seed * 2 + 17);
    Modulus base(3, m), up = base.raised();
    WitnessBundle bundle(field, Policy{PolicyMode::LookupOnly, 0});

    FieldElement alpha = rng.element(field, 5, true);
    FieldElement beta = rng.element(field, 5, true);
    FieldElement eps = rng.element(field, 3, true);
    FieldElement zeta = rng.element(field, 3, true);

    FieldElement gamma = alpha, delta = alpha;
    FieldElement c1 = beta;
    FieldElement c2 = alpha / (eps * eps * eps);
    FieldElement c3 = beta / (zeta * zeta * zeta);

    AlgebraElement z = AlgebraElement::gen_x(field);
    bundle.insert(req_algebra_element(alpha, beta, gamma),
                  json{{"z", z.to_json()},
                       {"coeffs", json::array({FieldElement::one(field).str(), FieldElement::zero(field).str(),
                                               FieldElement::zero(field).str()})},
                       {"extension", false}});
    bundle.insert(req_rost_chain(alpha, beta, gamma), json{{"c1", c1.str()}, {"c2", c2.str()}, {"c3", c3.str()}});

    const FieldElement one = FieldElement::one(field);

    // trivial differences D1, D2: empty decomposition, pair inserted from nothing
    auto trivial_pair = [&](int index, const FieldElement& s1, const FieldElement& s2, const FieldElement& s3) {
        KClassExpr empty(field, up, 3);
        CertBuilder b(empty);
        b.apply({MoveRule::UnitSlot, {1, 1}, {3}, {s1, s2, one}, {}});
        b.apply({MoveRule::BilinSplit, {1}, {3}, {s3}, {}});
        b.apply({MoveRule::UnitSlot, {3, -1}, {3}, {s1, s2, one}, {}});
        b.apply({MoveRule::BilinMerge, {3, 2}, {3}, {}, {}});
        KClassExpr target(field, up, 3,
                          {Term(1, Symbol(up, {s1, s2, s3})), Term(-1, Symbol(up, {s1, s2, s3}))});
        if (!(b.state() == target)) throw Error(Err::InvalidArgument, "internal: trivial pair construction drifted");
        CertifiedDecomposition d{"sub", target, KClassExpr(field, base, 3),
                                 Certificate{up, field, KClassExpr(field, up, 3), target, b.take_steps()},
                                 3,
                                 {"mu_{3^" + std::to_string(m + 1) + "} in F"}};
        bundle.insert(req_sub_decomposition(index, alpha, beta, gamma), decomposition_to_json(d));
    };
    trivial_pair(1, alpha, beta, gamma);  // gamma = delta
    trivial_pair(2, alpha, beta, delta);  // c1 = beta

    // one-symbol differences D3, D4, D5: merged slot is a cube
    auto cube_diff = [&](int index, std::vector<FieldElement> first, std::vector<FieldElement> second, int slot,
                         const FieldElement& root) {
        // the term holds the cube root in the differing slot
        std::vector<FieldElement> entries = first;
        entries[size_t(slot - 1)] = root;
        KClassExpr terms(field, base, 3, {Term(1, Symbol(base, entries))});

        CertBuilder b(shift_map(terms));
        b.apply({MoveRule::BilinSplit, {1, 1}, {}, {}, {}});
        b.apply({MoveRule::BilinSplit, {2, 1}, {}, {}, {}});
        b.apply({MoveRule::BilinMerge, {1, 2}, {slot}, {}, {}});
        b.apply({MoveRule::BilinMerge, {1, 2}, {slot}, {}, {}});
        b.apply({MoveRule::BilinSplit, {1}, {slot}, {first[size_t(slot - 1)]}, {}});
        std::vector<FieldElement> unit_entries = first;
        unit_entries[size_t(slot - 1)] = one;
        b.apply({MoveRule::UnitSlot, {3, -1}, {slot}, unit_entries, {}});
        b.apply({MoveRule::BilinMerge, {3, 2}, {slot}, {}, {}});
        KClassExpr target(field, up, 3, {Term(1, Symbol(up, first)), Term(-1, Symbol(up, second))});
        if (!(b.state() == target)) throw Error(Err::InvalidArgument, "internal: cube difference drifted");
        CertifiedDecomposition d{"sub", target, terms,
                                 Certificate{up, field, shift_map(terms), target, b.take_steps()},
                                 3,
                                 {"mu_{3^" + std::to_string(m + 1) + "} in F"}};
        bundle.insert(req_sub_decomposition(index, alpha, beta, gamma), decomposition_to_json(d));
    };
    // D3: {alpha, c1, delta} - {c2, c1, delta}, slot 1, alpha/c2 = eps^3
    cube_diff(3, {alpha, c1, delta}, {c2, c1, delta}, 1, eps);
    // D4: {c2, c1, delta} - {c2, c3, delta}, slot 2, c1/c3 = zeta^3
    cube_diff(4, {c2, c1, delta}, {c2, c3, delta}, 2, zeta);
    // D5: {c2, c3, delta} - {delta, c3, delta}, slot 1, c2/delta = eps^{-3}
    cube_diff(5, {c2, c3, delta}, {delta, c3, delta}, 1, one / eps);

    T5Instance out{alpha, beta, gamma, m, std::move(bundle)};
    return out;
}

}  // namespace symlen
