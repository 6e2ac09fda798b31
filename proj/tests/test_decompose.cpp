#include <doctest.h>

#include "symlen/decompose.hpp"
#include "symlen/mod3.hpp"

using namespace symlen;

namespace {

FieldRef Q() { return FieldDescriptor::rationals(); }
FieldElement q(long n, long d = 1) { return FieldElement::from_rational(Q(), mpq_class(n, d)); }

void check_valid(const CertifiedDecomposition& d)
{
    CHECK(check_certificate(d.certificate).valid);
    CHECK(d.certificate.start == shift_map(d.terms));
    CHECK(d.certificate.end == d.target);
    CHECK(d.terms.symbol_count() <= d.bound_used);
}

}  // namespace

TEST_CASE("closed-form bounds")
{
    CHECK(bound("t1", 2) == 2);
    CHECK(bound("t1", 5) == 16);
    CHECK(bound("t2", 3, 2) == 10);
    CHECK(bound("t2", 2, 1) == 2);
    CHECK(bound("corollary", 2) == 5);
    CHECK(bound("corollary", 3) == 17);
    CHECK(bound("t3", 2) == 15);
    CHECK(bound("t3", 3) == 51);
    CHECK(bound("t4", 2) == 46);
    CHECK(bound("t5", 3) == 15);
    CHECK_THROWS_AS(bound("t1", 1), Error);
    CHECK_THROWS_AS(bound("t2", 3, 4), Error);
    CHECK_THROWS_AS(bound("nope", 3), Error);
}

TEST_CASE("plan totals equal the closed forms, exhaustively to n = 8")
{
    for (int n = 2; n <= 8; ++n) {
        CHECK(plan("t1", n).total() == bound("t1", n));
        for (int i = 1; i <= n; ++i) CHECK(plan("t2", n, i).total() == bound("t2", n, i));
        CHECK(plan("corollary", n).total() == bound("corollary", n));
        CHECK(plan("t3", n).total() == bound("t3", n));
    }
    CHECK(plan("t4", 2).total() == 46);
    CHECK(plan("t5", 3).total() == 15);

    // t4 breakdown: eight difference classes of 5, three merged classes of 2
    PlanNode p4 = plan("t4", 2);
    REQUIRE(p4.children.size() == 11);
    for (int j = 0; j < 8; ++j) CHECK(p4.children[size_t(j)].total() == 5);
    for (int j = 8; j < 11; ++j) CHECK(p4.children[size_t(j)].total() == 2);

    PlanNode p5 = plan("t5", 3);
    CHECK(p5.children.size() == 5);
}

TEST_CASE("t1 base case")
{
    SUBCASE("y = 0 gives {alpha, x}")
    {
        CertifiedDecomposition d = t1_base(q(2), q(9), q(3), q(0), 1);
        REQUIRE(d.terms.size() == 1);
        CHECK(d.terms.terms()[0].symbol == Symbol(Modulus(2, 1), {q(2), q(3)}));
        check_valid(d);
    }
    SUBCASE("x = 0 gives {alpha, y}")
    {
        CertifiedDecomposition d = t1_base(q(2), q(-8), q(0), q(2), 1);
        REQUIRE(d.terms.size() == 1);
        CHECK(d.terms.terms()[0].symbol == Symbol(Modulus(2, 1), {q(2), q(2)}));
        check_valid(d);
    }
    SUBCASE("generic pair")
    {
        // alpha=3, beta=-23 = 4 - 27, witness (2,3)
        CertifiedDecomposition d = t1_base(q(3), q(-23), q(2), q(3), 1);
        REQUIRE(d.terms.size() == 2);
        CHECK(d.terms.terms()[0].symbol == Symbol(Modulus(2, 1), {q(3), q(3)}));
        CHECK(d.terms.terms()[1].symbol == Symbol(Modulus(2, 1), {q(2, 3), q(23, 27)}));
        check_valid(d);
        CHECK(d.target == KClassExpr::single(Symbol(Modulus(2, 2), {q(3), q(-23)})));
    }
    SUBCASE("bad witness rejected")
    {
        CHECK_THROWS_AS(t1_base(q(3), q(-23), q(2), q(4), 1), Error);
        CHECK_THROWS_AS(t1_base(q(3), q(1), q(0), q(0), 1), Error);
    }
}

TEST_CASE("t1 grade 2 agrees with the base case term for term")
{
    for (unsigned long long seed = 1; seed <= 10; ++seed) {
        T1Instance inst = make_constructed_instance_t1(2, 1, Q(), seed);
        CertifiedDecomposition viaT1 = t1(inst.symbol, inst.bundle);
        auto [x, y] = norm_rep_from(
            inst.bundle.resolve(req_norm_representation(inst.symbol.entry(1), inst.symbol.entry(2))), Q());
        CertifiedDecomposition viaBase = t1_base(inst.symbol.entry(1), inst.symbol.entry(2), x, y, 1);
        CHECK(viaT1.terms == viaBase.terms);
        check_valid(viaT1);
    }
}

TEST_CASE("t1 across grades, moduli and fields")
{
    for (int n : {2, 3, 4})
        for (int m : {1, 2})
            for (const FieldRef& F : {FieldDescriptor::rationals(), FieldDescriptor::cyclotomic(4)}) {
                unsigned long long seed = 1000ULL * (unsigned long long)n + 10ULL * (unsigned long long)m +
                                          (F->kind() == FieldKind::Rationals ? 0 : 5);
                T1Instance inst = make_constructed_instance_t1(n, m, F, seed);
                CertifiedDecomposition d = t1(inst.symbol, inst.bundle);
                CHECK(d.terms.symbol_count() <= bound("t1", n));
                check_valid(d);
                CHECK(d.assumptions[0] == "mu_{2^" + std::to_string(m + 1) + "} in F");
            }
}

TEST_CASE("t1 isotropic branch")
{
    for (int n : {3, 4}) {
        T1Instance inst = make_constructed_instance_t1(n, 1, Q(), 77, T1Variant::Isotropic);
        CertifiedDecomposition d = t1(inst.symbol, inst.bundle);
        CHECK(d.terms.symbol_count() <= (1LL << (n - 2)));
        check_valid(d);
    }
}

TEST_CASE("t1 over Q with an honest search policy")
{
    // no stored witnesses: the norm representation for {2,7} is searched
    WitnessBundle searching(Q(), Policy{PolicyMode::BoundedSearch, 9});
    CertifiedDecomposition d = t1(Symbol(Modulus(2, 2), {q(2), q(7)}), searching);
    CHECK(d.terms.symbol_count() <= 2);
    check_valid(d);
}

TEST_CASE("t1 missing witness names the request")
{
    T1Instance inst = make_constructed_instance_t1(3, 1, Q(), 5);
    WitnessBundle empty(Q(), Policy{PolicyMode::LookupOnly, 0});
    CHECK_THROWS_AS(t1(inst.symbol, empty), MissingWitnessError);
    try {
        t1(inst.symbol, empty);
    } catch (const MissingWitnessError& e) {
        CHECK(e.request_json().find("T1Representation") != std::string::npos);
    }
}

TEST_CASE("t2 with i = 1")
{
    for (int n : {2, 3})
        for (unsigned long long seed = 1; seed <= 5; ++seed) {
            T2Instance inst = make_constructed_instance_t2_i1(n, 1, Q(), seed);
            CertifiedDecomposition d = t2(inst.alphas, inst.betas, 1, 1, inst.bundle);
            CHECK(d.terms.symbol_count() <= (1LL << (n - 1)));
            check_valid(d);
            REQUIRE(d.target.size() == 2);
            CHECK(d.target.terms()[0].coeff == 1);
            CHECK(d.target.terms()[1].coeff == -1);
        }
}

TEST_CASE("t2 with n = i = 2 and the corollary")
{
    for (unsigned long long seed = 1; seed <= 6; ++seed) {
        T2Instance inst = make_constructed_instance_t2_n2i2(1, Q(), seed);
        CertifiedDecomposition d = t2(inst.alphas, inst.betas, 2, 1, inst.bundle);
        CHECK(d.terms.symbol_count() <= 5);
        check_valid(d);

        KClassExpr diff(Q(), Modulus(2, 2), 2,
                        {Term(1, Symbol(Modulus(2, 2), inst.alphas)), Term(-1, Symbol(Modulus(2, 2), inst.betas))});
        CertifiedDecomposition viaCor = corollary_length2(diff, inst.bundle);
        CHECK(viaCor.theorem == "corollary");
        CHECK(viaCor.bound_used == 5);
        check_valid(viaCor);
    }
}

TEST_CASE("t2 hyperbolic branch")
{
    // both symbols independently witnessed: two t1 calls
    T1Instance a = make_constructed_instance_t1(2, 1, Q(), 21);
    T1Instance b = make_constructed_instance_t1(2, 1, Q(), 22);
    WitnessBundle bundle(Q(), Policy{PolicyMode::LookupOnly, 0});
    bundle.insert(req_norm_representation(a.symbol.entry(1), a.symbol.entry(2)),
                  a.bundle.resolve(req_norm_representation(a.symbol.entry(1), a.symbol.entry(2))));
    bundle.insert(req_norm_representation(b.symbol.entry(1), b.symbol.entry(2)),
                  b.bundle.resolve(req_norm_representation(b.symbol.entry(1), b.symbol.entry(2))));
    CertifiedDecomposition d =
        t2(a.symbol.entries(), b.symbol.entries(), 2, 1, bundle);
    CHECK(d.terms.symbol_count() <= bound("t2", 2, 2));
    check_valid(d);
}

TEST_CASE("t3 on a constructed linkage")
{
    T3Instance inst = make_constructed_instance_t3(1, Q(), 3);
    nlohmann::json linkage = inst.bundle.resolve(req_linkage(inst.symbols));
    CertifiedDecomposition d = t3(inst.symbols, linkage, 1, inst.bundle);
    CHECK(d.terms.symbol_count() <= 15);
    check_valid(d);
    REQUIRE(d.target.size() == 3);
    for (const auto& t : d.target.terms()) CHECK(t.coeff == 1);
}

TEST_CASE("t4 on a constructed chain")
{
    T4Instance inst = make_constructed_instance_t4(1, Q(), 8);
    nlohmann::json chain = inst.bundle.resolve(req_sivatski_chain(inst.pairs));
    CertifiedDecomposition d = t4(inst.pairs, chain, 1, inst.bundle);
    CHECK(d.terms.symbol_count() <= 46);
    check_valid(d);
    REQUIRE(d.target.size() == 4);
    CHECK(d.target.terms()[0].coeff == 1);
    CHECK(d.target.terms()[1].coeff == 1);
    CHECK(d.target.terms()[2].coeff == -1);
    CHECK(d.target.terms()[3].coeff == -1);
}

TEST_CASE("decomposition json round-trip")
{
    T1Instance inst = make_constructed_instance_t1(3, 1, Q(), 44);
    CertifiedDecomposition d = t1(inst.symbol, inst.bundle);
    auto j = decomposition_to_json(d);
    CertifiedDecomposition back = decomposition_from_json(j);
    CHECK(decomposition_to_json(back) == j);
    check_valid(back);
}
