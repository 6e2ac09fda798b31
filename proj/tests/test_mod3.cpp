#include <doctest.h>

#include "symlen/mod3.hpp"

using namespace symlen;

namespace {

SymbolAlgebra make_algebra(const FieldRef& F, long a, long b)
{
    return SymbolAlgebra(F, FieldElement::from_int(F, a), FieldElement::from_int(F, b),
                         primitive_root_of_unity(F, 3));
}

AlgebraElement random_element(Rng& rng, const FieldRef& F)
{
    AlgebraElement e(F);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (rng.next() % 2) e.set(i, j, rng.element(F, 3, false));
    return e;
}

}  // namespace

TEST_CASE("algebra multiplication relations")
{
    FieldRef F = FieldDescriptor::prime_field(13);
    SymbolAlgebra A = make_algebra(F, 2, 5);
    AlgebraElement x = AlgebraElement::gen_x(F), y = AlgebraElement::gen_y(F);

    // yx = rho xy
    AlgebraElement yx = algebra_mul(A, y, x);
    AlgebraElement xy = algebra_mul(A, x, y);
    AlgebraElement rho_xy(F);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rho_xy.set(i, j, A.rho * xy.at(i, j));
    CHECK(yx == rho_xy);

    // x^3 = alpha, y^3 = beta
    CHECK(algebra_mul(A, x, algebra_mul(A, x, x)) == AlgebraElement::scalar(F, A.alpha));
    CHECK(algebra_mul(A, y, algebra_mul(A, y, y)) == AlgebraElement::scalar(F, A.beta));

    // (x+y)^2 = x^2 + (1+rho) xy + y^2
    AlgebraElement xpy = algebra_add(x, y);
    AlgebraElement sq = algebra_mul(A, xpy, xpy);
    AlgebraElement expect(F);
    expect.set(2, 0, FieldElement::one(F));
    expect.set(0, 2, FieldElement::one(F));
    expect.set(1, 1, FieldElement::one(F) + A.rho);
    CHECK(sq == expect);

    // associativity on random triples
    Rng rng(7);
    for (int k = 0; k < 50; ++k) {
        AlgebraElement u = random_element(rng, F), v = random_element(rng, F), w = random_element(rng, F);
        CHECK(algebra_mul(A, algebra_mul(A, u, v), w) == algebra_mul(A, u, algebra_mul(A, v, w)));
    }
}

TEST_CASE("reduced trace and norm")
{
    FieldRef F = FieldDescriptor::prime_field(13);
    SymbolAlgebra A = make_algebra(F, 2, 5);
    AlgebraElement x = AlgebraElement::gen_x(F), y = AlgebraElement::gen_y(F);

    CHECK(reduced_norm(A, AlgebraElement::scalar(F, FieldElement::one(F))).is_one());
    CHECK(reduced_norm(A, x) == A.alpha);
    CHECK(reduced_norm(A, y) == A.beta);
    CHECK(reduced_trace(A, algebra_mul(A, x, y)).is_zero());
    CHECK(reduced_trace(A, x).is_zero());

    // scalars: Nrd(s) = s^3, Trd(s) = 3s
    Rng rng(8);
    for (int k = 0; k < 20; ++k) {
        FieldElement s = rng.element(F, 5, false);
        CHECK(reduced_norm(A, AlgebraElement::scalar(F, s)) == s * s * s);
        CHECK(reduced_trace(A, AlgebraElement::scalar(F, s)) == FieldElement::from_int(F, 3) * s);
    }

    // multiplicativity
    for (int k = 0; k < 100; ++k) {
        AlgebraElement u = random_element(rng, F), v = random_element(rng, F);
        CHECK(reduced_norm(A, algebra_mul(A, u, v)) == reduced_norm(A, u) * reduced_norm(A, v));
    }

    // and over a characteristic-zero field with mu_3
    FieldRef F9 = FieldDescriptor::cyclotomic(9);
    SymbolAlgebra A9 = make_algebra(F9, 2, 3);
    CHECK(reduced_norm(A9, AlgebraElement::gen_x(F9)) == A9.alpha);
    Rng rng9(9);
    for (int k = 0; k < 5; ++k) {
        AlgebraElement u = random_element(rng9, F9), v = random_element(rng9, F9);
        CHECK(reduced_norm(A9, algebra_mul(A9, u, v)) == reduced_norm(A9, u) * reduced_norm(A9, v));
    }
}

TEST_CASE("t5 witness verification")
{
    FieldRef F = FieldDescriptor::cyclotomic(9);
    SymbolAlgebra A = make_algebra(F, 2, 3);
    const FieldElement one = FieldElement::one(F), zero = FieldElement::zero(F);
    AlgebraElement x = AlgebraElement::gen_x(F);

    SUBCASE("z = x with identity coefficients")
    {
        T5WitnessReport r = verify_t5_witness(A, x, {one, zero, zero}, A.alpha);
        CHECK(r.delta == A.alpha);
        CHECK(r.checks.size() == 5);
    }
    SUBCASE("z = x with coefficient x")
    {
        // w = x^2, delta = alpha^2, delta/gamma = alpha = Norm(x)
        T5WitnessReport r = verify_t5_witness(A, x, {zero, one, zero}, A.alpha);
        CHECK(r.delta == A.alpha * A.alpha);
    }
    SUBCASE("wrong norm fails with the norm tag")
    {
        CHECK_THROWS_WITH_AS(verify_t5_witness(A, x, {one, zero, zero}, A.beta), "CheckFailed: norm", Error);
    }
}

TEST_CASE("t5 recombination on degenerate instances")
{
    for (const FieldRef& F : {FieldDescriptor::cyclotomic(9), FieldDescriptor::prime_field(13)}) {
        T5Instance inst = make_degenerate_t5_instance(1, F, 6);
        CertifiedDecomposition d = t5_recombine(inst.alpha, inst.beta, inst.gamma, 1, inst.bundle);
        CHECK(d.theorem == "t5");
        CHECK(d.terms.symbol_count() <= 15);
        CHECK(d.certificate.modulus.p == 3);
        CHECK(check_certificate(d.certificate).valid);
        CHECK(d.certificate.end == d.target);
        CHECK(d.target == KClassExpr::single(Symbol(Modulus(3, 2), {inst.alpha, inst.beta, inst.gamma})));
    }
}

TEST_CASE("t5 rejects corrupted sub-decompositions")
{
    FieldRef F = FieldDescriptor::cyclotomic(9);
    T5Instance inst = make_degenerate_t5_instance(1, F, 6);

    // swap the stored decompositions of differences 3 and 4: both certificates
    // stay valid but the targets no longer match their slots
    auto j = inst.bundle.to_json();
    nlohmann::json d3, d4;
    for (auto& w : j.at("witnesses")) {
        if (w.at("kind") != "SubDecomposition") continue;
        if (w.at("payload").at("index") == 3) d3 = w.at("data");
        if (w.at("payload").at("index") == 4) d4 = w.at("data");
    }
    for (auto& w : j.at("witnesses")) {
        if (w.at("kind") != "SubDecomposition") continue;
        if (w.at("payload").at("index") == 3) w["data"] = d4;
        if (w.at("payload").at("index") == 4) w["data"] = d3;
    }
    WitnessBundle tampered = WitnessBundle::from_json(j, F);
    CHECK_THROWS_AS(t5_recombine(inst.alpha, inst.beta, inst.gamma, 1, tampered), Error);
}

TEST_CASE("algebra element json round-trip")
{
    FieldRef F = FieldDescriptor::cyclotomic(9);
    Rng rng(3);
    AlgebraElement e = random_element(rng, F);
    auto j = e.to_json();
    CHECK(AlgebraElement::from_json(j, F) == e);
    CHECK(j.size() == 3);
}
