#include <doctest.h>

#include "symlen/forms.hpp"
#include "symlen/witness.hpp"

using namespace symlen;

namespace {

FieldRef Q() { return FieldDescriptor::rationals(); }
FieldElement q(long n, long d = 1) { return FieldElement::from_rational(Q(), mpq_class(n, d)); }

// independent oracles
int brute_legendre(long a, long p)
{
    long r = ((a % p) + p) % p;
    if (r == 0) return 0;
    for (long x = 1; x < p; ++x)
        if ((x * x) % p == r) return 1;
    return -1;
}

// (-1,-1)_2 via primitive solutions of x^2 + y^2 + z^2 = 0 mod 8
bool dyadic_minus_one_minus_one_solvable()
{
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y)
            for (int z = 0; z < 8; ++z) {
                if (x % 2 == 0 && y % 2 == 0 && z % 2 == 0) continue;
                if ((x * x + y * y + z * z) % 8 == 0) return true;
            }
    return false;
}

mpq_class rat(const FieldElement& e) { return e.rational(); }

}  // namespace

TEST_CASE("pfister expansion")
{
    DiagonalForm f1 = expand(PfisterForm({q(2)}));
    CHECK(f1.coeffs() == std::vector<FieldElement>{q(1), q(-2)});

    DiagonalForm f2 = expand(PfisterForm({q(2), q(3)}));
    CHECK(f2.coeffs() == std::vector<FieldElement>{q(1), q(-2), q(-3), q(6)});

    DiagonalForm f3 = expand(PfisterForm({q(2), q(3), q(5)}));
    REQUIRE(f3.dimension() == 8);
    CHECK(f3.coeffs()[0].is_one());
    for (long mask = 0; mask < 8; ++mask) {
        FieldElement expect = FieldElement::one(Q());
        if (mask & 1) expect = expect * q(-2);
        if (mask & 2) expect = expect * q(-3);
        if (mask & 4) expect = expect * q(-5);
        CHECK(f3.coeffs()[size_t(mask)] == expect);
    }
}

TEST_CASE("evaluation")
{
    DiagonalForm f = expand(PfisterForm({q(2)}));
    CHECK(evaluate(f, {q(1), q(1)}) == q(-1));
    DiagonalForm g = expand(PfisterForm({q(2), q(3)}));
    CHECK(evaluate(g, {q(1), q(1), q(1), q(1)}) == q(2));
    CHECK(evaluate(g, {q(1), q(0), q(0), q(0)}) == g.coeffs()[0]);
    CHECK_THROWS_AS(evaluate(g, {q(1)}), Error);
}

TEST_CASE("t1 representation check")
{
    // n=3, alphas = (2,3,1), t1 = (1,1), t0 = (0,1):
    // rhs = phi1(t1)*3 - phi1(t0) = (-1)*3 - (-2) = -1 = -alpha_3
    std::vector<FieldElement> alphas{q(2), q(3), q(1)};
    std::vector<FormVector> ts{{q(0), q(1)}, {q(1), q(1)}};
    CHECK(evaluate_pfister(PfisterForm({q(2)}), ts[1]) == q(-1));
    CHECK(evaluate_pfister(PfisterForm({q(2)}), ts[0]) == q(-2));
    CHECK(verify_representation_t1(alphas, ts));

    std::vector<FieldElement> wrong{q(2), q(3), q(2)};
    CHECK(!verify_representation_t1(wrong, ts));

    CHECK_THROWS_AS(verify_representation_t1(alphas, {{q(1), q(1)}}), Error);
}

TEST_CASE("hilbert symbol basics")
{
    CHECK(hilbert_symbol_Q(-1, -1, Place::infinity()) == -1);
    CHECK(hilbert_symbol_Q(1, -1, Place::infinity()) == 1);

    // (2,7)_7 via the Legendre oracle: 2 is a square mod 7
    CHECK(brute_legendre(2, 7) == 1);
    CHECK(legendre(2, 7) == 1);
    CHECK(hilbert_symbol_Q(2, 7, Place::at(7)) == 1);

    // (-1,-1)_2 via the dyadic brute-force oracle
    CHECK(!dyadic_minus_one_minus_one_solvable());
    CHECK(hilbert_symbol_Q(-1, -1, Place::at(2)) == -1);

    for (long p : {3L, 5L, 7L, 11L, 13L})
        for (long a = 1; a < p; ++a) CHECK(legendre(a, p) == brute_legendre(a, p));
}

TEST_CASE("hilbert bimultiplicativity and symmetry")
{
    Rng rng(31);
    for (int k = 0; k < 60; ++k) {
        mpq_class a = rat(rng.element(Q(), 9, true));
        mpq_class a2 = rat(rng.element(Q(), 9, true));
        mpq_class b = rat(rng.element(Q(), 9, true));
        auto places = relevant_places({a, a2, b});
        const Place& v = places[rng.next() % places.size()];
        CHECK(hilbert_symbol_Q(a * a2, b, v) == hilbert_symbol_Q(a, b, v) * hilbert_symbol_Q(a2, b, v));
        CHECK(hilbert_symbol_Q(a, b, v) == hilbert_symbol_Q(b, a, v));
    }
}

TEST_CASE("hilbert product formula")
{
    Rng rng(32);
    for (int k = 0; k < 200; ++k) {
        mpq_class a = rat(rng.element(Q(), 9, true));
        mpq_class b = rat(rng.element(Q(), 9, true));
        int prod = 1;
        for (const auto& v : relevant_places({a, b})) prod *= hilbert_symbol_Q(a, b, v);
        CHECK(prod == 1);
    }
}

TEST_CASE("isotropy decisions")
{
    CHECK(is_isotropic_Q(DiagonalForm({q(1), q(-1)})));
    CHECK(!is_isotropic_Q(DiagonalForm({q(1), q(1), q(1)})));
    CHECK(!is_isotropic_Q(DiagonalForm({q(7)})));

    // explicit zero of <1,-2,-7,14>: (3,1,1,0)
    DiagonalForm f({q(1), q(-2), q(-7), q(14)});
    CHECK(evaluate(f, {q(3), q(1), q(1), q(0)}).is_zero());
    CHECK(is_isotropic_Q(f));

    // dim >= 5 goes through real indefiniteness
    CHECK(is_isotropic_Q(DiagonalForm({q(1), q(2), q(3), q(5), q(-7)})));
    CHECK(!is_isotropic_Q(DiagonalForm({q(1), q(2), q(3), q(5), q(7)})));
}

TEST_CASE("hilbert-isotropy consistency on quaternion norm forms")
{
    Rng rng(33);
    for (int k = 0; k < 80; ++k) {
        mpq_class a = rat(rng.element(Q(), 9, true));
        mpq_class b = rat(rng.element(Q(), 9, true));
        bool trivial = true;
        for (const auto& v : relevant_places({a, b}))
            if (hilbert_symbol_Q(a, b, v) == -1) trivial = false;
        DiagonalForm nf({q(1), FieldElement::from_rational(Q(), -a), FieldElement::from_rational(Q(), -b),
                         FieldElement::from_rational(Q(), a * b)});
        CHECK(is_isotropic_Q(nf) == trivial);
    }
}

TEST_CASE("isotropy witness search")
{
    SearchResult r = isotropy_witness_search(DiagonalForm({q(1), q(-1)}), 1);
    REQUIRE(r.status == SearchStatus::Found);
    CHECK(evaluate(DiagonalForm({q(1), q(-1)}), *r.vector).is_zero());

    CHECK(isotropy_witness_search(DiagonalForm({q(1), q(1), q(1)}), 5).status == SearchStatus::ProvablyAnisotropic);

    DiagonalForm f({q(1), q(-2), q(-7), q(14)});
    SearchResult s = isotropy_witness_search(f, 3);
    REQUIRE(s.status == SearchStatus::Found);
    CHECK(!is_zero_vector(*s.vector));
    CHECK(evaluate(f, *s.vector).is_zero());
    // frozen first hit of the deterministic order (height levels, then
    // lexicographic over [-h, h]^dim)
    std::vector<FieldElement> expect{q(-1), q(-2), q(-1), q(-1)};
    CHECK(*s.vector == expect);

    // every returned vector evaluates to exactly zero
    Rng rng(34);
    for (int k = 0; k < 40; ++k) {
        std::vector<FieldElement> cs;
        for (int d = 0; d < 3; ++d) cs.push_back(rng.element(Q(), 8, true));
        SearchResult rr = isotropy_witness_search(DiagonalForm(cs), 6);
        if (rr.status == SearchStatus::Found) CHECK(evaluate(DiagonalForm(cs), *rr.vector).is_zero());
    }
}
