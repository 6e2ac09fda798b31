#include "symlen/forms.hpp"

#include <algorithm>
#include <set>

namespace symlen {

PfisterForm::PfisterForm(std::vector<FieldElement> slots) : slots_(std::move(slots))
{
    if (slots_.empty()) throw Error(Err::InvalidArgument, "Pfister form needs at least one slot");
    for (const auto& s : slots_) {
        if (s.is_zero()) throw Error(Err::InvalidArgument, "Pfister slots must be nonzero");
        if (!same_field(s.field(), slots_.front().field()))
            throw Error(Err::DescriptorMismatch, "Pfister slots live in different fields");
    }
}

DiagonalForm::DiagonalForm(std::vector<FieldElement> coeffs) : coeffs_(std::move(coeffs))
{
    if (coeffs_.empty()) throw Error(Err::InvalidArgument, "diagonal form needs coefficients");
    for (const auto& c : coeffs_) {
        if (c.is_zero()) throw Error(Err::InvalidArgument, "diagonal coefficients must be nonzero");
        if (!same_field(c.field(), coeffs_.front().field()))
            throw Error(Err::DescriptorMismatch, "coefficients live in different fields");
    }
}

bool is_zero_vector(const FormVector& v)
{
    return std::all_of(v.begin(), v.end(), [](const FieldElement& e) { return e.is_zero(); });
}

DiagonalForm expand(const PfisterForm& f)
{
    const FieldRef& F = f.field();
    long dim = f.dimension();
    std::vector<FieldElement> coeffs;
    coeffs.reserve(size_t(dim));
    for (long mask = 0; mask < dim; ++mask) {
        FieldElement c = FieldElement::one(F);
        for (int i = 0; i < f.rank(); ++i)
            if (mask & (1L << i)) c = c * (-f.slots()[size_t(i)]);
        coeffs.push_back(c);
    }
    return DiagonalForm(std::move(coeffs));
}

FieldElement evaluate(const DiagonalForm& f, const FormVector& v)
{
    if (int(v.size()) != f.dimension()) throw Error(Err::DimensionMismatch, "vector does not match form dimension");
    FieldElement acc = FieldElement::zero(f.field());
    for (size_t i = 0; i < v.size(); ++i) acc = acc + f.coeffs()[i] * v[i] * v[i];
    return acc;
}

FieldElement evaluate_pfister(const PfisterForm& f, const FormVector& v)
{
    return evaluate(expand(f), v);
}

bool verify_representation_t1(const std::vector<FieldElement>& alphas, const std::vector<FormVector>& ts)
{
    size_t n = alphas.size();
    if (n < 3) throw Error(Err::InvalidArgument, "representation check needs grade >= 3");
    if (ts.size() != n - 1) throw Error(Err::DimensionMismatch, "expected t_0..t_{n-2}");
    const FieldRef& F = alphas.front().field();

    // phi_i = <<alpha_1..alpha_i>>; ts[i] = t_i for i >= 1, ts[0] = t_0 in V_phi1
    std::vector<DiagonalForm> phis;
    for (size_t i = 1; i <= n - 2; ++i)
        phis.push_back(expand(PfisterForm(std::vector<FieldElement>(alphas.begin(), alphas.begin() + long(i)))));

    for (size_t i = 1; i <= n - 2; ++i)
        if (int(ts[i].size()) != phis[i - 1].dimension())
            throw Error(Err::DimensionMismatch, "t_" + std::to_string(i) + " has wrong dimension");
    if (ts[0].size() != 2) throw Error(Err::DimensionMismatch, "t_0 must live in V_phi1");

    FieldElement rhs = FieldElement::zero(F);
    for (size_t i = n - 2; i >= 1; --i) rhs = rhs + evaluate(phis[i - 1], ts[i]) * alphas[i];
    rhs = rhs - evaluate(phis[0], ts[0]);
    return rhs == -alphas[n - 1];
}

// ---- Hilbert symbols over Q ----

int legendre(const mpz_class& a, const mpz_class& p)
{
    mpz_class r = a % p;
    if (r < 0) r += p;
    if (r == 0) return 0;
    // Euler criterion
    mpz_class e = (p - 1) / 2, out;
    mpz_powm(out.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return out == 1 ? 1 : -1;
}

namespace {

// strip v-adic valuation: a = p^k u
long strip_valuation(mpz_class& u, const mpz_class& p)
{
    long k = 0;
    while (u % p == 0) {
        u /= p;
        ++k;
    }
    return k;
}

int epsilon_mod2(const mpz_class& u) { return mpz_class((u - 1) / 2).get_si() & 1; }
int omega_mod2(const mpz_class& u) { return mpz_class((u * u - 1) / 8).get_si() & 1; }

}  // namespace

int hilbert_symbol_Q(const mpq_class& a, const mpq_class& b, const Place& v)
{
    if (a == 0 || b == 0) throw Error(Err::InvalidArgument, "Hilbert symbol needs nonzero arguments");
    // scale by squares: n/d ~ n*d
    mpz_class x = a.get_num() * a.get_den();
    mpz_class y = b.get_num() * b.get_den();
    if (v.is_infinity()) return (x < 0 && y < 0) ? -1 : 1;

    const mpz_class& p = v.prime;
    long alpha = strip_valuation(x, p);
    long beta = strip_valuation(y, p);
    if (p == 2) {
        int e = (epsilon_mod2(x) * epsilon_mod2(y) + long(alpha) * omega_mod2(y) + long(beta) * omega_mod2(x)) & 1;
        return e ? -1 : 1;
    }
    int sign = 1;
    if ((alpha & 1) && (beta & 1) && epsilon_mod2(p)) sign = -sign;
    if (beta & 1) sign *= legendre(x, p);
    if (alpha & 1) sign *= legendre(y, p);
    return sign;
}

std::vector<Place> relevant_places(const std::vector<mpq_class>& values)
{
    std::set<mpz_class> primes;
    primes.insert(2);
    for (const auto& q : values) {
        for (mpz_class n : {mpz_class(abs(q.get_num())), mpz_class(q.get_den())}) {
            while (n % 2 == 0 && n != 0) n /= 2;
            for (mpz_class p = 3; p * p <= n; p += 2) {
                if (n % p == 0) {
                    primes.insert(p);
                    while (n % p == 0) n /= p;
                }
            }
            if (n > 2) primes.insert(n);
        }
    }
    std::vector<Place> out{Place::infinity()};
    for (const auto& p : primes) out.push_back(Place::at(p));
    return out;
}

namespace {

// square class test in Q_v
bool is_square_local(mpq_class q, const Place& v)
{
    if (v.is_infinity()) return q > 0;
    mpz_class u = q.get_num() * q.get_den();
    bool neg = u < 0;
    if (neg) u = -u;
    long k = strip_valuation(u, v.prime);
    if (k & 1) return false;
    if (v.prime == 2) {
        mpz_class r = (neg ? -u : u) % 8;
        if (r < 0) r += 8;
        return r == 1;
    }
    return legendre(neg ? -u : u, v.prime) == 1;
}

// Hasse invariant prod_{i<j} (a_i, a_j)_v
int hasse_invariant(const std::vector<mpq_class>& cs, const Place& v)
{
    int e = 1;
    for (size_t i = 0; i < cs.size(); ++i)
        for (size_t j = i + 1; j < cs.size(); ++j) e *= hilbert_symbol_Q(cs[i], cs[j], v);
    return e;
}

bool isotropic_local(const std::vector<mpq_class>& cs, const Place& v)
{
    size_t n = cs.size();
    if (v.is_infinity()) {
        bool pos = std::any_of(cs.begin(), cs.end(), [](const mpq_class& c) { return c > 0; });
        bool neg = std::any_of(cs.begin(), cs.end(), [](const mpq_class& c) { return c < 0; });
        return pos && neg;
    }
    mpq_class d = 1;
    for (const auto& c : cs) d *= c;
    if (n == 3) return hilbert_symbol_Q(-1, -d, v) == hasse_invariant(cs, v);
    if (n == 4) return !is_square_local(d, v) || hasse_invariant(cs, v) == hilbert_symbol_Q(-1, -1, v);
    throw Error(Err::InvalidArgument, "local test is for dimensions 3 and 4");
}

}  // namespace

bool is_isotropic_Q(const DiagonalForm& f)
{
    if (f.field()->kind() != FieldKind::Rationals) throw Error(Err::FieldNotRationals, "isotropy oracle is over Q");
    std::vector<mpq_class> cs;
    for (const auto& c : f.coeffs()) cs.push_back(c.rational());
    size_t n = cs.size();
    if (n == 1) return false;
    if (n == 2) return exact_sqrt_Q(-cs[0] * cs[1]).has_value();
    if (n >= 5) {
        // indefinite over R suffices in dimension >= 5
        bool pos = std::any_of(cs.begin(), cs.end(), [](const mpq_class& c) { return c > 0; });
        bool neg = std::any_of(cs.begin(), cs.end(), [](const mpq_class& c) { return c < 0; });
        return pos && neg;
    }
    for (const auto& v : relevant_places(cs))
        if (!isotropic_local(cs, v)) return false;
    return true;
}

SearchResult isotropy_witness_search(const DiagonalForm& f, long height_bound)
{
    if (f.field()->kind() == FieldKind::Rationals && !is_isotropic_Q(f))
        return {SearchStatus::ProvablyAnisotropic, std::nullopt};

    const FieldRef& F = f.field();
    size_t dim = size_t(f.dimension());

    if (F->kind() == FieldKind::Rationals) {
        // integer vectors, primitive, by height level then lexicographic
        std::vector<long> v(dim, 0);
        for (long h = 1; h <= height_bound; ++h) {
            std::fill(v.begin(), v.end(), -h);
            while (true) {
                long mx = 0;
                for (long c : v) mx = std::max(mx, std::abs(c));
                if (mx == h) {
                    FormVector w;
                    for (long c : v) w.push_back(FieldElement::from_int(F, c));
                    if (!is_zero_vector(w) && evaluate(f, w).is_zero()) return {SearchStatus::Found, w};
                }
                size_t k = dim;
                while (k > 0 && v[k - 1] == h) v[--k] = -h;
                if (k == 0) break;
                ++v[k - 1];
            }
        }
        return {SearchStatus::NotFound, std::nullopt};
    }

    // generic bounded enumeration (kept to small bounds by callers)
    std::vector<FieldElement> pool = enumerate_elements(F, height_bound);
    std::vector<size_t> idx(dim, 0);
    while (true) {
        FormVector w;
        for (size_t i = 0; i < dim; ++i) w.push_back(pool[idx[i]]);
        if (!is_zero_vector(w) && evaluate(f, w).is_zero()) return {SearchStatus::Found, w};
        size_t k = dim;
        while (k > 0 && idx[k - 1] + 1 == pool.size()) idx[--k] = 0;
        if (k == 0) break;
        ++idx[k - 1];
    }
    return {SearchStatus::NotFound, std::nullopt};
}

}  // namespace symlen
