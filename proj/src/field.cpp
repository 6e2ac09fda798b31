#include "symlen/field.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace symlen {

namespace {

bool is_prime_long(long n)
{
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<long> divisors_of(long n)
{
    std::vector<long> out;
    for (long d = 1; d <= n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

// ---- dense polynomial helpers over Q (ascending coefficients) ----

int poly_deg(const std::vector<mpq_class>& p)
{
    for (int i = int(p.size()) - 1; i >= 0; --i)
        if (p[size_t(i)] != 0) return i;
    return -1;
}

void poly_trim(std::vector<mpq_class>& p)
{
    while (!p.empty() && p.back() == 0) p.pop_back();
}

std::vector<mpq_class> poly_mul(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b)
{
    if (a.empty() || b.empty()) return {};
    std::vector<mpq_class> out(a.size() + b.size() - 1, mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

// a mod m, m monic
std::vector<mpq_class> poly_mod_monic(std::vector<mpq_class> a, const std::vector<mpz_class>& m)
{
    size_t d = m.size() - 1;
    for (size_t j = a.size(); j-- > d;) {
        if (a[j] == 0) continue;
        mpq_class c = a[j];
        a[j] = 0;
        for (size_t t = 0; t < d; ++t) a[j - d + t] -= c * mpq_class(m[t]);
    }
    a.resize(d, mpq_class(0));
    return a;
}

// quotient+remainder by a general nonzero divisor
void poly_divmod(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b,
                 std::vector<mpq_class>& q, std::vector<mpq_class>& r)
{
    int db = poly_deg(b);
    r = a;
    poly_trim(r);
    q.assign(r.size(), mpq_class(0));
    while (poly_deg(r) >= db) {
        int dr = poly_deg(r);
        mpq_class c = r[size_t(dr)] / b[size_t(db)];
        q[size_t(dr - db)] += c;
        for (int t = 0; t <= db; ++t) r[size_t(dr - db + t)] -= c * b[size_t(t)];
        poly_trim(r);
    }
    poly_trim(q);
}

// extended gcd: returns (g, u) with u*a = g mod m, g the monic gcd
void poly_egcd_mod(const std::vector<mpq_class>& a, const std::vector<mpq_class>& m,
                   std::vector<mpq_class>& g, std::vector<mpq_class>& u)
{
    std::vector<mpq_class> r0 = m, r1 = a, u0 = {}, u1 = {mpq_class(1)};
    poly_trim(r0);
    poly_trim(r1);
    while (poly_deg(r1) >= 0) {
        std::vector<mpq_class> q, r;
        poly_divmod(r0, r1, q, r);
        std::vector<mpq_class> qu = poly_mul(q, u1);
        std::vector<mpq_class> u2 = u0;
        if (u2.size() < qu.size()) u2.resize(qu.size(), mpq_class(0));
        for (size_t i = 0; i < qu.size(); ++i) u2[i] -= qu[i];
        poly_trim(u2);
        r0 = r1;
        u0 = u1;
        r1 = r;
        u1 = u2;
    }
    g = r0;
    u = u0;
    int dg = poly_deg(g);
    if (dg >= 0 && g[size_t(dg)] != 1) {
        mpq_class lead = g[size_t(dg)];
        for (auto& c : g) c /= lead;
        for (auto& c : u) c /= lead;
    }
}

}  // namespace

// ---- FieldDescriptor ----

FieldRef FieldDescriptor::rationals()
{
    static FieldRef q = [] {
        auto f = std::shared_ptr<FieldDescriptor>(new FieldDescriptor());
        f->kind_ = FieldKind::Rationals;
        f->roots_ = {1, 2};
        return FieldRef(f);
    }();
    return q;
}

FieldRef FieldDescriptor::cyclotomic(long conductor)
{
    static std::map<long, FieldRef> cache;
    auto hit = cache.find(conductor);
    if (hit != cache.end()) return hit->second;
    auto f = std::shared_ptr<FieldDescriptor>(new FieldDescriptor());
    f->kind_ = FieldKind::Cyclotomic;
    f->conductor_ = conductor;
    if (conductor == 4 || conductor == 8 || conductor == 16) {
        long d = conductor / 2;
        f->degree_ = d;
        f->modulus_poly_.assign(size_t(d) + 1, mpz_class(0));
        f->modulus_poly_[0] = 1;  // z^d + 1
        f->modulus_poly_[size_t(d)] = 1;
        f->roots_ = divisors_of(conductor);
    } else if (conductor == 9) {
        f->degree_ = 6;
        f->modulus_poly_.assign(7, mpz_class(0));
        f->modulus_poly_[0] = 1;  // z^6 + z^3 + 1
        f->modulus_poly_[3] = 1;
        f->modulus_poly_[6] = 1;
        f->roots_ = divisors_of(18);  // -zeta9 has order 18
    } else {
        throw Error(Err::InvalidArgument, "unsupported cyclotomic conductor " + std::to_string(conductor));
    }
    FieldRef ref(f);
    cache.emplace(conductor, ref);
    return ref;
}

FieldRef FieldDescriptor::prime_field(long q)
{
    if (!is_prime_long(q)) throw Error(Err::InvalidArgument, "characteristic must be prime");
    static std::map<long, FieldRef> cache;
    auto hit = cache.find(q);
    if (hit != cache.end()) return hit->second;
    auto f = std::shared_ptr<FieldDescriptor>(new FieldDescriptor());
    f->kind_ = FieldKind::PrimeField;
    f->characteristic_ = q;
    f->roots_ = divisors_of(q - 1);
    FieldRef ref(f);
    cache.emplace(q, ref);
    return ref;
}

bool FieldDescriptor::has_root_of_unity(long r) const
{
    return std::binary_search(roots_.begin(), roots_.end(), r);
}

std::string FieldDescriptor::to_string() const
{
    switch (kind_) {
        case FieldKind::Rationals: return "Q";
        case FieldKind::Cyclotomic: return "Q(zeta" + std::to_string(conductor_) + ")";
        case FieldKind::PrimeField: return "F" + std::to_string(characteristic_);
    }
    return "?";
}

bool same_field(const FieldRef& a, const FieldRef& b)
{
    return a && b && *a == *b;
}

// ---- FieldElement ----

FieldElement FieldElement::from_int(const FieldRef& f, long n)
{
    return from_rational(f, mpq_class(n));
}

FieldElement FieldElement::from_rational(const FieldRef& f, const mpq_class& q)
{
    FieldElement e;
    e.field_ = f;
    switch (f->kind()) {
        case FieldKind::Rationals:
            e.rat_ = q;
            e.rat_.canonicalize();
            break;
        case FieldKind::Cyclotomic: {
            e.vec_.assign(size_t(f->degree()), mpq_class(0));
            e.vec_[0] = q;
            e.vec_[0].canonicalize();
            break;
        }
        case FieldKind::PrimeField: {
            if (q.get_den() % f->characteristic() == 0)
                throw Error(Err::DivisionByZero, "denominator not invertible mod q");
            mpz_class p(f->characteristic());
            mpz_class num = q.get_num() % p, den = q.get_den() % p, inv;
            if (num < 0) num += p;
            mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
            e.res_ = (num * inv) % p;
            break;
        }
    }
    return e;
}

FieldElement FieldElement::from_coeffs(const FieldRef& f, std::vector<mpq_class> coeffs)
{
    if (f->kind() != FieldKind::Cyclotomic)
        throw Error(Err::InvalidArgument, "coefficient vectors are for cyclotomic fields");
    if (long(coeffs.size()) != f->degree())
        throw Error(Err::InvalidArgument, "coefficient vector has wrong length");
    FieldElement e;
    e.field_ = f;
    for (auto& c : coeffs) c.canonicalize();
    e.vec_ = std::move(coeffs);
    return e;
}

bool FieldElement::is_zero() const
{
    switch (field_->kind()) {
        case FieldKind::Rationals: return rat_ == 0;
        case FieldKind::Cyclotomic:
            return std::all_of(vec_.begin(), vec_.end(), [](const mpq_class& c) { return c == 0; });
        case FieldKind::PrimeField: return res_ == 0;
    }
    return false;
}

bool FieldElement::is_one() const
{
    switch (field_->kind()) {
        case FieldKind::Rationals: return rat_ == 1;
        case FieldKind::Cyclotomic: {
            if (vec_[0] != 1) return false;
            for (size_t i = 1; i < vec_.size(); ++i)
                if (vec_[i] != 0) return false;
            return true;
        }
        case FieldKind::PrimeField: return res_ == 1;
    }
    return false;
}

namespace {
void require_same(const FieldElement& a, const FieldElement& b)
{
    if (!same_field(a.field(), b.field()))
        throw Error(Err::DescriptorMismatch, "operands live in different fields");
}
}  // namespace

FieldElement FieldElement::operator+(const FieldElement& o) const
{
    require_same(*this, o);
    FieldElement e = *this;
    switch (field_->kind()) {
        case FieldKind::Rationals: e.rat_ += o.rat_; break;
        case FieldKind::Cyclotomic:
            for (size_t i = 0; i < vec_.size(); ++i) e.vec_[i] += o.vec_[i];
            break;
        case FieldKind::PrimeField: e.res_ = (res_ + o.res_) % field_->characteristic(); break;
    }
    return e;
}

FieldElement FieldElement::operator-(const FieldElement& o) const { return *this + (-o); }

FieldElement FieldElement::operator-() const
{
    FieldElement e = *this;
    switch (field_->kind()) {
        case FieldKind::Rationals: e.rat_ = -rat_; break;
        case FieldKind::Cyclotomic:
            for (auto& c : e.vec_) c = -c;
            break;
        case FieldKind::PrimeField:
            e.res_ = res_ == 0 ? mpz_class(0) : mpz_class(field_->characteristic() - res_);
            break;
    }
    return e;
}

FieldElement FieldElement::operator*(const FieldElement& o) const
{
    require_same(*this, o);
    FieldElement e = *this;
    switch (field_->kind()) {
        case FieldKind::Rationals: e.rat_ *= o.rat_; break;
        case FieldKind::Cyclotomic: {
            auto prod = poly_mul(vec_, o.vec_);
            e.vec_ = poly_mod_monic(std::move(prod), field_->modulus_polynomial());
            e.vec_.resize(size_t(field_->degree()), mpq_class(0));
            break;
        }
        case FieldKind::PrimeField: e.res_ = (res_ * o.res_) % field_->characteristic(); break;
    }
    return e;
}

FieldElement FieldElement::inv() const
{
    if (is_zero()) throw Error(Err::DivisionByZero, "inverse of zero");
    FieldElement e = *this;
    switch (field_->kind()) {
        case FieldKind::Rationals: e.rat_ = 1 / rat_; break;
        case FieldKind::Cyclotomic: {
            std::vector<mpq_class> modq(field_->modulus_polynomial().size());
            for (size_t i = 0; i < modq.size(); ++i) modq[i] = mpq_class(field_->modulus_polynomial()[i]);
            std::vector<mpq_class> g, u;
            poly_egcd_mod(vec_, modq, g, u);
            // Phi is irreducible, so gcd with any nonzero element is 1
            u.resize(size_t(field_->degree()), mpq_class(0));
            e.vec_ = poly_mod_monic(std::move(u), field_->modulus_polynomial());
            e.vec_.resize(size_t(field_->degree()), mpq_class(0));
            break;
        }
        case FieldKind::PrimeField: {
            mpz_class p(field_->characteristic());
            mpz_invert(e.res_.get_mpz_t(), res_.get_mpz_t(), p.get_mpz_t());
            break;
        }
    }
    return e;
}

FieldElement FieldElement::operator/(const FieldElement& o) const { return *this * o.inv(); }

FieldElement FieldElement::pow(long n) const
{
    if (n < 0) return inv().pow(-n);
    FieldElement acc = FieldElement::one(field_), base = *this;
    while (n > 0) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

bool FieldElement::operator==(const FieldElement& o) const
{
    if (!same_field(field_, o.field_)) return false;
    switch (field_->kind()) {
        case FieldKind::Rationals: return rat_ == o.rat_;
        case FieldKind::Cyclotomic: return vec_ == o.vec_;
        case FieldKind::PrimeField: return res_ == o.res_;
    }
    return false;
}

std::string FieldElement::str() const
{
    std::ostringstream os;
    switch (field_->kind()) {
        case FieldKind::Rationals:
            os << rat_.get_num().get_str();
            if (rat_.get_den() != 1) os << "/" << rat_.get_den().get_str();
            break;
        case FieldKind::Cyclotomic: {
            os << "[";
            for (size_t i = 0; i < vec_.size(); ++i) {
                if (i) os << ",";
                os << vec_[i].get_num().get_str();
                if (vec_[i].get_den() != 1) os << "/" << vec_[i].get_den().get_str();
            }
            os << "]@cyclo(" << field_->conductor() << ")";
            break;
        }
        case FieldKind::PrimeField:
            os << res_.get_str() << " mod " << field_->characteristic();
            break;
    }
    return os.str();
}

FieldElement FieldElement::parse(const FieldRef& f, const std::string& s)
{
    try {
        switch (f->kind()) {
            case FieldKind::Rationals: {
                mpq_class q(s);
                q.canonicalize();
                return from_rational(f, q);
            }
            case FieldKind::Cyclotomic: {
                auto close = s.find(']');
                if (s.empty() || s[0] != '[' || close == std::string::npos)
                    throw Error(Err::ParseError, "expected [c0,...]@cyclo(N): " + s);
                std::string tail = s.substr(close + 1);
                std::string want = "@cyclo(" + std::to_string(f->conductor()) + ")";
                if (tail != want) throw Error(Err::ParseError, "field tag mismatch: " + s);
                std::vector<mpq_class> coeffs;
                std::string body = s.substr(1, close - 1);
                std::istringstream is(body);
                std::string tok;
                while (std::getline(is, tok, ',')) {
                    mpq_class q(tok);
                    q.canonicalize();
                    coeffs.push_back(q);
                }
                if (long(coeffs.size()) != f->degree())
                    throw Error(Err::ParseError, "wrong coordinate count: " + s);
                return from_coeffs(f, std::move(coeffs));
            }
            case FieldKind::PrimeField: {
                auto pos = s.find(" mod ");
                if (pos == std::string::npos) throw Error(Err::ParseError, "expected 'r mod q': " + s);
                if (std::stol(s.substr(pos + 5)) != f->characteristic())
                    throw Error(Err::ParseError, "characteristic mismatch: " + s);
                return from_rational(f, mpq_class(mpz_class(s.substr(0, pos))));
            }
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(Err::ParseError, "bad element literal: " + s);
    }
    throw Error(Err::ParseError, s);
}

mpz_class FieldElement::height() const
{
    auto rat_height = [](const mpq_class& q) {
        mpz_class n = abs(q.get_num()), d = q.get_den();
        return n > d ? n : d;
    };
    switch (field_->kind()) {
        case FieldKind::Rationals: return rat_height(rat_);
        case FieldKind::Cyclotomic: {
            mpz_class h = 0;
            for (const auto& c : vec_) h = std::max(h, rat_height(c));
            return h;
        }
        case FieldKind::PrimeField: return res_;
    }
    return 0;
}

const mpq_class& FieldElement::rational() const
{
    if (field_->kind() != FieldKind::Rationals) throw Error(Err::FieldNotRationals, "rational() on " + field_->to_string());
    return rat_;
}

const std::vector<mpq_class>& FieldElement::coeffs() const
{
    if (field_->kind() != FieldKind::Cyclotomic) throw Error(Err::InvalidArgument, "coeffs() on " + field_->to_string());
    return vec_;
}

const mpz_class& FieldElement::residue() const
{
    if (field_->kind() != FieldKind::PrimeField) throw Error(Err::InvalidArgument, "residue() on " + field_->to_string());
    return res_;
}

FieldElement arith(const std::string& op, const FieldElement& a, const FieldElement* b)
{
    auto need_b = [&]() -> const FieldElement& {
        if (!b) throw Error(Err::InvalidArgument, "binary op '" + op + "' needs two operands");
        return *b;
    };
    if (op == "add") return a + need_b();
    if (op == "sub") return a - need_b();
    if (op == "mul") return a * need_b();
    if (op == "div") return a / need_b();
    if (op == "neg") return -a;
    if (op == "inv") return a.inv();
    throw Error(Err::InvalidArgument, "unknown op '" + op + "'");
}

FieldElement primitive_root_of_unity(const FieldRef& f, long r)
{
    if (r < 1 || !f->has_root_of_unity(r))
        throw Error(Err::RootNotAvailable, "mu_" + std::to_string(r) + " not contained in " + f->to_string());
    switch (f->kind()) {
        case FieldKind::Rationals:
            return FieldElement::from_int(f, r == 1 ? 1 : -1);
        case FieldKind::Cyclotomic: {
            std::vector<mpq_class> z(size_t(f->degree()), mpq_class(0));
            z[1] = 1;
            FieldElement gen = FieldElement::from_coeffs(f, std::move(z));
            long order = f->conductor();
            if (f->conductor() == 9) {
                gen = -gen;  // -zeta9 generates mu_18
                order = 18;
            }
            return gen.pow(order / r);
        }
        case FieldKind::PrimeField: {
            for (long c = 1; c < f->characteristic(); ++c) {
                FieldElement e = FieldElement::from_int(f, c);
                if (!e.pow(r).is_one()) continue;
                bool primitive = true;
                for (long s = 1; s < r; ++s)
                    if (e.pow(s).is_one()) {
                        primitive = false;
                        break;
                    }
                if (primitive) return e;
            }
            throw Error(Err::RootNotAvailable, "no element of order " + std::to_string(r));
        }
    }
    throw Error(Err::RootNotAvailable, "unreachable");
}

namespace {

// Reduced fractions with max(|num|, den) == h, ascending by (den, num).
void rationals_at_height(long h, const std::function<void(const mpq_class&)>& fn)
{
    for (long d = 1; d <= h; ++d) {
        for (long n = -h; n <= h; ++n) {
            if (std::max(std::abs(n), d) != h) continue;
            if (mpz_class(gcd(mpz_class(n), mpz_class(d))) != 1 && !(n == 0 && d == 1)) continue;
            if (n == 0 && d != 1) continue;
            fn(mpq_class(mpz_class(n), mpz_class(d)));
        }
    }
}

}  // namespace

void enumerate_elements(const FieldRef& f, long bound, const std::function<void(const FieldElement&)>& fn)
{
    if (bound < 1) throw Error(Err::InvalidArgument, "height bound must be positive");
    switch (f->kind()) {
        case FieldKind::Rationals: {
            for (long h = 1; h <= bound; ++h)
                rationals_at_height(h, [&](const mpq_class& q) { fn(FieldElement::from_rational(f, q)); });
            return;
        }
        case FieldKind::Cyclotomic: {
            // coordinate tuples of height exactly h, lexicographic in coordinates
            std::vector<mpq_class> pool;
            for (long h = 1; h <= bound; ++h)
                rationals_at_height(h, [&](const mpq_class& q) { pool.push_back(q); });
            size_t d = size_t(f->degree());
            std::vector<size_t> idx(d, 0);
            auto height_of = [&](const std::vector<size_t>& v) {
                mpz_class h = 0;
                for (size_t i = 0; i < d; ++i) {
                    mpz_class n = abs(pool[v[i]].get_num()), den = pool[v[i]].get_den();
                    h = std::max(h, std::max(n, den));
                }
                return h;
            };
            for (long h = 1; h <= bound; ++h) {
                idx.assign(d, 0);
                while (true) {
                    if (height_of(idx) == h) {
                        std::vector<mpq_class> coeffs(d);
                        for (size_t i = 0; i < d; ++i) coeffs[i] = pool[idx[i]];
                        fn(FieldElement::from_coeffs(f, std::move(coeffs)));
                    }
                    size_t k = d;
                    while (k > 0 && idx[k - 1] + 1 == pool.size()) idx[--k] = 0;
                    if (k == 0) break;
                    ++idx[k - 1];
                }
            }
            return;
        }
        case FieldKind::PrimeField:
            throw Error(Err::InvalidArgument, "enumeration is for Q and cyclotomic fields");
    }
}

std::vector<FieldElement> enumerate_elements(const FieldRef& f, long bound)
{
    std::vector<FieldElement> out;
    enumerate_elements(f, bound, [&](const FieldElement& e) { out.push_back(e); });
    return out;
}

std::optional<mpq_class> exact_sqrt_Q(const mpq_class& q)
{
    if (q < 0) return std::nullopt;
    mpz_class n = q.get_num(), d = q.get_den(), rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    if (rn * rn != n || rd * rd != d) return std::nullopt;
    return mpq_class(rn, rd);
}

}  // namespace symlen
