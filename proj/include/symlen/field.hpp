#pragma once

#include <gmpxx.h>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symlen/errors.hpp"

namespace symlen {

enum class FieldKind { Rationals, Cyclotomic, PrimeField };

class FieldDescriptor;
using FieldRef = std::shared_ptr<const FieldDescriptor>;

/// Exact base field: Q, a cyclotomic extension Q(zeta_N) presented as
/// Q[z]/Phi_N with N in {4, 8, 16, 9}, or a prime field F_q.
class FieldDescriptor {
public:
    static FieldRef rationals();
    static FieldRef cyclotomic(long conductor);
    static FieldRef prime_field(long q);

    FieldKind kind() const { return kind_; }
    long characteristic() const { return characteristic_; }
    long conductor() const { return conductor_; }
    long degree() const { return degree_; }
    const std::vector<mpz_class>& modulus_polynomial() const { return modulus_poly_; }
    const std::vector<long>& available_roots_of_unity() const { return roots_; }
    bool has_root_of_unity(long r) const;

    bool operator==(const FieldDescriptor& o) const
    {
        return kind_ == o.kind_ && characteristic_ == o.characteristic_ && conductor_ == o.conductor_;
    }
    bool operator!=(const FieldDescriptor& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    FieldDescriptor() = default;

    FieldKind kind_ = FieldKind::Rationals;
    long characteristic_ = 0;
    long conductor_ = 0;  // cyclotomic only
    long degree_ = 1;
    std::vector<mpz_class> modulus_poly_;  // monic, ascending coefficients
    std::vector<long> roots_;              // orders r with mu_r contained, sorted
};

bool same_field(const FieldRef& a, const FieldRef& b);

/// Immutable exact element of a FieldDescriptor. Values are canonical on
/// construction: rationals in lowest terms with positive denominator,
/// cyclotomic coefficient vectors of length deg(Phi), prime-field residues
/// in [0, q).
class FieldElement {
public:
    FieldElement() = default;

    static FieldElement from_int(const FieldRef& f, long n);
    static FieldElement from_rational(const FieldRef& f, const mpq_class& q);
    static FieldElement from_coeffs(const FieldRef& f, std::vector<mpq_class> coeffs);
    static FieldElement zero(const FieldRef& f) { return from_int(f, 0); }
    static FieldElement one(const FieldRef& f) { return from_int(f, 1); }

    const FieldRef& field() const { return field_; }
    bool is_zero() const;
    bool is_one() const;

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator/(const FieldElement& o) const;  // DivisionByZero
    FieldElement operator-() const;
    FieldElement inv() const;  // DivisionByZero
    FieldElement pow(long e) const;

    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    /// Canonical serialization: "n/d" / "[c0,c1,...]@cyclo(N)" / "r mod q".
    std::string str() const;
    static FieldElement parse(const FieldRef& f, const std::string& s);

    /// Max absolute value of numerators and denominators across coordinates.
    mpz_class height() const;

    // Representation accessors (valid for the matching kind only).
    const mpq_class& rational() const;
    const std::vector<mpq_class>& coeffs() const;
    const mpz_class& residue() const;

private:
    FieldRef field_;
    mpq_class rat_;
    std::vector<mpq_class> vec_;
    mpz_class res_;
};

/// arith() mirrors the operator surface for callers that dispatch by name
/// (the CLI and the python bindings).
FieldElement arith(const std::string& op, const FieldElement& a, const FieldElement* b);

/// Primitive r-th root of unity, or RootNotAvailable when mu_r is not
/// contained in the field.
FieldElement primitive_root_of_unity(const FieldRef& f, long r);

/// Emits every element of height <= bound exactly once, in a fixed order
/// (by height level, then coordinate-lexicographic). Rationals and
/// cyclotomic fields only.
void enumerate_elements(const FieldRef& f, long bound, const std::function<void(const FieldElement&)>& fn);
std::vector<FieldElement> enumerate_elements(const FieldRef& f, long bound);

/// Square test with witness, over Q only: returns r with r^2 = q, r >= 0.
std::optional<mpq_class> exact_sqrt_Q(const mpq_class& q);

}  // namespace symlen
