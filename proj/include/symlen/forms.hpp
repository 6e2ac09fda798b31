#pragma once

#include <optional>
#include <vector>

#include "symlen/field.hpp"

namespace symlen {

/// <<a_1,...,a_n>>, the n-fold bilinear Pfister form <1,-a_1> x ... x <1,-a_n>.
class PfisterForm {
public:
    explicit PfisterForm(std::vector<FieldElement> slots);

    const std::vector<FieldElement>& slots() const { return slots_; }
    int rank() const { return int(slots_.size()); }
    long dimension() const { return 1L << slots_.size(); }
    const FieldRef& field() const { return slots_.front().field(); }

private:
    std::vector<FieldElement> slots_;
};

class DiagonalForm {
public:
    explicit DiagonalForm(std::vector<FieldElement> coeffs);

    const std::vector<FieldElement>& coeffs() const { return coeffs_; }
    int dimension() const { return int(coeffs_.size()); }
    const FieldRef& field() const { return coeffs_.front().field(); }

private:
    std::vector<FieldElement> coeffs_;
};

using FormVector = std::vector<FieldElement>;

bool is_zero_vector(const FormVector& v);

/// Diagonal coefficients of the tensor expansion, indexed by slot subsets in
/// bitmask order: coefficient k = prod_{i in k} (-a_{i+1}).
DiagonalForm expand(const PfisterForm& f);

/// sum c_i v_i^2.
FieldElement evaluate(const DiagonalForm& f, const FormVector& v);
FieldElement evaluate_pfister(const PfisterForm& f, const FormVector& v);

/// Checks -a_n = phi_{n-2}(t_{n-2}) a_{n-1} + ... + phi_1(t_1) a_2 - phi_1(t_0)
/// with phi_i = <<a_1,...,a_i>>, ts = [t_0, t_1, ..., t_{n-2}], t_0 in V_phi1.
bool verify_representation_t1(const std::vector<FieldElement>& alphas, const std::vector<FormVector>& ts);

/// Place of Q: a prime, or infinity when prime == 0.
struct Place {
    mpz_class prime;  // 0 encodes the real place

    static Place infinity() { return Place{0}; }
    static Place at(mpz_class p) { return Place{std::move(p)}; }
    bool is_infinity() const { return prime == 0; }
    std::string str() const { return is_infinity() ? "inf" : prime.get_str(); }
};

/// Quadratic Hilbert symbol (a,b)_v over Q, +1 or -1.
int hilbert_symbol_Q(const mpq_class& a, const mpq_class& b, const Place& v);

/// Places where (a,b)_v could be nontrivial: infinity, 2, odd primes
/// dividing a numerator or denominator.
std::vector<Place> relevant_places(const std::vector<mpq_class>& values);

/// Hasse-Minkowski isotropy decision for a rational diagonal form.
bool is_isotropic_Q(const DiagonalForm& f);

enum class SearchStatus { Found, NotFound, ProvablyAnisotropic };

struct SearchResult {
    SearchStatus status = SearchStatus::NotFound;
    std::optional<FormVector> vector;
};

/// Bounded search for a nonzero isotropy vector; over Q the decision oracle
/// is consulted first.
SearchResult isotropy_witness_search(const DiagonalForm& f, long height_bound);

/// Legendre symbol (a|p) for odd prime p.
int legendre(const mpz_class& a, const mpz_class& p);

}  // namespace symlen
