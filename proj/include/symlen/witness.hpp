#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "symlen/forms.hpp"
#include "symlen/milnor.hpp"

namespace symlen {

enum class WitnessKind {
    NormRepresentation,
    T1Representation,
    T2Representation,
    SlotExchange,
    Linkage,
    SivatskiChain,
    RostChain,
    AlgebraElement,
    SubDecomposition,
    IsotropyVector,
};

const char* witness_kind_name(WitnessKind k);
WitnessKind witness_kind_from_name(const std::string& s);

struct WitnessRequest {
    WitnessKind kind;
    nlohmann::json payload;

    std::string key() const;
    nlohmann::json to_json() const;
};

// request constructors used by the engines
WitnessRequest req_norm_representation(const FieldElement& alpha, const FieldElement& beta);
WitnessRequest req_t1_representation(const std::vector<FieldElement>& alphas);
WitnessRequest req_isotropy_vector(const std::vector<FieldElement>& slots);
WitnessRequest req_t2_representation(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int i);
WitnessRequest req_slot_exchange(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int i);
WitnessRequest req_linkage(const std::vector<std::vector<FieldElement>>& symbols);
WitnessRequest req_sivatski_chain(const std::vector<std::vector<FieldElement>>& pairs);
WitnessRequest req_rost_chain(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma);
WitnessRequest req_algebra_element(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma);
WitnessRequest req_sub_decomposition(int index, const FieldElement& alpha, const FieldElement& beta,
                                     const FieldElement& gamma);

enum class PolicyMode { LookupOnly, BoundedSearch };

struct Policy {
    PolicyMode mode = PolicyMode::LookupOnly;
    long height = 0;
};

/// Immutable-after-filling store of verified witnesses. Every insert runs
/// the kind's verification predicate; resolve() falls back to bounded
/// search for the searchable kinds when the policy allows it.
class WitnessBundle {
public:
    WitnessBundle() = default;
    WitnessBundle(FieldRef field, Policy policy) : field_(std::move(field)), policy_(policy) {}

    const FieldRef& field() const { return field_; }
    const Policy& policy() const { return policy_; }

    void insert(const WitnessRequest& req, nlohmann::json data);
    nlohmann::json resolve(const WitnessRequest& req) const;  // MissingWitnessError
    std::optional<nlohmann::json> try_resolve(const WitnessRequest& req) const;

    nlohmann::json to_json() const;
    static WitnessBundle from_json(const nlohmann::json& j, const FieldRef& field);

private:
    FieldRef field_;
    Policy policy_;
    std::map<std::string, std::pair<WitnessRequest, nlohmann::json>> store_;
};

// typed data codecs
nlohmann::json norm_rep_data(const FieldElement& x, const FieldElement& y);
std::pair<FieldElement, FieldElement> norm_rep_from(const nlohmann::json& d, const FieldRef& f);
nlohmann::json vectors_data(const std::vector<FormVector>& vs);
std::vector<FormVector> vectors_from(const nlohmann::json& d, const FieldRef& f);
nlohmann::json vector_data(const FormVector& v);
FormVector vector_from(const nlohmann::json& d, const FieldRef& f);
nlohmann::json elems_data(const std::vector<FieldElement>& es);
std::vector<FieldElement> elems_from(const nlohmann::json& d, const FieldRef& f);

/// alpha_i = phi_1(t_1) beta_1 + ... + phi_i(t_i) beta_i with
/// phi_r = <<beta_1..beta_r, alpha_{i+1}..alpha_n>>.
bool verify_representation_t2(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas,
                              int i, const std::vector<FormVector>& ts);

/// Splits t along phi_j = phi_{j-1} ⊥ (-a_j) phi_{j-1} down to grade 1,
/// producing the representation witness for the instance [a_1..a_j, phi_j(t)].
std::vector<FormVector> representation_from_vector(const std::vector<FieldElement>& alphas, const FormVector& t);

/// Witness for the recursion target [alpha_1..alpha_{i-1}, phi_{i-1}(t)^{-1}]:
/// scales t to t' = t/phi(t) and splits. For i == 2 the result is the norm
/// pair (t'_0, t'_1).
std::vector<FormVector> derive_recursion_witness(const std::vector<FieldElement>& alphas, const FormVector& t);

enum class NormStatus { Found, NotFound, ProvablyUnsolvable };

struct NormSolution {
    NormStatus status = NormStatus::NotFound;
    mpq_class x, y;
};

/// Bounded search for beta = x^2 - alpha y^2 over Q, after the local
/// obstruction check. Searches y >= 0 in enumeration order, x >= 0.
NormSolution norm_equation_Q(const mpq_class& alpha, const mpq_class& beta, long height_bound);

/// Deterministic sampling helpers shared by the instance generators.
class Rng {
public:
    explicit Rng(unsigned long long seed) : eng_(seed) {}
    unsigned long long next() { return eng_(); }
    long uniform(long lo, long hi);  // inclusive
    mpq_class rational(long height, bool nonzero);
    FieldElement element(const FieldRef& f, long height, bool nonzero);

private:
    std::mt19937_64 eng_;
};

// ---- constructed instances (witnesses hold by construction) ----

struct T1Instance {
    Symbol symbol;  // at 2^{m+1}
    WitnessBundle bundle;
};

enum class T1Variant { Anisotropic, Isotropic };

T1Instance make_constructed_instance_t1(int n, int m, const FieldRef& field, unsigned long long seed,
                                        T1Variant variant = T1Variant::Anisotropic);

struct T2Instance {
    std::vector<FieldElement> alphas;
    std::vector<FieldElement> betas;
    int i = 1;
    int m = 1;
    WitnessBundle bundle;
};

T2Instance make_constructed_instance_t2_i1(int n, int m, const FieldRef& field, unsigned long long seed);
T2Instance make_constructed_instance_t2_n2i2(int m, const FieldRef& field, unsigned long long seed);

struct T3Instance {
    std::vector<std::vector<FieldElement>> symbols;  // three grade-n slot lists
    FieldElement a, b;
    std::vector<FieldElement> cs;
    int m = 1;
    WitnessBundle bundle;
};

T3Instance make_constructed_instance_t3(int m, const FieldRef& field, unsigned long long seed);

struct T4Instance {
    std::vector<std::vector<FieldElement>> pairs;  // four grade-2 slot lists
    nlohmann::json chain;                          // Sivatski chain rows
    int m = 1;
    WitnessBundle bundle;
};

T4Instance make_constructed_instance_t4(int m, const FieldRef& field, unsigned long long seed);

}  // namespace symlen
