#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "symlen/decompose.hpp"
#include "symlen/field.hpp"
#include "symlen/witness.hpp"

namespace symlen {

/// Degree-3 symbol algebra F<x,y : x^3 = alpha, y^3 = beta, yx = rho xy>.
struct SymbolAlgebra {
    FieldRef field;
    FieldElement alpha, beta, rho;

    SymbolAlgebra(FieldRef f, FieldElement a, FieldElement b, FieldElement r);
};

/// Element sum c_{ij} x^i y^j, coordinates indexed by (i, j) with
/// i = power of x (row), j = power of y (column).
class AlgebraElement {
public:
    explicit AlgebraElement(const FieldRef& f);

    const FieldElement& at(int i, int j) const { return c_[size_t(3 * i + j)]; }
    void set(int i, int j, FieldElement v) { c_[size_t(3 * i + j)] = std::move(v); }
    const FieldRef& field() const { return field_; }

    static AlgebraElement scalar(const FieldRef& f, const FieldElement& s);
    static AlgebraElement gen_x(const FieldRef& f);
    static AlgebraElement gen_y(const FieldRef& f);

    bool operator==(const AlgebraElement& o) const { return c_ == o.c_; }
    bool is_scalar() const;

    nlohmann::json to_json() const;  // 3x3 matrix of canonical strings
    static AlgebraElement from_json(const nlohmann::json& j, const FieldRef& f);

private:
    FieldRef field_;
    std::vector<FieldElement> c_;
};

AlgebraElement algebra_add(const AlgebraElement& u, const AlgebraElement& v);
AlgebraElement algebra_mul(const SymbolAlgebra& A, const AlgebraElement& u, const AlgebraElement& v);

FieldElement reduced_trace(const SymbolAlgebra& A, const AlgebraElement& u);
FieldElement reduced_norm(const SymbolAlgebra& A, const AlgebraElement& u);

struct T5WitnessReport {
    FieldElement delta;
    std::vector<std::pair<std::string, bool>> checks;  // norm, trace1, trace2, cube, ratio
};

/// Verifies the trace/norm/cube conditions for w = (a0 + b0 x + c0 x^2) z.
/// Throws CheckFailed naming the first failing condition.
T5WitnessReport verify_t5_witness(const SymbolAlgebra& A, const AlgebraElement& z,
                                  const std::array<FieldElement, 3>& coeffs, const FieldElement& gamma);

/// The five-class telescoping recombination. Sub-decompositions for each
/// difference come from the bundle and carry their own certificates.
CertifiedDecomposition t5_recombine(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma,
                                    int m, const WitnessBundle& bundle);

struct T5Instance {
    FieldElement alpha, beta, gamma;
    int m = 1;
    WitnessBundle bundle;
};

/// Degenerate constructed instance: z = x, gamma = delta = alpha, c1 = beta.
T5Instance make_degenerate_t5_instance(int m, const FieldRef& field, unsigned long long seed);

}  // namespace symlen
