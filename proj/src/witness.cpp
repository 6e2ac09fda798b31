#include "symlen/witness.hpp"

#include <algorithm>

namespace symlen {

using nlohmann::json;

const char* witness_kind_name(WitnessKind k)
{
    switch (k) {
        case WitnessKind::NormRepresentation: return "NormRepresentation";
        case WitnessKind::T1Representation: return "T1Representation";
        case WitnessKind::T2Representation: return "T2Representation";
        case WitnessKind::SlotExchange: return "SlotExchange";
        case WitnessKind::Linkage: return "Linkage";
        case WitnessKind::SivatskiChain: return "SivatskiChain";
        case WitnessKind::RostChain: return "RostChain";
        case WitnessKind::AlgebraElement: return "AlgebraElement";
        case WitnessKind::SubDecomposition: return "SubDecomposition";
        case WitnessKind::IsotropyVector: return "IsotropyVector";
    }
    return "?";
}

WitnessKind witness_kind_from_name(const std::string& s)
{
    for (WitnessKind k : {WitnessKind::NormRepresentation, WitnessKind::T1Representation, WitnessKind::T2Representation,
                          WitnessKind::SlotExchange, WitnessKind::Linkage, WitnessKind::SivatskiChain,
                          WitnessKind::RostChain, WitnessKind::AlgebraElement, WitnessKind::SubDecomposition,
                          WitnessKind::IsotropyVector})
        if (s == witness_kind_name(k)) return k;
    throw Error(Err::ParseError, "unknown witness kind '" + s + "'");
}

std::string WitnessRequest::key() const
{
    return std::string(witness_kind_name(kind)) + "|" + payload.dump();
}

nlohmann::json WitnessRequest::to_json() const
{
    return json{{"kind", witness_kind_name(kind)}, {"payload", payload}};
}

namespace {

json elem_list(const std::vector<FieldElement>& es)
{
    json out = json::array();
    for (const auto& e : es) out.push_back(e.str());
    return out;
}

}  // namespace

WitnessRequest req_norm_representation(const FieldElement& alpha, const FieldElement& beta)
{
    return {WitnessKind::NormRepresentation, json{{"alpha", alpha.str()}, {"beta", beta.str()}}};
}

WitnessRequest req_t1_representation(const std::vector<FieldElement>& alphas)
{
    return {WitnessKind::T1Representation, json{{"alphas", elem_list(alphas)}}};
}

WitnessRequest req_isotropy_vector(const std::vector<FieldElement>& slots)
{
    return {WitnessKind::IsotropyVector, json{{"slots", elem_list(slots)}}};
}

WitnessRequest req_t2_representation(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int i)
{
    return {WitnessKind::T2Representation, json{{"alphas", elem_list(alphas)}, {"betas", elem_list(betas)}, {"i", i}}};
}

WitnessRequest req_slot_exchange(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas, int i)
{
    return {WitnessKind::SlotExchange, json{{"alphas", elem_list(alphas)}, {"betas", elem_list(betas)}, {"i", i}}};
}

WitnessRequest req_linkage(const std::vector<std::vector<FieldElement>>& symbols)
{
    json sym = json::array();
    for (const auto& s : symbols) sym.push_back(elem_list(s));
    return {WitnessKind::Linkage, json{{"symbols", sym}}};
}

WitnessRequest req_sivatski_chain(const std::vector<std::vector<FieldElement>>& pairs)
{
    json p = json::array();
    for (const auto& s : pairs) p.push_back(elem_list(s));
    return {WitnessKind::SivatskiChain, json{{"pairs", p}}};
}

WitnessRequest req_rost_chain(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma)
{
    return {WitnessKind::RostChain, json{{"alpha", alpha.str()}, {"beta", beta.str()}, {"gamma", gamma.str()}}};
}

WitnessRequest req_algebra_element(const FieldElement& alpha, const FieldElement& beta, const FieldElement& gamma)
{
    return {WitnessKind::AlgebraElement, json{{"alpha", alpha.str()}, {"beta", beta.str()}, {"gamma", gamma.str()}}};
}

WitnessRequest req_sub_decomposition(int index, const FieldElement& alpha, const FieldElement& beta,
                                     const FieldElement& gamma)
{
    return {WitnessKind::SubDecomposition,
            json{{"index", index}, {"alpha", alpha.str()}, {"beta", beta.str()}, {"gamma", gamma.str()}}};
}

// ---- data codecs ----

nlohmann::json norm_rep_data(const FieldElement& x, const FieldElement& y)
{
    return json{{"x", x.str()}, {"y", y.str()}};
}

std::pair<FieldElement, FieldElement> norm_rep_from(const nlohmann::json& d, const FieldRef& f)
{
    return {FieldElement::parse(f, d.at("x").get<std::string>()), FieldElement::parse(f, d.at("y").get<std::string>())};
}

nlohmann::json vector_data(const FormVector& v)
{
    json out = json::array();
    for (const auto& e : v) out.push_back(e.str());
    return out;
}

FormVector vector_from(const nlohmann::json& d, const FieldRef& f)
{
    FormVector v;
    for (const auto& e : d) v.push_back(FieldElement::parse(f, e.get<std::string>()));
    return v;
}

nlohmann::json vectors_data(const std::vector<FormVector>& vs)
{
    json out = json::array();
    for (const auto& v : vs) out.push_back(vector_data(v));
    return json{{"vectors", out}};
}

std::vector<FormVector> vectors_from(const nlohmann::json& d, const FieldRef& f)
{
    std::vector<FormVector> vs;
    for (const auto& v : d.at("vectors")) vs.push_back(vector_from(v, f));
    return vs;
}

nlohmann::json elems_data(const std::vector<FieldElement>& es)
{
    return elem_list(es);
}

std::vector<FieldElement> elems_from(const nlohmann::json& d, const FieldRef& f)
{
    std::vector<FieldElement> es;
    for (const auto& e : d) es.push_back(FieldElement::parse(f, e.get<std::string>()));
    return es;
}

// ---- verification predicates ----

bool verify_representation_t2(const std::vector<FieldElement>& alphas, const std::vector<FieldElement>& betas,
                              int i, const std::vector<FormVector>& ts)
{
    int n = int(alphas.size());
    if (i < 1 || i > n || int(betas.size()) != i) throw Error(Err::DimensionMismatch, "bad (n, i) shape");
    if (int(ts.size()) != i) throw Error(Err::DimensionMismatch, "expected t_1..t_i");
    const FieldRef& F = alphas.front().field();
    FieldElement acc = FieldElement::zero(F);
    for (int r = 1; r <= i; ++r) {
        std::vector<FieldElement> slots(betas.begin(), betas.begin() + r);
        slots.insert(slots.end(), alphas.begin() + i, alphas.end());
        DiagonalForm phi = expand(PfisterForm(slots));
        if (int(ts[size_t(r - 1)].size()) != phi.dimension())
            throw Error(Err::DimensionMismatch, "t_" + std::to_string(r) + " has wrong dimension");
        acc = acc + evaluate(phi, ts[size_t(r - 1)]) * betas[size_t(r - 1)];
    }
    return acc == alphas[size_t(i - 1)];
}

namespace {

void verify_witness(const FieldRef& f, const WitnessRequest& req, const json& data)
{
    switch (req.kind) {
        case WitnessKind::NormRepresentation: {
            FieldElement alpha = FieldElement::parse(f, req.payload.at("alpha").get<std::string>());
            FieldElement beta = FieldElement::parse(f, req.payload.at("beta").get<std::string>());
            auto [x, y] = norm_rep_from(data, f);
            if (x.is_zero() && y.is_zero()) throw Error(Err::WitnessInvalid, "norm witness (0,0)");
            if (!(beta == x * x - alpha * y * y)) throw Error(Err::WitnessInvalid, "beta != x^2 - alpha y^2");
            return;
        }
        case WitnessKind::T1Representation: {
            auto alphas = elems_from(req.payload.at("alphas"), f);
            auto ts = vectors_from(data, f);
            if (!verify_representation_t1(alphas, ts)) throw Error(Err::WitnessInvalid, "t1 representation identity fails");
            return;
        }
        case WitnessKind::IsotropyVector: {
            auto slots = elems_from(req.payload.at("slots"), f);
            auto v = vector_from(data.at("vector"), f);
            if (is_zero_vector(v)) throw Error(Err::WitnessInvalid, "isotropy vector is zero");
            if (!evaluate(expand(PfisterForm(slots)), v).is_zero())
                throw Error(Err::WitnessInvalid, "vector does not evaluate to zero");
            return;
        }
        case WitnessKind::T2Representation: {
            auto alphas = elems_from(req.payload.at("alphas"), f);
            auto betas = elems_from(req.payload.at("betas"), f);
            int i = req.payload.at("i").get<int>();
            auto ts = vectors_from(data, f);
            if (!verify_representation_t2(alphas, betas, i, ts))
                throw Error(Err::WitnessInvalid, "t2 representation identity fails");
            return;
        }
        case WitnessKind::SlotExchange: {
            int i = req.payload.at("i").get<int>();
            auto deltas = elems_from(data.at("deltas"), f);
            if (int(deltas.size()) != i - 1) throw Error(Err::WitnessInvalid, "expected i-1 deltas");
            for (const auto& d : deltas)
                if (d.is_zero()) throw Error(Err::WitnessInvalid, "zero delta");
            return;
        }
        case WitnessKind::Linkage: {
            auto syms = req.payload.at("symbols");
            size_t n = syms.at(0).size();
            FieldElement a = FieldElement::parse(f, data.at("a").get<std::string>());
            FieldElement b = FieldElement::parse(f, data.at("b").get<std::string>());
            auto cs = elems_from(data.at("cs"), f);
            if (a.is_zero() || b.is_zero()) throw Error(Err::WitnessInvalid, "zero linkage slot");
            if (cs.size() != n - 1) throw Error(Err::WitnessInvalid, "expected n-1 shared slots");
            for (const auto& c : cs)
                if (c.is_zero()) throw Error(Err::WitnessInvalid, "zero linkage slot");
            return;
        }
        case WitnessKind::SivatskiChain: {
            auto rows = data.at("rows");
            if (rows.size() != 3) throw Error(Err::WitnessInvalid, "chain needs three rows");
            for (const auto& row : rows) {
                for (const char* k : {"a", "b", "c", "d"})
                    if (FieldElement::parse(f, row.at(k).get<std::string>()).is_zero())
                        throw Error(Err::WitnessInvalid, "zero chain entry");
                auto t = vector_from(row.at("t"), f);
                if (t.size() != 2 || is_zero_vector(t)) throw Error(Err::WitnessInvalid, "chain vector must be a nonzero pair");
            }
            return;
        }
        case WitnessKind::RostChain: {
            for (const char* k : {"c1", "c2", "c3"})
                if (FieldElement::parse(f, data.at(k).get<std::string>()).is_zero())
                    throw Error(Err::WitnessInvalid, "zero chain slot");
            return;
        }
        case WitnessKind::AlgebraElement: {
            const auto& z = data.at("z");
            bool ok = z.size() == 3 && z.at(0).size() == 3 && z.at(1).size() == 3 && z.at(2).size() == 3;
            if (!ok || data.at("coeffs").size() != 3)
                throw Error(Err::WitnessInvalid, "algebra element needs a 3x3 matrix and 3 coefficients");
            return;
        }
        case WitnessKind::SubDecomposition: {
            Certificate cert = certificate_from_json(data.at("certificate"));
            CheckResult r = check_certificate(cert);
            if (!r.valid) throw Error(Err::WitnessInvalid, "sub-decomposition certificate invalid: " + r.reason);
            return;
        }
    }
}

}  // namespace

void WitnessBundle::insert(const WitnessRequest& req, nlohmann::json data)
{
    verify_witness(field_, req, data);
    auto key = req.key();
    auto it = store_.find(key);
    if (it != store_.end()) {
        if (it->second.second != data) throw Error(Err::WitnessInvalid, "conflicting witness for " + key);
        return;
    }
    store_.emplace(key, std::make_pair(req, std::move(data)));
}

nlohmann::json WitnessBundle::resolve(const WitnessRequest& req) const
{
    auto it = store_.find(req.key());
    if (it != store_.end()) return it->second.second;

    if (policy_.mode == PolicyMode::BoundedSearch) {
        if (req.kind == WitnessKind::NormRepresentation && field_->kind() == FieldKind::Rationals) {
            FieldElement alpha = FieldElement::parse(field_, req.payload.at("alpha").get<std::string>());
            FieldElement beta = FieldElement::parse(field_, req.payload.at("beta").get<std::string>());
            NormSolution sol = norm_equation_Q(alpha.rational(), beta.rational(), policy_.height);
            if (sol.status == NormStatus::Found)
                return norm_rep_data(FieldElement::from_rational(field_, sol.x),
                                     FieldElement::from_rational(field_, sol.y));
        } else if (req.kind == WitnessKind::IsotropyVector) {
            auto slots = elems_from(req.payload.at("slots"), field_);
            SearchResult r = isotropy_witness_search(expand(PfisterForm(slots)), policy_.height);
            if (r.status == SearchStatus::Found) return json{{"vector", vector_data(*r.vector)}};
        }
    }
    throw MissingWitnessError(req.to_json().dump());
}

std::optional<nlohmann::json> WitnessBundle::try_resolve(const WitnessRequest& req) const
{
    try {
        return resolve(req);
    } catch (const MissingWitnessError&) {
        return std::nullopt;
    }
}

nlohmann::json WitnessBundle::to_json() const
{
    json ws = json::array();
    for (const auto& [key, entry] : store_)
        ws.push_back(json{{"kind", witness_kind_name(entry.first.kind)}, {"payload", entry.first.payload},
                          {"data", entry.second}});
    json policy{{"mode", policy_.mode == PolicyMode::LookupOnly ? "lookup-only" : "bounded-search"}};
    if (policy_.mode == PolicyMode::BoundedSearch) policy["height"] = policy_.height;
    return json{{"witnesses", ws}, {"policy", policy}};
}

WitnessBundle WitnessBundle::from_json(const nlohmann::json& j, const FieldRef& field)
{
    Policy pol;
    std::string mode = j.at("policy").at("mode").get<std::string>();
    if (mode == "bounded-search") {
        pol.mode = PolicyMode::BoundedSearch;
        pol.height = j.at("policy").at("height").get<long>();
    } else if (mode != "lookup-only") {
        throw Error(Err::ParseError, "unknown policy mode '" + mode + "'");
    }
    WitnessBundle b(field, pol);
    for (const auto& w : j.at("witnesses")) {
        WitnessRequest req{witness_kind_from_name(w.at("kind").get<std::string>()), w.at("payload")};
        b.insert(req, w.at("data"));
    }
    return b;
}

// ---- representation derivations ----

std::vector<FormVector> representation_from_vector(const std::vector<FieldElement>& alphas, const FormVector& t)
{
    size_t j = alphas.size();
    if (t.size() != (size_t(1) << j)) throw Error(Err::DimensionMismatch, "vector does not match <<alphas>>");
    std::vector<FormVector> ts(j);
    FormVector cur = t;
    for (size_t level = j; level >= 2; --level) {
        size_t half = size_t(1) << (level - 1);
        ts[level - 1] = FormVector(cur.begin() + long(half), cur.end());
        cur.resize(half);
    }
    ts[0] = cur;
    return ts;
}

std::vector<FormVector> derive_recursion_witness(const std::vector<FieldElement>& alphas, const FormVector& t)
{
    if (alphas.size() < 2) throw Error(Err::InvalidArgument, "recursion witness needs grade >= 2");
    if (is_zero_vector(t)) throw Error(Err::ZeroVector, "recursion witness needs t != 0");
    std::vector<FieldElement> prefix(alphas.begin(), alphas.end() - 1);
    DiagonalForm phi = expand(PfisterForm(prefix));
    FieldElement v = evaluate(phi, t);
    if (v.is_zero()) throw Error(Err::WitnessInvalid, "phi(t) = 0, slot value undefined");
    FormVector scaled;
    scaled.reserve(t.size());
    for (const auto& c : t) scaled.push_back(c / v);
    return representation_from_vector(prefix, scaled);
}

// ---- norm equation over Q ----

NormSolution norm_equation_Q(const mpq_class& alpha, const mpq_class& beta, long height_bound)
{
    if (alpha == 0 || beta == 0) throw Error(Err::InvalidArgument, "norm equation needs nonzero alpha, beta");
    for (const auto& v : relevant_places({alpha, beta}))
        if (hilbert_symbol_Q(alpha, beta, v) == -1) return {NormStatus::ProvablyUnsolvable, 0, 0};

    NormSolution out;
    FieldRef Q = FieldDescriptor::rationals();
    bool found = false;
    enumerate_elements(Q, height_bound, [&](const FieldElement& ye) {
        if (found) return;
        const mpq_class& y = ye.rational();
        if (y < 0) return;
        mpq_class s = beta + alpha * y * y;
        auto x = exact_sqrt_Q(s);
        if (x) {
            out = {NormStatus::Found, *x, y};
            found = true;
        }
    });
    if (!found) out.status = NormStatus::NotFound;
    return out;
}

// ---- sampling ----

long Rng::uniform(long lo, long hi)
{
    return lo + long(next() % (unsigned long long)(hi - lo + 1));
}

mpq_class Rng::rational(long height, bool nonzero)
{
    for (int tries = 0; tries < 1000; ++tries) {
        long num = uniform(-height, height);
        long den = uniform(1, height);
        mpq_class q(num, den);
        q.canonicalize();
        if (!nonzero || q != 0) return q;
    }
    throw Error(Err::DegenerateSample, "rational sampling failed");
}

FieldElement Rng::element(const FieldRef& f, long height, bool nonzero)
{
    switch (f->kind()) {
        case FieldKind::Rationals:
            return FieldElement::from_rational(f, rational(height, nonzero));
        case FieldKind::Cyclotomic: {
            long h = std::min<long>(height, 2);
            for (int tries = 0; tries < 1000; ++tries) {
                std::vector<mpq_class> coeffs;
                for (long i = 0; i < f->degree(); ++i) coeffs.push_back(rational(h, false));
                FieldElement e = FieldElement::from_coeffs(f, std::move(coeffs));
                if (!nonzero || !e.is_zero()) return e;
            }
            throw Error(Err::DegenerateSample, "element sampling failed");
        }
        case FieldKind::PrimeField: {
            long lo = nonzero ? 1 : 0;
            return FieldElement::from_int(f, uniform(lo, f->characteristic() - 1));
        }
    }
    throw Error(Err::InvalidArgument, "bad field");
}

// ---- constructed instances ----

namespace {

FormVector sample_vector(Rng& rng, const FieldRef& f, size_t dim, bool allow_zero)
{
    if (allow_zero && rng.next() % 4 == 0) return FormVector(dim, FieldElement::zero(f));
    for (int tries = 0; tries < 200; ++tries) {
        FormVector v;
        for (size_t i = 0; i < dim; ++i) {
            // mostly small coordinates, occasional zero
            if (rng.next() % 3 == 0)
                v.push_back(FieldElement::zero(f));
            else
                v.push_back(rng.element(f, 3, false));
        }
        if (!is_zero_vector(v)) return v;
    }
    throw Error(Err::DegenerateSample, "vector sampling failed");
}

}  // namespace

T1Instance make_constructed_instance_t1(int n, int m, const FieldRef& field, unsigned long long seed, T1Variant variant)
{
    if (n < 2) throw Error(Err::OutOfRange, "grade must be >= 2");
    if (field->characteristic() == 2) throw Error(Err::InvalidArgument, "characteristic 2 excluded");
    Rng rng(seed);
    Modulus up(2, m + 1);
    WitnessBundle bundle(field, Policy{PolicyMode::LookupOnly, 0});

    if (n == 2) {
        for (int tries = 0; tries < 200; ++tries) {
            FieldElement alpha = rng.element(field, 9, true);
            unsigned long long branch = rng.next() % 10;
            FieldElement x = branch == 0 ? FieldElement::zero(field) : rng.element(field, 9, true);
            FieldElement y = branch == 1 ? FieldElement::zero(field) : rng.element(field, 9, true);
            if (x.is_zero() && y.is_zero()) continue;
            FieldElement beta = x * x - alpha * y * y;
            if (beta.is_zero()) continue;
            bundle.insert(req_norm_representation(alpha, beta), norm_rep_data(x, y));
            return {Symbol(up, {alpha, beta}), std::move(bundle)};
        }
        throw Error(Err::DegenerateSample, "could not build a grade-2 instance");
    }

    if (variant == T1Variant::Isotropic) {
        for (int tries = 0; tries < 200; ++tries) {
            std::vector<FieldElement> alphas;
            for (int i = 0; i < n - 2; ++i) alphas.push_back(rng.element(field, 9, true));
            DiagonalForm phi = expand(PfisterForm(alphas));
            FormVector s = sample_vector(rng, field, size_t(phi.dimension()), false);
            FieldElement val = evaluate(phi, s);
            if (val.is_zero()) continue;
            alphas.push_back(val);  // alpha_{n-1} represented by phi_{n-2}
            FieldElement last = rng.element(field, 9, true);
            alphas.push_back(last);

            FormVector iso(size_t(2) << (n - 2), FieldElement::zero(field));
            for (size_t i = 0; i < s.size(); ++i) iso[i] = s[i];
            iso[s.size()] = FieldElement::one(field);
            std::vector<FieldElement> prefix(alphas.begin(), alphas.end() - 1);
            bundle.insert(req_isotropy_vector(prefix), json{{"vector", vector_data(iso)}});

            if (n - 1 == 2) {
                bundle.insert(req_norm_representation(prefix[0], prefix[1]), norm_rep_data(s[0], s[1]));
            } else {
                std::vector<FieldElement> base(alphas.begin(), alphas.end() - 2);
                bundle.insert(req_t1_representation(prefix), vectors_data(representation_from_vector(base, s)));
            }
            return {Symbol(up, alphas), std::move(bundle)};
        }
        throw Error(Err::DegenerateSample, "could not build an isotropic-branch instance");
    }

    for (int tries = 0; tries < 400; ++tries) {
        std::vector<FieldElement> alphas;
        for (int i = 0; i < n - 1; ++i) alphas.push_back(rng.element(field, 9, true));

        // ts[0] = t_0 in V_phi1, ts[i] = t_i in V_phii; zero vectors force
        // the "otherwise" branches
        std::vector<FormVector> ts;
        bool bad = false;
        ts.push_back(sample_vector(rng, field, 2, true));
        for (int i = 1; i <= n - 2; ++i) {
            std::vector<FieldElement> pre(alphas.begin(), alphas.begin() + i);
            DiagonalForm phi = expand(PfisterForm(pre));
            FormVector t = sample_vector(rng, field, size_t(phi.dimension()), true);
            if (!is_zero_vector(t) && evaluate(phi, t).is_zero()) {
                bad = true;  // slot value would vanish
                break;
            }
            ts.push_back(t);
        }
        if (bad) continue;

        FieldElement rhs = FieldElement::zero(field);
        for (int i = n - 2; i >= 1; --i) {
            std::vector<FieldElement> pre(alphas.begin(), alphas.begin() + i);
            rhs = rhs + evaluate(expand(PfisterForm(pre)), ts[size_t(i)]) * alphas[size_t(i)];
        }
        rhs = rhs - evaluate(expand(PfisterForm({alphas[0]})), ts[0]);
        FieldElement alpha_n = -rhs;
        if (alpha_n.is_zero()) continue;
        alphas.push_back(alpha_n);

        bundle.insert(req_t1_representation(alphas), vectors_data(ts));
        return {Symbol(up, alphas), std::move(bundle)};
    }
    throw Error(Err::DegenerateSample, "could not build an anisotropic-branch instance");
}

T2Instance make_constructed_instance_t2_i1(int n, int m, const FieldRef& field, unsigned long long seed)
{
    T1Instance inner = make_constructed_instance_t1(n, m, field, seed * 2 + 1);
    Rng rng(seed * 2 + 7);
    FieldElement beta1 = rng.element(field, 9, true);
    std::vector<FieldElement> alphas = inner.symbol.entries();
    alphas[0] = alphas[0] * beta1;  // merged first slot recovers the inner instance
    T2Instance out;
    out.alphas = std::move(alphas);
    out.betas = {beta1};
    out.i = 1;
    out.m = m;
    out.bundle = std::move(inner.bundle);
    return out;
}

namespace {

// Builds the witnesses for one certified difference {A1,A2} - {B1,B2}
// (n = i = 2) and returns the derived A pair. All witnesses land in `bundle`.
std::pair<FieldElement, FieldElement> cook_n2i2(Rng& rng, const FieldRef& field, const FieldElement& beta1,
                                                const FieldElement& beta2, WitnessBundle& bundle)
{
    const FieldElement one = FieldElement::one(field);
    for (int tries = 0; tries < 400; ++tries) {
        FieldElement w = rng.element(field, 5, true);
        FieldElement a1 = rng.element(field, 5, true);
        FieldElement b1 = rng.element(field, 5, false);
        FieldElement q = a1 * a1 - beta1 * b1 * b1;
        if (q.is_zero()) continue;

        FieldElement gamma1 = beta1 / (w * w);
        FieldElement gamma2 = q * beta2;
        FieldElement alpha2 = gamma1 + gamma2;
        if (alpha2.is_zero()) continue;
        FieldElement delta1 = -(gamma1 / gamma2);

        FieldElement u = rng.element(field, 5, true);
        FieldElement v = rng.element(field, 5, true);
        FieldElement g = (u * u - alpha2) / (v * v);
        if (g.is_zero()) continue;
        FieldElement alpha1 = delta1 * g;

        std::vector<FieldElement> alphas{alpha1, alpha2}, betas{beta1, beta2};
        FormVector t1{one / w, FieldElement::zero(field)};
        FormVector t2{a1, b1, FieldElement::zero(field), FieldElement::zero(field)};
        bundle.insert(req_t2_representation(alphas, betas, 2), vectors_data({t1, t2}));
        bundle.insert(req_slot_exchange(alphas, betas, 2), json{{"deltas", elems_data({delta1})}});
        bundle.insert(req_norm_representation(g, alpha2), norm_rep_data(u, v));
        FieldElement W2 = one / q;
        bundle.insert(req_norm_representation(gamma1, W2), norm_rep_data(a1 / q, w * b1 / q));
        FieldElement W1 = w * w;
        bundle.insert(req_norm_representation(beta2, W1), norm_rep_data(w, FieldElement::zero(field)));
        return {alpha1, alpha2};
    }
    throw Error(Err::DegenerateSample, "difference cooking failed");
}

}  // namespace

T2Instance make_constructed_instance_t2_n2i2(int m, const FieldRef& field, unsigned long long seed)
{
    Rng rng(seed * 2 + 3);
    WitnessBundle bundle(field, Policy{PolicyMode::LookupOnly, 0});
    FieldElement beta1 = rng.element(field, 5, true);
    FieldElement beta2 = rng.element(field, 5, true);
    auto [alpha1, alpha2] = cook_n2i2(rng, field, beta1, beta2, bundle);
    T2Instance out;
    out.alphas = {alpha1, alpha2};
    out.betas = {beta1, beta2};
    out.i = 2;
    out.m = m;
    out.bundle = std::move(bundle);
    return out;
}

T3Instance make_constructed_instance_t3(int m, const FieldRef& field, unsigned long long seed)
{
    Rng rng(seed * 2 + 11);
    WitnessBundle bundle(field, Policy{PolicyMode::LookupOnly, 0});
    FieldElement a = rng.element(field, 5, true);
    FieldElement b = rng.element(field, 5, true);
    FieldElement c2 = rng.element(field, 5, true);
    FieldElement third = (a * b).inv();

    T3Instance out;
    out.a = a;
    out.b = b;
    out.cs = {c2};
    out.m = m;
    for (const FieldElement& head : {a, b, third}) {
        auto [s1, s2] = cook_n2i2(rng, field, head, c2, bundle);
        out.symbols.push_back({s1, s2});
    }
    bundle.insert(req_linkage(out.symbols),
                  json{{"a", a.str()}, {"b", b.str()}, {"cs", elems_data(out.cs)}});
    out.bundle = std::move(bundle);
    return out;
}

T4Instance make_constructed_instance_t4(int m, const FieldRef& field, unsigned long long seed)
{
    Rng rng(seed * 2 + 13);
    WitnessBundle bundle(field, Policy{PolicyMode::LookupOnly, 0});

    auto sample_pair = [&]() { return std::pair(rng.element(field, 5, true), rng.element(field, 5, true)); };

    auto [a1, b1] = sample_pair();
    auto [c1, d1] = sample_pair();

    json rows = json::array();
    std::vector<FieldElement> as{a1}, bs{b1}, cs{c1}, ds{d1}, qs;
    for (int j = 0; j < 3; ++j) {
        // t_j in V_<<a_j c_j>> with nonzero value
        FieldElement x, y, q;
        for (int tries = 0;; ++tries) {
            if (tries > 200) throw Error(Err::DegenerateSample, "chain vector sampling failed");
            x = rng.element(field, 5, true);
            y = rng.element(field, 5, false);
            q = x * x - as[size_t(j)] * cs[size_t(j)] * y * y;
            if (!q.is_zero()) break;
        }
        qs.push_back(q);
        rows.push_back(json{{"a", as[size_t(j)].str()},
                            {"b", bs[size_t(j)].str()},
                            {"c", cs[size_t(j)].str()},
                            {"d", ds[size_t(j)].str()},
                            {"t", vector_data({x, y})}});
        if (j < 2) {
            auto [an, bn] = cook_n2i2(rng, field, as[size_t(j)], bs[size_t(j)] * q, bundle);
            auto [cn, dn] = cook_n2i2(rng, field, cs[size_t(j)], ds[size_t(j)] * q, bundle);
            as.push_back(an);
            bs.push_back(bn);
            cs.push_back(cn);
            ds.push_back(dn);
        }
    }

    T4Instance out;
    out.m = m;
    // P1, P2 head the chains; P3, P4 close them
    auto p1 = cook_n2i2(rng, field, a1, b1, bundle);
    auto p2 = cook_n2i2(rng, field, c1, d1, bundle);
    auto p3 = cook_n2i2(rng, field, as[2], bs[2] * qs[2], bundle);
    auto p4 = cook_n2i2(rng, field, cs[2], ds[2] * qs[2], bundle);
    out.pairs = {{p1.first, p1.second}, {p2.first, p2.second}, {p3.first, p3.second}, {p4.first, p4.second}};
    bundle.insert(req_sivatski_chain(out.pairs), json{{"rows", rows}});
    out.chain = json{{"rows", rows}};
    out.bundle = std::move(bundle);
    return out;
}

}  // namespace symlen
