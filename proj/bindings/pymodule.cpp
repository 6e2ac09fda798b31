#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "symlen/decompose.hpp"
#include "symlen/forms.hpp"
#include "symlen/mod3.hpp"
#include "symlen/witness.hpp"

namespace py = pybind11;
using namespace symlen;
using nlohmann::json;

namespace {

FieldRef field_by_name(const std::string& name)
{
    if (name == "Q") return FieldDescriptor::rationals();
    if (name.rfind("Qz", 0) == 0) return FieldDescriptor::cyclotomic(std::stol(name.substr(2)));
    if (name.rfind("F", 0) == 0) return FieldDescriptor::prime_field(std::stol(name.substr(1)));
    throw Error(Err::InvalidArgument, "unknown field '" + name + "'");
}

std::string py_arith(const std::string& op, const std::string& a, const std::string& b, const std::string& field)
{
    FieldRef f = field_by_name(field);
    FieldElement ea = FieldElement::parse(f, a);
    if (op == "neg" || op == "inv") return arith(op, ea, nullptr).str();
    FieldElement eb = FieldElement::parse(f, b);
    return arith(op, ea, &eb).str();
}

int py_hilbert(const std::string& a, const std::string& b, const std::string& place)
{
    mpq_class qa(a), qb(b);
    qa.canonicalize();
    qb.canonicalize();
    Place v = (place == "inf" || place == "oo") ? Place::infinity() : Place::at(mpz_class(place));
    return hilbert_symbol_Q(qa, qb, v);
}

DiagonalForm parse_form(const std::string& csv)
{
    FieldRef Q = FieldDescriptor::rationals();
    std::vector<FieldElement> coeffs;
    std::string tok;
    std::istringstream is(csv);
    while (std::getline(is, tok, ',')) coeffs.push_back(FieldElement::parse(Q, tok));
    return DiagonalForm(coeffs);
}

bool py_is_isotropic(const std::string& form) { return is_isotropic_Q(parse_form(form)); }

std::string py_isotropy_search(const std::string& form, long height)
{
    SearchResult r = isotropy_witness_search(parse_form(form), height);
    if (r.status == SearchStatus::ProvablyAnisotropic) return "provably-anisotropic";
    if (r.status == SearchStatus::NotFound) return "not-found";
    std::string out, sep;
    for (const auto& c : *r.vector) {
        out += sep + c.str();
        sep = ",";
    }
    return out;
}

std::string py_normalize(const std::string& expr, const std::string& field)
{
    return normalize_over_Q(parse_class_expr(expr, field_by_name(field))).str();
}

std::string py_shift(const std::string& expr, const std::string& field)
{
    return shift_map(parse_class_expr(expr, field_by_name(field))).str();
}

std::string py_exp(const std::string& expr, const std::string& field)
{
    return exp_map(parse_class_expr(expr, field_by_name(field))).str();
}

std::string py_cup(const std::string& e1, const std::string& e2, const std::string& field)
{
    FieldRef f = field_by_name(field);
    return cup(parse_class_expr(e1, f), parse_class_expr(e2, f)).str();
}

py::tuple py_generate(const std::string& theorem, int n, int m, const std::string& field, unsigned long long seed)
{
    FieldRef f = field_by_name(field);
    json inst, wit;
    auto pack = [&](const char* tag, json body, const WitnessBundle& bundle) {
        inst = json{{"theorem", tag}, {"field", field_to_json(f)}, {"m", m}};
        inst.update(body);
        wit = bundle.to_json();
    };
    if (theorem == "t1") {
        T1Instance t = make_constructed_instance_t1(n, m, f, seed);
        json slots = json::array();
        for (const auto& e : t.symbol.entries()) slots.push_back(e.str());
        pack("t1", json{{"symbol", slots}}, t.bundle);
    } else if (theorem == "t2") {
        T2Instance t = make_constructed_instance_t2_i1(n, m, f, seed);
        json alphas = json::array(), betas = json::array();
        for (const auto& e : t.alphas) alphas.push_back(e.str());
        for (const auto& e : t.betas) betas.push_back(e.str());
        pack("t2", json{{"alphas", alphas}, {"betas", betas}, {"i", t.i}}, t.bundle);
    } else if (theorem == "t5") {
        T5Instance t = make_degenerate_t5_instance(m, f, seed);
        pack("t5", json{{"alpha", t.alpha.str()}, {"beta", t.beta.str()}, {"gamma", t.gamma.str()}}, t.bundle);
    } else {
        throw Error(Err::InvalidArgument, "generate supports t1, t2, t5 here");
    }
    return py::make_tuple(inst.dump(), wit.dump());
}

std::string py_decompose(const std::string& theorem, const std::string& instance_json,
                         const std::string& witnesses_json)
{
    json inst = json::parse(instance_json);
    FieldRef f = field_from_json(inst.at("field"));
    int m = inst.at("m").get<int>();
    WitnessBundle bundle = WitnessBundle::from_json(json::parse(witnesses_json), f);
    CertifiedDecomposition dec;
    if (theorem == "t1") {
        std::vector<FieldElement> slots;
        for (const auto& e : inst.at("symbol")) slots.push_back(FieldElement::parse(f, e.get<std::string>()));
        dec = t1(Symbol(Modulus(2, m + 1), slots), bundle);
    } else if (theorem == "t2") {
        std::vector<FieldElement> alphas, betas;
        for (const auto& e : inst.at("alphas")) alphas.push_back(FieldElement::parse(f, e.get<std::string>()));
        for (const auto& e : inst.at("betas")) betas.push_back(FieldElement::parse(f, e.get<std::string>()));
        dec = t2(alphas, betas, inst.at("i").get<int>(), m, bundle);
    } else if (theorem == "t5") {
        dec = t5_recombine(FieldElement::parse(f, inst.at("alpha").get<std::string>()),
                           FieldElement::parse(f, inst.at("beta").get<std::string>()),
                           FieldElement::parse(f, inst.at("gamma").get<std::string>()), m, bundle);
    } else {
        throw Error(Err::InvalidArgument, "decompose supports t1, t2, t5 here");
    }
    return decomposition_to_json(dec).dump();
}

py::tuple py_verify(const std::string& doc)
{
    json j = json::parse(doc);
    if (j.contains("certificate")) {
        CertifiedDecomposition d = decomposition_from_json(j);
        CheckResult r = check_certificate(d.certificate);
        if (!r.valid) return py::make_tuple(false, r.reason);
        if (!(d.certificate.start == shift_map(d.terms)) || !(d.certificate.end == d.target))
            return py::make_tuple(false, "certificate endpoints do not match the decomposition");
        if (d.terms.symbol_count() > d.bound_used) return py::make_tuple(false, "bound violation");
        return py::make_tuple(true, "");
    }
    CheckResult r = check_certificate(certificate_from_json(j));
    return py::make_tuple(r.valid, r.reason);
}

std::string py_plan(const std::string& theorem, int n, int i)
{
    return plan_to_json(plan(theorem, n, i)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "exact Milnor K-theory symbol calculus with certificate-emitting decompositions";

    m.def("bounds", &bound, py::arg("theorem"), py::arg("n") = 2, py::arg("i") = 0,
          "closed-form symbol length bound");
    m.def("plan", &py_plan, py::arg("theorem"), py::arg("n") = 2, py::arg("i") = 0, "dry-run plan JSON");
    m.def("arith", &py_arith, py::arg("op"), py::arg("a"), py::arg("b") = "", py::arg("field") = "Q");
    m.def("hilbert", &py_hilbert, py::arg("a"), py::arg("b"), py::arg("place") = "inf");
    m.def("is_isotropic", &py_is_isotropic, py::arg("form"));
    m.def("isotropy_search", &py_isotropy_search, py::arg("form"), py::arg("height"));
    m.def("normalize", &py_normalize, py::arg("expr"), py::arg("field") = "Q");
    m.def("shift", &py_shift, py::arg("expr"), py::arg("field") = "Q");
    m.def("exp", &py_exp, py::arg("expr"), py::arg("field") = "Q");
    m.def("cup", &py_cup, py::arg("e1"), py::arg("e2"), py::arg("field") = "Q");
    m.def("generate", &py_generate, py::arg("theorem"), py::arg("n") = 2, py::arg("m") = 1, py::arg("field") = "Q",
          py::arg("seed") = 1, "constructed instance + witness bundle, as JSON strings");
    m.def("decompose", &py_decompose, py::arg("theorem"), py::arg("instance_json"), py::arg("witnesses_json"));
    m.def("verify", &py_verify, py::arg("doc"), "check a certificate or decomposition JSON");

    py::register_exception<MissingWitnessError>(m, "MissingWitness");
}
