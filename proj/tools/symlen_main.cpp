#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "symlen/decompose.hpp"
#include "symlen/forms.hpp"
#include "symlen/mod3.hpp"
#include "symlen/witness.hpp"

using namespace symlen;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitMissingWitness = 2;
constexpr int kExitParse = 3;
constexpr int kExitFlags = 4;

json read_json(const std::string& path)
{
    if (path.empty() || path == "-") {
        json j;
        std::cin >> j;
        return j;
    }
    std::ifstream in(path);
    if (!in) throw Error(Err::ParseError, "cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_json(const std::string& path, const json& j)
{
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

FieldRef field_by_name(const std::string& name)
{
    if (name == "Q") return FieldDescriptor::rationals();
    if (name.rfind("Qz", 0) == 0) return FieldDescriptor::cyclotomic(std::stol(name.substr(2)));
    if (name.rfind("F", 0) == 0) return FieldDescriptor::prime_field(std::stol(name.substr(1)));
    throw Error(Err::InvalidArgument, "unknown field '" + name + "' (use Q, Qz4, Qz8, Qz16, Qz9, F<q>)");
}

unsigned long long effective_seed(unsigned long long flag_seed)
{
    if (const char* env = std::getenv("MILNOR_SEED")) return std::stoull(env);
    return flag_seed;
}

json instance_to_json(const std::string& theorem, const FieldRef& f, int m, const json& body)
{
    json j{{"theorem", theorem}, {"field", field_to_json(f)}, {"m", m}};
    j.update(body);
    return j;
}

int cmd_generate(const std::string& theorem, int n, int m, const std::string& field_name, unsigned long long seed,
                 const std::string& out, const std::string& witnesses_out)
{
    FieldRef f = field_by_name(field_name);
    json inst, wit;
    if (theorem == "t1") {
        T1Instance t = make_constructed_instance_t1(n, m, f, seed);
        inst = instance_to_json("t1", f, m, json{{"symbol", expr_terms_to_json(KClassExpr::single(t.symbol))[0][1]}});
        wit = t.bundle.to_json();
    } else if (theorem == "t2") {
        T2Instance t = make_constructed_instance_t2_i1(n, m, f, seed);
        json alphas = json::array(), betas = json::array();
        for (const auto& e : t.alphas) alphas.push_back(e.str());
        for (const auto& e : t.betas) betas.push_back(e.str());
        inst = instance_to_json("t2", f, m, json{{"alphas", alphas}, {"betas", betas}, {"i", t.i}});
        wit = t.bundle.to_json();
    } else if (theorem == "t2i2") {
        T2Instance t = make_constructed_instance_t2_n2i2(m, f, seed);
        json alphas = json::array(), betas = json::array();
        for (const auto& e : t.alphas) alphas.push_back(e.str());
        for (const auto& e : t.betas) betas.push_back(e.str());
        inst = instance_to_json("t2", f, m, json{{"alphas", alphas}, {"betas", betas}, {"i", t.i}});
        wit = t.bundle.to_json();
    } else if (theorem == "t3") {
        T3Instance t = make_constructed_instance_t3(m, f, seed);
        json syms = json::array();
        for (const auto& s : t.symbols) {
            json sj = json::array();
            for (const auto& e : s) sj.push_back(e.str());
            syms.push_back(sj);
        }
        inst = instance_to_json("t3", f, m, json{{"symbols", syms}});
        wit = t.bundle.to_json();
    } else if (theorem == "t4") {
        T4Instance t = make_constructed_instance_t4(m, f, seed);
        json ps = json::array();
        for (const auto& p : t.pairs) {
            json pj = json::array();
            for (const auto& e : p) pj.push_back(e.str());
            ps.push_back(pj);
        }
        inst = instance_to_json("t4", f, m, json{{"pairs", ps}});
        wit = t.bundle.to_json();
    } else if (theorem == "t5") {
        T5Instance t = make_degenerate_t5_instance(m, f, seed);
        inst = instance_to_json("t5", f, m,
                                json{{"alpha", t.alpha.str()}, {"beta", t.beta.str()}, {"gamma", t.gamma.str()}});
        wit = t.bundle.to_json();
    } else {
        throw Error(Err::InvalidArgument, "generate supports t1, t2, t2i2, t3, t4, t5");
    }

    if (!witnesses_out.empty()) {
        write_json(out, inst);
        write_json(witnesses_out, wit);
    } else if (!out.empty() && out != "-") {
        write_json(out, inst);
        write_json(out + ".witnesses", wit);
    } else {
        write_json("-", json{{"instance", inst}, {"witnesses", wit}});
    }
    return kExitOk;
}

int cmd_decompose(const std::string& theorem, const std::string& input, const std::string& witnesses, bool plan_mode,
                  int plan_n, int plan_i, const std::string& out)
{
    if (plan_mode) {
        int n = plan_n, i = plan_i;
        if (!input.empty()) {
            json inst = read_json(input);
            if (inst.contains("instance")) inst = inst.at("instance");
            if (inst.contains("symbol")) n = int(inst.at("symbol").size());
            if (inst.contains("alphas")) n = int(inst.at("alphas").size());
            if (inst.contains("i")) i = inst.at("i").get<int>();
            if (inst.contains("symbols")) n = int(inst.at("symbols").at(0).size());
        }
        std::string tag = theorem == "corollary" ? "corollary" : theorem;
        write_json(out, plan_to_json(plan(tag, n, i)));
        return kExitOk;
    }

    json inst = read_json(input);
    json wit;
    if (inst.contains("instance")) {
        wit = inst.at("witnesses");
        inst = inst.at("instance");
    } else {
        wit = read_json(witnesses);
    }
    FieldRef f = field_from_json(inst.at("field"));
    int m = inst.at("m").get<int>();
    WitnessBundle bundle = WitnessBundle::from_json(wit, f);

    CertifiedDecomposition dec;
    if (theorem == "t1") {
        std::vector<FieldElement> slots;
        for (const auto& e : inst.at("symbol")) slots.push_back(FieldElement::parse(f, e.get<std::string>()));
        dec = t1(Symbol(Modulus(2, m + 1), slots), bundle);
    } else if (theorem == "t2" || theorem == "corollary") {
        std::vector<FieldElement> alphas, betas;
        for (const auto& e : inst.at("alphas")) alphas.push_back(FieldElement::parse(f, e.get<std::string>()));
        for (const auto& e : inst.at("betas")) betas.push_back(FieldElement::parse(f, e.get<std::string>()));
        dec = t2(alphas, betas, inst.at("i").get<int>(), m, bundle);
        if (theorem == "corollary") {
            dec.theorem = "corollary";
            dec.bound_used = bound("corollary", int(alphas.size()));
        }
    } else if (theorem == "t3") {
        std::vector<std::vector<FieldElement>> symbols;
        for (const auto& s : inst.at("symbols")) {
            std::vector<FieldElement> slots;
            for (const auto& e : s) slots.push_back(FieldElement::parse(f, e.get<std::string>()));
            symbols.push_back(slots);
        }
        json linkage = bundle.resolve(req_linkage(symbols));
        dec = t3(symbols, linkage, m, bundle);
    } else if (theorem == "t4") {
        std::vector<std::vector<FieldElement>> pairs;
        for (const auto& s : inst.at("pairs")) {
            std::vector<FieldElement> slots;
            for (const auto& e : s) slots.push_back(FieldElement::parse(f, e.get<std::string>()));
            pairs.push_back(slots);
        }
        json chain = bundle.resolve(req_sivatski_chain(pairs));
        dec = t4(pairs, chain, m, bundle);
    } else if (theorem == "t5") {
        dec = t5_recombine(FieldElement::parse(f, inst.at("alpha").get<std::string>()),
                           FieldElement::parse(f, inst.at("beta").get<std::string>()),
                           FieldElement::parse(f, inst.at("gamma").get<std::string>()), m, bundle);
    } else {
        throw Error(Err::InvalidArgument, "unknown theorem '" + theorem + "'");
    }
    write_json(out, decomposition_to_json(dec));
    return kExitOk;
}

int cmd_verify(const std::string& cert_path)
{
    json j = read_json(cert_path);
    if (j.contains("certificate")) {
        CertifiedDecomposition d = decomposition_from_json(j);
        CheckResult r = check_certificate(d.certificate);
        if (!r.valid) {
            std::cout << "invalid at step " << r.step_index << ": " << r.reason << "\n";
            return kExitVerifyFail;
        }
        if (!(d.certificate.start == shift_map(d.terms)) || !(d.certificate.end == d.target)) {
            std::cout << "invalid: certificate endpoints do not match the decomposition\n";
            return kExitVerifyFail;
        }
        if (d.terms.symbol_count() > d.bound_used) {
            std::cout << "bound violation: " << d.terms.symbol_count() << " > " << d.bound_used << "\n";
            return kExitVerifyFail;
        }
        std::cout << "valid (" << d.terms.symbol_count() << " symbols, bound " << d.bound_used << ")\n";
        return kExitOk;
    }
    Certificate c = certificate_from_json(j);
    CheckResult r = check_certificate(c);
    if (!r.valid) {
        std::cout << "invalid at step " << r.step_index << ": " << r.reason << "\n";
        return kExitVerifyFail;
    }
    std::cout << "valid\n";
    return kExitOk;
}

int cmd_hilbert(const std::string& a, const std::string& b, const std::string& p)
{
    mpq_class qa(a), qb(b);
    qa.canonicalize();
    qb.canonicalize();
    Place v = (p == "inf" || p == "oo") ? Place::infinity() : Place::at(mpz_class(p));
    std::cout << hilbert_symbol_Q(qa, qb, v) << "\n";
    return kExitOk;
}

int cmd_isotropy(const std::string& form, long height)
{
    FieldRef Q = FieldDescriptor::rationals();
    std::vector<FieldElement> coeffs;
    std::istringstream is(form);
    std::string tok;
    while (std::getline(is, tok, ',')) coeffs.push_back(FieldElement::parse(Q, tok));
    DiagonalForm f(coeffs);
    if (height <= 0) {
        std::cout << (is_isotropic_Q(f) ? "isotropic" : "anisotropic") << "\n";
        return kExitOk;
    }
    SearchResult r = isotropy_witness_search(f, height);
    switch (r.status) {
        case SearchStatus::Found: {
            std::string sep;
            for (const auto& c : *r.vector) {
                std::cout << sep << c.str();
                sep = ",";
            }
            std::cout << "\n";
            return kExitOk;
        }
        case SearchStatus::NotFound:
            std::cout << "not-found\n";
            return kExitOk;
        case SearchStatus::ProvablyAnisotropic:
            std::cout << "provably-anisotropic\n";
            return kExitOk;
    }
    return kExitOk;
}

int cmd_normalize(const std::string& expr, const std::string& field_name)
{
    FieldRef f = field_by_name(field_name);
    KClassExpr e = parse_class_expr(expr, f);
    std::cout << normalize_over_Q(e).str() << "\n";
    return kExitOk;
}

int cmd_bounds(const std::string& theorem, int n, int i)
{
    std::cout << bound(theorem, n, i) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact Milnor K-theory symbol calculus with certificate-emitting decompositions"};
    app.require_subcommand(1);

    std::string theorem = "t1", input, witnesses, out, cert_path, field_name = "Q";
    std::string ha, hb, hp = "inf", form, expr;
    int n = 2, i = 0, m = 1;
    long height = 0;
    unsigned long long seed = 1;
    bool plan_mode = false;
    int jobs = 1;
    std::vector<std::string> inputs;

    auto* dec = app.add_subcommand("decompose", "run a decomposition engine");
    dec->add_option("--theorem", theorem, "t1|t2|corollary|t3|t4|t5")->required();
    dec->add_option("--input", input, "instance JSON (or combined generate output)");
    dec->add_option("--witnesses", witnesses, "witness bundle JSON");
    dec->add_option("--out", out, "output path (default stdout)");
    dec->add_flag("--plan", plan_mode, "dry-run plan, no witnesses touched");
    dec->add_option("--n", n, "grade for --plan without --input");
    dec->add_option("--i", i, "slot count for t2 plans");
    dec->add_option("--jobs", jobs, "parallel instance files");
    dec->add_option("inputs", inputs, "additional instance files (with --jobs)");

    auto* ver = app.add_subcommand("verify", "check a certificate or decomposition");
    ver->add_option("--cert", cert_path, "certificate JSON (default stdin)");

    auto* gen = app.add_subcommand("generate", "emit a constructed instance and its witnesses");
    gen->add_option("--theorem", theorem)->required();
    gen->add_option("--n", n, "grade");
    gen->add_option("--m", m, "modulus exponent");
    gen->add_option("--field", field_name, "Q|Qz4|Qz8|Qz16|Qz9|F<q>");
    gen->add_option("--seed", seed, "generator seed (MILNOR_SEED overrides)");
    gen->add_option("--out", out, "instance path");
    gen->add_option("--witnesses-out", witnesses, "witness bundle path");

    auto* hil = app.add_subcommand("hilbert", "quadratic Hilbert symbol over Q");
    hil->add_option("-a", ha)->required();
    hil->add_option("-b", hb)->required();
    hil->add_option("-p", hp, "prime or inf");

    auto* iso = app.add_subcommand("isotropy", "Hasse-Minkowski oracle / witness search");
    iso->add_option("--form", form, "comma-separated coefficients")->required();
    iso->add_option("--search-height", height, "search for a vector up to this height");

    auto* nrm = app.add_subcommand("normalize", "multilinear normal form over Q");
    nrm->add_option("--class", expr, "class expression")->required();
    nrm->add_option("--field", field_name);

    auto* bnd = app.add_subcommand("bounds", "closed-form symbol length bounds");
    bnd->add_option("--theorem", theorem)->required();
    bnd->add_option("--n", n);
    bnd->add_option("--i", i);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitFlags : kExitOk;
    }

    try {
        if (dec->parsed()) {
            if (!inputs.empty() && !plan_mode) {
                // --jobs N: independent instance files, outputs alongside inputs
                std::vector<std::string> all{input};
                all.insert(all.end(), inputs.begin(), inputs.end());
                std::vector<std::future<int>> running;
                int rc = kExitOk;
                for (const auto& path : all) {
                    running.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, [&, path] {
                        try {
                            return cmd_decompose(theorem, path, witnesses, false, n, i, path + ".decomposition");
                        } catch (const std::exception& e) {
                            std::cerr << path << ": " << e.what() << "\n";
                            return kExitVerifyFail;
                        }
                    }));
                    if (int(running.size()) >= std::max(jobs, 1)) {
                        rc = std::max(rc, running.front().get());
                        running.erase(running.begin());
                    }
                }
                for (auto& f : running) rc = std::max(rc, f.get());
                return rc;
            }
            return cmd_decompose(theorem, input, witnesses, plan_mode, n, i, out);
        }
        if (ver->parsed()) return cmd_verify(cert_path);
        if (gen->parsed()) return cmd_generate(theorem, n, m, field_name, effective_seed(seed), out, witnesses);
        if (hil->parsed()) return cmd_hilbert(ha, hb, hp);
        if (iso->parsed()) return cmd_isotropy(form, height);
        if (nrm->parsed()) return cmd_normalize(expr, field_name);
        if (bnd->parsed()) return cmd_bounds(theorem, n, i);
    } catch (const MissingWitnessError& e) {
        std::cerr << e.request_json() << "\n";
        return kExitMissingWitness;
    } catch (const Error& e) {
        if (e.kind() == Err::ParseError) {
            std::cerr << e.what() << "\n";
            return kExitParse;
        }
        if (e.kind() == Err::InvalidArgument || e.kind() == Err::OutOfRange) {
            std::cerr << e.what() << "\n";
            return kExitFlags;
        }
        std::cerr << e.what() << "\n";
        return kExitVerifyFail;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "json: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitVerifyFail;
    }
    return kExitFlags;
}
