// Command-line front end. Exit codes: 0 success, 1 verification failure,
// 2 precision error, 3 invalid input, 4 size guard.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "btcusp/errors.hpp"
#include "btcusp/literal.hpp"
#include "btcusp/quotient.hpp"
#include "btcusp/verify.hpp"

using namespace btcusp;
using nlohmann::json;

namespace {

struct Config {
    int q = 2;
    std::string modulus;
    std::string lattice = "nagao";
    std::string level = "t";
    int depth = 6;
    int truncation = 6;
    std::uint32_t seed = 1;
    std::string format = "json";
    long long max_order = 200000;
    std::string out;
};

FieldPtr field_of(const Config& c) {
    if (c.modulus.empty()) return make_field(c.q);
    // "1,1,1" lists the coefficients of the modulus from the constant term up.
    std::vector<int> coeffs;
    std::stringstream ss(c.modulus);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            coeffs.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw InvalidInput("bad modulus coefficient '" + item + "'");
        }
    }
    int p = 2;
    while (c.q % p != 0) ++p;
    const auto spec = FieldSpec::with_modulus(p, coeffs);
    if (spec.q() != c.q) throw InvalidInput("modulus degree does not match --q");
    return make_field(spec);
}

LatticeSpec spec_of(const Config& c) {
    const auto f = field_of(c);
    if (c.lattice == "nagao") return LatticeSpec::nagao(f);
    return LatticeSpec::congruence(f, parse_tpoly(f, c.level));
}

void emit(const Config& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream os(c.out);
    if (!os) throw InvalidInput("cannot open " + c.out);
    os << text << '\n';
}

std::string render(const Config& c, const GraphOfGroups& g, const std::optional<CovolumeResult>& vol,
                   const std::optional<FreeProductReport>& fp = std::nullopt) {
    if (c.format == "dot") return to_dot(g);
    json j = to_json(g, vol);
    if (fp) j["free_product"] = {{"applicable", fp->applicable}, {"cusp_factors", fp->cusp_factors},
                                 {"free_rank", fp->free_rank}, {"reason", fp->reason}};
    return j.dump(2);
}

int cmd_quotient(const Config& c, bool subdivide) {
    const auto g = quotient_graph(spec_of(c), c.depth, c.max_order);
    std::optional<CovolumeResult> vol;
    if (std::all_of(g.rays.begin(), g.rays.end(), [](const RayTail& r) { return r.certified; })) vol = covolume(g);
    emit(c, render(c, subdivide ? barycentric(g) : g, vol));
    return 0;
}

int cmd_covolume(const Config& c) {
    const auto spec = spec_of(c);
    const auto vol = covolume(quotient_graph(spec, c.depth, c.max_order));
    const auto part = covolume_partial_sums(spec, c.depth, c.max_order);
    if (part.total() != vol.value) {
        std::cerr << "partial sums disagree: " << rational_string(part.total()) << '\n';
        return 1;
    }
    emit(c, vol.to_string());
    return 0;
}

int cmd_classify(const Config& c, const std::string& literal) {
    const auto g = parse_matrix(field_of(c), literal);
    const auto k = classify(g);
    json j;
    if (const auto* h = std::get_if<Hyperbolic>(&k)) {
        j = {{"kind", "hyperbolic"}, {"length", h->length}};
    } else {
        j = {{"kind", "elliptic"}, {"fixed_vertex", std::get<Elliptic>(k).fixed_vertex.to_string()}};
    }
    emit(c, j.dump());
    return 0;
}

int cmd_cusps(const Config& c) {
    const auto r = cusps_report(spec_of(c), c.depth, c.max_order);
    json alg = json::array();
    for (const auto& cd : r.algebraic)
        alg.push_back({{"end", cd.end.to_string()}, {"conjugator", cd.conjugator.to_string('t')},
                       {"module", cd.module.to_string()}, {"stabilizer_index", cd.stabilizer_index}});
    json matches = json::array();
    for (const auto& m : r.matches) matches.push_back({{"ray", m.ray}, {"cusp", m.cusp}});
    const json j{{"algebraic", alg}, {"geometric", r.geometric}, {"matches", matches}, {"bijective", r.bijective}};
    emit(c, j.dump(2));
    return r.bijective ? 0 : 1;
}

int cmd_contract(const Config& c, std::optional<int> start) {
    const auto g = contract_all(quotient_graph(spec_of(c), c.depth, c.max_order), start);
    emit(c, render(c, g, std::nullopt, free_product_report(g)));
    return 0;
}

int cmd_probe(const Config& c, const std::string& literal) {
    const auto spec = spec_of(c);
    const End e = parse_end(spec.field(), literal);
    const auto orders = growth_probe(spec, e, c.depth);
    json j{{"end", e.to_string()}, {"orders", orders}};
    if (e.kind() == End::Kind::Truncated) j["evidence"] = "bounded to depth " + std::to_string(c.depth);
    emit(c, j.dump());
    return 0;
}

int cmd_verify(const Config& c, int only) {
    std::vector<CheckResult> results;
    if (only > 0) {
        results.push_back(run_check(only, c.seed));
    } else {
        results = run_all_checks(c.seed);
    }
    std::ostringstream os;
    bool ok = true;
    for (const auto& r : results) {
        os << (r.passed ? "PASS" : "FAIL") << ' ' << r.id << ' ' << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    std::string text = os.str();
    text.pop_back();
    emit(c, text);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cusps, quotients and horoballs for lattices in SL_2(F_q((pi)))"};
    app.require_subcommand(1);
    Config c;
    auto common = [&](CLI::App* s) {
        s->add_option("--q", c.q, "field order")->capture_default_str();
        s->add_option("--modulus", c.modulus, "field modulus coefficients, constant term first (e.g. 1,1,1)");
        s->add_option("--lattice", c.lattice, "lattice")
            ->check(CLI::IsMember({"nagao", "congruence"}))
            ->capture_default_str();
        s->add_option("--level", c.level, "congruence level in t")->capture_default_str();
        s->add_option("--depth", c.depth, "truncation depth of the quotient or probe")->capture_default_str();
        s->add_option("--truncation", c.truncation, "horoball truncation radius")->capture_default_str();
        s->add_option("--seed", c.seed, "seed for sampled checks")->capture_default_str();
        s->add_option("--format", c.format, "output format")
            ->check(CLI::IsMember({"json", "dot"}))
            ->capture_default_str();
        s->add_option("--max-order", c.max_order, "size guard for coset tables")->capture_default_str();
        s->add_option("--out", c.out, "write output to FILE");
    };
    auto* quotient = app.add_subcommand("quotient", "quotient graph of groups");
    common(quotient);
    bool subdivide = false;
    quotient->add_flag("--subdivide", subdivide, "report the barycentric subdivision");
    auto* vol = app.add_subcommand("covolume", "exact covolume");
    common(vol);
    auto* cls = app.add_subcommand("classify", "classify a matrix");
    common(cls);
    std::string matrix;
    cls->add_option("matrix", matrix, "matrix literal [[a,b],[c,d]]")->required();
    auto* cusps = app.add_subcommand("cusps", "algebraic and geometric cusps");
    common(cusps);
    auto* contract = app.add_subcommand("contract", "contract the cusp rays");
    common(contract);
    std::optional<int> start;
    contract->add_option("--start", start, "contraction start level (default: certified start)");
    auto* probe = app.add_subcommand("probe", "stabilizer orders along the ray to an end");
    common(probe);
    std::string end;
    probe->add_option("end", end, "end literal: up, rat(p, s), trunc(s, N) or a series")->required();
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    common(verify);
    int only = 0;
    verify->add_option("--check", only, "run a single check")->check(CLI::Range(1, kCheckCount));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }
    try {
        if (quotient->parsed()) return cmd_quotient(c, subdivide);
        if (vol->parsed()) return cmd_covolume(c);
        if (cls->parsed()) return cmd_classify(c, matrix);
        if (cusps->parsed()) return cmd_cusps(c);
        if (contract->parsed()) return cmd_contract(c, start);
        if (probe->parsed()) return cmd_probe(c, end);
        if (verify->parsed()) return cmd_verify(c, only);
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 3;
    } catch (const SizeGuard& e) {
        std::cerr << "size guard: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
