#include "btcusp/verify.hpp"

#include <deque>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "btcusp/errors.hpp"
#include "btcusp/literal.hpp"
#include "btcusp/quotient.hpp"

namespace btcusp {

namespace {

using M = TreeAutomorphism;

// Collects failures; the first few are kept for the report.
class Tally {
public:
    void expect(bool cond, const std::string& what) {
        ++checks_;
        if (cond) return;
        ++failures_;
        if (failures_ <= 3) notes_.push_back(what);
    }
    void note(const std::string& s) { info_.push_back(s); }
    CheckResult result(int id, std::string name) const {
        std::ostringstream os;
        if (failures_ == 0) {
            os << checks_ << " checks";
        } else {
            os << failures_ << "/" << checks_ << " failed";
            for (const auto& n : notes_) os << "; " << n;
        }
        for (const auto& n : info_) os << "; " << n;
        return {id, std::move(name), failures_ == 0 && checks_ > 0, os.str()};
    }

private:
    long long checks_ = 0, failures_ = 0;
    std::vector<std::string> notes_, info_;
};

std::string join(const std::vector<long long>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

Series random_poly(const FieldPtr& f, std::mt19937& rng, int lo, int hi) {
    std::vector<Term> t;
    for (int d = lo; d <= hi; ++d) t.push_back(Term{d, static_cast<Elem>(rng() % f->q())});
    return Series(f, t);
}

M random_compact(const FieldPtr& f, std::mt19937& rng) {
    M g = M::identity(f);
    for (int i = 0; i < 4; ++i) {
        g = g * M::upper(random_poly(f, rng, 0, 3)) * M::lower(random_poly(f, rng, 0, 3));
        const Elem a = static_cast<Elem>(1 + rng() % (f->q() - 1));
        g = g * M::diag(Series::constant(f, a), Series::constant(f, f->inv(a)));
    }
    return g;
}

// An element of SL_2(F_q[t]) as a short word in elementary matrices.
M random_word(const FieldPtr& f, std::mt19937& rng) {
    M g = M::identity(f);
    for (int i = 0; i < 4; ++i) {
        const Elem c = static_cast<Elem>(1 + rng() % (f->q() - 1));
        const Series s = Series::monomial(f, c, -static_cast<int>(rng() % 3));
        g = g * (rng() % 2 ? M::upper(s) : M::lower(s));
    }
    return g;
}

// Upper triangular [[a pi^-m, b], [0, a^-1 pi^m]]: fixes the end 0.
M random_borel(const FieldPtr& f, std::mt19937& rng) {
    const Elem a = static_cast<Elem>(1 + rng() % (f->q() - 1));
    const int m = static_cast<int>(rng() % 5) - 2;
    return M(Series::monomial(f, a, -m), random_poly(f, rng, -2, 2), Series(f), Series::monomial(f, f->inv(a), m));
}

int bfs_distance(const Vertex& a, const Vertex& b, int cap) {
    std::unordered_map<Vertex, int, VertexHash> seen{{a, 0}};
    std::deque<Vertex> todo{a};
    while (!todo.empty()) {
        const Vertex v = todo.front();
        todo.pop_front();
        const int d = seen.at(v);
        if (v == b) return d;
        if (d == cap) continue;
        for (const auto& w : neighbors(v))
            if (seen.emplace(w, d + 1).second) todo.push_back(w);
    }
    return -1;
}

int ball_fixing_depth(const M& g, const Vertex& x, int cap) {
    int r = -1;
    for (int k = 0; k <= cap; ++k) {
        bool all = true;
        for_each_in_sphere(x, k, [&](const Vertex& y) {
            if (all && !(act_vertex(g, y) == y)) all = false;
        });
        if (!all) break;
        r = k;
    }
    return r;
}

CheckResult quotient_shape() {
    Tally t;
    const auto f = make_field(2);
    const auto spec = LatticeSpec::nagao(f);
    const auto g = quotient_graph(spec, 12);
    t.expect(g.is_path(), "Nagao quotient is not a path");
    t.expect(g.vertices.size() == 13, "wrong vertex count");
    for (const auto& v : g.vertices) {
        const long long want = v.level == 0 ? 6 : (1LL << (v.level + 1));
        t.expect(v.order == want, "order at level " + std::to_string(v.level));
        if (v.level <= 4)
            t.expect(stabilizer_bruteforce(spec, v.representative, std::max(1, v.level + 1)).order == want,
                     "brute force at level " + std::to_string(v.level));
    }
    for (const auto& e : g.edges)
        if (g.vertices[static_cast<std::size_t>(e.to)].level >= 2 || e.from != 0)
            t.expect(e.index_to == 2 && e.index_from == 1, "ray step index");
    t.expect(g.rays.size() == 1 && g.rays[0].certified && g.rays[0].ratio == 2, "ray tail");
    t.note("orders " + std::to_string(*g.vertices[0].order) + "," + std::to_string(*g.vertices[1].order) + "," +
           std::to_string(*g.vertices[2].order) + ",...," + std::to_string(*g.vertices[12].order));
    return t.result(1, "quotient shape");
}

CheckResult covolume_two_ways() {
    Tally t;
    const std::pair<int, Rational> cases[] = {{2, Rational(1)}, {3, Rational(1) / 4}};
    for (const auto& [q, want] : cases) {
        const auto spec = LatticeSpec::nagao(make_field(q));
        const auto geo = covolume(quotient_graph(spec, 20));
        const auto part = covolume_partial_sums(spec, 20);
        t.expect(geo.value == want, "tail covolume q=" + std::to_string(q));
        t.expect(part.total() == want, "partial sums q=" + std::to_string(q));
        t.note("q=" + std::to_string(q) + ": " + geo.to_string() + " = " + rational_string(part.partial_sum) + " + " +
               rational_string(part.remainder));
    }
    return t.result(2, "covolume, two ways");
}

CheckResult index_multiplicativity() {
    Tally t;
    const auto f = make_field(2);
    const auto nagao = covolume(quotient_graph(LatticeSpec::nagao(f), 8)).value;
    const auto level = covolume(quotient_graph(LatticeSpec::congruence(f, parse_tpoly(f, "t")), 8)).value;
    t.expect(level == 6 * nagao, "covolume(Gamma(t)) != 6 covolume(Gamma)");
    t.note(rational_string(level) + " = 6 * " + rational_string(nagao));
    return t.result(3, "index multiplicativity");
}

CheckResult sphere_intersections() {
    Tally t;
    for (int q : {2, 3}) {
        const auto f = make_field(q);
        const M h = parse_matrix(f, "[[p^-1,0],[0,p]]");
        for (const M& g : {h, h * h}) {
            const auto c = classify(g);
            const auto& hy = std::get<Hyperbolic>(c);
            const Vertex x = Vertex::origin(f);
            long long count = 0;
            for (const auto& y : sphere(act_vertex(g, x), hy.length))
                if (horosphere_contains(hy.attracting, x, y)) ++count;
            long long want = 1;
            for (int i = 0; i < hy.length; ++i) want *= q;
            t.expect(count == want, "q=" + std::to_string(q) + " l=" + std::to_string(hy.length));
            t.note("q=" + std::to_string(q) + " l=" + std::to_string(hy.length) + ": " + std::to_string(count));
        }
    }
    return t.result(4, "sphere and horosphere intersections");
}

CheckResult growth_bound() {
    Tally t;
    for (int q : {2, 3}) {
        const auto f = make_field(q);
        const auto orders = growth_probe(LatticeSpec::nagao(f), End::point(Series(f)), 12);
        long long bound = 1;
        for (int k = 0; k <= 12; ++k) {
            if (k > 0 && k % 3 == 0) bound *= static_cast<long long>(q) * q;
            t.expect(orders[static_cast<std::size_t>(k)] >= bound, "k=" + std::to_string(k));
        }
        t.note("q=" + std::to_string(q) + " orders " + join(orders));
    }
    return t.result(5, "stabilizer growth bound");
}

CheckResult cusp_stabilizer_elliptic(std::uint32_t seed) {
    Tally t;
    std::mt19937 rng(seed);
    const auto f = make_field(2);
    for (int i = 0; i < 100; ++i) {
        std::vector<Term> b;
        for (int d = 0; d <= 4; ++d) b.push_back(Term{-d, static_cast<Elem>(rng() % 2)});
        const M g(Series::one(f), Series(f, b), Series(f), Series::one(f));
        t.expect(is_elliptic(classify(g)), g.to_string('t'));
    }
    return t.result(6, "cusp stabilizer elements are elliptic");
}

CheckResult cuspidal_contrast() {
    Tally t;
    for (int q : {2, 3}) {
        const auto f = make_field(q);
        const auto spec = LatticeSpec::nagao(f);
        const auto cusp = growth_probe(spec, End::point(Series(f)), 9);
        for (std::size_t k = 2; k < cusp.size(); ++k) t.expect(cusp[k] > cusp[k - 1], "cusp ray not increasing");
        const End cf = continued_fraction_end(f, {1, 0, 0, 1, 0, 0, 0, 0, 1}, 10);
        const auto ap = growth_probe(spec, cf, 9);
        for (long long o : ap) t.expect(o <= nagao_vertex_order(q, 0), "aperiodic order above |SL_2(F_q)|");
        t.note("q=" + std::to_string(q) + " cusp " + join(cusp) + " aperiodic " + join(ap) +
               " (bounded evidence to depth 9)");
    }
    return t.result(7, "cuspidal and aperiodic rays");
}

CheckResult oracles(std::uint32_t seed) {
    Tally t;
    std::mt19937 rng(seed);
    const auto f = make_field(2);
    int samples = 0;
    while (samples < 50) {
        const Series a = random_poly(f, rng, -2, 2), b = random_poly(f, rng, -2, 2);
        const Series c = random_poly(f, rng, -2, 2), d = random_poly(f, rng, -2, 2);
        if ((a * d - b * c).is_exact_zero()) continue;
        const M g(a, b, c, d);
        if (!g.type_preserving()) continue;
        ++samples;
        int best = 1 << 20;
        for (const auto& v : ball(Vertex::origin(f), 6)) best = std::min(best, displacement(g, v));
        t.expect(translation_length(g) == best, "translation length " + g.to_string());
        t.expect(is_elliptic(classify(g)) == (best == 0), "classification " + g.to_string());
    }
    const auto centers = ball(Vertex::origin(f), 2);
    for (int i = 0; i < 50; ++i) {
        const Vertex x = centers[rng() % centers.size()];
        M k = random_compact(f, rng);
        if (i % 3 == 0) k = M::upper(Series::pi_power(f, static_cast<int>(rng() % 4)));
        if (i % 3 == 1) k = M::upper(random_poly(f, rng, 1, 3)) * M::lower(random_poly(f, rng, 2, 3));
        const M g = M::basis(x) * k * M::basis(x).adjugate();
        const Depth d = depth(g, x);
        const int oracle = ball_fixing_depth(g, x, 4);
        const int closed = d.kind == Depth::Kind::Unbounded ? 4 : std::min(d.value, 4);
        t.expect(d.kind != Depth::Kind::NotFixing && closed == oracle, "depth " + g.to_string());
    }
    std::vector<Vertex> box;
    for (int n = -2; n <= 4; ++n) {
        std::vector<int> degs;
        for (int d = -2; d < n; ++d) degs.push_back(d);
        const int k = static_cast<int>(degs.size());
        for (int mask = 0; mask < (1 << k); ++mask) {
            if (__builtin_popcount(mask) > 2) continue;
            std::vector<Term> terms;
            for (int i = 0; i < k; ++i)
                if (mask >> i & 1) terms.push_back(Term{degs[static_cast<std::size_t>(i)], 1});
            box.emplace_back(n, Series(f, terms));
        }
    }
    for (const auto& a : box)
        for (const auto& b : box) {
            const int d = distance(a, b);
            if (d <= 8) t.expect(bfs_distance(a, b, 8) == d, "distance " + a.to_string() + " " + b.to_string());
        }
    return t.result(8, "oracle equivalences");
}

CheckResult horoellipse_and_contraction() {
    Tally t;
    const auto f = make_field(2);
    const M u = parse_matrix(f, "[[1,1],[0,1]]");
    const HoroellipseQuery b(End::point(Series(f)), Vertex::origin(f), 1, 3);
    long long inside = 0;
    for (const auto& y : ball(Vertex::origin(f), 9))
        if (horoellipse_contains(b, y)) {
            ++inside;
            t.expect(act_vertex(u, y) == y, "u moves " + y.to_string());
        }
    const auto w = contraction_witness(u, parse_matrix(f, "[[p,0],[0,p^-1]]"), 6);
    for (std::size_t i = 1; i < w.size(); ++i) t.expect(w[i] - w[i - 1] == 2, "witness step");
    std::vector<long long> wl(w.begin(), w.end());
    t.note(std::to_string(inside) + " horoellipse vertices fixed; depths " + join(wl));
    return t.result(9, "horoellipse and contraction witness");
}

CheckResult cusp_bijection() {
    Tally t;
    for (int q : {2, 3}) {
        const auto f = make_field(q);
        const auto spec = LatticeSpec::congruence(f, parse_tpoly(f, "t"));
        const auto r = cusps_report(spec, 6);
        const std::size_t want = q == 2 ? 3 : 4;
        t.expect(r.algebraic.size() == want && r.geometric == static_cast<int>(want) && r.bijective,
                 "cusp counts q=" + std::to_string(q));
        const auto c = contract_all(quotient_graph(spec, 6));
        const auto fp = free_product_report(c);
        // a star: one finite vertex joined to each cusp vertex
        t.expect(c.vertices.size() == want + 1 && c.edges.size() == want, "contracted graph is not a star");
        t.expect(fp.applicable && fp.cusp_factors == static_cast<int>(want) && fp.free_rank == 0,
                 "free product q=" + std::to_string(q) + ": " + fp.reason);
        t.note("q=" + std::to_string(q) + ": " + std::to_string(r.algebraic.size()) + " algebraic, " +
               std::to_string(r.geometric) + " geometric, c=" + std::to_string(fp.cusp_factors) +
               " r=" + std::to_string(fp.free_rank));
    }
    return t.result(10, "cusp bijection and free product");
}

CheckResult independent_horoballs() {
    Tally t;
    const auto f = make_field(2);
    const auto spec = LatticeSpec::nagao(f);
    const auto cusp = cusp_representatives(spec).front();
    const auto n = find_entry_radius(spec, cusp, 6, 8);
    t.expect(n.has_value(), "no entry radius up to 6");
    if (n) {
        const Vertex x = ray_vertex(cusp.end, Vertex::origin(f), *n);
        const auto res = certify_independent_horoball(spec, cusp, x, 8);
        t.expect(std::holds_alternative<CertifiedIndependent>(res), "certification at the entry radius");
        if (auto* c = std::get_if<CertifiedIndependent>(&res))
            t.note("entry radius " + std::to_string(*n) + ", " + std::to_string(c->vertices_checked) +
                   " vertices, " + std::to_string(c->pairs_checked) + " pairs");
    }
    const auto bad = certify_independent_horoball(spec, cusp, Vertex::origin(f), 8);
    const auto* c = std::get_if<CounterexamplePair>(&bad);
    t.expect(c != nullptr, "no counterexample at v0");
    if (c) {
        t.expect(act_vertex(c->g, c->y) == c->y_prime && contains(spec, c->g) && !fixes_end(c->g, cusp.end) &&
                     horoball_contains(cusp.end, Vertex::origin(f), c->y) &&
                     horoball_contains(cusp.end, Vertex::origin(f), c->y_prime),
                 "counterexample witness");
        t.note("counterexample g=" + c->g.to_string('t') + " on " + c->y.to_string() + " -> " + c->y_prime.to_string());
    }
    return t.result(11, "independent horoballs");
}

CheckResult identity_suite(std::uint32_t seed) {
    Tally t;
    std::mt19937 rng(seed);
    for (int q : {2, 3}) {
        const auto f = make_field(q);
        const End zero = End::point(Series(f));
        const auto pool = ball(parse_vertex(f, "(1; p^-1)"), 4);
        auto pick = [&] { return pool[rng() % pool.size()]; };
        auto random_end = [&] {
            Series num = random_poly(f, rng, -1, 2), den = random_poly(f, rng, -1, 2);
            if (den.is_exact_zero()) return End::up(f);
            return End::rational(num, den);
        };
        for (int i = 0; i < 200; ++i) {
            const End e = random_end();
            const Vertex a = pick(), b = pick(), c = pick();
            t.expect(busemann(a, b, e) + busemann(b, c, e) == busemann(a, c, e), "cocycle");
            const M alpha = random_word(f, rng);
            t.expect(horosphere_contains(e, a, b) ==
                         horosphere_contains(act_end(alpha, e), act_vertex(alpha, a), act_vertex(alpha, b)),
                     "horosphere equivariance");
        }
        for (int i = 0; i < 200; ++i) {
            const M g = random_borel(f, rng), h = random_borel(f, rng);
            t.expect(oriented_length(g * h, zero) == oriented_length(g, zero) + oriented_length(h, zero),
                     "additivity");
            if (oriented_length(g, zero) == 0) t.expect(is_elliptic(classify(g)), "kernel element not elliptic");
        }
        // U = {[[1, b], [0, 1]]} acts on ends z != 0 by 1/z -> 1/z + b.
        for (int i = 0; i < 200; ++i) {
            const Series n1 = random_poly(f, rng, -1, 2), d1 = random_poly(f, rng, -1, 2);
            const Series n2 = random_poly(f, rng, -1, 2), d2 = random_poly(f, rng, -1, 2);
            if (n1.is_exact_zero() || n2.is_exact_zero()) continue;
            const End e1 = End::rational(n1, d1), e2 = End::rational(n2, d2);
            const M u(n1 * n2, d2 * n1 - d1 * n2, Series(f), n1 * n2);
            t.expect(act_end(u, e1).same_as(e2) && fixes_end(u, zero), "U does not move e1 to e2");
            const bool trivial = (d2 * n1 - d1 * n2).is_exact_zero();
            t.expect(trivial == e1.same_as(e2), "U is not free on ends");
        }
        // Truncated horosphere of x = (3; 0): (3 + 2k; a) with v(a) = 3 + k.
        const Vertex x(3, Series(f));
        long long hit = 0;
        for (const auto& y : ball(x, 8)) {
            if (!horosphere_contains(zero, x, y) || y == x) continue;
            const int m = y.residue().valuation();
            const Series inv = y.residue().inverse(2 * m);
            const Series b(f, inv.terms());
            t.expect(act_vertex(M::upper(b), x) == y, "U misses " + y.to_string());
            ++hit;
        }
        t.expect(hit > 0, "empty truncated horosphere");
        t.note("q=" + std::to_string(q) + ": " + std::to_string(hit) + " horosphere vertices reached");
    }
    return t.result(12, "identity suite");
}

}  // namespace

CheckResult run_check(int id, std::uint32_t seed) {
    try {
        switch (id) {
            case 1: return quotient_shape();
            case 2: return covolume_two_ways();
            case 3: return index_multiplicativity();
            case 4: return sphere_intersections();
            case 5: return growth_bound();
            case 6: return cusp_stabilizer_elliptic(seed);
            case 7: return cuspidal_contrast();
            case 8: return oracles(seed);
            case 9: return horoellipse_and_contraction();
            case 10: return cusp_bijection();
            case 11: return independent_horoballs();
            case 12: return identity_suite(seed);
            default: throw InvalidInput("no check " + std::to_string(id));
        }
    } catch (const InvalidInput& e) {
        if (id < 1 || id > kCheckCount) throw;
        return {id, "check " + std::to_string(id), false, std::string("invalid input: ") + e.what()};
    } catch (const Error& e) {
        return {id, "check " + std::to_string(id), false, std::string("error: ") + e.what()};
    }
}

std::vector<CheckResult> run_all_checks(std::uint32_t seed) {
    std::vector<CheckResult> out;
    for (int id = 1; id <= kCheckCount; ++id) out.push_back(run_check(id, seed));
    return out;
}

}  // namespace btcusp
