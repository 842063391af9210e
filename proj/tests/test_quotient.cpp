#include <map>

#include "btcusp/errors.hpp"
#include "btcusp/literal.hpp"
#include "btcusp/quotient.hpp"
#include "doctest.h"

using namespace btcusp;

namespace {

LatticeSpec congruence(const FieldPtr& f, const char* level) {
    return LatticeSpec::congruence(f, parse_tpoly(f, level));
}

Rational R(long long n, long long d = 1) { return Rational(n) / Rational(d); }

// Each quotient vertex of finite group has q + 1 neighbours upstairs, split by edge indices.
void check_valence(const GraphOfGroups& g) {
    std::map<int, long long> sum;
    for (const auto& e : g.edges) {
        sum[e.from] += e.index_from;
        sum[e.to] += e.index_to;
    }
    for (const auto& v : g.vertices)
        if (v.level < g.depth) CHECK_MESSAGE(sum[v.id] == g.spec.q() + 1, "vertex ", v.id);
}

// Mass formula per level: sum of 1/|Gamma(f)_v| equals |G| / |Gamma_(n;0)|.
void check_mass(const GraphOfGroups& g, long long group) {
    std::map<int, Rational> mass;
    for (const auto& v : g.vertices) mass[v.level] += R(1, *v.order);
    for (const auto& [n, m] : mass) CHECK(m == R(group, nagao_vertex_order(g.spec.q(), n)));
}

}  // namespace

TEST_CASE("Nagao quotient is the standard ray") {
    for (int q : {2, 3}) {
        const auto f = make_field(q);
        const auto g = quotient_graph(LatticeSpec::nagao(f), 6);
        CHECK(g.is_path());
        REQUIRE(g.vertices.size() == 7);
        for (int n = 0; n <= 6; ++n) {
            CHECK(g.vertices[static_cast<std::size_t>(n)].level == n);
            CHECK(*g.vertices[static_cast<std::size_t>(n)].order == nagao_vertex_order(q, n));
            CHECK(g.vertices[static_cast<std::size_t>(n)].representative == Vertex(n, Series(f)));
        }
        CHECK(*g.vertices[0].order == (q == 2 ? 6 : 24));
        CHECK(*g.vertices[1].order == (q == 2 ? 4 : 18));
        CHECK(*g.vertices[2].order == (q == 2 ? 8 : 54));
        CHECK(g.edges[0].order == q * (q - 1));
        CHECK(g.edges[0].index_from == q + 1);
        CHECK(g.edges[0].index_to == q);
        CHECK(g.edges[1].index_from == 1);
        CHECK(g.edges[1].index_to == q);
        REQUIRE(g.rays.size() == 1);
        CHECK(g.rays[0].certified);
        CHECK(g.rays[0].start_level == 1);
        check_valence(g);
        check_mass(g, 1);
    }
}

TEST_CASE("congruence quotients") {
    const auto f2 = make_field(2);
    SUBCASE("Gamma(t), q = 2: a tripod") {
        const auto g = quotient_graph(congruence(f2, "t"), 5);
        CHECK(std::count_if(g.vertices.begin(), g.vertices.end(), [](auto& v) { return v.level == 0; }) == 1);
        CHECK(g.rays.size() == 3);
        CHECK(*g.vertices[0].order == 1);
        for (const auto& r : g.rays) {
            CHECK(r.certified);
            CHECK(r.start_level == 1);
            CHECK(r.first_edge_order == 2);
        }
        check_valence(g);
        check_mass(g, 6);
    }
    SUBCASE("Gamma(t), q = 3") {
        const auto g = quotient_graph(congruence(make_field(3), "t"), 5);
        CHECK(g.rays.size() == 4);
        check_valence(g);
        check_mass(g, 24);
    }
    SUBCASE("Gamma(t^2), q = 2") {
        const auto g = quotient_graph(congruence(f2, "t^2"), 6);
        CHECK(std::count_if(g.vertices.begin(), g.vertices.end(), [](auto& v) { return v.level == 0; }) == 8);
        CHECK(g.rays.size() == 12);
        check_valence(g);
        check_mass(g, 48);
    }
    SUBCASE("Gamma(t^2+t), q = 2") {
        const auto g = quotient_graph(congruence(f2, "t^2+t"), 6);
        check_valence(g);
        check_mass(g, 36);
        CHECK(g.rays.size() == cusp_representatives(g.spec).size());
    }
    CHECK_THROWS_AS(quotient_graph(LatticeSpec::nagao(f2), 1), InvalidInput);
    CHECK_THROWS_AS(quotient_graph(congruence(make_field(3), "t^3"), 4, 1000), SizeGuard);
}

TEST_CASE("covolume") {
    const auto f2 = make_field(2), f3 = make_field(3);
    struct Case {
        LatticeSpec spec;
        Rational expected;
    };
    const std::vector<Case> cases{{LatticeSpec::nagao(f2), R(1)},
                                  {LatticeSpec::nagao(f3), R(1, 4)},
                                  {congruence(f2, "t"), R(6)},
                                  {congruence(f3, "t"), R(6)},
                                  {congruence(f2, "t^2"), R(48)},
                                  {congruence(f2, "t^2+t"), R(36)}};
    for (const auto& c : cases) {
        CAPTURE(c.spec.to_string());
        for (int depth : {4, 7}) {
            const auto v = covolume(quotient_graph(c.spec, depth));
            CHECK(v.value == c.expected);
            const auto p = covolume_partial_sums(c.spec, depth);
            CHECK(p.total() == c.expected);
        }
    }
    CHECK(covolume(quotient_graph(LatticeSpec::nagao(f2), 3)).to_string() == "1/1");
    // Partial sums approach the value with an exact geometric remainder.
    const auto p = covolume_partial_sums(LatticeSpec::nagao(f2), 10);
    CHECK(p.remainder == R(2, 2048));
    CHECK(p.partial_sum < R(1));
}

TEST_CASE("covolume needs certified tails") {
    const auto f2 = make_field(2);
    // Gamma(t^3) only stabilizes from level 2 on, beyond what depth 2 certifies.
    const auto g = quotient_graph(congruence(f2, "t^3"), 2);
    CHECK_FALSE(g.rays.front().certified);
    CHECK_THROWS_AS(covolume(g), UncertifiedTail);
    CHECK_THROWS_AS(contract_all(g), UncertifiedTail);
}

TEST_CASE("cusps report") {
    const auto f2 = make_field(2), f3 = make_field(3);
    struct Case {
        LatticeSpec spec;
        int cusps;
    };
    for (const auto& c : std::vector<Case>{{LatticeSpec::nagao(f2), 1},
                                           {congruence(f2, "t"), 3},
                                           {congruence(f3, "t"), 4},
                                           {congruence(f2, "t^2"), 12}}) {
        const auto r = cusps_report(c.spec, 5);
        CHECK(r.algebraic.size() == static_cast<std::size_t>(c.cusps));
        CHECK(r.geometric == c.cusps);
        CHECK(r.bijective);
    }
}

TEST_CASE("cusp ray matches its end") {
    // The ray matched to a cusp leads to a vertex on the ray towards that cusp's end.
    const auto spec = congruence(make_field(2), "t");
    const auto g = quotient_graph(spec, 5);
    const CosetTable table(spec);
    const Vertex v0 = Vertex::origin(spec.field());
    for (const auto& r : g.rays) {
        const auto& cusp = g.cusps[static_cast<std::size_t>(r.cusp)];
        const Vertex far = ray_vertex(cusp.end, v0, 4);
        const auto red = reduce_vertex(far);
        CHECK(red.level == 4);
        const auto& rep = g.vertices[static_cast<std::size_t>(r.vertices[3])];
        // far and rep are Gamma(f)-equivalent iff their reductions lie in one H_4 coset.
        const auto h = table.left_cosets(table.subgroup(table.vertex_image_generators(4)));
        const auto red_rep = reduce_vertex(rep.representative);
        CHECK(h.label[table.inv(table.reduce(red.witness))] == h.label[table.inv(table.reduce(red_rep.witness))]);
    }
}

TEST_CASE("growth probe") {
    const auto f = make_field(2);
    const auto spec = LatticeSpec::nagao(f);
    const auto orders = growth_probe(spec, End::point(Series(f)), 6);
    CHECK(orders == std::vector<long long>{6, 4, 8, 16, 32, 64, 128});
    for (std::size_t k = 0; k < orders.size(); ++k) {
        long long bound = 1;
        for (std::size_t i = 0; i < k / 3; ++i) bound *= 4;
        CHECK(orders[k] >= bound);
    }
    const End cf = continued_fraction_end(f, {1, 0, 0, 1, 0, 0, 0, 0, 1}, 10);
    for (long long o : growth_probe(spec, cf, 8)) CHECK(o <= 6);
}

TEST_CASE("independent horoballs") {
    const auto f2 = make_field(2);
    const auto nagao = LatticeSpec::nagao(f2);
    const auto cusp = cusp_representatives(nagao).front();
    SUBCASE("entry radius") {
        const auto r = find_entry_radius(nagao, cusp, 4, 5);
        REQUIRE(r);
        CHECK(*r == 1);
        const auto res = certify_independent_horoball(nagao, cusp, Vertex(1, Series(f2)), 6);
        REQUIRE(std::holds_alternative<CertifiedIndependent>(res));
        CHECK(std::get<CertifiedIndependent>(res).pairs_checked > 0);
    }
    SUBCASE("counterexample at v0") {
        const auto res = certify_independent_horoball(nagao, cusp, Vertex::origin(f2), 4);
        REQUIRE(std::holds_alternative<CounterexamplePair>(res));
        const auto& c = std::get<CounterexamplePair>(res);
        CHECK(act_vertex(c.g, c.y) == c.y_prime);
        CHECK_FALSE(fixes_end(c.g, cusp.end));
        CHECK(contains(nagao, c.g));
        const End zero = End::point(Series(f2));
        CHECK(horoball_contains(zero, Vertex::origin(f2), c.y));
        CHECK(horoball_contains(zero, Vertex::origin(f2), c.y_prime));
    }
    SUBCASE("x must lie on the cusp ray") {
        CHECK_THROWS_AS(certify_independent_horoball(nagao, cusp, Vertex(1, Series::one(f2)), 3), InvalidInput);
    }
    SUBCASE("Gamma(t): every cusp independent, horoballs disjoint") {
        const auto spec = congruence(f2, "t");
        const auto cusps = cusp_representatives(spec);
        for (const auto& c : cusps) {
            const Vertex v0 = Vertex::origin(f2);
            const auto r = find_entry_radius(spec, c, 3, 4);
            REQUIRE(r);
            CHECK(*r <= 1);
            CHECK(std::holds_alternative<CertifiedIndependent>(
                certify_independent_horoball(spec, c, ray_vertex(c.end, v0, 1), 6)));
        }
        const auto res = certify_disjoint_horoballs(spec, cusps, 1, 6);
        CHECK(std::holds_alternative<CertifiedIndependent>(res));
    }
    SUBCASE("overlapping horoballs are caught") {
        const auto spec = congruence(f2, "t");
        const auto cusps = cusp_representatives(spec);
        // Horoballs around v0 itself contain v0 for every cusp.
        const auto res = certify_disjoint_horoballs(spec, cusps, 0, 2);
        REQUIRE(std::holds_alternative<CounterexamplePair>(res));
        const auto& c = std::get<CounterexamplePair>(res);
        CHECK(act_vertex(c.g, c.y) == c.y_prime);
        CHECK(contains(spec, c.g));
    }
}

TEST_CASE("contraction") {
    const auto f2 = make_field(2);
    SUBCASE("Nagao") {
        const auto g = contract_all(quotient_graph(LatticeSpec::nagao(f2), 5));
        CHECK(g.vertices.size() == 2);
        CHECK(g.edges.size() == 1);
        CHECK(g.cusp_vertex_count() == 1);
        CHECK(g.rays.empty());
        CHECK(g.edges[0].index_to == 0);
        const auto fp = free_product_report(g);
        CHECK_FALSE(fp.applicable);
        CHECK_THROWS_AS(contract_all(quotient_graph(LatticeSpec::nagao(f2), 5), 0), UncertifiedTail);
    }
    SUBCASE("Gamma(t) is a free product of three cusp groups") {
        const auto g = contract_all(quotient_graph(congruence(f2, "t"), 5));
        CHECK(g.vertices.size() == 4);
        CHECK(g.edges.size() == 3);
        const auto fp = free_product_report(g);
        CHECK(fp.applicable);
        CHECK(fp.cusp_factors == 3);
        CHECK(fp.free_rank == 0);
    }
    SUBCASE("Gamma(t^2)") {
        const auto g = contract_all(quotient_graph(congruence(f2, "t^2"), 5));
        CHECK(g.cusp_vertex_count() == 12);
        const auto fp = free_product_report(g);
        CHECK(fp.applicable);
        CHECK(fp.free_rank == 5);
    }
    SUBCASE("later start keeps more of the ray") {
        const auto g = contract_all(quotient_graph(congruence(f2, "t"), 5), 3);
        CHECK(g.vertices.size() == 1 + 3 * 2 + 3);
        CHECK_FALSE(free_product_report(g).applicable);
    }
    SUBCASE("partial contraction") {
        const auto q = quotient_graph(congruence(f2, "t"), 5);
        const auto g = contract(q, {1});
        CHECK(g.rays.size() == 2);
        CHECK(g.cusp_vertex_count() == 1);
        CHECK_FALSE(free_product_report(g).applicable);
        CHECK_THROWS_AS(contract(q, {7}), InvalidInput);
    }
}

TEST_CASE("barycentric subdivision") {
    const auto g = quotient_graph(LatticeSpec::nagao(make_field(2)), 4);
    const auto b = barycentric(g);
    CHECK(b.view == "X'");
    CHECK(b.vertices.size() == g.vertices.size() + g.edges.size());
    CHECK(b.edges.size() == 2 * g.edges.size());
    CHECK(b.vertices.back().midpoint);
    CHECK(b.vertices.back().ramification == 1);
    CHECK_THROWS_AS(covolume(b), InvalidInput);
}

TEST_CASE("serialization") {
    const auto g = quotient_graph(LatticeSpec::nagao(make_field(2)), 3);
    const auto j = to_json(g, covolume(g));
    CHECK(j["covolume"] == "1/1");
    CHECK(j["vertices"].size() == 4);
    CHECK(j["vertices"][0]["order"] == 6);
    CHECK(j["edges"][0]["order"] == 2);
    CHECK(j["rays"][0]["certified"] == true);
    CHECK(j.dump() == to_json(quotient_graph(LatticeSpec::nagao(make_field(2)), 3), covolume(g)).dump());
    const auto c = to_json(contract_all(g));
    CHECK(c["vertices"][1]["order"] == "infinite");
    const auto dot = to_dot(contract_all(g));
    CHECK(dot.find("doublecircle") != std::string::npos);
    CHECK(dot.rfind("graph quotient {", 0) == 0);
}
