#include <random>

#include "btcusp/autom.hpp"
#include "btcusp/errors.hpp"
#include "btcusp/literal.hpp"
#include "doctest.h"

using namespace btcusp;

namespace {

using M = TreeAutomorphism;

M mat(const FieldPtr& f, const char* s) { return parse_matrix(f, s); }
Vertex V(const FieldPtr& f, const char* s) { return parse_vertex(f, s); }

Series random_poly(const FieldPtr& f, std::mt19937& rng, int lo, int hi) {
    std::vector<Term> t;
    for (int d = lo; d <= hi; ++d) t.push_back(Term{d, static_cast<Elem>(rng() % f->q())});
    return Series(f, t);
}

// Random product of elementary matrices over F_q[pi]: an element of SL_2(O).
M random_compact(const FieldPtr& f, std::mt19937& rng) {
    M g = M::identity(f);
    for (int i = 0; i < 4; ++i) {
        g = g * M::upper(random_poly(f, rng, 0, 3)) * M::lower(random_poly(f, rng, 0, 3));
        const Elem a = static_cast<Elem>(1 + rng() % (f->q() - 1));
        g = g * M::diag(Series::constant(f, a), Series::constant(f, f->inv(a)));
    }
    return g;
}

int min_displacement(const M& g, int radius) {
    int best = 1 << 20;
    for (const auto& v : ball(Vertex::origin(g.field()), radius)) best = std::min(best, displacement(g, v));
    return best;
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

}  // namespace

TEST_CASE("act_vertex examples") {
    auto f = make_field(2);
    const Vertex v = V(f, "(3; p^-1+p)");
    CHECK(act_vertex(M::identity(f), v) == v);
    CHECK(act_vertex(mat(f, "[[p^-1,0],[0,p]]"), Vertex::origin(f)) == V(f, "(2; 0)"));
    CHECK(act_vertex(mat(f, "[[1,1],[0,1]]"), Vertex::origin(f)) == Vertex::origin(f));
}

TEST_CASE("act_vertex is a distance-preserving action") {
    std::mt19937 rng(17);
    for (int q : {2, 3}) {
        auto f = make_field(q);
        const auto pool = ball(V(f, "(1; p^-1)"), 3);
        for (int i = 0; i < 60; ++i) {
            const M g(random_poly(f, rng, -2, 2), random_poly(f, rng, -2, 2), random_poly(f, rng, -2, 2),
                      random_poly(f, rng, -2, 2) + Series::pi_power(f, 3));
            const M h = random_compact(f, rng) * mat(f, "[[p,0],[0,1]]");
            const Vertex& a = pool[rng() % pool.size()];
            const Vertex& b = pool[rng() % pool.size()];
            CHECK(act_vertex(g * h, a) == act_vertex(g, act_vertex(h, a)));
            CHECK(distance(act_vertex(g, a), act_vertex(g, b)) == distance(a, b));
            CHECK(act_vertex(g.scaled(Series::pi_power(f, 5)), a) == act_vertex(g, a));
        }
    }
}

TEST_CASE("act_vertex reports missing precision") {
    auto f = make_field(2);
    const M g(Series(f, {Term{0, 1}}, 2), Series(f), Series::big_o(f, 2), Series(f, {Term{0, 1}}, 2));
    CHECK(act_vertex(g, Vertex::origin(f)) == Vertex::origin(f));
    try {
        (void)act_vertex(g, V(f, "(5; 0)"));
        FAIL("expected InsufficientPrecision");
    } catch (const InsufficientPrecision& e) {
        CHECK(e.needed() > 2);
    }
}

TEST_CASE("act_end") {
    auto f = make_field(2);
    const End zero = End::point(Series(f));
    const M u = mat(f, "[[1,1],[0,1]]");
    const M w = M::weyl(f);
    CHECK(act_end(u, zero).same_as(zero));
    CHECK(act_end(w, zero).is_up());
    CHECK(act_end(w, End::up(f)).same_as(zero));
    CHECK(act_end(M::identity(f), End::point(Series::one(f))).same_as(End::point(Series::one(f))));
    // compatibility with the vertex action along rays, and the intertwining identity
    std::mt19937 rng(23);
    for (int i = 0; i < 50; ++i) {
        const M g = random_compact(f, rng) * M::diag(Series::pi_power(f, -static_cast<int>(rng() % 3)), Series::one(f));
        const End e = End::rational(random_poly(f, rng, -1, 2), random_poly(f, rng, 0, 2) + Series::one(f));
        const End ge = act_end(g, e);
        const Vertex x = Vertex::origin(f);
        for (int k = 0; k <= 8; ++k) {
            const Vertex img = act_vertex(g, ray_vertex(e, x, k + 8));
            CHECK(ray_vertex(ge, img, 0) == img);
            CHECK(act_vertex(g, step_to_end(e, ray_vertex(e, x, k))) ==
                  step_to_end(ge, act_vertex(g, ray_vertex(e, x, k))));
        }
        // the image ray converges to the image end
        const Vertex far = act_vertex(g, ray_vertex(e, x, 20));
        CHECK(busemann(act_vertex(g, x), far, ge) == distance(act_vertex(g, x), far));
    }
    const End tr = parse_end(f, "trunc(1+p+p^3, 8)");
    const End img = act_end(u, tr);
    CHECK(img.kind() == End::Kind::Truncated);
    // 1 + z has valuation 1, so z / (1 + z) is only known mod p^6
    CHECK(img.horizon() == 6);
}

TEST_CASE("classify examples") {
    auto f = make_field(2);
    const M h = mat(f, "[[p^-1,0],[0,p]]");
    const auto c = classify(h);
    REQUIRE(std::holds_alternative<Hyperbolic>(c));
    const auto& hy = std::get<Hyperbolic>(c);
    CHECK(hy.length == 2);
    CHECK(hy.attracting.same_as(End::point(Series(f))));
    CHECK(hy.repelling.is_up());
    CHECK(is_elliptic(classify(mat(f, "[[1,1],[0,1]]"))));
    CHECK(is_elliptic(classify(M::identity(f))));
    CHECK(translation_length(mat(f, "[[p^-2,0],[0,p^2]]")) == 4);
    CHECK(translation_length(h.inverse()) == 2);
    CHECK_THROWS_AS(classify(mat(f, "[[p,0],[0,1]]")), InvalidInput);
}

TEST_CASE("hyperbolic axes with generic ends") {
    auto f = make_field(3);
    const M g = mat(f, "[[1,1],[1,2]]") * mat(f, "[[p^-1,0],[0,p]]") * mat(f, "[[1,1],[1,2]]").inverse();
    const auto c = classify(g, 12);
    REQUIRE(std::holds_alternative<Hyperbolic>(c));
    const auto& hy = std::get<Hyperbolic>(c);
    CHECK(hy.length == 2);
    // ends of the axis are the images of 0 and up
    const End a = act_end(mat(f, "[[1,1],[1,2]]"), End::point(Series(f)));
    const End r = act_end(mat(f, "[[1,1],[1,2]]"), End::up(f));
    CHECK(hy.attracting.point_mod(12) == a.point_mod(12));
    CHECK(hy.repelling.point_mod(12) == r.point_mod(12));
}

TEST_CASE("classification matches the displacement oracle") {
    auto f = make_field(2);
    std::mt19937 rng(31);
    int samples = 0, hyperbolic = 0;
    while (samples < 50) {
        const M g(random_poly(f, rng, -2, 2), random_poly(f, rng, -2, 2), random_poly(f, rng, -2, 2),
                  random_poly(f, rng, -2, 2));
        if (g.det().is_exact_zero()) continue;
        if (!g.type_preserving()) continue;
        ++samples;
        const int oracle = min_displacement(g, 6);
        const auto c = classify(g);
        CHECK(translation_length(g) == oracle);
        CHECK(is_elliptic(c) == (oracle == 0));
        if (!is_elliptic(c)) {
            ++hyperbolic;
            const auto& hy = std::get<Hyperbolic>(c);
            CHECK(hy.length == oracle);
            CHECK(oriented_length(g, hy.attracting) == hy.length);
            CHECK(oriented_length(g, hy.repelling) == -hy.length);
        } else {
            const Vertex& fx = std::get<Elliptic>(c).fixed_vertex;
            CHECK(act_vertex(g, fx) == fx);
        }
    }
    CHECK(hyperbolic > 5);
}

TEST_CASE("oriented length") {
    auto f = make_field(2);
    const M h = mat(f, "[[p^-1,0],[0,p]]");
    const End zero = End::point(Series(f));
    CHECK(oriented_length(h, zero) == 2);
    CHECK(oriented_length(h, End::up(f)) == -2);
    CHECK(oriented_length(mat(f, "[[1,1],[0,1]]"), zero) == 0);
    CHECK_THROWS_AS(oriented_length(h, End::point(Series::one(f))), DoesNotFixEnd);
    for (const auto& x : ball(V(f, "(1; 1)"), 2)) CHECK(oriented_length(h, zero, x) == 2);
}

TEST_CASE("oriented length on the Borel subgroup") {
    std::mt19937 rng(41);
    auto f = make_field(3);
    const End zero = End::point(Series(f));
    auto random_borel = [&] {
        const Elem a = static_cast<Elem>(1 + rng() % 2);
        const int m = static_cast<int>(rng() % 5) - 2;
        const Series x = Series::monomial(f, a, -m);
        const Series y = Series::monomial(f, f->inv(a), m);
        return M(x, random_poly(f, rng, -2, 2), Series(f), y);
    };
    for (int i = 0; i < 100; ++i) {
        const M g = random_borel();
        const M h = random_borel();
        CHECK(oriented_length(g * h, zero) == oriented_length(g, zero) + oriented_length(h, zero));
        CHECK((oriented_length(g, zero) == 0) == is_elliptic(classify(g)));
        if (oriented_length(g, zero) == 0) {
            // elliptic elements fixing the end preserve every horosphere
            for (const auto& y : sphere(Vertex::origin(f), 3))
                CHECK(horosphere_contains(zero, Vertex::origin(f), act_vertex(g, y)) ==
                      horosphere_contains(zero, Vertex::origin(f), y));
        }
        // g maps horospheres to horospheres
        const Vertex x = V(f, "(1; 2)");
        for (int r = 1; r <= 4; ++r)
            for (const auto& y : sphere(x, r))
                CHECK(horosphere_contains(zero, x, y) == horosphere_contains(zero, act_vertex(g, x), act_vertex(g, y)));
    }
}

TEST_CASE("depth examples") {
    auto f = make_field(2);
    const M u = mat(f, "[[1,1],[0,1]]");
    for (int n = 0; n <= 6; ++n) CHECK(depth(u, Vertex(n, Series(f))) == Depth::finite(n));
    CHECK(depth(M::identity(f), V(f, "(3; p)")) == Depth::unbounded());
    CHECK(depth(mat(f, "[[p^-1,0],[0,p]]"), Vertex::origin(f)) == Depth::not_fixing());
    for (int q : {4, 5}) {
        auto fq = make_field(q);
        const Elem a = fq->primitive();
        const M d = M::diag(Series::constant(fq, a), Series::constant(fq, fq->inv(a)));
        CHECK(depth(d, Vertex::origin(fq)) == Depth::finite(0));
        CHECK(ball_fixing_depth(d, Vertex::origin(fq), 3) == 0);
    }
    // in F_3 the only nontrivial diagonal unit is -I, which is central
    auto f3 = make_field(3);
    CHECK(depth(M::diag(Series::constant(f3, 2), Series::constant(f3, 2)), Vertex::origin(f3)) == Depth::unbounded());
}

TEST_CASE("depth matches the ball-fixing oracle") {
    std::mt19937 rng(53);
    for (int q : {2, 3}) {
        auto f = make_field(q);
        const auto centers = ball(Vertex::origin(f), 2);
        for (int i = 0; i < 50; ++i) {
            const Vertex x = centers[rng() % centers.size()];
            M k = random_compact(f, rng);
            if (i % 3 == 0) k = M::upper(Series::pi_power(f, static_cast<int>(rng() % 4)));
            if (i % 3 == 1) k = M::upper(random_poly(f, rng, 1, 3)) * M::lower(random_poly(f, rng, 2, 3));
            const M g = M::basis(x) * k * M::basis(x).adjugate();
            const Depth d = depth(g, x);
            const int oracle = ball_fixing_depth(g, x, 4);
            REQUIRE(oracle >= 0);
            if (d.kind == Depth::Kind::Unbounded) {
                CHECK(oracle == 4);
            } else {
                REQUIRE(d.kind == Depth::Kind::Finite);
                CHECK(std::min(d.value, 4) == oracle);
            }
        }
    }
}

TEST_CASE("unipotent classification") {
    auto f = make_field(2);
    const End zero = End::point(Series(f));
    const auto c = unipotent_class(mat(f, "[[1,t],[0,1]]"));
    CHECK(c.kind == UnipotentKind::Good);
    REQUIRE(c.fixed_end);
    CHECK(c.fixed_end->same_as(zero));
    REQUIRE(c.witness);
    CHECK(c.witness->ecc_num == 1);
    CHECK(c.witness->ecc_den == 3);
    CHECK(unipotent_class(mat(f, "[[p^-1,0],[0,p]]")).kind == UnipotentKind::NotUnipotent);
    CHECK(unipotent_class(M::identity(f)).kind == UnipotentKind::NotUnipotent);
    // a non-square determinant in characteristic 2 has no rational eigenline
    CHECK(unipotent_class(mat(f, "[[0,1],[1+p,0]]")).kind == UnipotentKind::Anisotropic);

    auto f3 = make_field(3);
    const auto l = unipotent_class(mat(f3, "[[1,0],[t^2,1]]"));
    CHECK(l.kind == UnipotentKind::Good);
    CHECK(l.fixed_end->is_up());
    // -u is projectively the same unipotent
    CHECK(unipotent_class(mat(f3, "[[2,1],[0,2]]")).kind == UnipotentKind::Good);
}

TEST_CASE("sampled unipotents are good and elliptic") {
    std::mt19937 rng(61);
    for (int q : {2, 3, 4}) {
        auto f = make_field(q);
        for (int i = 0; i < 20; ++i) {
            const M k = random_compact(f, rng) * mat(f, "[[p^-1,0],[0,1]]");
            const Series b = random_poly(f, rng, -2, 1);
            if (b.is_exact_zero()) continue;
            const M u = k * M::upper(b) * k.adjugate();
            const auto c = unipotent_class(u);
            CHECK(c.kind == UnipotentKind::Good);
            CHECK(fixes_end(u, *c.fixed_end));
            CHECK(is_elliptic(classify(u)));
        }
    }
}

TEST_CASE("u fixes the eccentricity 1/3 horoellipse") {
    auto f = make_field(2);
    const M u = mat(f, "[[1,1],[0,1]]");
    const HoroellipseQuery b(End::point(Series(f)), Vertex::origin(f), 1, 3);
    int inside = 0;
    for (const auto& y : ball(Vertex::origin(f), 9)) {
        if (!horoellipse_contains(b, y)) continue;
        ++inside;
        CHECK(act_vertex(u, y) == y);
    }
    CHECK(inside > 10);
}

TEST_CASE("contraction witness") {
    auto f = make_field(2);
    const M u = mat(f, "[[1,1],[0,1]]");
    const M h = mat(f, "[[p,0],[0,p^-1]]");
    CHECK(contraction_witness(u, h, 3) == std::vector<int>{0, 2, 4, 6});
    CHECK(contraction_witness(u, h, 0).size() == 1);
    CHECK_THROWS_AS(contraction_witness(u, h.inverse(), 3), InvalidInput);
    auto f3 = make_field(3);
    const auto d = contraction_witness(mat(f3, "[[1,t],[0,1]]"), mat(f3, "[[p^2,0],[0,p^-2]]"), 4);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] - d[i - 1] == 4);
}

TEST_CASE("modular index") {
    for (int q : {2, 3}) {
        auto f = make_field(q);
        const M h = mat(f, "[[p^-1,0],[0,p]]");
        const End zero = End::point(Series(f));
        const long long q2 = static_cast<long long>(q) * q;
        CHECK(modular_index(h, zero, Vertex::origin(f)) == q2);
        CHECK(modular_index(h * h, zero, Vertex::origin(f)) == q2 * q2);
        CHECK(modular_index_closed_form(h, zero, Vertex::origin(f)) == q2);
        CHECK_THROWS_AS(modular_index(h, zero, V(f, "(1; 1)")), NotOnAxis);
    }
}

TEST_CASE("Borel decomposition") {
    auto f = make_field(3);
    const End zero = End::point(Series(f));
    auto check = [&](const M& g, const End& e) {
        const auto d = decompose_borel(g, e);
        CHECK(d.recompose().projectively_equal(g));
        CHECK(d.power * 2 == oriented_length(g, e));
        CHECK(depth(d.unit_part, Vertex(7, Series(f))).kind != Depth::Kind::NotFixing);
        CHECK(unipotent_class(d.unipotent).kind != UnipotentKind::Anisotropic);
        return d;
    };
    auto d1 = check(mat(f, "[[p^-1,0],[0,p]]"), zero);
    CHECK(d1.power == 1);
    CHECK(d1.unipotent == M::identity(f));
    CHECK(d1.unit_part.projectively_equal(M::identity(f)));
    auto d2 = check(mat(f, "[[1,t^2+1],[0,1]]"), zero);
    CHECK(d2.power == 0);
    CHECK(d2.unipotent == mat(f, "[[1,t^2+1],[0,1]]"));
    auto d3 = check(mat(f, "[[2*t,t+1],[0,2*p]]"), zero);
    CHECK(d3.power == 1);
    CHECK(d3.unit_part.projectively_equal(M::diag(Series::constant(f, 2), Series::constant(f, 2))));
    check(mat(f, "[[1,0],[t,1]]"), End::up(f));
    const M c = mat(f, "[[1,1],[1,2]]");
    check(c * mat(f, "[[t,1+t],[0,p]]") * c.inverse(), act_end(c, zero));
    CHECK_THROWS_AS(decompose_borel(mat(f, "[[1,0],[1,1]]"), zero), DoesNotFixEnd);
}
