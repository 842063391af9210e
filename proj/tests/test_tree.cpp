#include <deque>
#include <map>
#include <random>
#include <set>

#include "btcusp/errors.hpp"
#include "btcusp/literal.hpp"
#include "btcusp/tree.hpp"
#include "doctest.h"

using namespace btcusp;

namespace {

int bfs_distance(const Vertex& u, const Vertex& v, int cap) {
    std::set<Vertex> seen{u};
    std::deque<std::pair<Vertex, int>> queue{{u, 0}};
    while (!queue.empty()) {
        auto [x, d] = queue.front();
        queue.pop_front();
        if (x == v) return d;
        if (d == cap) continue;
        for (const auto& y : neighbors(x))
            if (seen.insert(y).second) queue.emplace_back(y, d + 1);
    }
    return -1;
}

Vertex V(const FieldPtr& f, const char* s) { return parse_vertex(f, s); }

}  // namespace

TEST_CASE("neighbors") {
    auto f = make_field(2);
    CHECK(parent(V(f, "(1; 0)")) == V(f, "(0; 0)"));
    auto ch = children(Vertex::origin(f));
    CHECK(ch.size() == 2);
    CHECK(ch[0] == V(f, "(1; 0)"));
    CHECK(ch[1] == V(f, "(1; 1)"));
    CHECK(neighbors(Vertex::origin(f)).size() == 3);
    CHECK(neighbors(Vertex::origin(make_field(9))).size() == 10);
}

TEST_CASE("distance examples") {
    auto f = make_field(2);
    CHECK(distance(V(f, "(0; 0)"), V(f, "(3; p^2)")) == 3);
    CHECK(distance(V(f, "(2; p)"), V(f, "(2; 0)")) == 2);
    CHECK(distance(V(f, "(4; 1+p^3)"), V(f, "(4; 1+p^3)")) == 0);
}

TEST_CASE("distance matches BFS on a box") {
    auto f = make_field(2);
    std::vector<Vertex> box;
    // levels -3..5, residues supported in degrees -3..4 with at most 3 terms
    for (int n = -3; n <= 5; ++n) {
        std::vector<int> degs;
        for (int d = -3; d < n; ++d) degs.push_back(d);
        const int k = static_cast<int>(degs.size());
        for (int mask = 0; mask < (1 << k); ++mask) {
            if (__builtin_popcount(mask) > 3) continue;
            std::vector<Term> t;
            for (int i = 0; i < k; ++i)
                if (mask >> i & 1) t.push_back(Term{degs[i], 1});
            box.emplace_back(n, Series(f, t));
        }
    }
    std::mt19937 rng(3);
    int checked = 0;
    for (std::size_t i = 0; i < box.size(); i += 7) {
        for (std::size_t j = 0; j < box.size(); j += 11) {
            const int d = distance(box[i], box[j]);
            if (d > 12) continue;
            CHECK(bfs_distance(box[i], box[j], 12) == d);
            ++checked;
        }
    }
    CHECK(checked > 200);
}

TEST_CASE("step_to_end") {
    auto f = make_field(2);
    CHECK(step_to_end(End::up(f), V(f, "(2; p)")) == V(f, "(1; 0)"));
    CHECK(step_to_end(End::point(Series(f)), Vertex::origin(f)) == V(f, "(1; 0)"));
    const End e = End::rational(Series::one(f), parse_series(f, "1+p"));
    CHECK(step_to_end(e, V(f, "(1; 1)")) == V(f, "(2; 1+p)"));
    const End tr = parse_end(f, "trunc(1+p, 3)");
    CHECK(ray_vertex(tr, Vertex::origin(f), 3) == V(f, "(3; 1+p)"));
    CHECK_THROWS_AS(ray_vertex(tr, Vertex::origin(f), 4), EndPrecisionExhausted);
    // iterating one step agrees with the closed form
    Vertex x = V(f, "(2; p^-1)");
    for (int k = 0; k <= 8; ++k) {
        CHECK(ray_vertex(e, V(f, "(2; p^-1)"), k) == x);
        x = step_to_end(e, x);
    }
}

TEST_CASE("busemann") {
    auto f = make_field(2);
    const End zero = End::point(Series(f));
    const Vertex x = Vertex::origin(f);
    CHECK(busemann(x, x, zero) == 0);
    CHECK(busemann(x, V(f, "(2; 0)"), zero) == 2);
    CHECK(busemann(x, V(f, "(2; 0)"), End::up(f)) == -2);

    std::mt19937 rng(5);
    const auto pool = ball(V(f, "(1; p^-1)"), 4);
    std::vector<End> ends{zero, End::up(f), End::rational(Series::one(f), parse_series(f, "1+p^-1")),
                          parse_end(f, "trunc(1+p^2+p^3, 12)")};
    for (int i = 0; i < 200; ++i) {
        const Vertex& a = pool[rng() % pool.size()];
        const Vertex& b = pool[rng() % pool.size()];
        const Vertex& c = pool[rng() % pool.size()];
        const End& e = ends[rng() % ends.size()];
        CHECK(busemann(a, b, e) + busemann(b, c, e) == busemann(a, c, e));
        // the defining limit has stabilized at k = d(a, b)
        const int k = distance(a, b) + 2;
        const Vertex ak = ray_vertex(e, a, k);
        CHECK(distance(a, ak) - distance(b, ak) == busemann(a, b, e));
    }
}

TEST_CASE("lines") {
    auto f = make_field(2);
    const Line apt(End::up(f), End::point(Series(f)));
    for (int k = -3; k <= 3; ++k) {
        CHECK(apt.at(k) == Vertex(k, Series(f)));
        CHECK(apt.contains(apt.at(k)));
    }
    const Line l01(End::point(Series(f)), End::point(Series::one(f)));
    CHECK(l01.at(0) == Vertex::origin(f));
    CHECK(l01.at(1) == V(f, "(1; 1)"));
    CHECK(l01.at(-1) == V(f, "(1; 0)"));
    for (int k = -5; k <= 5; ++k) CHECK(distance(l01.at(k), l01.at(k + 1)) == 1);
    CHECK_FALSE(l01.contains(V(f, "(-1; 0)")));
    CHECK_THROWS_AS(Line(End::up(f), End::up(f)), EqualEnds);
    CHECK_THROWS_AS(Line(End::point(Series::one(f)), End::point(Series::one(f))), EqualEnds);
}

TEST_CASE("horoellipse") {
    auto f = make_field(2);
    const End zero = End::point(Series(f));
    const Vertex x = Vertex::origin(f);
    CHECK(horoellipse_contains(HoroellipseQuery(zero, x, 1, 3), x));
    CHECK(horoellipse_contains(HoroellipseQuery(zero, x, 1, 1), V(f, "(2; 0)")));
    CHECK(horoellipse_contains(HoroellipseQuery(zero, x, 1, 3), V(f, "(3; 0)")));
    CHECK_THROWS_AS(HoroellipseQuery(zero, x, 3, 2), InvalidInput);

    // closed form against the union definition, t scanned far enough
    for (auto [num, den] : {std::pair{1, 1}, std::pair{1, 3}, std::pair{2, 3}}) {
        const HoroellipseQuery b(zero, x, num, den);
        for (const auto& y : ball(x, 6)) {
            bool scan = false;
            for (int t = 0; t <= 40 && !scan; ++t)
                scan = den * distance(y, ray_vertex(zero, x, t)) <= num * t;
            CHECK(horoellipse_contains(b, y) == scan);
            if (num == den) CHECK(scan == horoball_contains(zero, x, y));
        }
    }
}

TEST_CASE("horospheres") {
    auto f = make_field(2);
    const End zero = End::point(Series(f));
    const Vertex x = Vertex::origin(f);
    CHECK(horosphere_contains(zero, x, x));
    CHECK(busemann(x, V(f, "(1; 1)"), zero) == -1);
    CHECK_FALSE(horosphere_contains(zero, x, V(f, "(1; 1)")));
    CHECK_FALSE(horoball_contains(zero, x, V(f, "(1; 1)")));
    CHECK(horoball_contains(zero, x, V(f, "(2; 0)")));
    CHECK_FALSE(horosphere_contains(zero, x, V(f, "(2; 0)")));
    // the two characterizations of the horosphere agree
    for (const auto& y : ball(x, 5)) {
        bool meet = false;
        for (int k = 0; k <= 12 && !meet; ++k) meet = ray_vertex(zero, y, k) == ray_vertex(zero, x, k);
        CHECK(meet == horosphere_contains(zero, x, y));
    }
}

TEST_CASE("spheres and balls") {
    auto f = make_field(2);
    CHECK(sphere(Vertex::origin(f), 1).size() == 3);
    CHECK(sphere(Vertex::origin(f), 3).size() == 12);
    CHECK(sphere(Vertex::origin(f), 0) == std::vector<Vertex>{Vertex::origin(f)});
    for (const auto& y : sphere(V(f, "(2; p^-1)"), 4)) CHECK(distance(y, V(f, "(2; p^-1)")) == 4);
    auto f3 = make_field(3);
    CHECK(sphere(Vertex::origin(f3), 2).size() == 12);
    CHECK(ball(Vertex::origin(f3), 2).size() == 17);
}

TEST_CASE("branch components") {
    auto f = make_field(2);
    const Vertex a = Vertex::origin(f), b = V(f, "(1; 0)");
    CHECK(branch_component(a, b, End::point(Series(f))));
    CHECK_FALSE(branch_component(a, b, End::up(f)));
    CHECK_FALSE(branch_component(a, b, End::point(Series::one(f))));
}

TEST_CASE("rays from the origin are residue sequences") {
    auto f = make_field(2);
    std::set<Vertex> tips;
    for (int code = 0; code < (1 << 12); ++code) {
        std::vector<Term> t;
        for (int i = 0; i < 12; ++i)
            if (code >> i & 1) t.push_back(Term{i, 1});
        tips.insert(ray_vertex(End::point(Series(f, t)), Vertex::origin(f), 12));
    }
    CHECK(tips.size() == 4096);
    for (const auto& v : tips) CHECK(v.level() == 12);
}

TEST_CASE("end literals") {
    auto f = make_field(3);
    CHECK(parse_end(f, "up").is_up());
    CHECK(parse_end(f, "rat(1, 1+t)").same_as(End::rational(Series::one(f), parse_series(f, "1+p^-1"))));
    CHECK(parse_end(f, "rat(1, 0)").is_up());
    CHECK(parse_end(f, "trunc(1+p, 5)").horizon() == 5);
    CHECK_THROWS_AS(parse_end(f, "rat(0, 0)"), InvalidInput);
    CHECK_THROWS_AS(parse_end(f, "trunc(1+O(p^2), 5)"), InvalidInput);
}
