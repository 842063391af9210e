#include "btcusp/quotient.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "btcusp/errors.hpp"

namespace btcusp {

namespace {

using M = TreeAutomorphism;
using Elt = CosetTable::Elt;

Rational frac(long long num, long long den) { return Rational(num) / Rational(den); }

// Coset data of one level of the standard ray.
struct Level {
    CosetTable::Cosets vertices;
    CosetTable::Cosets edges;  // edges to the next level
    long long vertex_order = 0;
    long long edge_order = 0;
};

long long exact_div(long long a, long long b, const char* what) {
    if (b == 0 || a % b != 0) throw Error(std::string("non-integral ") + what);
    return a / b;
}

Level make_level(const CosetTable& table, int n) {
    const LatticeSpec& spec = table.spec();
    Level l;
    const auto hv = table.subgroup(table.vertex_image_generators(n));
    const auto he = table.subgroup(table.edge_image_generators(n));
    l.vertices = table.left_cosets(hv);
    l.edges = table.left_cosets(he);
    l.vertex_order = vertex_order(spec, n);
    if (checked_mul(l.vertex_order, static_cast<long long>(hv.size())) != nagao_vertex_order(spec.q(), n))
        throw Error("stabilizer order and coset image disagree at level " + std::to_string(n));
    l.edge_order = exact_div(nagao_edge_order(spec.q(), n), static_cast<long long>(he.size()), "edge order");
    return l;
}

// The tail condition at step n: a single edge up from every vertex, no branching.
bool tail_step(const std::vector<Level>& lv, int n, int q) {
    const Level& a = lv[static_cast<std::size_t>(n)];
    const Level& b = lv[static_cast<std::size_t>(n) + 1];
    return a.vertices.count() == a.edges.count() && a.edges.count() == b.vertices.count() &&
           a.edge_order == a.vertex_order && b.vertex_order == checked_mul(q, a.vertex_order);
}

// Lifts of every element of H_n, the image of Gamma_(n;0), found by BFS.
std::unordered_map<Elt, M> image_lifts(const CosetTable& table, int n) {
    const auto& spec = table.spec();
    const auto gens = standard_stabilizer_generators(spec.field(), n, std::max(0, spec.level_degree() - 1));
    std::unordered_map<Elt, M> out;
    out.emplace(table.identity(), M::identity(spec.field()));
    std::deque<Elt> todo{table.identity()};
    while (!todo.empty()) {
        const Elt x = todo.front();
        todo.pop_front();
        for (const auto& g : gens) {
            const Elt y = table.mul(table.reduce(g), x);
            if (out.count(y)) continue;
            out.emplace(y, g * out.at(x));
            todo.push_back(y);
        }
    }
    return out;
}

Vertex standard_vertex(const FieldPtr& f, int n) { return Vertex(n, Series(f)); }

// Remaps vertex ids after deletions; -1 marks a deleted vertex.
void renumber(GraphOfGroups& g, const std::vector<int>& keep_map) {
    std::vector<QuotientVertex> vs;
    for (const auto& v : g.vertices)
        if (keep_map[static_cast<std::size_t>(v.id)] >= 0) {
            vs.push_back(v);
            vs.back().id = keep_map[static_cast<std::size_t>(v.id)];
        }
    g.vertices = std::move(vs);
    for (auto& e : g.edges) {
        e.from = keep_map[static_cast<std::size_t>(e.from)];
        e.to = keep_map[static_cast<std::size_t>(e.to)];
    }
    for (auto& r : g.rays)
        for (auto& v : r.vertices) v = keep_map[static_cast<std::size_t>(v)];
}

}  // namespace

std::string rational_string(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

bool GraphOfGroups::is_path() const {
    if (vertices.empty()) return false;
    std::vector<int> deg(vertices.size(), 0);
    for (const auto& e : edges) {
        ++deg[static_cast<std::size_t>(e.from)];
        ++deg[static_cast<std::size_t>(e.to)];
    }
    if (edges.size() + 1 != vertices.size()) return false;
    return std::all_of(deg.begin(), deg.end(), [](int d) { return d <= 2; });
}

int GraphOfGroups::cusp_vertex_count() const {
    return static_cast<int>(std::count_if(vertices.begin(), vertices.end(),
                                          [](const QuotientVertex& v) { return v.cusp_group.has_value(); }));
}

GraphOfGroups quotient_graph(const LatticeSpec& spec, int depth, long long max_size) {
    if (depth < 2) throw InvalidInput("quotient depth must be at least 2");
    const auto& f = spec.field();
    const int q = spec.q();
    const CosetTable table(spec, max_size);
    // Three extra levels so that a tail starting near the truncation can still be certified.
    std::vector<Level> lv;
    for (int n = 0; n <= depth + 3; ++n) lv.push_back(make_level(table, n));

    GraphOfGroups g(spec);
    g.depth = depth;
    std::vector<std::vector<int>> vid(static_cast<std::size_t>(depth) + 1);
    for (int n = 0; n <= depth; ++n) {
        const Level& l = lv[static_cast<std::size_t>(n)];
        for (std::size_t k = 0; k < l.vertices.count(); ++k) {
            QuotientVertex v{static_cast<int>(g.vertices.size()), n,
                             act_vertex(table.lift(l.vertices.representative[k]), standard_vertex(f, n)),
                             l.vertex_order, q, false, std::nullopt};
            vid[static_cast<std::size_t>(n)].push_back(v.id);
            g.vertices.push_back(std::move(v));
        }
    }
    for (int n = 0; n < depth; ++n) {
        const Level& a = lv[static_cast<std::size_t>(n)];
        const Level& b = lv[static_cast<std::size_t>(n) + 1];
        for (Elt rep : a.edges.representative) {
            QuotientEdge e;
            e.from = vid[static_cast<std::size_t>(n)][static_cast<std::size_t>(a.vertices.label[rep])];
            e.to = vid[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(b.vertices.label[rep])];
            e.order = a.edge_order;
            e.index_from = exact_div(a.vertex_order, a.edge_order, "edge index");
            e.index_to = exact_div(b.vertex_order, a.edge_order, "edge index");
            g.edges.push_back(e);
        }
    }

    g.cusps = cusp_representatives(table);
    const auto borel = table.left_cosets(table.subgroup(table.borel_image_generators()));

    int start = -1;
    for (int n = 1; n + 2 <= depth + 2 && n < depth; ++n)
        if (tail_step(lv, n, q) && tail_step(lv, n + 1, q) && tail_step(lv, n + 2, q)) {
            start = n;
            break;
        }
    const int ray_level = start >= 0 ? start : depth;
    const Level& base = lv[static_cast<std::size_t>(ray_level)];
    // Up-edge of each vertex, valid along a certified tail.
    std::vector<int> up(g.vertices.size(), -1);
    for (const auto& e : g.edges) up[static_cast<std::size_t>(e.from)] = e.to;
    for (std::size_t k = 0; k < base.vertices.count(); ++k) {
        RayTail r;
        r.start_level = ray_level;
        r.first_edge_order = base.edge_order;
        r.ratio = q;
        r.certified = start >= 0;
        r.cusp = borel.label[base.vertices.representative[k]];
        int v = vid[static_cast<std::size_t>(ray_level)][k];
        r.vertices.push_back(v);
        while (r.certified && up[static_cast<std::size_t>(v)] >= 0) {
            v = up[static_cast<std::size_t>(v)];
            r.vertices.push_back(v);
        }
        g.rays.push_back(std::move(r));
    }
    return g;
}

GraphOfGroups barycentric(const GraphOfGroups& g) {
    if (g.view != "X") throw InvalidInput("graph is already subdivided");
    GraphOfGroups out(g.spec);
    out.depth = g.depth;
    out.view = "X'";
    out.vertices = g.vertices;
    out.rays = g.rays;
    out.cusps = g.cusps;
    for (const auto& e : g.edges) {
        const auto& from = g.vertices[static_cast<std::size_t>(e.from)];
        const QuotientVertex m{static_cast<int>(out.vertices.size()), from.level, from.representative, e.order, 1,
                               true, std::nullopt};
        out.vertices.push_back(m);
        out.edges.push_back({e.from, m.id, e.order, e.index_from, 1});
        out.edges.push_back({m.id, e.to, e.order, 1, e.index_to});
    }
    return out;
}

CovolumeResult covolume(const GraphOfGroups& g) {
    if (g.view != "X") throw InvalidInput("covolume is computed on the unsubdivided quotient");
    const int q = g.spec.q();
    std::set<int> tail;
    for (const auto& r : g.rays) {
        if (!r.certified) throw UncertifiedTail("ray at level " + std::to_string(r.start_level) + " is not certified");
        tail.insert(r.vertices.begin(), r.vertices.end());
    }
    CovolumeResult res;
    for (const auto& e : g.edges) {
        if (tail.count(e.from) && tail.count(e.to)) continue;
        if (e.order <= 0) throw InvalidInput("infinite edge group");
        res.finite_part += frac(1, e.order);
    }
    res.value = res.finite_part;
    for (const auto& r : g.rays) {
        const Rational t = frac(q, checked_mul(r.first_edge_order, q - 1));
        res.tails.push_back(t);
        res.value += t;
    }
    return res;
}

PartialCovolume covolume_partial_sums(const LatticeSpec& spec, int depth, long long max_size) {
    if (depth < 1) throw InvalidInput("partial sums need depth >= 1");
    const int q = spec.q();
    const long long group = static_cast<long long>(CosetTable(spec, max_size).size());
    PartialCovolume out;
    for (int n = 0; n < depth; ++n) {
        // Orbit-stabilizer: the Gamma(f)-orbits of Gamma-translates of e_n number
        // |G| |Gamma(f)_e| / |Gamma_e|, each with group Gamma(f)_e.
        const long long nagao = nagao_edge_order(q, n);
        const long long sub = n == 0 ? (spec.is_nagao() ? nagao : 1) : vertex_order(spec, n);
        const long long count = exact_div(checked_mul(group, sub), nagao, "edge count");
        out.partial_sum += frac(count, sub);
    }
    out.remainder = frac(checked_mul(group, q), checked_mul(nagao_edge_order(q, depth), q - 1));
    return out;
}

CuspsReport cusps_report(const LatticeSpec& spec, int depth, long long max_size) {
    const auto g = quotient_graph(spec, depth, max_size);
    CuspsReport r;
    r.algebraic = g.cusps;
    r.geometric = static_cast<int>(g.rays.size());
    std::vector<int> hit(g.cusps.size(), 0);
    for (std::size_t i = 0; i < g.rays.size(); ++i) {
        r.matches.push_back({static_cast<int>(i), g.rays[i].cusp});
        if (g.rays[i].cusp >= 0) ++hit[static_cast<std::size_t>(g.rays[i].cusp)];
    }
    r.bijective = r.geometric == static_cast<int>(r.algebraic.size()) &&
                  std::all_of(g.rays.begin(), g.rays.end(), [](const RayTail& t) { return t.certified; }) &&
                  std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; });
    return r;
}

std::vector<long long> growth_probe(const LatticeSpec& spec, const End& end, int depth) {
    const Vertex v0 = Vertex::origin(spec.field());
    std::vector<long long> out;
    for (int k = 0; k <= depth; ++k) out.push_back(vertex_order(spec, reduce_vertex(ray_vertex(end, v0, k)).level));
    return out;
}

namespace {

struct HoroPoint {
    Vertex y;
    int level;
    M gamma;
    Elt image;
    End end;
};

// Truncated horoball B_0(x) in the normalized frame.
std::vector<HoroPoint> horoball_points(const CosetTable& table, const Vertex& x, int truncation) {
    const auto& f = table.spec().field();
    const End zero = End::point(Series(f));
    std::vector<HoroPoint> out;
    for (const auto& y : ball(x, truncation)) {
        if (busemann(x, y, zero) < 0) continue;
        auto red = reduce_vertex(y);
        const Elt im = table.reduce(red.witness);
        End e = act_end(red.witness, zero);
        out.push_back({y, red.level, std::move(red.witness), im, std::move(e)});
    }
    return out;
}

std::optional<CounterexamplePair> check_normalized(const CosetTable& table, const M& conj, const Vertex& x,
                                                   int truncation, CertifiedIndependent& stats) {
    const auto& spec = table.spec();
    const M cinv = conj.inverse();
    const auto pts = horoball_points(table, x, truncation);
    auto report = [&](const HoroPoint& a, const HoroPoint& b, const M& g, std::string why) {
        const M go = cinv * g * conj;
        const Vertex ya = act_vertex(cinv, a.y), yb = act_vertex(cinv, b.y);
        if (!(act_vertex(go, ya) == yb) || !contains(spec, go))
            throw Error("counterexample failed its own verification");
        return CounterexamplePair{ya, yb, go, std::move(why)};
    };
    std::map<int, std::vector<std::size_t>> by_level;
    for (std::size_t i = 0; i < pts.size(); ++i) by_level[pts[i].level].push_back(i);
    for (const auto& [n, idx] : by_level) {
        const auto kernel = kernel_stabilizer_generators(spec, n);
        for (std::size_t i : idx) {
            ++stats.vertices_checked;
            for (const auto& k : kernel)
                if (!fixes_end(k, pts[i].end)) {
                    const M g = pts[i].gamma.inverse() * k * pts[i].gamma;
                    return report(pts[i], pts[i], g, "a stabilizer element of a horoball vertex moves the end");
                }
        }
        const auto lifts = image_lifts(table, n);
        for (std::size_t i : idx)
            for (std::size_t j : idx) {
                if (i == j) continue;
                const Elt target = table.mul(pts[j].image, table.inv(pts[i].image));
                auto it = lifts.find(target);
                if (it == lifts.end()) continue;
                ++stats.pairs_checked;
                if (!act_end(it->second, pts[i].end).same_as(pts[j].end)) {
                    const M g = pts[j].gamma.inverse() * it->second * pts[i].gamma;
                    return report(pts[i], pts[j], g, "a lattice element maps one horoball vertex to another without fixing the end");
                }
            }
    }
    return std::nullopt;
}

}  // namespace

IndependenceResult certify_independent_horoball(const LatticeSpec& spec, const CuspData& cusp, const Vertex& x,
                                                int truncation, long long max_size) {
    if (truncation < 0) throw InvalidInput("truncation must be nonnegative");
    const Vertex v0 = Vertex::origin(spec.field());
    if (!(ray_vertex(cusp.end, v0, distance(v0, x)) == x))
        throw InvalidInput(x.to_string() + " is not on the ray from v0 to " + cusp.end.to_string());
    const CosetTable table(spec, max_size);
    CertifiedIndependent stats;
    if (auto bad = check_normalized(table, cusp.conjugator, act_vertex(cusp.conjugator, x), truncation, stats))
        return *bad;
    return stats;
}

IndependenceResult certify_disjoint_horoballs(const LatticeSpec& spec, const std::vector<CuspData>& cusps, int entry,
                                              int truncation, long long max_size) {
    if (entry < 0 || truncation < 0) throw InvalidInput("entry and truncation must be nonnegative");
    const auto& f = spec.field();
    const CosetTable table(spec, max_size);
    const Vertex x = standard_vertex(f, entry);
    CertifiedIndependent stats;
    for (const auto& c : cusps)
        if (auto bad = check_normalized(table, c.conjugator, x, truncation, stats)) return *bad;

    // Every horoball vertex is labelled by its Gamma(f)-orbit: level n and the coset red(gamma)^-1 H_n.
    const auto pts = horoball_points(table, x, truncation);
    std::map<int, CosetTable::Cosets> cosets;
    struct Owner {
        std::size_t cusp;
        Vertex y;
        M gamma;
        Elt image;
    };
    std::map<std::pair<int, int>, Owner> seen;
    for (std::size_t i = 0; i < cusps.size(); ++i) {
        const M cinv = cusps[i].conjugator.inverse();
        for (const auto& p : pts) {
            const Vertex yo = act_vertex(cinv, p.y);
            auto red = reduce_vertex(yo);
            if (!cosets.count(red.level))
                cosets.emplace(red.level, table.left_cosets(table.subgroup(table.vertex_image_generators(red.level))));
            const Elt im = table.reduce(red.witness);
            const std::pair<int, int> key{red.level, cosets.at(red.level).label[table.inv(im)]};
            auto it = seen.find(key);
            if (it == seen.end()) {
                seen.emplace(key, Owner{i, yo, red.witness, im});
                continue;
            }
            if (it->second.cusp == i) continue;
            ++stats.pairs_checked;
            const auto lifts = image_lifts(table, red.level);
            const M s = lifts.at(table.mul(im, table.inv(it->second.image)));
            const M g = red.witness.inverse() * s * it->second.gamma;
            if (!(act_vertex(g, it->second.y) == yo) || !contains(spec, g))
                throw Error("counterexample failed its own verification");
            return CounterexamplePair{it->second.y, yo, g,
                                      "horoballs of cusps " + std::to_string(it->second.cusp) + " and " +
                                          std::to_string(i) + " meet in one orbit"};
        }
    }
    return stats;
}

std::optional<int> find_entry_radius(const LatticeSpec& spec, const CuspData& cusp, int max_radius, int truncation) {
    const Vertex v0 = Vertex::origin(spec.field());
    for (int n = 0; n <= max_radius; ++n) {
        const Vertex x = ray_vertex(cusp.end, v0, n);
        if (std::holds_alternative<CertifiedIndependent>(certify_independent_horoball(spec, cusp, x, truncation)))
            return n;
    }
    return std::nullopt;
}

GraphOfGroups contract(const GraphOfGroups& g, const std::vector<int>& rays, std::optional<int> start_level) {
    if (g.view != "X") throw InvalidInput("contract the unsubdivided quotient");
    GraphOfGroups out = g;
    std::vector<int> keep(g.vertices.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
    std::set<int> chosen(rays.begin(), rays.end());
    std::vector<int> redirect(g.vertices.size(), -1);
    for (int r : chosen) {
        if (r < 0 || r >= static_cast<int>(g.rays.size())) throw InvalidInput("no ray " + std::to_string(r));
        const RayTail& t = g.rays[static_cast<std::size_t>(r)];
        const int s = start_level.value_or(t.start_level);
        if (!t.certified || s < t.start_level)
            throw UncertifiedTail("ray " + std::to_string(r) + " is certified only from level " +
                                  std::to_string(t.start_level));
        if (s > g.depth) throw InvalidInput("contraction start beyond the truncation depth");
        const auto& first = g.vertices[static_cast<std::size_t>(t.vertices[static_cast<std::size_t>(s - t.start_level)])];
        const CuspData& cd = g.cusps[static_cast<std::size_t>(t.cusp)];
        const QuotientVertex c{static_cast<int>(out.vertices.size()), s, first.representative, std::nullopt,
                               g.spec.q(), false, SymbolicCuspGroup{cd, cd.description()}};
        out.vertices.push_back(c);
        keep.push_back(c.id);
        for (std::size_t k = static_cast<std::size_t>(s - t.start_level); k < t.vertices.size(); ++k) {
            redirect[static_cast<std::size_t>(t.vertices[k])] = c.id;
            keep[static_cast<std::size_t>(t.vertices[k])] = -1;
        }
    }
    std::vector<QuotientEdge> edges;
    for (auto e : g.edges) {
        const int rf = redirect[static_cast<std::size_t>(e.from)], rt = redirect[static_cast<std::size_t>(e.to)];
        if (rf >= 0 && rt >= 0) continue;
        if (rf >= 0) {
            e.from = rf;
            e.index_from = 0;
        }
        if (rt >= 0) {
            e.to = rt;
            e.index_to = 0;
        }
        edges.push_back(e);
    }
    out.edges = std::move(edges);
    std::vector<RayTail> left;
    for (std::size_t i = 0; i < g.rays.size(); ++i)
        if (!chosen.count(static_cast<int>(i))) left.push_back(g.rays[i]);
    out.rays = std::move(left);
    int next = 0;
    for (auto& k : keep)
        if (k >= 0) k = next++;
    renumber(out, keep);
    return out;
}

GraphOfGroups contract_all(const GraphOfGroups& g, std::optional<int> start_level) {
    std::vector<int> all(g.rays.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return contract(g, all, start_level);
}

FreeProductReport free_product_report(const GraphOfGroups& g) {
    FreeProductReport r;
    r.cusp_factors = g.cusp_vertex_count();
    if (!g.rays.empty()) {
        r.reason = "uncontracted rays remain";
        return r;
    }
    for (const auto& v : g.vertices)
        if (!v.cusp_group && v.order != 1) {
            r.reason = "vertex " + std::to_string(v.id) + " has a nontrivial finite group";
            return r;
        }
    for (const auto& e : g.edges)
        if (e.order != 1) {
            r.reason = "edge " + std::to_string(e.from) + "-" + std::to_string(e.to) + " has a nontrivial group";
            return r;
        }
    r.applicable = true;
    r.free_rank = static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) + 1;
    r.reason = "free product of " + std::to_string(r.cusp_factors) + " cusp groups and a free group of rank " +
               std::to_string(r.free_rank);
    return r;
}

nlohmann::json to_json(const GraphOfGroups& g, const std::optional<CovolumeResult>& vol) {
    using nlohmann::json;
    json out;
    out["lattice"] = g.spec.to_string();
    out["q"] = g.spec.q();
    out["view"] = g.view;
    out["depth"] = g.depth;
    json vs = json::array();
    for (const auto& v : g.vertices) {
        json j{{"id", v.id}, {"level", v.level}, {"representative", v.representative.to_string()},
               {"q", v.ramification}};
        j["order"] = v.order ? json(*v.order) : json("infinite");
        if (v.midpoint) j["midpoint"] = true;
        if (v.cusp_group) j["cusp"] = v.cusp_group->description;
        vs.push_back(std::move(j));
    }
    out["vertices"] = std::move(vs);
    json es = json::array();
    for (const auto& e : g.edges)
        es.push_back({{"from", e.from}, {"to", e.to}, {"order", e.order}, {"index_from", e.index_from},
                      {"index_to", e.index_to}});
    out["edges"] = std::move(es);
    json rs = json::array();
    for (const auto& r : g.rays)
        rs.push_back({{"vertices", r.vertices}, {"start_level", r.start_level}, {"first_edge_order", r.first_edge_order},
                      {"ratio", r.ratio}, {"certified", r.certified}, {"cusp", r.cusp}});
    out["rays"] = std::move(rs);
    json cs = json::array();
    for (const auto& c : g.cusps) cs.push_back({{"end", c.end.to_string()}, {"conjugator", c.conjugator.to_string('t')}});
    out["cusps"] = std::move(cs);
    if (vol) out["covolume"] = vol->to_string();
    return out;
}

std::string to_dot(const GraphOfGroups& g) {
    std::ostringstream os;
    os << "graph quotient {\n";
    for (const auto& v : g.vertices) {
        os << "  v" << v.id << " [label=\"" << v.id << "\\n";
        if (v.cusp_group) {
            os << "cusp\" shape=doublecircle";
        } else {
            os << *v.order << "\"";
            if (v.midpoint) os << " shape=box";
        }
        os << "];\n";
    }
    for (const auto& e : g.edges) os << "  v" << e.from << " -- v" << e.to << " [label=\"" << e.order << "\"];\n";
    for (std::size_t i = 0; i < g.rays.size(); ++i) {
        const auto& r = g.rays[i];
        os << "  tail" << i << " [shape=point];\n";
        os << "  v" << r.vertices.back() << " -- tail" << i << " [style=dashed];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace btcusp
