#pragma once

/**
 * @file quotient.hpp
 * @brief Quotient graphs of groups Gamma \ X for the lattices of lattice.hpp.
 *
 * The quotient of X by SL_2(F_q[t]) is the standard ray (n; 0), n >= 0.
 * For Gamma(f) the vertices over (n; 0) are the left cosets g H_n in
 * G = SL_2(F_q[t]/f), H_n the image of the stabilizer of (n; 0); the coset
 * g H_n is the orbit of gamma . (n; 0) for any lift gamma of g. Edges over
 * {(n; 0), (n+1; 0)} are the cosets of the image of the edge stabilizer.
 */

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "btcusp/lattice.hpp"
#include "json.hpp"

namespace btcusp {

using Rational = boost::multiprecision::cpp_rational;

/// "num/den".
std::string rational_string(const Rational& r);

/// The stabilizer of a cusp end: an infinite, locally finite group.
struct SymbolicCuspGroup {
    CuspData cusp;
    std::string description;
};

struct QuotientVertex {
    int id = 0;
    int level = 0;
    /// A tree vertex in this orbit (for midpoints of X', the first endpoint).
    Vertex representative;
    /// Empty for symbolic cusp vertices (infinite groups).
    std::optional<long long> order;
    /// q(v): the vertex has q(v) + 1 neighbours upstairs (1 for midpoints).
    int ramification = 0;
    bool midpoint = false;
    std::optional<SymbolicCuspGroup> cusp_group;
};

struct QuotientEdge {
    int from = 0;
    int to = 0;
    long long order = 0;
    /// Index of the edge group in the endpoint groups (0 when that group is infinite).
    long long index_from = 0;
    long long index_to = 0;
};

struct RayTail {
    /// Vertex ids along the ray, starting at the certified start level.
    std::vector<int> vertices;
    int start_level = 0;
    /// Order of the first edge of the tail; later edges multiply by `ratio`.
    long long first_edge_order = 0;
    int ratio = 0;
    bool certified = false;
    /// Index into GraphOfGroups::cusps.
    int cusp = -1;
};

struct GraphOfGroups {
    LatticeSpec spec;
    int depth = 0;
    std::vector<QuotientVertex> vertices;
    std::vector<QuotientEdge> edges;
    std::vector<RayTail> rays;
    std::vector<CuspData> cusps;
    /// "X" or "X'".
    std::string view = "X";

    explicit GraphOfGroups(LatticeSpec s) : spec(std::move(s)) {}
    bool is_path() const;
    int cusp_vertex_count() const;
};

/// Quotient truncated at level `depth` with certified rays; SizeGuard for large G.
GraphOfGroups quotient_graph(const LatticeSpec& spec, int depth, long long max_size = 200000);

/// The barycentric subdivision: every edge gets a midpoint vertex carrying the edge group.
GraphOfGroups barycentric(const GraphOfGroups& g);

struct CovolumeResult {
    Rational value;
    Rational finite_part;
    std::vector<Rational> tails;
    std::string to_string() const { return rational_string(value); }
};

/// Sum over the quotient edges of 1/|Gamma_e|; every tail in closed form q/(c(q-1)).
/// UncertifiedTail when a ray is not certified.
CovolumeResult covolume(const GraphOfGroups& g);

/// The same quantity by partial sums of edge orders over levels < depth plus the
/// exact remainder of the geometric tail beyond it.
struct PartialCovolume {
    Rational partial_sum;
    Rational remainder;
    Rational total() const { return partial_sum + remainder; }
};
PartialCovolume covolume_partial_sums(const LatticeSpec& spec, int depth, long long max_size = 200000);

struct CuspMatch {
    int ray = 0;
    int cusp = 0;
};

struct CuspsReport {
    std::vector<CuspData> algebraic;
    int geometric = 0;
    std::vector<CuspMatch> matches;
    bool bijective = false;
};

CuspsReport cusps_report(const LatticeSpec& spec, int depth, long long max_size = 200000);

/// Stabilizer orders of the vertices phi^k(v0), k = 0..depth, towards the end.
std::vector<long long> growth_probe(const LatticeSpec& spec, const End& end, int depth);

struct CertifiedIndependent {
    long long vertices_checked = 0;
    long long pairs_checked = 0;
};

struct CounterexamplePair {
    Vertex y;
    Vertex y_prime;
    /// g . y == y_prime and g is in the lattice, but g violates the condition.
    TreeAutomorphism g;
    std::string reason;
};

using IndependenceResult = std::variant<CertifiedIndependent, CounterexamplePair>;

/**
 * Checks on the horoball B_end(x) truncated at distance T from x that every
 * lattice element mapping a vertex of it into it fixes the end. Vertices
 * y, y' with reductions gamma_y . y = gamma_y' . y' = (n; 0) are matched by
 * exactly the elements gamma_y'^-1 s gamma_y, s in Gamma_(n;0).
 */
IndependenceResult certify_independent_horoball(const LatticeSpec& spec, const CuspData& cusp, const Vertex& x,
                                                int truncation, long long max_size = 200000);

/// For pairwise inequivalent cusps with horoballs around the level-`entry` vertex of
/// each cusp ray: no lattice element moves one truncated horoball onto another.
IndependenceResult certify_disjoint_horoballs(const LatticeSpec& spec, const std::vector<CuspData>& cusps, int entry,
                                              int truncation, long long max_size = 200000);

/// The first N <= max_radius for which the horoball around the level-N vertex of
/// the cusp ray passes certify_independent_horoball.
std::optional<int> find_entry_radius(const LatticeSpec& spec, const CuspData& cusp, int max_radius, int truncation);

/// Collapses the chosen rays (all when `rays` is empty and `all` is true) from
/// `start_level` on into symbolic cusp vertices. The start defaults to the
/// certified start of each ray; earlier starts throw UncertifiedTail.
GraphOfGroups contract(const GraphOfGroups& g, const std::vector<int>& rays,
                       std::optional<int> start_level = std::nullopt);
GraphOfGroups contract_all(const GraphOfGroups& g, std::optional<int> start_level = std::nullopt);

struct FreeProductReport {
    bool applicable = false;
    int cusp_factors = 0;
    int free_rank = 0;
    std::string reason;
};

FreeProductReport free_product_report(const GraphOfGroups& contracted);

nlohmann::json to_json(const GraphOfGroups& g, const std::optional<CovolumeResult>& vol = std::nullopt);
std::string to_dot(const GraphOfGroups& g);

}  // namespace btcusp
