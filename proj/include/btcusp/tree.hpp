#pragma once

/**
 * @file tree.hpp
 * @brief The Bruhat-Tits tree of SL_2 over F_q((pi)), never materialized.
 *
 * A vertex is a closed ball {z : v(z - a) >= n} of K, written (n; a) with the
 * residue a reduced mod pi^n (only terms of degree < n are kept). The parent
 * of (n; a) is (n-1; a mod pi^(n-1)); its q children are (n+1; a + c pi^n).
 * Ends are the points of P^1(K): "up" is the point at infinity, every other
 * end is a point z of K and the ray towards it descends through the balls
 * containing z.
 *
 * Everything here is computed in closed form; breadth-first search appears
 * only in tests.
 */

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "btcusp/series.hpp"

namespace btcusp {

class Vertex {
public:
    /// Reduces the residue mod pi^level; the residue must be known that far.
    Vertex(int level, const Series& residue);

    static Vertex origin(const FieldPtr& f) { return Vertex(0, Series(f)); }

    int level() const { return level_; }
    const Series& residue() const { return residue_; }
    const FieldPtr& field() const { return residue_.field(); }

    bool operator==(const Vertex& o) const { return level_ == o.level_ && residue_ == o.residue_; }
    bool operator<(const Vertex& o) const;

    /// "(n; series)".
    std::string to_string() const;

private:
    int level_;
    Series residue_;
};

struct VertexHash {
    std::size_t operator()(const Vertex& v) const noexcept;
};

class End {
public:
    enum class Kind { Up, Rational, Truncated };

    static End up(const FieldPtr& f);
    /// num/den as exact Laurent polynomials; den == 0 gives the end "up".
    static End rational(const Series& num, const Series& den);
    static End point(const Series& z) { return rational(z, Series::one(z.field())); }
    /// A point of K known only mod pi^N (the series precision).
    static End truncated(const Series& z);

    Kind kind() const { return kind_; }
    bool is_up() const { return kind_ == Kind::Up; }
    const FieldPtr& field() const { return num_.field(); }
    const Series& numerator() const { return num_; }
    const Series& denominator() const { return den_; }
    /// The known series of a truncated end.
    const Series& series() const { return num_; }

    /// Depth to which the end is usable: kInfinity except for truncated ends.
    int horizon() const { return kind_ == Kind::Truncated ? num_.precision() : kInfinity; }

    /// The point mod pi^n. Throws EndPrecisionExhausted beyond the horizon and
    /// InvalidInput for "up".
    Series point_mod(int n) const;

    /// Exact comparison for up/rational; for truncated ends the answer must be
    /// decided within the horizon, otherwise EndPrecisionExhausted.
    bool same_as(const End& o) const;

    /// "up", "rat(p, s)" or "trunc(series, N)".
    std::string to_string() const;

private:
    End(Kind k, Series num, Series den) : kind_(k), num_(std::move(num)), den_(std::move(den)) {}

    Kind kind_;
    Series num_;
    Series den_;
};

/// v(z - z') for two distinct non-up ends; kInfinity never returned (equal ends throw InvalidInput).
int end_separation(const End& a, const End& b);

Vertex parent(const Vertex& v);
std::vector<Vertex> children(const Vertex& v);
/// The parent first, then the q children.
std::vector<Vertex> neighbors(const Vertex& v);

int distance(const Vertex& u, const Vertex& v);
/// Vertex at distance k from u on the geodesic [u, v] (0 <= k <= d(u, v)).
Vertex geodesic_point(const Vertex& u, const Vertex& v, int k);

/// One step from x towards the end (phi_end).
Vertex step_to_end(const End& end, const Vertex& x);
/// phi_end^k(x), in closed form.
Vertex ray_vertex(const End& end, const Vertex& x, int k);

/// The cocycle (x, y)_end, via its defining limit taken at k = d(x, y).
int busemann(const Vertex& x, const Vertex& y, const End& end);

bool horosphere_contains(const End& end, const Vertex& x, const Vertex& y);
bool horoball_contains(const End& end, const Vertex& x, const Vertex& y);

/// Eccentricity as an exact fraction num/den with 0 < num/den <= 1.
struct HoroellipseQuery {
    End center;
    Vertex radius_vertex;
    int ecc_num = 1;
    int ecc_den = 1;

    HoroellipseQuery(End c, Vertex x, int num, int den);
};

/// Union over t >= 0 of the balls B_{x(t)}(lambda t), decided by minimizing
/// d(y, x(t)) - lambda t over its two linear pieces.
bool horoellipse_contains(const HoroellipseQuery& b, const Vertex& y);

/// The bi-infinite geodesic between two distinct ends, parameterized so that
/// at(k) -> `to` as k -> +inf and at(k) -> `from` as k -> -inf.
class Line {
public:
    Line(End from, End to);

    const End& from() const { return from_; }
    const End& to() const { return to_; }
    Vertex at(int k) const;
    /// The fixed-point characterization phi_from^k(phi_to^k(z)) == z.
    bool contains(const Vertex& z, int k = 3) const;

private:
    End from_;
    End to_;
    std::optional<Vertex> base_;
};

void for_each_in_sphere(const Vertex& x, int r, const std::function<void(const Vertex&)>& fn);
std::vector<Vertex> sphere(const Vertex& x, int r);
std::vector<Vertex> ball(const Vertex& x, int r);

/// True iff the end lies in the component of (tree minus edge {u, v}) containing v.
bool branch_component(const Vertex& u, const Vertex& v, const End& end);

}  // namespace btcusp
