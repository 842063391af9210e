#pragma once

/**
 * @file autom.hpp
 * @brief 2x2 matrices over K acting on the tree and on its ends.
 *
 * Conventions, fixed once for the whole library:
 *  - the vertex (n; a) is the homothety class of the O-lattice spanned by the
 *    columns of [[1, 0], [a, pi^n]];
 *  - the end z of K is the line through (1, z)^T and "up" is the line through
 *    (0, 1)^T, so [[a, b], [c, d]] acts on ends by z -> (c + d z) / (a + b z);
 *  - the standard Borel end eps* (fixed by every [[1, b], [0, 1]]) is the
 *    point 0, and the standard apartment is the line from "up" to 0, i.e. the
 *    vertices (n; 0).
 * Matrices act projectively: scalar multiples define the same automorphism.
 */

#include <optional>
#include <variant>
#include <vector>

#include "btcusp/tree.hpp"

namespace btcusp {

class TreeAutomorphism {
public:
    /// Throws InvalidInput for a singular matrix.
    TreeAutomorphism(Series a, Series b, Series c, Series d);

    static TreeAutomorphism identity(const FieldPtr& f);
    static TreeAutomorphism diag(const Series& x, const Series& y);
    /// [[1, b], [0, 1]]
    static TreeAutomorphism upper(const Series& b);
    /// [[1, 0], [c, 1]]
    static TreeAutomorphism lower(const Series& c);
    /// [[0, -1], [1, 0]]
    static TreeAutomorphism weyl(const FieldPtr& f);
    /// [[1, 0], [a, pi^n]], the basis matrix of the vertex.
    static TreeAutomorphism basis(const Vertex& v);

    const Series& a() const { return a_; }
    const Series& b() const { return b_; }
    const Series& c() const { return c_; }
    const Series& d() const { return d_; }
    const FieldPtr& field() const { return a_.field(); }

    Series det() const { return a_ * d_ - b_ * c_; }
    Series trace() const { return a_ + d_; }
    int det_valuation() const { return det_val_; }
    bool type_preserving() const { return det_val_ % 2 == 0; }
    bool is_exact() const;

    TreeAutomorphism operator*(const TreeAutomorphism& o) const;
    /// [[d, -b], [-c, a]]: the inverse up to the scalar det.
    TreeAutomorphism adjugate() const;
    /// Exact inverse; needs an exact determinant that is a monomial (e.g. det = 1).
    TreeAutomorphism inverse() const;
    TreeAutomorphism pow(int k) const;
    TreeAutomorphism scaled(const Series& s) const;

    /// Equal as automorphisms (up to a scalar), to the available precision.
    bool projectively_equal(const TreeAutomorphism& o) const;
    bool operator==(const TreeAutomorphism& o) const {
        return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
    }

    /// "[[a,b],[c,d]]" with entries written in var ('p' or 't').
    std::string to_string(char var = 'p') const;

private:
    Series a_, b_, c_, d_;
    int det_val_;
};

/// Canonical image of a vertex. InsufficientPrecision reports the precision needed.
Vertex act_vertex(const TreeAutomorphism& g, const Vertex& v);
/// Image of an end; exact for exact g and up/rational ends, truncated otherwise.
End act_end(const TreeAutomorphism& g, const End& e);
/// True if g maps the end to itself; for truncated ends, to the available depth.
bool fixes_end(const TreeAutomorphism& g, const End& e);

int displacement(const TreeAutomorphism& g, const Vertex& v);

struct Elliptic {
    Vertex fixed_vertex;
};

struct Hyperbolic {
    int length;
    End attracting;
    End repelling;
};

using Classification = std::variant<Elliptic, Hyperbolic>;

inline bool is_elliptic(const Classification& c) { return std::holds_alternative<Elliptic>(c); }

/// Hyperbolic iff 2 v(tr) < v(det). Axis ends that are not "up" or 0 are
/// produced as truncated ends known mod pi^end_precision.
Classification classify(const TreeAutomorphism& g, int end_precision = 16);
int translation_length(const TreeAutomorphism& g);
/// A vertex on the axis (hyperbolic) or in the fixed set (elliptic).
Vertex axis_vertex(const TreeAutomorphism& g);

/// l_end(g) = (x, g x)_end; DoesNotFixEnd unless g fixes the end.
int oriented_length(const TreeAutomorphism& g, const End& end, const std::optional<Vertex>& base = std::nullopt);

struct Depth {
    enum class Kind { Finite, Unbounded, NotFixing };
    Kind kind = Kind::NotFixing;
    int value = 0;

    static Depth finite(int v) { return {Kind::Finite, v}; }
    static Depth unbounded() { return {Kind::Unbounded, 0}; }
    static Depth not_fixing() { return {Kind::NotFixing, 0}; }
    bool operator==(const Depth&) const = default;
};

/// Largest r such that the conjugate of g into the standard lattice at x is
/// congruent to a scalar mod pi^r; equivalently g fixes B_x(r) pointwise.
Depth depth(const TreeAutomorphism& g, const Vertex& x);

enum class UnipotentKind { Good, Ugly, Anisotropic, NotUnipotent };

struct UnipotentClass {
    UnipotentKind kind = UnipotentKind::NotUnipotent;
    /// Set for Good: the unique fixed end and a horoellipse of eccentricity 1/3
    /// that has been checked to be fixed pointwise on its truncation.
    std::optional<End> fixed_end;
    std::optional<HoroellipseQuery> witness;
};

/// Ugly is never produced for this group. Anisotropic is produced only in
/// characteristic 2 for elements of PGL_2(K) whose determinant is not a
/// square (no K-rational eigenline).
UnipotentClass unipotent_class(const TreeAutomorphism& g, int witness_truncation = 6);

/// depth(h^i u h^-i, x0) for i = 0..steps at an axis vertex x0 of h fixed by u.
/// Requires u good unipotent and its fixed end repelling for h.
std::vector<int> contraction_witness(const TreeAutomorphism& u, const TreeAutomorphism& h, int steps);

/// #(S_{h x}(l(h)) intersected with S_end(x)) by enumeration of the sphere.
long long modular_index(const TreeAutomorphism& h, const End& end, const Vertex& x);
/// The same count in closed form: q^l(h), after checking the preconditions.
long long modular_index_closed_form(const TreeAutomorphism& h, const End& end, const Vertex& x);

struct BorelDecomposition {
    /// Maps the given end to 0; the other parts live in the conjugated frame.
    TreeAutomorphism conjugator;
    TreeAutomorphism unit_part;    // diag of units
    int power;                     // m with hyperbolic part diag(pi^-m, pi^m)
    TreeAutomorphism unipotent;    // [[1, b], [0, 1]]

    TreeAutomorphism hyperbolic_part() const;
    /// conjugator^-1 (unit_part * hyperbolic^m * unipotent) conjugator.
    TreeAutomorphism recompose() const;
};

/// Decomposes a type-preserving g fixing the end as z * h^m * u.
BorelDecomposition decompose_borel(const TreeAutomorphism& g, const End& end, int precision = 32);

/// The matrix mapping the end to 0 used by decompose_borel.
TreeAutomorphism end_normalizer(const End& end, int precision = 32);

}  // namespace btcusp
