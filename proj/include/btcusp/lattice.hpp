#pragma once

/**
 * @file lattice.hpp
 * @brief The Nagao lattice SL_2(F_q[t]) and its principal congruence subgroups.
 *
 * t = 1/pi throughout. With the conventions of autom.hpp the stabilizer of
 * the standard ray vertex (n; 0) in SL_2(F_q[t]) is upper triangular:
 *   n >= 1:  { [[a, b], [0, 1/a]] : a in F_q^x, deg_t b <= n }
 *   n == 0:  SL_2(F_q)
 * and the cusp eps* = 0 is fixed by every [[1, b], [0, 1]].
 *
 * Congruence subgroups are handled through the finite group
 * G = SL_2(F_q[t]/f), which is the quotient of SL_2(F_q[t]) by Gamma(f).
 * The Nagao lattice is the degenerate case f = 1 with G trivial.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "btcusp/autom.hpp"
#include "btcusp/poly.hpp"

namespace btcusp {

inline constexpr long long kDefaultMaxOrder = 10000;

class LatticeSpec {
public:
    static LatticeSpec nagao(FieldPtr f);
    /// Throws InvalidInput unless the level is nonconstant.
    static LatticeSpec congruence(FieldPtr f, TPoly level);

    const FieldPtr& field() const { return field_; }
    int q() const { return field_->q(); }
    bool is_nagao() const { return !level_.has_value(); }
    /// The level f, or the constant 1 for the Nagao lattice.
    TPoly modulus() const;
    /// deg f, 0 for Nagao.
    int level_degree() const { return level_ ? level_->degree() : 0; }

    /// "nagao" or "congruence(t^2+t)".
    std::string to_string() const;

private:
    LatticeSpec(FieldPtr f, std::optional<TPoly> level) : field_(std::move(f)), level_(std::move(level)) {}

    FieldPtr field_;
    std::optional<TPoly> level_;
};

bool contains(const LatticeSpec& spec, const TreeAutomorphism& g);

/// Integer products and powers; SizeGuard on overflow.
long long checked_mul(long long a, long long b);
long long checked_pow(long long base, int exp);

struct Reduction {
    int level;
    /// An element of SL_2(F_q[t]) with witness . v == (level; 0).
    TreeAutomorphism witness;
};

/// Reduction to the standard ray under SL_2(F_q[t]).
Reduction reduce_vertex(const Vertex& v);

/// |Gamma_(n;0)| for the Nagao lattice, and for the edge {(n;0), (n+1;0)}.
long long nagao_vertex_order(int q, int n);
long long nagao_edge_order(int q, int n);
/// |Gamma(f) cap Gamma_(n;0)|.
long long vertex_order(const LatticeSpec& spec, int n);

struct StabilizerGroup {
    Vertex vertex;
    long long order = 0;
    /// Filled when order <= the materialization bound.
    std::vector<TreeAutomorphism> elements;
    bool materialized = false;
    /// Standard ray level and the conjugator c with c . vertex = (level; 0).
    int level = 0;
    std::optional<TreeAutomorphism> conjugator;
    std::string description;
};

/// Generators of the stabilizer of (n; 0) in SL_2(F_q[t]); the t-degree of the
/// unipotent generators is capped at max_t_degree.
std::vector<TreeAutomorphism> standard_stabilizer_generators(const FieldPtr& f, int n, int max_t_degree = INT_MAX);
/// Generators of Gamma(f) cap Gamma_(n;0) (of Gamma_(n;0) itself for Nagao).
std::vector<TreeAutomorphism> kernel_stabilizer_generators(const LatticeSpec& spec, int n);

StabilizerGroup stabilizer(const LatticeSpec& spec, const Vertex& v, long long max_order = kDefaultMaxOrder);
/// All elements with entries of t-degree <= degree_bound fixing v (test oracle).
StabilizerGroup stabilizer_bruteforce(const LatticeSpec& spec, const Vertex& v, int degree_bound);

/// F_q[t]/f with elements numbered 0..size-1 (base-q digits of the coefficients).
class QuotientRing {
public:
    QuotientRing(FieldPtr f, TPoly modulus);

    int size() const { return size_; }
    int reduce(const TPoly& p) const;
    TPoly element(int code) const;
    int add(int a, int b) const { return add_[idx(a, b)]; }
    int mul(int a, int b) const { return mul_[idx(a, b)]; }
    int neg(int a) const { return neg_[a]; }
    int sub(int a, int b) const { return add(a, neg(b)); }
    int zero() const { return 0; }
    int one() const { return one_; }

private:
    std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * size_ + b; }

    FieldPtr field_;
    TPoly modulus_;
    int size_;
    int one_;
    std::vector<int> add_, mul_, neg_;
};

/**
 * The finite group G = SL_2(F_q[t]/f), enumerated from elementary matrices.
 * Every element remembers a word in the generators, which gives a lift to
 * SL_2(F_q[t]).
 */
class CosetTable {
public:
    using Elt = std::uint32_t;

    /// SizeGuard when |G| would exceed max_size.
    explicit CosetTable(const LatticeSpec& spec, long long max_size = 200000);

    const LatticeSpec& spec() const { return spec_; }
    const QuotientRing& ring() const { return ring_; }
    std::size_t size() const { return elts_.size(); }
    Elt identity() const { return 0; }

    Elt mul(Elt a, Elt b) const;
    Elt inv(Elt a) const;
    /// Reduction mod f of an element of SL_2(F_q[t]).
    Elt reduce(const TreeAutomorphism& g) const;
    /// A preimage in SL_2(F_q[t]).
    TreeAutomorphism lift(Elt a) const;
    std::string to_string(Elt a) const;

    /// Closure of the generated subgroup.
    std::vector<Elt> subgroup(const std::vector<Elt>& gens) const;
    /// Left cosets gH: label[g] in 0..count-1, numbered by first appearance.
    struct Cosets {
        std::vector<int> label;
        std::vector<Elt> representative;
        std::size_t subgroup_order = 0;
        std::size_t count() const { return representative.size(); }
    };
    Cosets left_cosets(const std::vector<Elt>& subgroup_elements) const;

    /// Images of the standard stabilizers.
    std::vector<Elt> vertex_image_generators(int n) const;
    std::vector<Elt> edge_image_generators(int n) const;
    /// Image of the stabilizer of eps* (upper triangular over F_q[t]).
    std::vector<Elt> borel_image_generators() const;

private:
    struct Mat {
        int a, b, c, d;
    };
    std::uint64_t key(const Mat& m) const;
    Elt find(const Mat& m) const;
    Elt from_matrix(const TreeAutomorphism& g) const;

    LatticeSpec spec_;
    QuotientRing ring_;
    std::vector<Mat> elts_;
    std::unordered_map<std::uint64_t, Elt> index_;
    std::vector<TreeAutomorphism> gen_lifts_;
    std::vector<int> parent_;      // -1 for the identity
    std::vector<int> parent_gen_;  // generator appended to the parent's word
    mutable std::vector<std::optional<TreeAutomorphism>> lift_cache_;
};

/// Gamma(f) cap conj^-1 {[[1, b], [0, 1]] : b in module * F_q[t]} conj.
struct CuspData {
    End end;
    /// An element of SL_2(F_q[t]) mapping end to eps*.
    TreeAutomorphism conjugator;
    /// The unipotent parameters b range over module * F_q[t].
    TPoly module;
    /// |Gamma_end : V|.
    long long stabilizer_index = 1;
    std::string description() const;
};

struct NotCuspidal {
    std::string reason;
};

struct CuspUnknown {
    /// Stabilizer orders along [v0, end) within the end's horizon.
    std::vector<long long> orders;
    long long max_order = 0;
    std::string note;
};

using CuspVerdict = std::variant<CuspData, NotCuspidal, CuspUnknown>;

/// Rational ends and "up" are decided exactly; truncated ends give CuspUnknown
/// with the bounded evidence.
CuspVerdict is_cuspidal(const LatticeSpec& spec, const End& end);

/// Pairwise inequivalent cusps; for Gamma(f) one per Borel-image coset in G.
std::vector<CuspData> cusp_representatives(const LatticeSpec& spec, long long max_size = 200000);
std::vector<CuspData> cusp_representatives(const CosetTable& table);

/// gamma in SL_2(F_q[t]) with gamma . (num/den) = eps*, by the extended Euclidean algorithm.
TreeAutomorphism cusp_conjugator(const End& end);

/// The end [0; t + b_1, t + b_2, ...] given by a finite continued fraction,
/// reported as a truncated end known mod pi^precision.
End continued_fraction_end(const FieldPtr& f, const std::vector<Elem>& constants, int precision);

}  // namespace btcusp
