#include "btcusp/autom.hpp"

#include <algorithm>

#include "btcusp/errors.hpp"

namespace btcusp {

namespace {

// Minimum of the valuations, provided it can be certified; the index of a
// minimizing entry is returned alongside.
std::pair<int, std::size_t> certified_min_valuation(const std::vector<const Series*>& xs) {
    int best = kInfinity;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto v = xs[i]->valuation_if_known();
        if (v && *v < best) {
            best = *v;
            arg = i;
        }
    }
    for (const auto* x : xs) {
        if (!x->valuation_if_known() && x->precision() <= best)
            throw InsufficientPrecision("cannot certify minimal valuation", best + 1);
    }
    return {best, arg};
}

}  // namespace

TreeAutomorphism::TreeAutomorphism(Series a, Series b, Series c, Series d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const Series dt = det();
    if (dt.is_exact_zero()) throw InvalidInput("singular matrix");
    det_val_ = dt.valuation();
}

TreeAutomorphism TreeAutomorphism::identity(const FieldPtr& f) {
    return TreeAutomorphism(Series::one(f), Series(f), Series(f), Series::one(f));
}

TreeAutomorphism TreeAutomorphism::diag(const Series& x, const Series& y) {
    return TreeAutomorphism(x, Series(x.field()), Series(x.field()), y);
}

TreeAutomorphism TreeAutomorphism::upper(const Series& b) {
    const auto& f = b.field();
    return TreeAutomorphism(Series::one(f), b, Series(f), Series::one(f));
}

TreeAutomorphism TreeAutomorphism::lower(const Series& c) {
    const auto& f = c.field();
    return TreeAutomorphism(Series::one(f), Series(f), c, Series::one(f));
}

TreeAutomorphism TreeAutomorphism::weyl(const FieldPtr& f) {
    return TreeAutomorphism(Series(f), -Series::one(f), Series::one(f), Series(f));
}

TreeAutomorphism TreeAutomorphism::basis(const Vertex& v) {
    const auto& f = v.field();
    return TreeAutomorphism(Series::one(f), Series(f), v.residue(), Series::pi_power(f, v.level()));
}

bool TreeAutomorphism::is_exact() const { return a_.is_exact() && b_.is_exact() && c_.is_exact() && d_.is_exact(); }

TreeAutomorphism TreeAutomorphism::operator*(const TreeAutomorphism& o) const {
    return TreeAutomorphism(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_,
                            c_ * o.b_ + d_ * o.d_);
}

TreeAutomorphism TreeAutomorphism::adjugate() const { return TreeAutomorphism(d_, -b_, -c_, a_); }

TreeAutomorphism TreeAutomorphism::inverse() const {
    const Series dt = det();
    if (!dt.is_exact() || dt.terms().size() != 1)
        throw InvalidInput("exact inverse needs a monomial determinant; use adjugate()");
    return adjugate().scaled(dt.inverse(1));
}

TreeAutomorphism TreeAutomorphism::pow(int k) const {
    if (k < 0) return adjugate().pow(-k);
    TreeAutomorphism result = identity(field());
    TreeAutomorphism base = *this;
    while (k) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

TreeAutomorphism TreeAutomorphism::scaled(const Series& s) const {
    return TreeAutomorphism(a_ * s, b_ * s, c_ * s, d_ * s);
}

bool TreeAutomorphism::projectively_equal(const TreeAutomorphism& o) const {
    const Series* x[4] = {&a_, &b_, &c_, &d_};
    const Series* y[4] = {&o.a_, &o.b_, &o.c_, &o.d_};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if ((*x[i] * *y[j] - *x[j] * *y[i]).is_known_nonzero()) return false;
    return true;
}

std::string TreeAutomorphism::to_string(char var) const {
    return "[[" + a_.to_string(var) + "," + b_.to_string(var) + "],[" + c_.to_string(var) + "," +
           d_.to_string(var) + "]]";
}

Vertex act_vertex(const TreeAutomorphism& g, const Vertex& v) {
    const auto& f = g.field();
    const int n = v.level();
    const Series pn = Series::pi_power(f, n);
    const Series a11 = g.a() + g.b() * v.residue();
    const Series a12 = g.b() * pn;
    const Series a21 = g.c() + g.d() * v.residue();
    const Series a22 = g.d() * pn;
    // The image lattice is spanned by (a11, a21) and (a12, a22). Its projection
    // to the first coordinate is pi^e O; the kernel of that projection is
    // (0, pi^(detval + n - e) O).
    const auto [e, j] = certified_min_valuation({&a11, &a12});
    const int m = g.det_valuation() + n - 2 * e;
    const Series y = j == 0 ? a21.divide(a11, m) : a22.divide(a12, m);
    return Vertex(m, y);
}

End act_end(const TreeAutomorphism& g, const End& e) {
    const auto& f = g.field();
    Series x(f), y(f);  // homogeneous coordinates (x, y) ~ point y/x
    if (e.is_up()) {
        x = g.b();
        y = g.d();
    } else if (e.kind() == End::Kind::Rational) {
        x = g.a() * e.denominator() + g.b() * e.numerator();
        y = g.c() * e.denominator() + g.d() * e.numerator();
    } else {
        const Series& z = e.series();
        x = g.a() + g.b() * z;
        y = g.c() + g.d() * z;
    }
    if (x.is_exact() && y.is_exact()) return End::rational(y, x);
    const auto vx = x.valuation_if_known();
    if (!vx) throw EndPrecisionExhausted("image of " + e.to_string() + " is undetermined at this precision");
    const int rel = x.precision() == kInfinity ? y.precision() - *vx : x.precision() - *vx;
    const Series z = y * x.inverse(std::max(1, rel));
    return End::truncated(z);
}

bool fixes_end(const TreeAutomorphism& g, const End& e) {
    const End img = act_end(g, e);
    if (e.kind() != End::Kind::Truncated && img.kind() != End::Kind::Truncated) return img.same_as(e);
    if (img.is_up() || e.is_up()) return img.is_up() && e.is_up();
    const int n = std::min(img.horizon(), e.horizon());
    return img.point_mod(n) == e.point_mod(n);
}

int displacement(const TreeAutomorphism& g, const Vertex& v) { return distance(v, act_vertex(g, v)); }

namespace {

void require_type_preserving(const TreeAutomorphism& g, const char* what) {
    if (!g.type_preserving())
        throw InvalidInput(std::string(what) + " requires a type-preserving element (even determinant valuation)");
}

int trace_excess(const TreeAutomorphism& g) {
    const Series tr = g.trace();
    const auto vt = tr.valuation_if_known();
    if (!vt) throw IndeterminateValuation("trace valuation is indeterminate");
    if (*vt == kInfinity) return 0;
    return std::max(0, g.det_valuation() - 2 * *vt);
}

End attracting_end(const TreeAutomorphism& g, int l, int precision) {
    const auto& f = g.field();
    const Vertex x0 = Vertex::origin(f);
    const Vertex gx0 = act_vertex(g, x0);
    if (g.b().is_exact_zero() && busemann(x0, gx0, End::up(f)) > 0) return End::up(f);
    const End zero = End::point(Series(f));
    if (g.c().is_exact_zero() && busemann(x0, gx0, zero) > 0) return zero;
    // Walk the axis forward. Once a full step descends by l levels the axis
    // keeps descending, and each vertex pins the end mod pi^level.
    Vertex a = axis_vertex(g);
    for (int guard = 0; guard < 100000; ++guard) {
        const Vertex next = act_vertex(g, a);
        if (next.level() - a.level() == l && next.level() >= precision)
            return End::truncated(Series(f, next.residue().terms(), next.level()));
        a = next;
    }
    throw Error("attracting end did not stabilize");
}

}  // namespace

Vertex axis_vertex(const TreeAutomorphism& g) {
    require_type_preserving(g, "axis_vertex");
    const Vertex x0 = Vertex::origin(g.field());
    const Vertex gx = act_vertex(g, x0);
    const int d = distance(x0, gx);
    return geodesic_point(x0, gx, d / 2);
}

Classification classify(const TreeAutomorphism& g, int end_precision) {
    require_type_preserving(g, "classify");
    const int l = trace_excess(g);
    if (l == 0) {
        Vertex fixed = axis_vertex(g);
        if (!(act_vertex(g, fixed) == fixed)) throw Error("elliptic element without fixed midpoint");
        return Elliptic{fixed};
    }
    End att = attracting_end(g, l, end_precision);
    End rep = attracting_end(g.adjugate(), l, end_precision);
    return Hyperbolic{l, std::move(att), std::move(rep)};
}

int translation_length(const TreeAutomorphism& g) {
    require_type_preserving(g, "translation_length");
    return trace_excess(g);
}

int oriented_length(const TreeAutomorphism& g, const End& end, const std::optional<Vertex>& base) {
    if (!fixes_end(g, end)) throw DoesNotFixEnd(g.to_string() + " does not fix " + end.to_string());
    const Vertex x = base ? *base : Vertex::origin(g.field());
    return busemann(x, act_vertex(g, x), end);
}

Depth depth(const TreeAutomorphism& g, const Vertex& x) {
    require_type_preserving(g, "depth");
    if (!(act_vertex(g, x) == x)) return Depth::not_fixing();
    const auto& f = g.field();
    const Series inv_pn = Series::pi_power(f, -x.level());
    const TreeAutomorphism minv(Series::one(f), Series(f), -(x.residue() * inv_pn), inv_pn);
    const TreeAutomorphism h = minv * g * TreeAutomorphism::basis(x);
    const auto [e, unused] = certified_min_valuation({&h.a(), &h.b(), &h.c(), &h.d()});
    (void)unused;
    const Series off1 = h.b().shifted(-e);
    const Series off2 = h.c().shifted(-e);
    const Series diag_diff = (h.a() - h.d()).shifted(-e);
    if (off1.is_exact_zero() && off2.is_exact_zero() && diag_diff.is_exact_zero()) return Depth::unbounded();
    const auto [r, unused2] = certified_min_valuation({&off1, &off2, &diag_diff});
    (void)unused2;
    return Depth::finite(r);
}

namespace {

// Square root in K of an exact series in characteristic 2, if it exists.
std::optional<Series> char2_sqrt(const Series& s) {
    const auto& f = s.field();
    std::vector<Term> out;
    for (const auto& t : s.terms()) {
        if (t.deg % 2 != 0) return std::nullopt;
        const auto r = f->sqrt(t.coeff);
        if (r.empty()) return std::nullopt;
        out.push_back(Term{t.deg / 2, r.front()});
    }
    return Series(f, std::move(out));
}

}  // namespace

UnipotentClass unipotent_class(const TreeAutomorphism& g, int witness_truncation) {
    if (!g.is_exact()) throw InsufficientPrecision("unipotent classification needs exact entries", kInfinity);
    const auto& f = g.field();
    UnipotentClass out;
    const bool scalar = g.b().is_exact_zero() && g.c().is_exact_zero() && g.a() == g.d();
    if (scalar) return out;
    const Series tr = g.trace();
    const Series dt = g.det();
    const Series four = Series::constant(f, f->from_int(4));
    if (!(tr * tr - four * dt).is_exact_zero()) return out;
    Series lambda(f);
    if (f->p() == 2) {
        auto root = char2_sqrt(dt);
        if (!root) {
            out.kind = UnipotentKind::Anisotropic;
            return out;
        }
        lambda = *root;
    } else {
        lambda = tr.scaled(f->inv(f->from_int(2)));
    }
    // N = g - lambda I has N^2 = 0; its image is the fixed line.
    const Series n11 = g.a() - lambda;
    const Series n22 = g.d() - lambda;
    End fixed = (n11.is_exact_zero() && g.c().is_exact_zero()) ? End::rational(n22, g.b())
                                                                : End::rational(g.c(), n11);
    const Vertex x0 = Vertex::origin(f);
    std::optional<Vertex> radius;
    for (int k = 0; k < 4096 && !radius; ++k) {
        Vertex x = ray_vertex(fixed, x0, k);
        if (act_vertex(g, x) == x) radius = x;
    }
    if (!radius) throw Error("no fixed vertex found towards the fixed end of " + g.to_string());
    HoroellipseQuery witness(fixed, *radius, 1, 3);
    for (const auto& y : ball(*radius, witness_truncation)) {
        if (horoellipse_contains(witness, y) && !(act_vertex(g, y) == y))
            throw Error("horoellipse witness not fixed at " + y.to_string());
    }
    out.kind = UnipotentKind::Good;
    out.fixed_end = std::move(fixed);
    out.witness = std::move(witness);
    return out;
}

std::vector<int> contraction_witness(const TreeAutomorphism& u, const TreeAutomorphism& h, int steps) {
    if (steps < 0) throw InvalidInput("steps must be nonnegative");
    const UnipotentClass uc = unipotent_class(u);
    if (uc.kind != UnipotentKind::Good) throw InvalidInput("contraction_witness: u is not a good unipotent");
    const End& eps = *uc.fixed_end;
    if (translation_length(h) == 0) throw InvalidInput("contraction_witness: h is not hyperbolic");
    if (!fixes_end(h, eps) || oriented_length(h, eps) >= 0)
        throw InvalidInput("contraction_witness: fixed end of u is not the repelling end of h");
    // The axis runs into eps; the fixed horoball of u is met along it.
    const Vertex a = axis_vertex(h);
    std::optional<Vertex> x0;
    for (int k = 0; k < 4096 && !x0; ++k) {
        Vertex x = ray_vertex(eps, a, k);
        if (act_vertex(u, x) == x) x0 = x;
    }
    if (!x0) throw Error("contraction_witness: no axis vertex fixed by u");
    std::vector<int> out;
    TreeAutomorphism hi = TreeAutomorphism::identity(h.field());
    TreeAutomorphism hinv = TreeAutomorphism::identity(h.field());
    const TreeAutomorphism hadj = h.adjugate();
    for (int i = 0; i <= steps; ++i) {
        const Depth dpt = depth(hi * u * hinv, *x0);
        if (dpt.kind != Depth::Kind::Finite) throw Error("contraction_witness: conjugate lost the base vertex");
        out.push_back(dpt.value);
        hi = hi * h;
        hinv = hadj * hinv;
    }
    return out;
}

namespace {

void check_modular_preconditions(const TreeAutomorphism& h, const End& end, const Vertex& x) {
    const int l = translation_length(h);
    if (l == 0) throw InvalidInput("modular_index: h is not hyperbolic");
    if (oriented_length(h, end) <= 0) throw InvalidInput("modular_index: end is not attracting for h");
    if (displacement(h, x) != l) throw NotOnAxis(x.to_string() + " is not on the axis of " + h.to_string());
}

}  // namespace

long long modular_index(const TreeAutomorphism& h, const End& end, const Vertex& x) {
    check_modular_preconditions(h, end, x);
    const int l = translation_length(h);
    long long count = 0;
    for_each_in_sphere(act_vertex(h, x), l, [&](const Vertex& y) {
        if (horosphere_contains(end, x, y)) ++count;
    });
    return count;
}

long long modular_index_closed_form(const TreeAutomorphism& h, const End& end, const Vertex& x) {
    check_modular_preconditions(h, end, x);
    // Every vertex has exactly q neighbours farther from the end, and all
    // l steps from h.x back to the horosphere of x must be such steps.
    long long r = 1;
    for (int i = 0; i < translation_length(h); ++i) r *= h.field()->q();
    return r;
}

TreeAutomorphism end_normalizer(const End& end, int precision) {
    const auto& f = end.field();
    if (end.is_up()) return TreeAutomorphism::weyl(f);
    if (end.kind() == End::Kind::Rational)
        return TreeAutomorphism(end.denominator(), Series(f), -end.numerator(), end.denominator());
    (void)precision;
    return TreeAutomorphism::lower(-end.series());
}

TreeAutomorphism BorelDecomposition::hyperbolic_part() const {
    const auto& f = conjugator.field();
    return TreeAutomorphism::diag(Series::pi_power(f, -power), Series::pi_power(f, power));
}

TreeAutomorphism BorelDecomposition::recompose() const {
    return conjugator.adjugate() * (unit_part * hyperbolic_part() * unipotent) * conjugator;
}

BorelDecomposition decompose_borel(const TreeAutomorphism& g, const End& end, int precision) {
    require_type_preserving(g, "decompose_borel");
    if (!fixes_end(g, end)) throw DoesNotFixEnd(g.to_string() + " does not fix " + end.to_string());
    const TreeAutomorphism c = end_normalizer(end, precision);
    const TreeAutomorphism gp = c * g * c.adjugate();
    if (gp.c().is_known_nonzero()) throw Error("normalized element is not upper triangular");
    const int va = gp.a().valuation();
    const int vd = gp.d().valuation();
    const int m = (vd - va) / 2;
    const int s = (va + vd) / 2;
    const Series alpha = gp.a().shifted(-s);
    const Series beta = gp.b().shifted(-s);
    const Series delta = gp.d().shifted(-s);
    const TreeAutomorphism unit = TreeAutomorphism::diag(alpha.shifted(m), delta.shifted(-m));
    const Series b = beta.divide(alpha, precision);
    return BorelDecomposition{c, unit, m, TreeAutomorphism::upper(b)};
}

}  // namespace btcusp
