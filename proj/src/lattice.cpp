#include "btcusp/lattice.hpp"

#include <deque>

#include "btcusp/errors.hpp"

namespace btcusp {

namespace {

using M = TreeAutomorphism;

bool is_tpoly(const Series& s) {
    if (!s.is_exact()) return false;
    return s.terms().empty() || s.max_degree() <= 0;
}

TPoly poly_entry(const Series& s) { return TPoly::from_series(s); }

Series tmono(const FieldPtr& f, Elem c, int j) { return Series::monomial(f, c, -j); }

// The prime-field basis 1, x, ..., x^(e-1) of F_q.
std::vector<Elem> additive_basis(const FieldPtr& f) {
    std::vector<Elem> out;
    for (int i = 0; i < f->degree(); ++i) {
        std::vector<int> c(static_cast<std::size_t>(f->degree()), 0);
        c[static_cast<std::size_t>(i)] = 1;
        out.push_back(f->from_coords(c));
    }
    return out;
}

// All polynomials in t of degree <= d (q^(d+1) of them).
std::vector<TPoly> all_polys(const FieldPtr& f, int d) {
    std::vector<TPoly> out;
    const long long count = checked_pow(f->q(), d + 1);
    out.reserve(static_cast<std::size_t>(count));
    for (long long code = 0; code < count; ++code) {
        std::vector<Elem> c(static_cast<std::size_t>(d + 1));
        long long x = code;
        for (auto& e : c) {
            e = static_cast<Elem>(x % f->q());
            x /= f->q();
        }
        out.emplace_back(f, std::move(c));
    }
    return out;
}

M diag_unit(const FieldPtr& f, Elem a) { return M::diag(Series::constant(f, a), Series::constant(f, f->inv(a))); }

}  // namespace

LatticeSpec LatticeSpec::nagao(FieldPtr f) { return LatticeSpec(std::move(f), std::nullopt); }

LatticeSpec LatticeSpec::congruence(FieldPtr f, TPoly level) {
    if (level.degree() < 1) throw InvalidInput("congruence level must be a nonconstant polynomial in t");
    return LatticeSpec(std::move(f), level.monic());
}

TPoly LatticeSpec::modulus() const { return level_ ? *level_ : TPoly::constant(field_, 1); }

std::string LatticeSpec::to_string() const {
    if (!level_) return "nagao";
    return "congruence(" + level_->to_string() + ")";
}

bool contains(const LatticeSpec& spec, const TreeAutomorphism& g) {
    if (!is_tpoly(g.a()) || !is_tpoly(g.b()) || !is_tpoly(g.c()) || !is_tpoly(g.d())) return false;
    if (!(g.det() == Series::one(spec.field()))) return false;
    if (spec.is_nagao()) return true;
    const TPoly f = spec.modulus();
    const TPoly one = TPoly::constant(spec.field(), 1);
    return (poly_entry(g.a()) - one) % f == TPoly(spec.field()) && poly_entry(g.b()) % f == TPoly(spec.field()) &&
           poly_entry(g.c()) % f == TPoly(spec.field()) && (poly_entry(g.d()) - one) % f == TPoly(spec.field());
}

long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw SizeGuard("integer overflow in a group order");
    return r;
}

long long checked_pow(long long base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

Reduction reduce_vertex(const Vertex& v) {
    const auto& f = v.field();
    M gamma = M::identity(f);
    Vertex cur = v;
    const M w = M::weyl(f);
    for (int iter = 0; iter < 100000; ++iter) {
        // Kill the polynomial part (degrees <= 0) of the residue.
        std::vector<Term> poly;
        for (const auto& t : cur.residue().terms())
            if (t.deg <= 0) poly.push_back(t);
        if (!poly.empty()) {
            const M l = M::lower(-Series(f, poly));
            gamma = l * gamma;
            cur = act_vertex(l, cur);
        }
        const int n = cur.level();
        if (n <= 0) {
            if (n < 0) {
                gamma = w * gamma;
                cur = act_vertex(w, cur);
            }
            return {cur.level(), gamma};
        }
        if (cur.residue().is_exact_zero()) return {n, gamma};
        // Residue of valuation s >= 1: w lowers the level by 2s.
        gamma = w * gamma;
        cur = act_vertex(w, cur);
    }
    throw Error("reduce_vertex: iteration cap reached at " + v.to_string());
}

long long nagao_vertex_order(int q, int n) {
    if (n < 0) throw InvalidInput("standard ray levels are nonnegative");
    if (n == 0) return checked_mul(q, checked_mul(q - 1, q + 1));
    return checked_mul(q - 1, checked_pow(q, n + 1));
}

long long nagao_edge_order(int q, int n) {
    if (n < 0) throw InvalidInput("standard ray levels are nonnegative");
    if (n == 0) return checked_mul(q - 1, q);
    return nagao_vertex_order(q, n);
}

long long vertex_order(const LatticeSpec& spec, int n) {
    if (spec.is_nagao()) return nagao_vertex_order(spec.q(), n);
    if (n < 0) throw InvalidInput("standard ray levels are nonnegative");
    if (n == 0) return 1;
    return checked_pow(spec.q(), std::max(0, n - spec.level_degree() + 1));
}

namespace {

// Elements of Gamma(f) cap Gamma_(n;0).
std::vector<M> standard_stabilizer_elements(const LatticeSpec& spec, int n) {
    const auto& f = spec.field();
    std::vector<M> out;
    if (n == 0) {
        if (!spec.is_nagao()) return {M::identity(f)};
        const int q = f->q();
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
                for (int c = 0; c < q; ++c)
                    for (int d = 0; d < q; ++d) {
                        const Elem det = f->sub(f->mul(static_cast<Elem>(a), static_cast<Elem>(d)),
                                                f->mul(static_cast<Elem>(b), static_cast<Elem>(c)));
                        if (det != 1) continue;
                        out.emplace_back(Series::constant(f, static_cast<Elem>(a)),
                                         Series::constant(f, static_cast<Elem>(b)),
                                         Series::constant(f, static_cast<Elem>(c)),
                                         Series::constant(f, static_cast<Elem>(d)));
                    }
        return out;
    }
    if (spec.is_nagao()) {
        for (int a = 1; a < f->q(); ++a)
            for (const auto& b : all_polys(f, n)) {
                const M d = diag_unit(f, static_cast<Elem>(a));
                out.push_back(M(d.a(), d.a() * b.to_series(), Series(f), d.d()));
            }
        return out;
    }
    const TPoly lev = spec.modulus();
    const int k = n - lev.degree();
    if (k < 0) return {M::identity(f)};
    for (const auto& m : all_polys(f, k)) out.push_back(M::upper((lev * m).to_series()));
    return out;
}

}  // namespace

std::vector<TreeAutomorphism> standard_stabilizer_generators(const FieldPtr& f, int n, int max_t_degree) {
    std::vector<M> out;
    if (f->q() > 2) out.push_back(diag_unit(f, f->primitive()));
    const int top = n == 0 ? 0 : std::min(n, max_t_degree);
    for (int j = 0; j <= top; ++j)
        for (Elem c : additive_basis(f)) out.push_back(M::upper(tmono(f, c, j)));
    if (n == 0)
        for (Elem c : additive_basis(f)) out.push_back(M::lower(tmono(f, c, 0)));
    return out;
}

std::vector<TreeAutomorphism> kernel_stabilizer_generators(const LatticeSpec& spec, int n) {
    const auto& f = spec.field();
    if (spec.is_nagao()) return standard_stabilizer_generators(f, n);
    std::vector<M> out;
    if (n == 0) return out;
    const TPoly lev = spec.modulus();
    for (int j = 0; j <= n - lev.degree(); ++j)
        for (Elem c : additive_basis(f)) out.push_back(M::upper((lev * TPoly::monomial(f, c, j)).to_series()));
    return out;
}

StabilizerGroup stabilizer(const LatticeSpec& spec, const Vertex& v, long long max_order) {
    const Reduction red = reduce_vertex(v);
    StabilizerGroup out{v, vertex_order(spec, red.level), {}, false, red.level, red.witness, {}};
    const std::string where = red.level == 0 ? "SL_2(F_q)" : "upper triangular, deg b <= " + std::to_string(red.level);
    out.description = spec.is_nagao() ? where : where + " intersected with " + spec.to_string();
    if (out.order <= max_order) {
        const M g = red.witness;
        const M ginv = g.inverse();
        for (const auto& s : standard_stabilizer_elements(spec, red.level)) out.elements.push_back(ginv * s * g);
        out.materialized = true;
        if (static_cast<long long>(out.elements.size()) != out.order)
            throw Error("stabilizer closed form produced a wrong number of elements");
    }
    return out;
}

StabilizerGroup stabilizer_bruteforce(const LatticeSpec& spec, const Vertex& v, int degree_bound) {
    const auto& f = spec.field();
    if (degree_bound < 0) throw InvalidInput("degree bound must be nonnegative");
    const long long per = checked_pow(f->q(), degree_bound + 1);
    if (checked_mul(per, checked_mul(per, per)) > (1LL << 22))
        throw SizeGuard("stabilizer_bruteforce: search space q^(3(bound+1)) exceeds 2^22");
    const auto polys = all_polys(f, degree_bound);
    std::vector<Series> ser;
    for (const auto& p : polys) ser.push_back(p.to_series());
    const TPoly one = TPoly::constant(f, 1);
    StabilizerGroup out{v, 0, {}, true, 0, std::nullopt, "brute force, entry degree <= " + std::to_string(degree_bound)};
    auto consider = [&](const Series& a, const Series& b, const Series& c, const Series& d) {
        const M g(a, b, c, d);
        if (!(act_vertex(g, v) == v)) return;
        if (!contains(spec, g)) return;
        out.elements.push_back(g);
    };
    for (std::size_t ia = 0; ia < polys.size(); ++ia) {
        const TPoly& a = polys[ia];
        for (std::size_t ib = 0; ib < polys.size(); ++ib) {
            for (std::size_t ic = 0; ic < polys.size(); ++ic) {
                if (a.is_zero()) {
                    // -bc = 1: b and c are constants and d is free
                    const TPoly bc = polys[ib] * polys[ic];
                    if (!(bc == -one)) continue;
                    for (std::size_t id = 0; id < polys.size(); ++id) consider(ser[ia], ser[ib], ser[ic], ser[id]);
                    continue;
                }
                auto [d, r] = (one + polys[ib] * polys[ic]).divmod(a);
                if (!r.is_zero() || d.degree() > degree_bound) continue;
                consider(ser[ia], ser[ib], ser[ic], d.to_series());
            }
        }
    }
    out.order = static_cast<long long>(out.elements.size());
    return out;
}

QuotientRing::QuotientRing(FieldPtr f, TPoly modulus) : field_(std::move(f)), modulus_(modulus.monic()) {
    const int deg = modulus_.degree();
    if (deg < 0) throw InvalidInput("quotient by zero");
    size_ = static_cast<int>(checked_pow(field_->q(), deg));
    if (size_ > 1024) throw SizeGuard("F_q[t]/f has more than 1024 elements");
    one_ = reduce(TPoly::constant(field_, 1));
    add_.resize(static_cast<std::size_t>(size_) * size_);
    mul_.resize(add_.size());
    neg_.resize(static_cast<std::size_t>(size_));
    std::vector<TPoly> el;
    for (int i = 0; i < size_; ++i) el.push_back(element(i));
    for (int i = 0; i < size_; ++i) {
        neg_[static_cast<std::size_t>(i)] = reduce(-el[static_cast<std::size_t>(i)]);
        for (int j = 0; j < size_; ++j) {
            add_[idx(i, j)] = reduce(el[static_cast<std::size_t>(i)] + el[static_cast<std::size_t>(j)]);
            mul_[idx(i, j)] = reduce(el[static_cast<std::size_t>(i)] * el[static_cast<std::size_t>(j)]);
        }
    }
}

int QuotientRing::reduce(const TPoly& p) const {
    const TPoly r = p % modulus_;
    int code = 0;
    for (int i = r.degree(); i >= 0; --i) code = code * field_->q() + r.coeff(i);
    return code;
}

TPoly QuotientRing::element(int code) const {
    std::vector<Elem> c;
    while (code > 0) {
        c.push_back(static_cast<Elem>(code % field_->q()));
        code /= field_->q();
    }
    return TPoly(field_, std::move(c));
}

CosetTable::CosetTable(const LatticeSpec& spec, long long max_size) : spec_(spec), ring_(spec.field(), spec.modulus()) {
    const auto& f = spec.field();
    const int deg = spec.level_degree();
    for (int j = 0; j < deg; ++j)
        for (Elem c : additive_basis(f)) {
            gen_lifts_.push_back(M::upper(tmono(f, c, j)));
            gen_lifts_.push_back(M::lower(tmono(f, c, j)));
        }
    std::vector<Mat> gens;
    for (const auto& g : gen_lifts_) {
        gens.push_back(Mat{ring_.reduce(poly_entry(g.a())), ring_.reduce(poly_entry(g.b())),
                           ring_.reduce(poly_entry(g.c())), ring_.reduce(poly_entry(g.d()))});
    }
    const Mat id{ring_.one(), 0, 0, ring_.one()};
    elts_.push_back(id);
    index_.emplace(key(id), 0);
    parent_.push_back(-1);
    parent_gen_.push_back(-1);
    for (std::size_t head = 0; head < elts_.size(); ++head) {
        const Mat cur = elts_[head];
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
            const Mat& g = gens[gi];
            const Mat nx{ring_.add(ring_.mul(cur.a, g.a), ring_.mul(cur.b, g.c)),
                         ring_.add(ring_.mul(cur.a, g.b), ring_.mul(cur.b, g.d)),
                         ring_.add(ring_.mul(cur.c, g.a), ring_.mul(cur.d, g.c)),
                         ring_.add(ring_.mul(cur.c, g.b), ring_.mul(cur.d, g.d))};
            if (index_.emplace(key(nx), static_cast<Elt>(elts_.size())).second) {
                elts_.push_back(nx);
                parent_.push_back(static_cast<int>(head));
                parent_gen_.push_back(static_cast<int>(gi));
                if (static_cast<long long>(elts_.size()) > max_size)
                    throw SizeGuard("SL_2(F_q[t]/f) has more than " + std::to_string(max_size) + " elements");
            }
        }
    }
    lift_cache_.resize(elts_.size());
}

std::uint64_t CosetTable::key(const Mat& m) const {
    const std::uint64_t s = static_cast<std::uint64_t>(ring_.size());
    return ((static_cast<std::uint64_t>(m.a) * s + m.b) * s + m.c) * s + m.d;
}

CosetTable::Elt CosetTable::find(const Mat& m) const {
    auto it = index_.find(key(m));
    if (it == index_.end()) throw Error("matrix is not in SL_2(F_q[t]/f)");
    return it->second;
}

CosetTable::Elt CosetTable::mul(Elt x, Elt y) const {
    const Mat& p = elts_[x];
    const Mat& g = elts_[y];
    return find(Mat{ring_.add(ring_.mul(p.a, g.a), ring_.mul(p.b, g.c)),
                    ring_.add(ring_.mul(p.a, g.b), ring_.mul(p.b, g.d)),
                    ring_.add(ring_.mul(p.c, g.a), ring_.mul(p.d, g.c)),
                    ring_.add(ring_.mul(p.c, g.b), ring_.mul(p.d, g.d))});
}

CosetTable::Elt CosetTable::inv(Elt x) const {
    const Mat& p = elts_[x];
    return find(Mat{p.d, ring_.neg(p.b), ring_.neg(p.c), p.a});
}

CosetTable::Elt CosetTable::from_matrix(const TreeAutomorphism& g) const {
    return find(Mat{ring_.reduce(poly_entry(g.a())), ring_.reduce(poly_entry(g.b())), ring_.reduce(poly_entry(g.c())),
                    ring_.reduce(poly_entry(g.d()))});
}

CosetTable::Elt CosetTable::reduce(const TreeAutomorphism& g) const {
    if (!contains(LatticeSpec::nagao(spec_.field()), g)) throw InvalidInput(g.to_string('t') + " is not in SL_2(F_q[t])");
    return from_matrix(g);
}

TreeAutomorphism CosetTable::lift(Elt x) const {
    std::vector<int> word;
    Elt cur = x;
    while (!lift_cache_[cur] && parent_[cur] >= 0) {
        word.push_back(parent_gen_[cur]);
        cur = static_cast<Elt>(parent_[cur]);
    }
    M g = lift_cache_[cur] ? *lift_cache_[cur] : M::identity(spec_.field());
    for (auto it = word.rbegin(); it != word.rend(); ++it) g = g * gen_lifts_[static_cast<std::size_t>(*it)];
    lift_cache_[x] = g;
    return g;
}

std::string CosetTable::to_string(Elt x) const {
    const Mat& m = elts_[x];
    return "[[" + ring_.element(m.a).to_string() + "," + ring_.element(m.b).to_string() + "],[" +
           ring_.element(m.c).to_string() + "," + ring_.element(m.d).to_string() + "]]";
}

std::vector<CosetTable::Elt> CosetTable::subgroup(const std::vector<Elt>& gens) const {
    std::vector<char> seen(elts_.size(), 0);
    std::vector<Elt> out{identity()};
    seen[identity()] = 1;
    for (std::size_t head = 0; head < out.size(); ++head)
        for (Elt g : gens) {
            const Elt nx = mul(out[head], g);
            if (!seen[nx]) {
                seen[nx] = 1;
                out.push_back(nx);
            }
        }
    return out;
}

CosetTable::Cosets CosetTable::left_cosets(const std::vector<Elt>& h) const {
    Cosets out;
    out.label.assign(elts_.size(), -1);
    out.subgroup_order = h.size();
    for (Elt g = 0; g < elts_.size(); ++g) {
        if (out.label[g] >= 0) continue;
        const int id = static_cast<int>(out.representative.size());
        out.representative.push_back(g);
        for (Elt x : h) out.label[mul(g, x)] = id;
    }
    return out;
}

std::vector<CosetTable::Elt> CosetTable::vertex_image_generators(int n) const {
    std::vector<Elt> out;
    for (const auto& g : standard_stabilizer_generators(spec_.field(), n, spec_.level_degree() - 1))
        out.push_back(from_matrix(g));
    return out;
}

std::vector<CosetTable::Elt> CosetTable::edge_image_generators(int n) const {
    if (n >= 1) return vertex_image_generators(n);
    const auto& f = spec_.field();
    std::vector<Elt> out;
    if (f->q() > 2) out.push_back(from_matrix(diag_unit(f, f->primitive())));
    for (Elem c : additive_basis(f)) out.push_back(from_matrix(M::upper(tmono(f, c, 0))));
    return out;
}

std::vector<CosetTable::Elt> CosetTable::borel_image_generators() const {
    return vertex_image_generators(std::max(1, spec_.level_degree()));
}

std::string CuspData::description() const {
    return "cusp at " + end.to_string() + ": unipotents [[1,b],[0,1]] with b in (" + module.to_string() +
           ")F_q[t], conjugated by " + conjugator.to_string('t') + "; index " + std::to_string(stabilizer_index);
}

TreeAutomorphism cusp_conjugator(const End& end) {
    const auto& f = end.field();
    if (end.kind() == End::Kind::Truncated) throw InvalidInput("a truncated end has no exact conjugator");
    Series num = end.is_up() ? Series::one(f) : end.numerator();
    Series den = end.is_up() ? Series(f) : end.denominator();
    int top = INT_MIN;
    for (const Series* s : {&num, &den})
        if (!s->is_exact_zero()) top = std::max(top, s->max_degree());
    num = num.shifted(-top);
    den = den.shifted(-top);
    TPoly p = TPoly::from_series(num), s = TPoly::from_series(den);
    const TPoly g = extended_gcd(p, s).gcd;
    p = p.divmod(g).first;
    s = s.divmod(g).first;
    // x p + y s = 1, so [[y, x], [-p, s]] has determinant 1 and sends (s, p) to (1, 0).
    const ExtendedGcd e = extended_gcd(p, s);
    if (e.gcd.degree() != 0) throw Error("cusp_conjugator: numerator and denominator not coprime");
    const M gamma(e.y.to_series(), e.x.to_series(), (-p).to_series(), s.to_series());
    return gamma;
}

CuspVerdict is_cuspidal(const LatticeSpec& spec, const End& end) {
    const auto& f = spec.field();
    if (end.kind() == End::Kind::Truncated) {
        CuspUnknown out;
        const Vertex v0 = Vertex::origin(f);
        for (int k = 0; k < end.horizon(); ++k) {
            const Vertex y = ray_vertex(end, v0, k);
            out.orders.push_back(vertex_order(spec, reduce_vertex(y).level));
            out.max_order = std::max(out.max_order, out.orders.back());
        }
        out.note = "bounded evidence to depth " + std::to_string(end.horizon() - 1) +
                   ": stabilizer orders along [v0, end) do not exceed " + std::to_string(out.max_order) +
                   "; this does not prove the end is not a cusp";
        return out;
    }
    const M gamma = cusp_conjugator(end);
    if (!act_end(gamma, end).same_as(End::point(Series(f)))) throw Error("cusp conjugator check failed");
    return CuspData{end, gamma, spec.modulus(), spec.is_nagao() ? static_cast<long long>(spec.q() - 1) : 1};
}

std::vector<CuspData> cusp_representatives(const CosetTable& table) {
    const auto& spec = table.spec();
    const auto& f = spec.field();
    const auto borel = table.subgroup(table.borel_image_generators());
    const auto cosets = table.left_cosets(borel);
    std::vector<CuspData> out;
    const End zero = End::point(Series(f));
    for (auto rep : cosets.representative) {
        const M gamma = table.lift(rep);
        out.push_back(CuspData{act_end(gamma, zero), gamma.inverse(), spec.modulus(),
                               spec.is_nagao() ? static_cast<long long>(spec.q() - 1) : 1});
    }
    return out;
}

std::vector<CuspData> cusp_representatives(const LatticeSpec& spec, long long max_size) {
    return cusp_representatives(CosetTable(spec, max_size));
}

End continued_fraction_end(const FieldPtr& f, const std::vector<Elem>& constants, int precision) {
    TPoly num(f), den = TPoly::constant(f, 1);
    for (auto it = constants.rbegin(); it != constants.rend(); ++it) {
        const TPoly pq(f, {*it, 1});
        TPoly next = pq * den + num;
        num = den;
        den = next;
    }
    const Series z = num.to_series().divide(den.to_series(), precision);
    return End::truncated(z.with_precision(precision));
}

}  // namespace btcusp
