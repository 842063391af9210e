#include "btcusp/tree.hpp"

#include <algorithm>
#include <sstream>

#include "btcusp/errors.hpp"

namespace btcusp {

Vertex::Vertex(int level, const Series& residue) : level_(level), residue_(residue.truncate(level)) {}

bool Vertex::operator<(const Vertex& o) const {
    if (level_ != o.level_) return level_ < o.level_;
    const auto& a = residue_.terms();
    const auto& b = o.residue_.terms();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const Term& x, const Term& y) {
        return x.deg != y.deg ? x.deg < y.deg : x.coeff < y.coeff;
    });
}

std::string Vertex::to_string() const {
    return "(" + std::to_string(level_) + "; " + residue_.to_string() + ")";
}

std::size_t VertexHash::operator()(const Vertex& v) const noexcept {
    std::size_t h = std::hash<int>{}(v.level());
    for (const auto& t : v.residue().terms()) {
        h ^= std::hash<long long>{}((static_cast<long long>(t.deg) << 16) ^ t.coeff) + 0x9e3779b97f4a7c15ULL +
             (h << 6) + (h >> 2);
    }
    return h;
}

End End::up(const FieldPtr& f) { return End(Kind::Up, Series::one(f), Series(f)); }

End End::rational(const Series& num, const Series& den) {
    if (!num.is_exact() || !den.is_exact()) throw InvalidInput("rational end needs exact numerator and denominator");
    if (den.is_exact_zero()) {
        if (num.is_exact_zero()) throw InvalidInput("rat(0, 0) is not an end");
        return up(num.field());
    }
    return End(Kind::Rational, num, den);
}

End End::truncated(const Series& z) {
    if (z.is_exact()) throw InvalidInput("truncated end needs a series with finite precision");
    return End(Kind::Truncated, z, Series::one(z.field()));
}

Series End::point_mod(int n) const {
    switch (kind_) {
        case Kind::Up:
            throw InvalidInput("the end 'up' is not a point of K");
        case Kind::Rational:
            return num_.divide(den_, n).truncate(n);
        case Kind::Truncated:
            if (n > num_.precision())
                throw EndPrecisionExhausted("end " + to_string() + " is known only to depth " +
                                            std::to_string(num_.precision()) + ", depth " + std::to_string(n) +
                                            " requested");
            return num_.truncate(n);
    }
    return num_;
}

bool End::same_as(const End& o) const {
    if (is_up() || o.is_up()) return is_up() && o.is_up();
    if (kind_ == Kind::Rational && o.kind_ == Kind::Rational) return num_ * o.den_ == o.num_ * den_;
    const int n = std::min(horizon(), o.horizon());
    if (!(point_mod(n) == o.point_mod(n))) return false;
    throw EndPrecisionExhausted("ends " + to_string() + " and " + o.to_string() + " agree to depth " +
                                std::to_string(n) + "; equality undecidable");
}

std::string End::to_string() const {
    switch (kind_) {
        case Kind::Up:
            return "up";
        case Kind::Rational:
            return "rat(" + num_.to_string() + ", " + den_.to_string() + ")";
        case Kind::Truncated:
            return "trunc(" + num_.truncate(num_.precision()).to_string() + ", " + std::to_string(num_.precision()) +
                   ")";
    }
    return "";
}

int end_separation(const End& a, const End& b) {
    if (a.is_up() || b.is_up()) throw InvalidInput("end_separation needs two points of K");
    if (a.kind() == End::Kind::Rational && b.kind() == End::Kind::Rational) {
        const Series diff = a.numerator() * b.denominator() - b.numerator() * a.denominator();
        if (diff.is_exact_zero()) throw EqualEnds("ends coincide: " + a.to_string());
        return diff.valuation() - (a.denominator() * b.denominator()).valuation();
    }
    const int n = std::min(a.horizon(), b.horizon());
    const Series diff = a.point_mod(n) - b.point_mod(n);
    if (diff.is_exact_zero())
        throw EndPrecisionExhausted("ends " + a.to_string() + " and " + b.to_string() + " agree to depth " +
                                    std::to_string(n));
    return diff.valuation();
}

Vertex parent(const Vertex& v) { return Vertex(v.level() - 1, v.residue()); }

std::vector<Vertex> children(const Vertex& v) {
    std::vector<Vertex> out;
    const auto& f = v.field();
    out.reserve(static_cast<std::size_t>(f->q()));
    for (int c = 0; c < f->q(); ++c)
        out.emplace_back(v.level() + 1, v.residue() + Series::monomial(f, static_cast<Elem>(c), v.level()));
    return out;
}

std::vector<Vertex> neighbors(const Vertex& v) {
    std::vector<Vertex> out{parent(v)};
    auto ch = children(v);
    out.insert(out.end(), ch.begin(), ch.end());
    return out;
}

namespace {

// Level of the smallest ball containing both.
int meet_level(const Vertex& u, const Vertex& v) {
    const int lo = std::min(u.level(), v.level());
    const Series d = u.residue() - v.residue();
    if (d.is_exact_zero()) return lo;
    return std::min(lo, d.valuation());
}

}  // namespace

int distance(const Vertex& u, const Vertex& v) {
    const int w = meet_level(u, v);
    return (u.level() - w) + (v.level() - w);
}

Vertex geodesic_point(const Vertex& u, const Vertex& v, int k) {
    const int w = meet_level(u, v);
    const int up = u.level() - w;
    if (k < 0 || k > up + (v.level() - w)) throw InvalidInput("geodesic_point: k out of range");
    if (k <= up) return Vertex(u.level() - k, u.residue());
    return Vertex(w + (k - up), v.residue());
}

Vertex ray_vertex(const End& end, const Vertex& x, int k) {
    if (k < 0) throw InvalidInput("ray_vertex: negative step count");
    const int n = x.level();
    if (end.is_up()) return Vertex(n - k, x.residue());
    const Series d = end.point_mod(n) - x.residue();
    const int w = d.is_exact_zero() ? n : std::min(n, d.valuation());
    const int up = n - w;
    if (k <= up) return Vertex(n - k, x.residue());
    const int level = w + (k - up);
    return Vertex(level, end.point_mod(level));
}

Vertex step_to_end(const End& end, const Vertex& x) { return ray_vertex(end, x, 1); }

int busemann(const Vertex& x, const Vertex& y, const End& end) {
    const int k = distance(x, y);
    const Vertex xk = ray_vertex(end, x, k);
    return k - distance(y, xk);
}

bool horosphere_contains(const End& end, const Vertex& x, const Vertex& y) { return busemann(x, y, end) == 0; }

bool horoball_contains(const End& end, const Vertex& x, const Vertex& y) { return busemann(x, y, end) >= 0; }

HoroellipseQuery::HoroellipseQuery(End c, Vertex x, int num, int den)
    : center(std::move(c)), radius_vertex(std::move(x)), ecc_num(num), ecc_den(den) {
    if (num <= 0 || den <= 0 || num > den) throw InvalidInput("eccentricity must lie in (0, 1]");
}

bool horoellipse_contains(const HoroellipseQuery& b, const Vertex& y) {
    // With s the distance from x to the projection of y on [x, end) and r the
    // distance from y to that projection, d(y, x(t)) - lambda t is decreasing
    // up to t = s and nondecreasing after, so the minimum is r - lambda s.
    const int d = distance(b.radius_vertex, y);
    const int c = busemann(b.radius_vertex, y, b.center);
    const int s = (d + c) / 2;
    const int r = (d - c) / 2;
    return static_cast<long long>(b.ecc_den) * r <= static_cast<long long>(b.ecc_num) * s;
}

Line::Line(End from, End to) : from_(std::move(from)), to_(std::move(to)) {
    if (from_.is_up() && to_.is_up()) throw EqualEnds("line between an end and itself");
    if (from_.is_up()) {
        base_.emplace(0, to_.point_mod(0));
    } else if (to_.is_up()) {
        base_.emplace(0, from_.point_mod(0));
    } else {
        const int w = end_separation(from_, to_);
        base_.emplace(w, from_.point_mod(w));
    }
}

Vertex Line::at(int k) const {
    if (k >= 0) return ray_vertex(to_, *base_, k);
    return ray_vertex(from_, *base_, -k);
}

bool Line::contains(const Vertex& z, int k) const {
    for (int i = 1; i <= k; ++i)
        if (!(ray_vertex(from_, ray_vertex(to_, z, i), i) == z)) return false;
    return true;
}

namespace {

void sphere_walk(const Vertex& v, const Vertex* from, int remaining, const std::function<void(const Vertex&)>& fn) {
    if (remaining == 0) {
        fn(v);
        return;
    }
    for (const auto& n : neighbors(v)) {
        if (from && n == *from) continue;
        sphere_walk(n, &v, remaining - 1, fn);
    }
}

}  // namespace

void for_each_in_sphere(const Vertex& x, int r, const std::function<void(const Vertex&)>& fn) {
    if (r < 0) throw InvalidInput("sphere radius must be nonnegative");
    sphere_walk(x, nullptr, r, fn);
}

std::vector<Vertex> sphere(const Vertex& x, int r) {
    std::vector<Vertex> out;
    for_each_in_sphere(x, r, [&](const Vertex& v) { out.push_back(v); });
    return out;
}

std::vector<Vertex> ball(const Vertex& x, int r) {
    std::vector<Vertex> out;
    for (int i = 0; i <= r; ++i) for_each_in_sphere(x, i, [&](const Vertex& v) { out.push_back(v); });
    return out;
}

bool branch_component(const Vertex& u, const Vertex& v, const End& end) {
    if (distance(u, v) != 1) throw InvalidInput("branch_component needs an edge");
    return step_to_end(end, u) == v;
}

}  // namespace btcusp
