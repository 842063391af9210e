#include "btcusp/poly.hpp"

#include "btcusp/errors.hpp"

namespace btcusp {

TPoly::TPoly(FieldPtr field, std::vector<Elem> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) { trim(); }

void TPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

TPoly TPoly::monomial(const FieldPtr& f, Elem c, int deg) {
    std::vector<Elem> v(static_cast<std::size_t>(deg + 1), 0);
    v[static_cast<std::size_t>(deg)] = c;
    return TPoly(f, std::move(v));
}

TPoly TPoly::from_series(const Series& s) {
    if (!s.is_exact()) throw InvalidInput("polynomial in t requires an exact series");
    std::vector<Elem> c;
    for (const auto& t : s.terms()) {
        if (t.deg > 0) throw InvalidInput("series " + s.to_string() + " is not a polynomial in t");
        const auto i = static_cast<std::size_t>(-t.deg);
        if (c.size() <= i) c.resize(i + 1, 0);
        c[i] = t.coeff;
    }
    return TPoly(s.field(), std::move(c));
}

TPoly TPoly::operator+(const TPoly& o) const {
    std::vector<Elem> r(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_->add(coeff(static_cast<int>(i)), o.coeff(static_cast<int>(i)));
    return TPoly(field_, std::move(r));
}

TPoly TPoly::operator-() const {
    std::vector<Elem> r = c_;
    for (auto& x : r) x = field_->neg(x);
    return TPoly(field_, std::move(r));
}

TPoly TPoly::operator-(const TPoly& o) const { return *this + (-o); }

TPoly TPoly::operator*(const TPoly& o) const {
    if (is_zero() || o.is_zero()) return TPoly(field_);
    std::vector<Elem> r(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] = field_->add(r[i + j], field_->mul(c_[i], o.c_[j]));
    }
    return TPoly(field_, std::move(r));
}

TPoly TPoly::scaled(Elem c) const {
    std::vector<Elem> r = c_;
    for (auto& x : r) x = field_->mul(x, c);
    return TPoly(field_, std::move(r));
}

std::pair<TPoly, TPoly> TPoly::divmod(const TPoly& d) const {
    if (d.is_zero()) throw DivisionByZero("polynomial division by zero");
    std::vector<Elem> rem = c_;
    const int dd = d.degree();
    const Elem linv = field_->inv(d.leading());
    std::vector<Elem> quo(rem.size() >= d.c_.size() ? rem.size() - d.c_.size() + 1 : 0, 0);
    for (int k = static_cast<int>(rem.size()) - 1; k >= dd; --k) {
        const Elem c = field_->mul(rem[k], linv);
        if (c == 0) continue;
        quo[k - dd] = c;
        for (int i = 0; i <= dd; ++i) rem[k - dd + i] = field_->sub(rem[k - dd + i], field_->mul(c, d.c_[i]));
    }
    return {TPoly(field_, std::move(quo)), TPoly(field_, std::move(rem))};
}

TPoly TPoly::monic() const {
    if (is_zero()) return *this;
    return scaled(field_->inv(leading()));
}

Series TPoly::to_series() const {
    std::vector<Term> t;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) t.push_back(Term{-static_cast<int>(i), c_[i]});
    return Series(field_, std::move(t));
}

ExtendedGcd extended_gcd(const TPoly& a, const TPoly& b) {
    const auto& f = a.field();
    TPoly r0 = a, r1 = b;
    TPoly x0 = TPoly::constant(f, 1), x1(f);
    TPoly y0(f), y1 = TPoly::constant(f, 1);
    while (!r1.is_zero()) {
        auto [q, r] = r0.divmod(r1);
        r0 = r1;
        r1 = r;
        TPoly x2 = x0 - q * x1;
        x0 = x1;
        x1 = x2;
        TPoly y2 = y0 - q * y1;
        y0 = y1;
        y1 = y2;
    }
    if (r0.is_zero()) return {r0, x0, y0};
    const Elem linv = f->inv(r0.leading());
    return {r0.scaled(linv), x0.scaled(linv), y0.scaled(linv)};
}

}  // namespace btcusp
