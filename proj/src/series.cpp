#include "btcusp/series.hpp"

#include <algorithm>
#include <sstream>

#include "btcusp/errors.hpp"

namespace btcusp {

Series::Series(FieldPtr field) : field_(std::move(field)) {}

Series::Series(FieldPtr field, std::vector<Term> terms, int precision)
    : field_(std::move(field)), terms_(std::move(terms)), precision_(precision) {
    normalize();
}

void Series::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.deg < b.deg; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (t.deg >= precision_) break;
        if (!out.empty() && out.back().deg == t.deg) {
            out.back().coeff = field_->add(out.back().coeff, t.coeff);
        } else {
            out.push_back(t);
        }
        if (out.back().coeff == 0) out.pop_back();
    }
    // A summed-to-zero entry may have been popped before a later duplicate; re-check.
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coeff == 0; }), out.end());
    terms_ = std::move(out);
}

Series Series::monomial(const FieldPtr& f, Elem c, int deg) {
    if (c == 0) return Series(f);
    return Series(f, {Term{deg, c}});
}

int Series::valuation() const {
    if (!terms_.empty()) return terms_.front().deg;
    if (is_exact()) return kInfinity;
    throw IndeterminateValuation("valuation of O(p^" + std::to_string(precision_) + ") is indeterminate");
}

std::optional<int> Series::valuation_if_known() const {
    if (!terms_.empty()) return terms_.front().deg;
    if (is_exact()) return kInfinity;
    return std::nullopt;
}

int Series::valuation_lower_bound() const {
    if (!terms_.empty()) return terms_.front().deg;
    return precision_;
}

Elem Series::coeff(int deg) const {
    if (deg >= precision_)
        throw InsufficientPrecision("coefficient of p^" + std::to_string(deg) + " is unknown", deg + 1);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), deg,
                               [](const Term& t, int d) { return t.deg < d; });
    if (it != terms_.end() && it->deg == deg) return it->coeff;
    return 0;
}

Series Series::operator+(const Series& o) const {
    std::vector<Term> t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return Series(field_, std::move(t), std::min(precision_, o.precision_));
}

Series Series::operator-() const {
    std::vector<Term> t = terms_;
    for (auto& x : t) x.coeff = field_->neg(x.coeff);
    return Series(field_, std::move(t), precision_);
}

Series Series::operator-(const Series& o) const { return *this + (-o); }

Series Series::operator*(const Series& o) const {
    int prec = kInfinity;
    if (!is_exact() || !o.is_exact()) {
        prec = std::min(add_sat(precision_, o.valuation_lower_bound()),
                        add_sat(o.precision_, valuation_lower_bound()));
    }
    if (terms_.empty() || o.terms_.empty()) return Series(field_, {}, prec);
    const int lo = terms_.front().deg + o.terms_.front().deg;
    int hi = terms_.back().deg + o.terms_.back().deg;
    if (prec != kInfinity) hi = std::min(hi, prec - 1);
    if (hi < lo) return Series(field_, {}, prec);
    std::vector<Elem> acc(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) {
            const int d = a.deg + b.deg;
            if (d > hi) break;
            auto& slot = acc[static_cast<std::size_t>(d - lo)];
            slot = field_->add(slot, field_->mul(a.coeff, b.coeff));
        }
    }
    std::vector<Term> out;
    for (std::size_t i = 0; i < acc.size(); ++i)
        if (acc[i] != 0) out.push_back(Term{lo + static_cast<int>(i), acc[i]});
    return Series(field_, std::move(out), prec);
}

Series Series::scaled(Elem c) const {
    if (c == 0) return is_exact() ? Series(field_) : Series(field_, {}, precision_);
    std::vector<Term> t = terms_;
    for (auto& x : t) x.coeff = field_->mul(x.coeff, c);
    return Series(field_, std::move(t), precision_);
}

Series Series::shifted(int k) const {
    std::vector<Term> t = terms_;
    for (auto& x : t) x.deg += k;
    return Series(field_, std::move(t), add_sat(precision_, k));
}

Series Series::truncate(int n) const {
    if (n > precision_)
        throw InsufficientPrecision("truncation mod p^" + std::to_string(n) + " of a series known mod p^" +
                                        std::to_string(precision_),
                                    n);
    std::vector<Term> t;
    for (const auto& x : terms_)
        if (x.deg < n) t.push_back(x);
    return Series(field_, std::move(t));
}

Series Series::with_precision(int n) const {
    if (n >= precision_) return *this;
    return Series(field_, terms_, n);
}

Series Series::inverse(int nterms) const {
    if (is_exact_zero()) throw DivisionByZero("inverse of exact zero");
    const int v = valuation();
    if (is_exact() && terms_.size() == 1) return monomial(field_, field_->inv(terms_.front().coeff), -v);
    if (nterms < 1) nterms = 1;
    if (precision_ != kInfinity && precision_ - v < nterms)
        throw InsufficientPrecision("inverse to " + std::to_string(nterms) + " terms", v + nterms);
    // Unit part u = sum u_i pi^i with u_0 != 0; w = u^{-1} by the usual recurrence.
    std::vector<Elem> u(static_cast<std::size_t>(nterms), 0);
    for (const auto& t : terms_) {
        const int i = t.deg - v;
        if (i >= nterms) break;
        u[static_cast<std::size_t>(i)] = t.coeff;
    }
    const Elem u0inv = field_->inv(u[0]);
    std::vector<Elem> w(static_cast<std::size_t>(nterms), 0);
    w[0] = u0inv;
    for (int k = 1; k < nterms; ++k) {
        Elem s = 0;
        for (int i = 1; i <= k; ++i) {
            if (u[i] == 0) continue;
            s = field_->add(s, field_->mul(u[i], w[k - i]));
        }
        w[k] = field_->neg(field_->mul(u0inv, s));
    }
    std::vector<Term> out;
    for (int k = 0; k < nterms; ++k)
        if (w[k] != 0) out.push_back(Term{k - v, w[k]});
    return Series(field_, std::move(out), nterms - v);
}

Series Series::divide(const Series& den, int target) const {
    if (den.is_exact_zero()) throw DivisionByZero("division by exact zero");
    if (is_exact_zero()) return Series(field_);
    const int vd = den.valuation();
    const int vn = valuation_lower_bound();
    const int nterms = std::max(1, target - vn + vd);
    Series q = *this * den.inverse(nterms);
    if (q.precision() < target)
        throw InsufficientPrecision("quotient mod p^" + std::to_string(target), target);
    return q;
}

bool Series::operator==(const Series& o) const { return precision_ == o.precision_ && terms_ == o.terms_; }

bool Series::congruent(const Series& o, int n) const {
    return truncate(n) == o.truncate(n);
}

std::string Series::to_string(char var) const {
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const Term& t) {
        if (!first) os << '+';
        first = false;
        const int power = var == 't' ? -t.deg : t.deg;
        const std::string c = field_->to_string(t.coeff);
        if (power == 0) {
            os << c;
            return;
        }
        if (t.coeff != 1) os << c << '*';
        os << var;
        if (power != 1) os << '^' << power;
    };
    if (var == 't') {
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) emit(*it);
    } else {
        for (const auto& t : terms_) emit(t);
    }
    if (first && is_exact()) os << '0';
    if (!is_exact()) {
        if (!first) os << '+';
        os << "O(p^" << precision_ << ')';
    }
    return os.str();
}

}  // namespace btcusp
