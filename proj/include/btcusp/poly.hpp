#pragma once

// Dense polynomials over F_q in the global coordinate t = 1/pi.

#include <string>
#include <vector>

#include "btcusp/series.hpp"

namespace btcusp {

class TPoly {
public:
    explicit TPoly(FieldPtr field) : field_(std::move(field)) {}
    TPoly(FieldPtr field, std::vector<Elem> coeffs);

    static TPoly constant(const FieldPtr& f, Elem c) { return TPoly(f, {c}); }
    static TPoly monomial(const FieldPtr& f, Elem c, int deg);
    /// Exact series with no positive pi-degree terms; throws InvalidInput otherwise.
    static TPoly from_series(const Series& s);

    const FieldPtr& field() const { return field_; }
    const std::vector<Elem>& coeffs() const { return c_; }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    Elem coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Elem{0}; }
    Elem leading() const { return c_.empty() ? Elem{0} : c_.back(); }

    TPoly operator+(const TPoly& o) const;
    TPoly operator-(const TPoly& o) const;
    TPoly operator-() const;
    TPoly operator*(const TPoly& o) const;
    TPoly scaled(Elem c) const;
    /// Euclidean division; throws DivisionByZero.
    std::pair<TPoly, TPoly> divmod(const TPoly& d) const;
    TPoly operator%(const TPoly& d) const { return divmod(d).second; }
    TPoly monic() const;

    bool operator==(const TPoly& o) const { return c_ == o.c_; }

    Series to_series() const;
    std::string to_string() const { return to_series().to_string('t'); }

private:
    void trim();

    FieldPtr field_;
    std::vector<Elem> c_;
};

struct ExtendedGcd {
    TPoly gcd;  // monic
    TPoly x;
    TPoly y;    // x*a + y*b = gcd
};

ExtendedGcd extended_gcd(const TPoly& a, const TPoly& b);

}  // namespace btcusp
