#pragma once

/**
 * @file series.hpp
 * @brief Truncated Laurent series over F_q in the uniformizer pi.
 *
 * A Series is a finite sparse set of nonzero terms plus a precision: either
 * Exact, or Mod(N) meaning the coefficients of degree < N are known and
 * nothing is known at degree >= N. Reading a coefficient beyond the known
 * range throws; precision is never widened implicitly. Values are immutable.
 */

#include <climits>
#include <optional>
#include <string>
#include <vector>

#include "btcusp/field.hpp"

namespace btcusp {

inline constexpr int kInfinity = INT_MAX;

/// Saturating addition for valuations/precisions that may be kInfinity.
inline int add_sat(int a, int b) {
    if (a == kInfinity || b == kInfinity) return kInfinity;
    return a + b;
}

struct Term {
    int deg;
    Elem coeff;
    bool operator==(const Term&) const = default;
};

class Series {
public:
    /// Exact zero.
    explicit Series(FieldPtr field);
    /// Terms need not be sorted; zero coefficients and terms at degree >= precision are dropped,
    /// repeated degrees are summed.
    Series(FieldPtr field, std::vector<Term> terms, int precision = kInfinity);

    static Series zero(const FieldPtr& f) { return Series(f); }
    static Series one(const FieldPtr& f) { return constant(f, 1); }
    static Series constant(const FieldPtr& f, Elem c) { return monomial(f, c, 0); }
    static Series monomial(const FieldPtr& f, Elem c, int deg);
    static Series pi_power(const FieldPtr& f, int deg) { return monomial(f, 1, deg); }
    /// The unknown series O(pi^n).
    static Series big_o(const FieldPtr& f, int n) { return Series(f, {}, n); }

    const FieldPtr& field() const { return field_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_exact() const { return precision_ == kInfinity; }
    /// kInfinity when exact.
    int precision() const { return precision_; }

    bool is_exact_zero() const { return is_exact() && terms_.empty(); }
    /// True when the value is provably nonzero (some known nonzero term).
    bool is_known_nonzero() const { return !terms_.empty(); }

    /// Minimum stored degree; kInfinity for exact zero. Throws IndeterminateValuation
    /// for a term-free inexact series.
    int valuation() const;
    std::optional<int> valuation_if_known() const;
    /// A valid lower bound on the true valuation (the precision when no term is known).
    int valuation_lower_bound() const;

    /// Throws InsufficientPrecision for deg >= precision.
    Elem coeff(int deg) const;
    /// Highest stored degree; only meaningful when terms exist.
    int max_degree() const { return terms_.empty() ? INT_MIN : terms_.back().deg; }

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator-() const;
    Series operator*(const Series& o) const;
    Series scaled(Elem c) const;
    /// Multiplication by pi^k.
    Series shifted(int k) const;

    /// Keeps degrees < n. Requires precision >= n.
    Series truncate(int n) const;
    /// Forgets everything at degree >= n (no-op if already less precise).
    Series with_precision(int n) const;

    /// Inverse known to `terms` significant terms: result mod pi^(terms - v(a)).
    /// Monomials invert exactly.
    Series inverse(int terms) const;
    /// this / den known mod pi^target; throws InsufficientPrecision if unreachable.
    Series divide(const Series& den, int target) const;

    /// Structural equality: same terms and same precision.
    bool operator==(const Series& o) const;
    /// Congruence mod pi^n (both sides must be known that far).
    bool congruent(const Series& o, int n) const;

    /// Rendered in pi ('p') or in t = 1/pi ('t'); inexact values end with "+O(p^N)".
    std::string to_string(char var = 'p') const;

private:
    void normalize();

    FieldPtr field_;
    std::vector<Term> terms_;
    int precision_ = kInfinity;
};

}  // namespace btcusp
