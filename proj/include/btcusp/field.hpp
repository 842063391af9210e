#pragma once

/**
 * @file field.hpp
 * @brief Finite fields F_q = F_p[x]/(modulus).
 *
 * Elements are stored as small integer codes: the code of
 * c_0 + c_1 x + ... + c_{e-1} x^{e-1} is sum c_i p^i. The field object owns
 * full addition and multiplication tables, so every operation is a lookup.
 * q is limited to 256, far above anything the tree computations can use.
 */

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace btcusp {

using Elem = std::uint16_t;

class FieldSpec {
public:
    /// Prime field F_p.
    static FieldSpec prime(int p);
    /// F_q with the canonical modulus for q in {4, 8, 9}, or q prime.
    static FieldSpec of_order(int q);
    /// F_{p^e} with an explicit modulus, given low-to-high with leading 1.
    static FieldSpec with_modulus(int p, std::vector<int> modulus);

    int p() const { return p_; }
    int degree() const { return e_; }
    int q() const { return q_; }
    const std::vector<int>& modulus() const { return modulus_; }

    bool operator==(const FieldSpec&) const = default;

private:
    FieldSpec(int p, std::vector<int> modulus);

    int p_;
    int e_;
    int q_;
    std::vector<int> modulus_;
};

bool is_prime(int n);
/// Trial factorization over F_p: no monic factor of degree 1..deg/2.
bool is_irreducible(int p, const std::vector<int>& poly);

class Field {
public:
    explicit Field(FieldSpec spec);

    const FieldSpec& spec() const { return spec_; }
    int p() const { return spec_.p(); }
    int q() const { return spec_.q(); }
    int degree() const { return spec_.degree(); }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }

    Elem add(Elem a, Elem b) const { return add_[idx(a, b)]; }
    Elem sub(Elem a, Elem b) const { return add_[idx(a, neg_[b])]; }
    Elem neg(Elem a) const { return neg_[a]; }
    Elem mul(Elem a, Elem b) const { return mul_[idx(a, b)]; }
    /// Throws DivisionByZero for a == 0.
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, std::uint64_t k) const;
    /// Embeds an integer via the prime subfield.
    Elem from_int(long long n) const;

    /// Square root in characteristic 2 (Frobenius is bijective); otherwise
    /// returns a root if one exists. Empty if a is a non-square.
    std::vector<Elem> sqrt(Elem a) const;

    /// A generator of the multiplicative group.
    Elem primitive() const { return primitive_; }

    /// Coordinates w.r.t. the power basis.
    std::vector<int> coords(Elem a) const;
    Elem from_coords(const std::vector<int>& c) const;

    /// "3", or "[x+1]" for non-prime fields.
    std::string to_string(Elem a) const;

private:
    std::size_t idx(Elem a, Elem b) const { return static_cast<std::size_t>(a) * spec_.q() + b; }

    FieldSpec spec_;
    std::vector<Elem> add_;
    std::vector<Elem> mul_;
    std::vector<Elem> neg_;
    std::vector<Elem> inv_;
    Elem primitive_ = 1;
};

using FieldPtr = std::shared_ptr<const Field>;

/// Shared, cached field instance for a spec.
FieldPtr make_field(const FieldSpec& spec);
FieldPtr make_field(int q);

}  // namespace btcusp
