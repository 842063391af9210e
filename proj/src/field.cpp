#include "btcusp/field.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "btcusp/errors.hpp"

namespace btcusp {

namespace {

int mod(long long a, int p) {
    long long r = a % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

// Polynomials over F_p as coefficient vectors, low degree first.
using Poly = std::vector<int>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, int p) {
    trim(a);
    const int dm = static_cast<int>(m.size()) - 1;
    int lead_inv = 1;
    for (int i = 1; i < p; ++i)
        if (mod(static_cast<long long>(i) * m.back(), p) == 1) lead_inv = i;
    while (static_cast<int>(a.size()) - 1 >= dm) {
        const int shift = static_cast<int>(a.size()) - 1 - dm;
        const int c = mod(static_cast<long long>(a.back()) * lead_inv, p);
        for (int i = 0; i <= dm; ++i) a[shift + i] = mod(a[shift + i] - static_cast<long long>(c) * m[i], p);
        trim(a);
    }
    return a;
}

}  // namespace

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

bool is_irreducible(int p, const std::vector<int>& poly_in) {
    Poly poly = poly_in;
    trim(poly);
    const int deg = static_cast<int>(poly.size()) - 1;
    if (deg < 1) return false;
    if (deg == 1) return true;
    // Enumerate monic candidates of degree 1..deg/2.
    for (int d = 1; d <= deg / 2; ++d) {
        long long count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (long long code = 0; code < count; ++code) {
            Poly cand(d + 1, 0);
            long long c = code;
            for (int i = 0; i < d; ++i) {
                cand[i] = static_cast<int>(c % p);
                c /= p;
            }
            cand[d] = 1;
            if (poly_mod(poly, cand, p).empty()) return false;
        }
    }
    return true;
}

FieldSpec::FieldSpec(int p, std::vector<int> modulus)
    : p_(p), e_(static_cast<int>(modulus.size()) - 1), q_(1), modulus_(std::move(modulus)) {
    for (int i = 0; i < e_; ++i) q_ *= p_;
}

FieldSpec FieldSpec::prime(int p) {
    if (!is_prime(p)) throw InvalidInput("field characteristic " + std::to_string(p) + " is not prime");
    return FieldSpec(p, {0, 1});
}

FieldSpec FieldSpec::of_order(int q) {
    if (is_prime(q)) return prime(q);
    switch (q) {
        case 4: return with_modulus(2, {1, 1, 1});
        case 8: return with_modulus(2, {1, 1, 0, 1});
        case 9: return with_modulus(3, {1, 0, 1});
        default:
            throw InvalidInput("no canonical modulus for q = " + std::to_string(q) + "; supply --modulus");
    }
}

FieldSpec FieldSpec::with_modulus(int p, std::vector<int> modulus) {
    if (!is_prime(p)) throw InvalidInput("field characteristic " + std::to_string(p) + " is not prime");
    for (auto& c : modulus) c = mod(c, p);
    trim(modulus);
    if (modulus.size() < 2) throw InvalidInput("modulus must have degree >= 1");
    if (modulus.back() != 1) throw InvalidInput("modulus must be monic");
    if (!is_irreducible(p, modulus)) throw InvalidInput("modulus is reducible over F_" + std::to_string(p));
    FieldSpec s(p, std::move(modulus));
    if (s.q_ > 256) throw SizeGuard("field order " + std::to_string(s.q_) + " exceeds 256");
    return s;
}

Field::Field(FieldSpec spec) : spec_(std::move(spec)) {
    const int q = spec_.q();
    const int p = spec_.p();
    const int e = spec_.degree();
    add_.resize(static_cast<std::size_t>(q) * q);
    mul_.resize(static_cast<std::size_t>(q) * q);
    neg_.resize(q);
    inv_.assign(q, 0);
    std::vector<std::vector<int>> co(q);
    for (int a = 0; a < q; ++a) co[a] = coords(static_cast<Elem>(a));
    for (int a = 0; a < q; ++a) {
        std::vector<int> n(e);
        for (int i = 0; i < e; ++i) n[i] = mod(-co[a][i], p);
        neg_[a] = from_coords(n);
        for (int b = 0; b < q; ++b) {
            std::vector<int> s(e);
            for (int i = 0; i < e; ++i) s[i] = mod(co[a][i] + co[b][i], p);
            add_[idx(a, b)] = from_coords(s);
            Poly prod(2 * e, 0);
            for (int i = 0; i < e; ++i)
                for (int j = 0; j < e; ++j) prod[i + j] = mod(prod[i + j] + co[a][i] * co[b][j], p);
            Poly r = poly_mod(prod, spec_.modulus(), p);
            r.resize(e, 0);
            mul_[idx(a, b)] = from_coords(r);
        }
    }
    for (int a = 1; a < q; ++a)
        for (int b = 1; b < q; ++b)
            if (mul_[idx(a, b)] == 1) inv_[a] = static_cast<Elem>(b);
    for (int g = 1; g < q; ++g) {
        int order = 1;
        Elem x = static_cast<Elem>(g);
        while (x != 1) {
            x = mul(x, static_cast<Elem>(g));
            ++order;
        }
        if (order == q - 1) {
            primitive_ = static_cast<Elem>(g);
            break;
        }
    }
}

Elem Field::inv(Elem a) const {
    if (a == 0) throw DivisionByZero("inverse of zero in F_" + std::to_string(q()));
    return inv_[a];
}

Elem Field::pow(Elem a, std::uint64_t k) const {
    Elem r = 1;
    while (k) {
        if (k & 1) r = mul(r, a);
        a = mul(a, a);
        k >>= 1;
    }
    return r;
}

Elem Field::from_int(long long n) const {
    std::vector<int> c(degree(), 0);
    c[0] = mod(n, p());
    return from_coords(c);
}

std::vector<Elem> Field::sqrt(Elem a) const {
    std::vector<Elem> roots;
    for (int b = 0; b < q(); ++b)
        if (mul(static_cast<Elem>(b), static_cast<Elem>(b)) == a) roots.push_back(static_cast<Elem>(b));
    return roots;
}

std::vector<int> Field::coords(Elem a) const {
    std::vector<int> c(degree());
    int x = a;
    for (int i = 0; i < degree(); ++i) {
        c[i] = x % p();
        x /= p();
    }
    return c;
}

Elem Field::from_coords(const std::vector<int>& c) const {
    int code = 0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) code = code * p() + mod(c[i], p());
    return static_cast<Elem>(code);
}

std::string Field::to_string(Elem a) const {
    if (degree() == 1 || a < p()) return std::to_string(a);
    const auto c = coords(a);
    std::ostringstream os;
    bool first = true;
    for (int i = degree() - 1; i >= 0; --i) {
        if (c[i] == 0) continue;
        if (!first) os << '+';
        first = false;
        if (i == 0) {
            os << c[i];
        } else {
            if (c[i] != 1) os << c[i] << '*';
            os << 'x';
            if (i > 1) os << '^' << i;
        }
    }
    if (first) os << '0';
    return "[" + os.str() + "]";
}

FieldPtr make_field(const FieldSpec& spec) {
    static std::mutex mu;
    static std::map<std::pair<int, std::vector<int>>, FieldPtr> cache;
    std::lock_guard lock(mu);
    auto key = std::make_pair(spec.p(), spec.modulus());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<const Field>(spec);
    cache.emplace(key, f);
    return f;
}

FieldPtr make_field(int q) { return make_field(FieldSpec::of_order(q)); }

}  // namespace btcusp
