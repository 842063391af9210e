#include "btcusp/literal.hpp"

#include <cctype>
#include <charconv>

#include "btcusp/errors.hpp"

namespace btcusp {

namespace {

class Parser {
public:
    Parser(const FieldPtr& f, std::string_view s) : f_(f), s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    bool accept_word(std::string_view w) {
        skip_ws();
        if (s_.substr(pos_, w.size()) != w) return false;
        pos_ += w.size();
        return true;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw InvalidInput("cannot parse '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + why);
    }

    long long integer() {
        skip_ws();
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
        long long v = 0;
        const auto* b = s_.data() + pos_;
        auto [p, ec] = std::from_chars(b, s_.data() + s_.size(), v);
        if (ec != std::errc() || p == b) fail("expected an integer");
        pos_ += static_cast<std::size_t>(p - b);
        return neg ? -v : v;
    }

    bool digit_next() {
        const char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    }

    // "[x^2+x+1]" -> field element.
    Elem bracket_coeff() {
        expect('[');
        std::vector<int> coords(static_cast<std::size_t>(f_->degree()), 0);
        bool first = true;
        while (!accept(']')) {
            int sign = 1;
            if (accept('-')) sign = -1;
            else if (!first) expect('+');
            first = false;
            long long c = 1;
            int e = 0;
            bool has_c = false;
            if (digit_next()) {
                c = integer();
                has_c = true;
                accept('*');
            }
            if (accept('x')) {
                e = 1;
                if (accept('^')) e = static_cast<int>(integer());
            } else if (!has_c) {
                fail("expected a coefficient or x");
            }
            if (e < 0 || e >= f_->degree()) fail("power of x outside the power basis");
            const long long p = f_->p();
            auto& slot = coords[static_cast<std::size_t>(e)];
            slot = static_cast<int>((((slot + sign * c) % p) + p) % p);
        }
        return f_->from_coords(coords);
    }

    Series series() {
        std::vector<Term> terms;
        int precision = kInfinity;
        bool first = true;
        for (;;) {
            const char c = peek();
            if (c == '\0' || c == ',' || c == ')' || c == ']' || c == ';') break;
            bool neg = false;
            if (accept('-')) neg = true;
            else if (!first && !accept('+')) fail("expected '+' or '-'");
            first = false;
            if (accept_word("O(")) {
                if (neg) fail("sign before O(...)");
                if (!accept('p')) fail("O(...) takes a power of p");
                expect('^');
                precision = static_cast<int>(integer());
                expect(')');
                continue;
            }
            Elem coeff = 1;
            bool has_coeff = false;
            if (peek() == '[') {
                coeff = bracket_coeff();
                has_coeff = true;
            } else if (digit_next()) {
                coeff = f_->from_int(integer());
                has_coeff = true;
            }
            int deg = 0;
            if (has_coeff) accept('*');
            const char v = peek();
            if (v == 't' || v == 'p') {
                ++pos_;
                int e = 1;
                if (accept('^')) e = static_cast<int>(integer());
                deg = v == 't' ? -e : e;
            } else if (!has_coeff) {
                fail("expected a term");
            }
            if (neg) coeff = f_->neg(coeff);
            terms.push_back(Term{deg, coeff});
        }
        if (first) fail("empty series");
        return Series(f_, std::move(terms), precision);
    }

    std::size_t pos() const { return pos_; }

private:
    const FieldPtr& f_;
    std::string_view s_;
    std::size_t pos_ = 0;
};

void finish(Parser& p) {
    if (!p.at_end()) p.fail("trailing characters");
}

}  // namespace

Series parse_series(const FieldPtr& f, std::string_view text) {
    Parser p(f, text);
    Series s = p.series();
    finish(p);
    return s;
}

TPoly parse_tpoly(const FieldPtr& f, std::string_view text) { return TPoly::from_series(parse_series(f, text)); }

Vertex parse_vertex(const FieldPtr& f, std::string_view text) {
    Parser p(f, text);
    p.expect('(');
    const int n = static_cast<int>(p.integer());
    if (!p.accept(';')) p.expect(',');
    Series a = p.series();
    p.expect(')');
    finish(p);
    if (!a.is_exact()) p.fail("vertex residue must be exact");
    return Vertex(n, a);
}

End parse_end(const FieldPtr& f, std::string_view text) {
    Parser p(f, text);
    if (p.accept_word("up")) {
        finish(p);
        return End::up(f);
    }
    if (p.accept_word("rat(")) {
        Series num = p.series();
        p.expect(',');
        Series den = p.series();
        p.expect(')');
        finish(p);
        return End::rational(num, den);
    }
    if (p.accept_word("trunc(")) {
        Series z = p.series();
        p.expect(',');
        const int n = static_cast<int>(p.integer());
        p.expect(')');
        finish(p);
        if (z.precision() < n) p.fail("series known to less than the requested depth");
        return End::truncated(Series(f, z.terms(), n));
    }
    // A bare series names an exact point of K.
    Series z = p.series();
    finish(p);
    return z.is_exact() ? End::point(z) : End::truncated(z);
}

TreeAutomorphism parse_matrix(const FieldPtr& f, std::string_view text) {
    Parser p(f, text);
    Series e[4] = {Series(f), Series(f), Series(f), Series(f)};
    p.expect('[');
    for (int r = 0; r < 2; ++r) {
        if (r) p.expect(',');
        p.expect('[');
        e[2 * r] = p.series();
        p.expect(',');
        e[2 * r + 1] = p.series();
        p.expect(']');
    }
    p.expect(']');
    finish(p);
    return TreeAutomorphism(e[0], e[1], e[2], e[3]);
}

}  // namespace btcusp
