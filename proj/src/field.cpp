#include "ksmaster/field.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

namespace ksm {

namespace {

using Poly = std::vector<std::int64_t>;

// Exact division of integer polynomials by a monic divisor.
Poly divide_exact(Poly num, const Poly& den) {
    const std::size_t dn = den.size() - 1;
    if (num.size() < den.size()) return {0};
    Poly quot(num.size() - dn, 0);
    for (std::size_t k = num.size(); k-- > dn;) {
        const std::int64_t c = num[k];
        quot[k - dn] = c;
        if (c == 0) continue;
        for (std::size_t j = 0; j <= dn; ++j) num[k - dn + j] -= c * den[j];
    }
    return quot;
}

std::unique_ptr<Cyclotomic> build_cyclotomic(unsigned n) {
    auto data = std::make_unique<Cyclotomic>();
    data->conductor = n;
    Poly p(n + 1, 0);
    p[0] = -1;
    p[n] = 1;
    for (unsigned d = 1; d < n; ++d) {
        if (n % d == 0) p = divide_exact(p, cyclotomic(d).polynomial);
    }
    while (p.size() > 1 && p.back() == 0) p.pop_back();
    data->polynomial = p;
    data->degree = static_cast<unsigned>(p.size() - 1);

    const unsigned deg = data->degree;
    data->power.assign(n, Poly(deg, 0));
    Poly cur(deg, 0);
    cur[0] = 1;
    for (unsigned j = 0; j < n; ++j) {
        data->power[j] = cur;
        // multiply by x, then reduce the overflow term with the monic Φ_N
        const std::int64_t top = cur[deg - 1];
        for (unsigned k = deg - 1; k > 0; --k) cur[k] = cur[k - 1];
        cur[0] = 0;
        if (top != 0) {
            for (unsigned k = 0; k < deg; ++k) cur[k] -= top * p[k];
        }
    }
    return data;
}

const std::vector<std::int64_t>& power_of(const Cyclotomic& cy, long exponent) {
    const long n = static_cast<long>(cy.conductor);
    long e = exponent % n;
    if (e < 0) e += n;
    return cy.power[static_cast<std::size_t>(e)];
}

void add_scaled(std::vector<Rational>& acc, const Rational& c, const std::vector<std::int64_t>& basis) {
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k] == 0) continue;
        if (basis[k] == 1) {
            acc[k] += c;
        } else if (basis[k] == -1) {
            acc[k] -= c;
        } else {
            acc[k] += c * Rational(static_cast<long>(basis[k]));
        }
    }
}

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_mpz(const mpz_class& z) {
    std::size_t h = static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 1);
    const std::size_t limbs = mpz_size(z.get_mpz_t());
    for (std::size_t i = 0; i < limbs; ++i) h = mix(h, mpz_getlimbn(z.get_mpz_t(), i));
    return h;
}

std::string rational_string(const Rational& q) {
    return q.get_str();
}

}  // namespace

unsigned normalize_conductor(unsigned conductor) {
    if (conductor == 0) throw std::invalid_argument("conductor must be positive");
    if (conductor % 4 == 2) conductor /= 2;
    return conductor;
}

unsigned conductor_lcm(unsigned a, unsigned b) {
    return normalize_conductor(std::lcm(normalize_conductor(a), normalize_conductor(b)));
}

const Cyclotomic& cyclotomic(unsigned conductor) {
    static std::mutex mutex;
    static std::map<unsigned, std::unique_ptr<Cyclotomic>> cache;
    {
        std::lock_guard lock(mutex);
        auto it = cache.find(conductor);
        if (it != cache.end()) return *it->second;
    }
    // Built outside the lock: construction recurses into divisors.
    auto built = build_cyclotomic(conductor);
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.try_emplace(conductor, std::move(built));
    return *it->second;
}

// ---------------------------------------------------------------------------
// FieldScalar

FieldScalar::FieldScalar() : conductor_(1), coeffs_(1) {}

FieldScalar::FieldScalar(long value) : conductor_(1), coeffs_{Rational(value)} {}

FieldScalar::FieldScalar(Rational value) : conductor_(1), coeffs_{std::move(value)} {
    coeffs_[0].canonicalize();
}

FieldScalar::FieldScalar(unsigned conductor, std::vector<Rational> coeffs)
    : conductor_(conductor), coeffs_(std::move(coeffs)) {}

FieldScalar FieldScalar::root_of_unity(unsigned conductor, long power) {
    if (conductor == 0) throw std::invalid_argument("conductor must be positive");
    if (conductor % 4 == 2) {
        // ζ_{2M} = -ζ_M^{(M+1)/2} for odd M
        const long m = static_cast<long>(conductor / 2);
        FieldScalar base = root_of_unity(static_cast<unsigned>(m), power * ((m + 1) / 2));
        return (power % 2 == 0) ? base : -base;
    }
    const Cyclotomic& cy = cyclotomic(conductor);
    std::vector<Rational> c(cy.degree);
    add_scaled(c, Rational(1), power_of(cy, power));
    return FieldScalar(conductor, std::move(c));
}

bool FieldScalar::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return sgn(q) == 0; });
}

bool FieldScalar::is_rational() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Rational& q) { return sgn(q) == 0; });
}

bool FieldScalar::is_one() const { return is_rational() && coeffs_[0] == 1; }

FieldScalar FieldScalar::lifted(unsigned target) const {
    target = normalize_conductor(target);
    if (target == conductor_) return *this;
    if (target % conductor_ != 0) {
        throw std::invalid_argument("cannot lift Q(zeta_" + std::to_string(conductor_) + ") into Q(zeta_" +
                                    std::to_string(target) + ")");
    }
    const Cyclotomic& cy = cyclotomic(target);
    std::vector<Rational> out(cy.degree);
    const long step = static_cast<long>(target / conductor_);
    // ζ_{N} = ζ_{M}^{M/N} when N is the normal form of an odd-doubled conductor as well
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (sgn(coeffs_[k]) == 0) continue;
        add_scaled(out, coeffs_[k], power_of(cy, static_cast<long>(k) * step));
    }
    return FieldScalar(target, std::move(out));
}

namespace {

// Coordinates of Q(zeta_d) inside Q(zeta_N): the images of zeta_d^j, plus a left inverse
// built from phi(d) independent rows.
struct Descent {
    std::vector<Poly> columns;
    std::vector<std::size_t> rows;
    std::vector<std::vector<Rational>> inverse;
};

std::unique_ptr<Descent> build_descent(unsigned big, unsigned small) {
    auto out = std::make_unique<Descent>();
    const Cyclotomic& cy = cyclotomic(big);
    const unsigned deg = cyclotomic(small).degree;
    const long step = static_cast<long>(big / small);
    for (unsigned j = 0; j < deg; ++j) out->columns.push_back(power_of(cy, static_cast<long>(j) * step));

    // Row-reduce [L^T | I] style: pick independent rows of L greedily, then invert that block.
    std::vector<std::vector<Rational>> basis;  // echelon copies of the chosen rows
    std::vector<std::size_t> lead;
    for (std::size_t r = 0; r < cy.degree && out->rows.size() < deg; ++r) {
        std::vector<Rational> row(deg);
        for (unsigned j = 0; j < deg; ++j) row[j] = Rational(static_cast<long>(out->columns[j][r]));
        for (std::size_t b = 0; b < basis.size(); ++b) {
            if (sgn(row[lead[b]]) == 0) continue;
            const Rational f = row[lead[b]] / basis[b][lead[b]];
            for (unsigned j = 0; j < deg; ++j) row[j] -= f * basis[b][j];
        }
        auto nz = std::find_if(row.begin(), row.end(), [](const Rational& q) { return sgn(q) != 0; });
        if (nz == row.end()) continue;
        lead.push_back(static_cast<std::size_t>(nz - row.begin()));
        basis.push_back(std::move(row));
        out->rows.push_back(r);
    }
    // invert the deg x deg block of chosen rows by Gauss-Jordan
    std::vector<std::vector<Rational>> a(deg, std::vector<Rational>(2 * deg));
    for (unsigned i = 0; i < deg; ++i) {
        for (unsigned j = 0; j < deg; ++j) a[i][j] = Rational(static_cast<long>(out->columns[j][out->rows[i]]));
        a[i][deg + i] = 1;
    }
    for (unsigned c = 0; c < deg; ++c) {
        unsigned p = c;
        while (sgn(a[p][c]) == 0) ++p;
        std::swap(a[p], a[c]);
        const Rational inv = Rational(1) / a[c][c];
        for (auto& x : a[c]) x *= inv;
        for (unsigned r = 0; r < deg; ++r) {
            if (r == c || sgn(a[r][c]) == 0) continue;
            const Rational f = a[r][c];
            for (unsigned k = 0; k < 2 * deg; ++k) a[r][k] -= f * a[c][k];
        }
    }
    out->inverse.assign(deg, std::vector<Rational>(deg));
    for (unsigned i = 0; i < deg; ++i)
        for (unsigned j = 0; j < deg; ++j) out->inverse[i][j] = a[i][deg + j];
    return out;
}

const Descent& descent(unsigned big, unsigned small) {
    static std::mutex mutex;
    static std::map<std::pair<unsigned, unsigned>, std::unique_ptr<Descent>> cache;
    const auto key = std::make_pair(big, small);
    {
        std::lock_guard lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto built = build_descent(big, small);
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.try_emplace(key, std::move(built));
    return *it->second;
}

}  // namespace

FieldScalar FieldScalar::reduced() const {
    if (conductor_ == 1) return *this;
    if (is_rational()) return FieldScalar(coeffs_[0]);
    for (unsigned d = 3; d < conductor_; ++d) {
        if (conductor_ % d != 0 || normalize_conductor(d) != d) continue;
        const Descent& ds = descent(conductor_, d);
        const std::size_t deg = ds.columns.size();
        std::vector<Rational> y(deg);
        for (std::size_t i = 0; i < deg; ++i)
            for (std::size_t j = 0; j < deg; ++j) y[i] += ds.inverse[i][j] * coeffs_[ds.rows[j]];
        std::vector<Rational> back(coeffs_.size());
        for (std::size_t j = 0; j < deg; ++j) {
            if (sgn(y[j]) != 0) add_scaled(back, y[j], ds.columns[j]);
        }
        if (back == coeffs_) return FieldScalar(d, std::move(y));
    }
    return *this;
}

void FieldScalar::align(FieldScalar& other) {
    if (conductor_ == other.conductor_) return;
    const unsigned target = conductor_lcm(conductor_, other.conductor_);
    if (conductor_ != target) *this = lifted(target);
    if (other.conductor_ != target) other = other.lifted(target);
}

FieldScalar FieldScalar::conj() const {
    if (conductor_ == 1) return *this;
    const Cyclotomic& cy = cyclotomic(conductor_);
    std::vector<Rational> out(cy.degree);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (sgn(coeffs_[k]) == 0) continue;
        add_scaled(out, coeffs_[k], power_of(cy, -static_cast<long>(k)));
    }
    return FieldScalar(conductor_, std::move(out));
}

FieldScalar FieldScalar::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero in cyclotomic field");
    if (is_rational()) return FieldScalar(Rational(1) / coeffs_[0]);

    // Solve (multiplication-by-this) * x = e_0 by Gauss-Jordan elimination.
    const Cyclotomic& cy = cyclotomic(conductor_);
    const std::size_t d = cy.degree;
    std::vector<std::vector<Rational>> a(d, std::vector<Rational>(d + 1));
    for (std::size_t j = 0; j < d; ++j) {
        FieldScalar col = *this * root_of_unity(conductor_, static_cast<long>(j));
        for (std::size_t r = 0; r < d; ++r) a[r][j] = col.coeffs_[r];
    }
    a[0][d] = 1;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        while (pivot < d && sgn(a[pivot][col]) == 0) ++pivot;
        if (pivot == d) throw std::domain_error("singular multiplication matrix");
        std::swap(a[pivot], a[col]);
        const Rational inv = Rational(1) / a[col][col];
        for (std::size_t k = col; k <= d; ++k) a[col][k] *= inv;
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col || sgn(a[r][col]) == 0) continue;
            const Rational f = a[r][col];
            for (std::size_t k = col; k <= d; ++k) a[r][k] -= f * a[col][k];
        }
    }
    std::vector<Rational> out(d);
    for (std::size_t r = 0; r < d; ++r) out[r] = a[r][d];
    return FieldScalar(conductor_, std::move(out));
}

FieldScalar& FieldScalar::operator+=(const FieldScalar& rhs) {
    if (conductor_ == rhs.conductor_) {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
        return *this;
    }
    FieldScalar other = rhs;
    align(other);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    return *this;
}

FieldScalar& FieldScalar::operator-=(const FieldScalar& rhs) { return *this += -rhs; }

FieldScalar& FieldScalar::operator*=(const FieldScalar& rhs) {
    if (rhs.conductor_ == 1) {
        for (auto& c : coeffs_) c *= rhs.coeffs_[0];
        return *this;
    }
    if (conductor_ == 1) {
        const Rational s = coeffs_[0];
        *this = rhs;
        for (auto& c : coeffs_) c *= s;
        return *this;
    }
    FieldScalar other = rhs;
    align(other);
    const Cyclotomic& cy = cyclotomic(conductor_);
    const std::size_t d = cy.degree;
    std::vector<Rational> prod(2 * d - 1);
    for (std::size_t i = 0; i < d; ++i) {
        if (sgn(coeffs_[i]) == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            if (sgn(other.coeffs_[j]) == 0) continue;
            prod[i + j] += coeffs_[i] * other.coeffs_[j];
        }
    }
    std::vector<Rational> out(d);
    for (std::size_t e = 0; e < prod.size(); ++e) {
        if (sgn(prod[e]) == 0) continue;
        if (e < d) {
            out[e] += prod[e];
        } else {
            add_scaled(out, prod[e], power_of(cy, static_cast<long>(e)));
        }
    }
    coeffs_ = std::move(out);
    return *this;
}

FieldScalar& FieldScalar::operator/=(const FieldScalar& rhs) { return *this *= rhs.inverse(); }

FieldScalar FieldScalar::operator-() const {
    FieldScalar out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
}

bool operator==(const FieldScalar& a, const FieldScalar& b) {
    if (a.conductor_ == b.conductor_) return a.coeffs_ == b.coeffs_;
    FieldScalar x = a;
    FieldScalar y = b;
    x.align(y);
    return x.coeffs_ == y.coeffs_;
}

std::strong_ordering operator<=>(const FieldScalar& a, const FieldScalar& b) {
    if (auto c = a.conductor_ <=> b.conductor_; c != 0) return c;
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) {
        const int c = cmp(a.coeffs_[k], b.coeffs_[k]);
        if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

std::complex<double> FieldScalar::to_complex() const {
    std::complex<double> z = 0;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(conductor_);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (sgn(coeffs_[k]) == 0) continue;
        z += coeffs_[k].get_d() * std::polar(1.0, step * static_cast<double>(k));
    }
    return z;
}

std::size_t FieldScalar::hash() const {
    if (conductor_ != 1 && !is_rational()) {
        const FieldScalar r = reduced();
        if (r.conductor_ != conductor_) return r.hash();
    } else if (conductor_ != 1) {
        return FieldScalar(coeffs_[0]).hash();
    }
    std::size_t h = conductor_;
    for (const auto& c : coeffs_) {
        h = mix(h, hash_mpz(c.get_num()));
        h = mix(h, hash_mpz(c.get_den()));
    }
    return h;
}

// ---------------------------------------------------------------------------
// Expression parsing

namespace {

FieldScalar sqrt_of(long k) {
    if (k < 0) throw ExpressionError("sqrt of a negative integer is not supported");
    if (k == 0) return FieldScalar(0L);
    long square = 1;
    long rest = k;
    for (long p = 2; p * p <= rest; ++p) {
        while (rest % (p * p) == 0) {
            rest /= p * p;
            square *= p;
        }
    }
    FieldScalar out(square);
    for (long p : {2L, 3L, 5L}) {
        if (rest % p != 0) continue;
        rest /= p;
        switch (p) {
        case 2:  // ζ_8 + ζ_8^{-1}
            out *= FieldScalar::root_of_unity(8, 1) + FieldScalar::root_of_unity(8, 7);
            break;
        case 3:  // ζ_12 + ζ_12^{-1}
            out *= FieldScalar::root_of_unity(12, 1) + FieldScalar::root_of_unity(12, 11);
            break;
        default:  // 1 + 2(ζ_5 + ζ_5^4)
            out *= FieldScalar(1L) +
                   FieldScalar(2L) * (FieldScalar::root_of_unity(5, 1) + FieldScalar::root_of_unity(5, 4));
            break;
        }
    }
    if (rest != 1) throw ExpressionError("unsupported radical sqrt(" + std::to_string(k) + ")");
    return out;
}

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    FieldScalar parse() {
        FieldScalar v = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ExpressionError("malformed expression \"" + std::string(text_) + "\" at " + std::to_string(pos_) +
                              ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    FieldScalar expr() {
        FieldScalar v = term();
        for (;;) {
            if (accept('+')) {
                v += term();
            } else if (accept('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    FieldScalar term() {
        FieldScalar v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                FieldScalar d = unary();
                if (d.is_zero()) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    FieldScalar unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return primary();
    }

    long integer() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an integer");
        if (pos_ - start > 17) fail("integer literal too long");
        return std::stol(std::string(text_.substr(start, pos_ - start)));
    }

    FieldScalar primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return FieldScalar(integer());
        if (c == '(') {
            ++pos_;
            FieldScalar v = expr();
            if (!accept(')')) fail("expected ')'");
            return v;
        }
        if (c == 'i') {
            ++pos_;
            return FieldScalar::root_of_unity(4, 1);
        }
        if (c == 'w') {
            ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '2') {
                ++pos_;
                return FieldScalar::root_of_unity(3, 2);
            }
            return FieldScalar::root_of_unity(3, 1);
        }
        if (text_.substr(pos_, 4) == "sqrt") {
            pos_ += 4;
            if (!accept('(')) fail("expected '(' after sqrt");
            const long k = integer();
            if (!accept(')')) fail("expected ')'");
            return sqrt_of(k);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// Surface rendering

struct Monomial {
    std::string text;
    FieldScalar value;
    FieldScalar inverse;
};

const std::vector<Monomial>& monomials() {
    static const std::vector<Monomial> table = [] {
        std::vector<Monomial> out;
        for (const char* t : {"i", "w", "w2", "sqrt(2)", "sqrt(3)", "sqrt(5)", "i*w", "i*w2", "i*sqrt(2)",
                              "i*sqrt(3)", "i*sqrt(5)", "w*sqrt(2)", "w2*sqrt(2)", "sqrt(6)", "sqrt(10)",
                              "sqrt(15)", "sqrt(30)"}) {
            FieldScalar v = FieldScalar::parse(t);
            out.push_back({t, v, v.inverse()});
        }
        return out;
    }();
    return table;
}

// Q-basis of Q(i, w, sqrt(2), sqrt(5)) used when no single monomial fits.
const std::vector<Monomial>& field_basis() {
    static const std::vector<Monomial> table = [] {
        std::vector<Monomial> out;
        for (const char* a : {"", "sqrt(2)", "sqrt(5)", "sqrt(10)"}) {
            for (const char* b : {"", "i"}) {
                for (const char* c : {"", "w"}) {
                    std::string t;
                    for (const char* part : {b, c, a}) {
                        if (*part == 0) continue;
                        if (!t.empty()) t += "*";
                        t += part;
                    }
                    FieldScalar v = t.empty() ? FieldScalar(1L) : FieldScalar::parse(t);
                    out.push_back({t, v, v});
                }
            }
        }
        return out;
    }();
    return table;
}

std::string render_term(const Rational& q, const std::string& monomial) {
    if (monomial.empty()) return rational_string(q);
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    std::string out;
    if (num == 1) {
        out = monomial;
    } else if (num == -1) {
        out = "-" + monomial;
    } else {
        out = num.get_str() + "*" + monomial;
    }
    if (den != 1) out += "/" + den.get_str();
    return out;
}

std::string render_sum(const std::vector<std::pair<Rational, std::string>>& terms) {
    std::string out;
    for (const auto& [q, m] : terms) {
        std::string t = render_term(q, m);
        if (!out.empty() && t.front() != '-') out += "+";
        out += t;
    }
    return out.empty() ? "0" : out;
}

}  // namespace

FieldScalar FieldScalar::parse(std::string_view text) { return ExpressionParser(text).parse(); }

std::string FieldScalar::to_string() const {
    if (is_rational()) return rational_string(coeffs_[0]);

    std::string best;
    for (const auto& m : monomials()) {
        FieldScalar q = *this * m.inverse;
        if (!q.is_rational()) continue;
        std::string s = render_term(q.coeffs_[0], m.text);
        if (best.empty() || s.size() < best.size()) best = s;
    }
    if (!best.empty()) return best;

    // Solve for rational coordinates over the 16-element basis.
    const auto& basis = field_basis();
    const unsigned target = conductor_lcm(conductor_, 120);
    const Cyclotomic& cy = cyclotomic(target);
    const std::size_t rows = cy.degree;
    const std::size_t cols = basis.size();
    std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols + 1));
    for (std::size_t j = 0; j < cols; ++j) {
        FieldScalar b = basis[j].value.lifted(target);
        for (std::size_t r = 0; r < rows; ++r) a[r][j] = b.coeffs_[r];
    }
    FieldScalar self = lifted(target);
    for (std::size_t r = 0; r < rows; ++r) a[r][cols] = self.coeffs_[r];

    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t p = row;
        while (p < rows && sgn(a[p][col]) == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[row]);
        const Rational inv = Rational(1) / a[row][col];
        for (std::size_t k = col; k <= cols; ++k) a[row][k] *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || sgn(a[r][col]) == 0) continue;
            const Rational f = a[r][col];
            for (std::size_t k = col; k <= cols; ++k) a[r][k] -= f * a[row][k];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r = row; r < rows; ++r) {
        if (sgn(a[r][cols]) != 0) {
            throw std::domain_error("element of Q(zeta_" + std::to_string(conductor_) +
                                    ") has no surface form in the component grammar");
        }
    }
    std::vector<std::pair<Rational, std::string>> terms;
    for (std::size_t r = 0; r < pivot_col.size(); ++r) {
        if (sgn(a[r][cols]) == 0) continue;
        terms.emplace_back(a[r][cols], basis[pivot_col[r]].text);
    }
    return render_sum(terms);
}

// ---------------------------------------------------------------------------
// Vectors and rays

Vector common_conductor(std::span<const FieldScalar> v) {
    unsigned n = 1;
    for (const auto& x : v) n = conductor_lcm(n, x.conductor());
    Vector out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(x.lifted(n));
    return out;
}

FieldScalar inner_product(std::span<const FieldScalar> u, std::span<const FieldScalar> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("inner product of vectors with dimensions " + std::to_string(u.size()) +
                                    " and " + std::to_string(v.size()));
    }
    FieldScalar sum;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k].is_zero() || v[k].is_zero()) continue;
        sum += u[k].conj() * v[k];
    }
    return sum;
}

bool are_orthogonal(std::span<const FieldScalar> u, std::span<const FieldScalar> v) {
    return inner_product(u, v).is_zero();
}

Ray::Ray(std::span<const FieldScalar> raw) {
    comps_ = common_conductor(raw);
    auto first = std::find_if(comps_.begin(), comps_.end(), [](const FieldScalar& x) { return !x.is_zero(); });
    if (first == comps_.end()) throw std::invalid_argument("the zero vector has no ray");
    if (!first->is_one()) {
        const FieldScalar inv = first->inverse();
        for (auto it = first; it != comps_.end(); ++it) {
            if (!it->is_zero()) *it *= inv;
        }
    }
    // store over the smallest field holding every entry, so equal rays have equal representations
    unsigned n = 1;
    for (auto& x : comps_) {
        x = x.reduced();
        n = conductor_lcm(n, x.conductor());
    }
    for (auto& x : comps_) {
        if (x.conductor() != n) x = x.lifted(n);
    }
}

Ray canonical_ray(std::span<const FieldScalar> raw) { return Ray(raw); }

Ray Ray::lifted(unsigned target) const {
    Ray out = *this;
    for (auto& x : out.comps_) x = x.lifted(target);
    return out;
}

std::string Ray::to_string() const {
    std::string out = "{";
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        if (k) out += ",";
        out += comps_[k].to_string();
    }
    return out + "}";
}

std::size_t Ray::hash() const {
    std::size_t h = comps_.size();
    for (const auto& x : comps_) h = mix(h, x.hash());
    return h;
}

bool operator==(const Ray& a, const Ray& b) { return a.comps_ == b.comps_; }

std::strong_ordering operator<=>(const Ray& a, const Ray& b) {
    if (auto c = a.comps_.size() <=> b.comps_.size(); c != 0) return c;
    auto nonzeros = [](const Vector& v) {
        return std::count_if(v.begin(), v.end(), [](const FieldScalar& x) { return !x.is_zero(); });
    };
    if (auto c = nonzeros(a.comps_) <=> nonzeros(b.comps_); c != 0) return c;
    for (std::size_t k = 0; k < a.comps_.size(); ++k) {
        const bool za = a.comps_[k].is_zero();
        const bool zb = b.comps_[k].is_zero();
        if (za != zb) return za ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    for (std::size_t k = 0; k < a.comps_.size(); ++k) {
        if (auto c = a.comps_[k] <=> b.comps_[k]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

FieldScalar inner_product(const Ray& u, const Ray& v) { return inner_product(u.components(), v.components()); }
bool are_orthogonal(const Ray& u, const Ray& v) { return inner_product(u, v).is_zero(); }

// ---------------------------------------------------------------------------
// ComponentSet

ComponentSet::ComponentSet(std::vector<FieldScalar> values) {
    for (auto& v : values) {
        if (std::find(values_.begin(), values_.end(), v) != values_.end()) continue;
        surface_.push_back(v.to_string());
        values_.push_back(std::move(v));
    }
    if (std::none_of(values_.begin(), values_.end(), [](const FieldScalar& x) { return !x.is_zero(); })) {
        throw std::invalid_argument("component set needs at least one nonzero element");
    }
    for (const auto& v : values_) conductor_ = conductor_lcm(conductor_, v.conductor());
    for (auto& v : values_) v = v.lifted(conductor_);
}

ComponentSet ComponentSet::parse(std::string_view text) {
    std::vector<std::string> items;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            items.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    items.push_back(cur);

    std::vector<FieldScalar> values;
    std::vector<std::string> surface;
    for (std::string item : items) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ExpressionError("empty component in list \"" + std::string(text) + "\"");
        item = item.substr(b, e - b + 1);
        bool both = false;
        if (item.rfind("+-", 0) == 0) {
            both = true;
            item = item.substr(2);
        } else if (item.rfind("±", 0) == 0) {
            both = true;
            item = item.substr(2);
        }
        FieldScalar v = FieldScalar::parse(item);
        values.push_back(v);
        if (both) values.push_back(-v);
    }
    return ComponentSet(std::move(values));
}

std::string ComponentSet::to_string() const {
    std::string out;
    for (const auto& s : surface_) {
        if (!out.empty()) out += ",";
        out += s;
    }
    return out;
}

}  // namespace ksm
