#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ksm {

using Rational = mpq_class;

/// Thrown for malformed component expressions and unsupported radicals.
class ExpressionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Integer data for the N-th cyclotomic field: Φ_N and x^j mod Φ_N for j < N.
struct Cyclotomic {
    unsigned conductor = 1;
    unsigned degree = 1;                          // φ(N)
    std::vector<std::int64_t> polynomial;         // Φ_N, low degree first, monic
    std::vector<std::vector<std::int64_t>> power; // power[j] = x^j mod Φ_N, length degree
};

/// Cached, immutable after construction; safe to call concurrently.
const Cyclotomic& cyclotomic(unsigned conductor);

/// Q(ζ_N) and Q(ζ_{2N}) coincide for odd N; conductors are kept in that normal form.
unsigned normalize_conductor(unsigned conductor);
unsigned conductor_lcm(unsigned a, unsigned b);

/// Exact element of Q(ζ_N), stored over the power basis 1, ζ, ..., ζ^{φ(N)-1}.
class FieldScalar {
public:
    FieldScalar();
    FieldScalar(long value);  // NOLINT(google-explicit-constructor)
    explicit FieldScalar(Rational value);

    /// ζ_N^k.
    static FieldScalar root_of_unity(unsigned conductor, long power);
    /// Parse a component expression: integers, a/b, i, w, w2, sqrt(k), + - * / and parentheses.
    static FieldScalar parse(std::string_view text);

    unsigned conductor() const { return conductor_; }
    std::span<const Rational> coefficients() const { return coeffs_; }

    bool is_zero() const;
    bool is_one() const;
    bool is_rational() const;

    /// Same element, written over Q(ζ_M); M must be a multiple of the conductor.
    FieldScalar lifted(unsigned conductor) const;
    /// Same element over the smallest conductor whose field contains it.
    FieldScalar reduced() const;

    FieldScalar conj() const;
    FieldScalar inverse() const;

    FieldScalar& operator+=(const FieldScalar& rhs);
    FieldScalar& operator-=(const FieldScalar& rhs);
    FieldScalar& operator*=(const FieldScalar& rhs);
    FieldScalar& operator/=(const FieldScalar& rhs);

    friend FieldScalar operator+(FieldScalar a, const FieldScalar& b) { return a += b; }
    friend FieldScalar operator-(FieldScalar a, const FieldScalar& b) { return a -= b; }
    friend FieldScalar operator*(FieldScalar a, const FieldScalar& b) { return a *= b; }
    friend FieldScalar operator/(FieldScalar a, const FieldScalar& b) { return a /= b; }
    FieldScalar operator-() const;

    friend bool operator==(const FieldScalar& a, const FieldScalar& b);
    /// Total order on the representation; only meaningful between equal conductors.
    friend std::strong_ordering operator<=>(const FieldScalar& a, const FieldScalar& b);

    /// Value under the embedding ζ_N -> exp(2πi/N).
    std::complex<double> to_complex() const;
    /// Shortest known surface form that parses back to this element.
    std::string to_string() const;
    std::size_t hash() const;

private:
    FieldScalar(unsigned conductor, std::vector<Rational> coeffs);
    void align(FieldScalar& other);

    unsigned conductor_ = 1;
    std::vector<Rational> coeffs_;
};

using Vector = std::vector<FieldScalar>;

/// Σ_k conj(u_k) v_k.
FieldScalar inner_product(std::span<const FieldScalar> u, std::span<const FieldScalar> v);
bool are_orthogonal(std::span<const FieldScalar> u, std::span<const FieldScalar> v);

/// Lift every entry to the least common conductor of the vector.
Vector common_conductor(std::span<const FieldScalar> v);

/// Projective class of a nonzero vector, stored with first nonzero entry equal to 1 and every
/// entry over the smallest cyclotomic field that holds them all.
class Ray {
public:
    Ray() = default;
    explicit Ray(std::span<const FieldScalar> raw);

    std::size_t dimension() const { return comps_.size(); }
    unsigned conductor() const { return comps_.empty() ? 1u : comps_.front().conductor(); }
    const Vector& components() const { return comps_; }
    const FieldScalar& operator[](std::size_t i) const { return comps_[i]; }

    /// For arithmetic only: the result is no longer in canonical (smallest-field) form.
    Ray lifted(unsigned conductor) const;
    std::string to_string() const;  // "{a,b,c,d}"
    std::size_t hash() const;

    friend bool operator==(const Ray& a, const Ray& b);
    /// Fewer nonzero entries first, then earlier nonzero positions, then entrywise.
    friend std::strong_ordering operator<=>(const Ray& a, const Ray& b);

private:
    Vector comps_;
};

Ray canonical_ray(std::span<const FieldScalar> raw);
FieldScalar inner_product(const Ray& u, const Ray& v);
bool are_orthogonal(const Ray& u, const Ray& v);

struct RayHash {
    std::size_t operator()(const Ray& r) const { return r.hash(); }
};

/// Deduplicated list of vector components, all lifted to one conductor.
class ComponentSet {
public:
    ComponentSet() = default;
    explicit ComponentSet(std::vector<FieldScalar> values);
    /// Comma-separated expressions; "±x" and "+-x" expand to x and -x.
    static ComponentSet parse(std::string_view text);

    const std::vector<FieldScalar>& values() const { return values_; }
    const std::vector<std::string>& surface() const { return surface_; }
    unsigned conductor() const { return conductor_; }
    std::size_t size() const { return values_.size(); }
    std::string to_string() const;

private:
    std::vector<FieldScalar> values_;
    std::vector<std::string> surface_;
    unsigned conductor_ = 1;
};

}  // namespace ksm

template <>
struct std::hash<ksm::FieldScalar> {
    std::size_t operator()(const ksm::FieldScalar& x) const { return x.hash(); }
};
template <>
struct std::hash<ksm::Ray> {
    std::size_t operator()(const ksm::Ray& r) const { return r.hash(); }
};
