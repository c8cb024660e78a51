#include "ksmaster/blueprint.hpp"

#include <algorithm>
#include <stdexcept>

namespace ksm {

namespace {

std::vector<NamedState> build_states(int slot) {
    const FieldScalar i = FieldScalar::root_of_unity(4, 1);
    const FieldScalar one(1);
    const FieldScalar zero(0);
    if (slot == 1) {
        return {{1, "H", {one, zero}, 1},  {1, "V", {zero, one}, 1}, {1, "D", {one, one}, 2},
                {1, "A", {-one, one}, 2}, {1, "R", {one, i}, 2},    {1, "L", {one, -i}, 2}};
    }
    return {{2, "+2", {one, zero}, 1}, {2, "-2", {zero, one}, 1}, {2, "h", {one, one}, 2}, {2, "v", {one, -one}, 2}};
}

// Slot-1 bases in preference order.
constexpr std::pair<const char*, const char*> kBases[] = {{"H", "V"}, {"D", "A"}, {"R", "L"}};

bool is_zero(std::span<const FieldScalar> x) {
    return std::all_of(x.begin(), x.end(), [](const FieldScalar& s) { return s.is_zero(); });
}

// x = scale * s for a named state s; returns that state and the scale.
std::optional<std::pair<const NamedState*, FieldScalar>> match(const Vector& x, int slot) {
    if (is_zero(x)) return std::nullopt;
    for (const NamedState& s : named_states(slot)) {
        if (!(x[0] * s.vector[1] - x[1] * s.vector[0]).is_zero()) continue;
        const std::size_t k = s.vector[0].is_zero() ? 1 : 0;
        return std::make_pair(&s, x[k] / s.vector[k]);
    }
    return std::nullopt;
}

bool negative_real(const FieldScalar& x) {
    if (x.is_zero()) return false;
    const auto z = x.to_complex();
    return std::abs(z.imag()) < 1e-9 * std::abs(z) && z.real() < 0;
}

}  // namespace

const std::vector<NamedState>& named_states(int slot) {
    static const std::vector<NamedState> first = build_states(1);
    static const std::vector<NamedState> second = build_states(2);
    if (slot == 1) return first;
    if (slot == 2) return second;
    throw std::invalid_argument("slot must be 1 or 2");
}

const NamedState& named_state(int slot, const std::string& name) {
    for (const NamedState& s : named_states(slot)) {
        if (s.name == name) return s;
    }
    throw std::invalid_argument("unknown state '" + name + "' in slot " + std::to_string(slot));
}

bool BlueprintExpr::circular() const {
    return std::any_of(terms.begin(), terms.end(), [](const BlueprintTerm& t) { return t.first == "R" || t.first == "L"; });
}

std::string BlueprintExpr::to_string() const {
    auto ket = [](const BlueprintTerm& t) { return "|" + t.first + ">|" + t.second + ">"; };
    if (terms.size() == 1) return (terms[0].negative ? "-" : "") + ket(terms[0]);
    std::string out = "(";
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k == 0) {
            out += terms[k].negative ? "-" : "";
        } else {
            out += terms[k].negative ? " - " : " + ";
        }
        out += ket(terms[k]);
    }
    return out + ")/sqrt(2)";
}

std::optional<BlueprintExpr> decompose(std::span<const FieldScalar> raw) {
    if (raw.size() != 4) throw std::invalid_argument("blueprints need 4-dimensional vectors");
    const Vector v = common_conductor(raw);
    if (is_zero(v)) throw std::invalid_argument("zero vector has no blueprint");
    // v = sum M[j][k] e_j (x) e_k with slot-1 index j
    const FieldScalar m00 = v[0], m01 = v[1], m10 = v[2], m11 = v[3];

    if ((m00 * m11 - m01 * m10).is_zero()) {
        const std::size_t j0 = is_zero(std::span(v).subspan(0, 2)) ? 1 : 0;
        const Vector b{v[2 * j0], v[2 * j0 + 1]};
        const std::size_t k0 = b[0].is_zero() ? 1 : 0;
        const Vector a{v[k0] / b[k0], v[2 + k0] / b[k0]};
        auto s1 = match(a, 1);
        auto s2 = match(b, 2);
        if (!s1 || !s2) return std::nullopt;
        // v = (a (x) b) = scale1 * scale2 * (s1 (x) s2)
        return BlueprintExpr{{{negative_real(s1->second * s2->second), s1->first->name, s2->first->name}}};
    }

    for (const auto& [plus_name, minus_name] : kBases) {
        const NamedState& plus = named_state(1, plus_name);
        const NamedState& minus = named_state(1, minus_name);
        // slot-2 parts: x = (plus^dagger M) / |plus|^2, likewise y
        auto part = [&](const NamedState& b) {
            const FieldScalar c0 = b.vector[0].conj();
            const FieldScalar c1 = b.vector[1].conj();
            const FieldScalar inv(Rational(1, b.norm2));
            return Vector{(c0 * m00 + c1 * m10) * inv, (c0 * m01 + c1 * m11) * inv};
        };
        auto x = match(part(plus), 2);
        auto y = match(part(minus), 2);
        if (!x || !y) continue;
        // normalized weights: alpha*sqrt(n+ * ns) and beta*sqrt(n- * nt) must agree up to sign
        const FieldScalar ratio = y->second / x->second;
        const Rational weight(plus.norm2 * x->first->norm2, minus.norm2 * y->first->norm2);
        if (!(ratio * ratio - FieldScalar(weight)).is_zero()) continue;
        return BlueprintExpr{{{false, plus.name, x->first->name}, {negative_real(ratio), minus.name, y->first->name}}};
    }
    return std::nullopt;
}

std::optional<BlueprintExpr> decompose(const Ray& v) { return decompose(std::span(v.components())); }

Ray evaluate(const BlueprintExpr& expr) {
    if (expr.terms.empty() || expr.terms.size() > 2) throw std::invalid_argument("blueprint needs one or two terms");
    const FieldScalar root2 = FieldScalar::parse("sqrt(2)");
    Vector out(4, FieldScalar(0));
    for (const BlueprintTerm& t : expr.terms) {
        const NamedState& a = named_state(1, t.first);
        const NamedState& b = named_state(2, t.second);
        // normalized product: weight 1/sqrt(norm2(a) * norm2(b))
        FieldScalar w(1);
        const int n = a.norm2 * b.norm2;
        if (n == 2) w = root2.inverse();
        if (n == 4) w = FieldScalar(Rational(1, 2));
        if (t.negative) w = -w;
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) out[2 * j + k] += w * a.vector[j] * b.vector[k];
        }
    }
    return Ray(out);
}

}  // namespace ksm
