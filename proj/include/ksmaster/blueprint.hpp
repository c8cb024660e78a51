#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksmaster/field.hpp"

namespace ksm {

/// Two-qubit named states: polarization in slot 1, orbital angular momentum in slot 2.
/// Vectors are kept unnormalized (e.g. D = (1,1)); `norm2` is the squared length.
struct NamedState {
    int slot;
    std::string name;  // H V D A R L, or +2 -2 h v
    Vector vector;
    int norm2;
};

const std::vector<NamedState>& named_states(int slot);
const NamedState& named_state(int slot, const std::string& name);

struct BlueprintTerm {
    bool negative = false;
    std::string first;   // slot-1 name
    std::string second;  // slot-2 name
};

/// One product term, or two terms with overall weight 1/sqrt(2).
struct BlueprintExpr {
    std::vector<BlueprintTerm> terms;

    /// Needs the circular polarization states R or L.
    bool circular() const;
    /// Dirac text, e.g. "(|H>|h> + |V>|v>)/sqrt(2)" or "-|A>|h>".
    std::string to_string() const;
};

/// Named decomposition of a 4D vector, or none if it has no form over the named states.
/// Rank-1 vectors become one product term; otherwise the slot-1 bases {H,V}, {D,A}, {R,L} are
/// tried in this order and the first one whose two slot-2 parts are named states of equal
/// weight wins. Signs follow the vector as given.
std::optional<BlueprintExpr> decompose(std::span<const FieldScalar> v);
std::optional<BlueprintExpr> decompose(const Ray& v);

/// The vector an expression denotes, as a ray.
Ray evaluate(const BlueprintExpr& expr);

}  // namespace ksm
