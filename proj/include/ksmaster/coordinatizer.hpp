#pragma once

#include <cstdint>
#include <optional>

#include "ksmaster/field.hpp"
#include "ksmaster/hypergraph.hpp"

namespace ksm {

/// Rays within each edge are mutually orthogonal and all rays are pairwise distinct.
/// Throws if a vertex has no vector or a vector has the wrong dimension.
bool verify_coordinatization(const Hypergraph& h, const Coordinatization& c);

struct CoordinatizeOptions {
    std::optional<double> max_seconds;
    std::optional<std::uint64_t> max_nodes;
};

struct CoordinatizationSearch {
    std::optional<Coordinatization> coordinatization;
    bool complete = true;  // false if a budget stopped the search before an answer
    std::uint64_t nodes = 0;
    std::size_t candidate_rays = 0;
};

/// Backtracking over the rays buildable from the components that lie in at least one basis.
/// Picks the vertex with the fewest remaining candidates (ties: most placed co-edge neighbours,
/// then highest degree, then first appearance), candidates in ray order.
CoordinatizationSearch search_coordinatization(const Hypergraph& h, const ComponentSet& components,
                                               const CoordinatizeOptions& options = {});

std::optional<Coordinatization> find_coordinatization(const Hypergraph& h, const ComponentSet& components);

}  // namespace ksm
