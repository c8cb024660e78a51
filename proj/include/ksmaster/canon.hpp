#pragma once

#include <string>
#include <unordered_map>
#include <utility>

#include "ksmaster/hypergraph.hpp"

namespace ksm {

struct CanonicalLabeling {
    std::string form;                                    // serialized canonical line
    Hypergraph hypergraph;                               // relabeled, edges sorted
    std::unordered_map<VertexLabel, VertexLabel> relabel;  // original label -> canonical label
    std::size_t leaves = 0;                              // search-tree leaves visited
    std::size_t automorphisms = 0;                       // automorphisms discovered on the way
};

/// Canonical relabeling by individualization-refinement on the vertex/edge incidence graph,
/// keeping the lexicographically least relabeled edge list.
CanonicalLabeling canonical_labeling(const Hypergraph& h);

/// Serialized MMP line of the canonical relabeling; equal exactly for isomorphic hypergraphs.
std::string canonical_form(const Hypergraph& h);

/// Canonical relabeling that also carries the coordinatization along.
std::pair<Hypergraph, Coordinatization> canonical_relabel(const Hypergraph& h, const Coordinatization& c);

/// Cheap invariants (k, m, degree sequence, edge-intersection profile). A false answer
/// proves non-isomorphism; true means "maybe".
bool invariants_match(const Hypergraph& a, const Hypergraph& b);

bool are_isomorphic(const Hypergraph& a, const Hypergraph& b);

}  // namespace ksm
