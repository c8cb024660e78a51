#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ksmaster/hypergraph.hpp"

namespace ksm {

/// Counts for one hypergraph.
struct HypergraphStats {
    std::string size_class;                        // "k-m"
    std::map<std::size_t, std::size_t> degrees;    // vertex degree -> number of vertices
    std::map<std::size_t, std::size_t> overlaps;   // |e ∩ f| -> number of edge pairs
    std::size_t delta_pairs = 0;                   // edge pairs sharing two or more vertices
};

HypergraphStats stats(const Hypergraph& h);

/// Totals over a stream of hypergraphs.
struct RunStats {
    std::size_t items = 0;
    std::size_t rejected = 0;
    std::map<std::string, std::size_t> classes;
    std::map<std::size_t, std::size_t> degrees;
    std::map<std::size_t, std::size_t> overlaps;
    std::size_t delta_pairs = 0;
    std::uint64_t oracle_calls = 0;
    double seconds = 0;

    void add(const HypergraphStats& s);
};

}  // namespace ksm
