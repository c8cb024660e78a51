#include "ksmaster/stats.hpp"

#include <algorithm>
#include <unordered_map>

namespace ksm {

HypergraphStats stats(const Hypergraph& h) {
    HypergraphStats out;
    out.size_class = h.size_class();
    std::unordered_map<VertexLabel, std::size_t> degree;
    for (const Edge& e : h.edges()) {
        for (VertexLabel v : e) ++degree[v];
    }
    for (const auto& [v, d] : degree) ++out.degrees[d];

    std::vector<Edge> sorted = h.edges();
    for (Edge& e : sorted) std::sort(e.begin(), e.end());
    for (std::size_t a = 0; a < sorted.size(); ++a) {
        for (std::size_t b = a + 1; b < sorted.size(); ++b) {
            std::size_t shared = 0;
            auto i = sorted[a].begin();
            auto j = sorted[b].begin();
            while (i != sorted[a].end() && j != sorted[b].end()) {
                if (*i < *j) {
                    ++i;
                } else if (*j < *i) {
                    ++j;
                } else {
                    ++shared;
                    ++i;
                    ++j;
                }
            }
            ++out.overlaps[shared];
            if (shared >= 2) ++out.delta_pairs;
        }
    }
    return out;
}

void RunStats::add(const HypergraphStats& s) {
    ++items;
    ++classes[s.size_class];
    for (const auto& [d, n] : s.degrees) degrees[d] += n;
    for (const auto& [d, n] : s.overlaps) overlaps[d] += n;
    delta_pairs += s.delta_pairs;
}

}  // namespace ksm
