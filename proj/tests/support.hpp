#pragma once

// Shared fixtures and brute-force oracles for the unit tests and the acceptance run.
// The oracles are deliberately naive and share no code with the library's algorithms.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ksmaster/field.hpp"
#include "ksmaster/hypergraph.hpp"
#include "ksmaster/random.hpp"

namespace fixtures {

inline const std::string kLine18_9 =
    "1234,4567,789A,ABCD,DEFG,GHI1,I29B,35CE,68FH. "
    "{1={0,0,0,1},2={0,0,1,0},3={1,1,0,0},4={1,-1,0,0},5={0,0,1,1},6={1,1,1,-1},7={1,1,-1,1},"
    "8={1,-1,1,1},9={1,0,0,-1},A={0,1,1,0},B={1,0,0,1},C={1,-1,1,-1},D={1,1,-1,-1},E={1,-1,-1,1},"
    "F={0,1,0,1},G={1,0,1,0},H={1,0,-1,0},I={0,1,0,0}}.";

inline const std::string kLine6_3 = "1234,3456,5612.";

/// The appendix vertices 1..9, A..L with their vectors and the published expressions.
struct AppendixVertex {
    std::string label;
    std::string vector;
    std::vector<std::string> first;   // slot-1 names per term
    std::vector<std::string> second;  // slot-2 names per term
    std::vector<bool> negative;
};

inline const std::vector<AppendixVertex>& appendix() {
    static const std::vector<AppendixVertex> v = {
        {"1", "1,1,1,-1", {"H", "V"}, {"h", "v"}, {false, false}},
        {"2", "1,-1,-1,-1", {"H", "V"}, {"v", "h"}, {false, true}},
        {"3", "1,0,0,1", {"H", "V"}, {"+2", "-2"}, {false, false}},
        {"4", "0,1,-1,0", {"H", "V"}, {"-2", "+2"}, {false, true}},
        {"5", "0,1,1,0", {"H", "V"}, {"-2", "+2"}, {false, false}},
        {"6", "0,0,0,1", {"V"}, {"-2"}, {false}},
        {"7", "1,0,0,0", {"H"}, {"+2"}, {false}},
        {"8", "0,1,0,0", {"H"}, {"-2"}, {false}},
        {"9", "0,0,1,-1", {"V"}, {"v"}, {false}},
        {"A", "0,0,1,1", {"V"}, {"h"}, {false}},
        {"B", "1,1,0,0", {"H"}, {"h"}, {false}},
        {"C", "1,-1,i,-i", {"R"}, {"v"}, {false}},
        {"D", "1,1,-1,-1", {"A"}, {"h"}, {true}},
        {"E", "1,1,1,1", {"D"}, {"h"}, {false}},
        {"F", "1,-1,1,-1", {"D"}, {"v"}, {false}},
        {"G", "0,1,0,-1", {"A"}, {"-2"}, {true}},
        {"H", "1,0,-1,0", {"A"}, {"+2"}, {true}},
        {"I", "0,1,0,1", {"D"}, {"-2"}, {false}},
        {"J", "1,-1,1,1", {"D", "A"}, {"+2", "-2"}, {false, false}},
        {"K", "0,0,1,0", {"V"}, {"+2"}, {false}},
        {"L", "1,-1,-i,i", {"L"}, {"v"}, {false}},
    };
    return v;
}

inline ksm::Vector parse_vector(const std::string& text) {
    ksm::Vector v;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = text.find(',', start);
        v.push_back(ksm::FieldScalar::parse(text.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return v;
}

inline ksm::Hypergraph hg(const std::string& line) { return ksm::parse_line(line).hypergraph; }

// ---- colorability oracle: scan all 2^k assignments ----

/// Edges as vertex bitmasks over compact indices in h.vertices() order.
inline std::vector<std::uint32_t> edge_masks(const ksm::Hypergraph& h) {
    std::map<ksm::VertexLabel, int> index;
    for (std::size_t i = 0; i < h.vertices().size(); ++i) index[h.vertices()[i]] = static_cast<int>(i);
    std::vector<std::uint32_t> masks;
    for (const auto& e : h.edges()) {
        std::uint32_t m = 0;
        for (auto v : e) m |= 1u << index.at(v);
        masks.push_back(m);
    }
    return masks;
}

/// True if some 0/1 assignment puts exactly one 1 in every edge. Needs k <= 20.
inline bool brute_colorable(const std::vector<std::uint32_t>& masks, std::size_t k) {
    for (std::uint32_t a = 0; a < (1u << k); ++a) {
        bool ok = true;
        for (auto m : masks) {
            if (std::popcount(m & a) != 1) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

inline bool brute_ks(const ksm::Hypergraph& h) { return !brute_colorable(edge_masks(h), h.vertex_count()); }

// ---- MUS oracle: every edge subset ----

/// All minimal KS edge subsets, as bitmasks over edge indices. Needs m <= 12 and k <= 20.
inline std::set<std::uint32_t> brute_minimal_ks_subsets(const ksm::Hypergraph& h) {
    const auto masks = edge_masks(h);
    const std::size_t m = masks.size();
    std::vector<char> ks(std::size_t{1} << m, 0);
    for (std::uint32_t s = 0; s < (1u << m); ++s) {
        std::vector<std::uint32_t> chosen;
        std::uint32_t used = 0;
        for (std::size_t e = 0; e < m; ++e) {
            if (s >> e & 1u) {
                chosen.push_back(masks[e]);
                used |= masks[e];
            }
        }
        // compact the used vertices so the scan is over k' <= k bits
        std::vector<std::uint32_t> compact;
        for (auto c : chosen) {
            std::uint32_t out = 0;
            int bit = 0;
            for (int v = 0; v < 32; ++v) {
                if (!(used >> v & 1u)) continue;
                if (c >> v & 1u) out |= 1u << bit;
                ++bit;
            }
            compact.push_back(out);
        }
        ks[s] = !brute_colorable(compact, static_cast<std::size_t>(std::popcount(used)));
    }
    std::set<std::uint32_t> out;
    for (std::uint32_t s = 0; s < (1u << m); ++s) {
        if (!ks[s]) continue;
        bool minimal = true;
        for (std::size_t e = 0; e < m && minimal; ++e) {
            if ((s >> e & 1u) && ks[s & ~(1u << e)]) minimal = false;
        }
        if (minimal) out.insert(s);
    }
    return out;
}

// ---- isomorphism oracle: exhaustive search over vertex bijections ----

inline bool brute_isomorphic(const ksm::Hypergraph& a, const ksm::Hypergraph& b) {
    if (a.dimension() != b.dimension() || a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) {
        return false;
    }
    const auto ma = edge_masks(a);
    const auto mb = edge_masks(b);
    const std::set<std::uint32_t> target(mb.begin(), mb.end());
    const std::size_t k = a.vertex_count();
    std::vector<int> image(k, -1);
    std::vector<char> taken(k, 0);
    // bijection is checked once complete; partial pruning only on fully mapped edges
    auto mapped = [&](std::uint32_t m) {
        std::uint32_t out = 0;
        for (std::size_t v = 0; v < k; ++v) {
            if (m >> v & 1u) {
                if (image[v] < 0) return std::optional<std::uint32_t>{};
                out |= 1u << image[v];
            }
        }
        return std::optional<std::uint32_t>{out};
    };
    auto search = [&](auto&& self, std::size_t v) -> bool {
        for (auto m : ma) {
            const auto img = mapped(m);
            if (img && !target.count(*img)) return false;
        }
        if (v == k) return true;
        for (std::size_t w = 0; w < k; ++w) {
            if (taken[w]) continue;
            taken[w] = 1;
            image[v] = static_cast<int>(w);
            if (self(self, v + 1)) return true;
            image[v] = -1;
            taken[w] = 0;
        }
        return false;
    };
    return search(search, 0);
}

// ---- random valid hypergraphs ----

/// Random MMP hypergraph: dimension n, up to `edges` edges over labels [0, labels).
inline ksm::Hypergraph random_hypergraph(ksm::Rng& rng, unsigned n, std::size_t edges, std::uint32_t labels) {
    std::vector<ksm::Edge> out;
    std::size_t attempts = 0;
    while (out.size() < edges && attempts++ < edges * 50) {
        std::vector<ksm::VertexLabel> pool(labels);
        for (std::uint32_t i = 0; i < labels; ++i) pool[i] = i;
        rng.shuffle(std::span(pool));
        ksm::Edge e(pool.begin(), pool.begin() + n);
        std::vector<ksm::VertexLabel> se = e;
        std::sort(se.begin(), se.end());
        bool ok = true;
        for (const auto& f : out) {
            std::vector<ksm::VertexLabel> sf = f;
            std::sort(sf.begin(), sf.end());
            std::vector<ksm::VertexLabel> common;
            std::set_intersection(se.begin(), se.end(), sf.begin(), sf.end(), std::back_inserter(common));
            if (common.size() > n - 2) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(e);
    }
    return ksm::Hypergraph(n, out);
}

}  // namespace fixtures
