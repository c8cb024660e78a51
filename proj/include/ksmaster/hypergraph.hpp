#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksmaster/field.hpp"

namespace ksm {

/// Position in the 90-character label alphabet; index 90 and above take '+' prefixes.
using VertexLabel = std::uint32_t;
using Edge = std::vector<VertexLabel>;

inline constexpr std::string_view kAlphabet =
    "123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz!\"#$%&'()*-/:;<=>?@[\\]^_`{|}~";
static_assert(kAlphabet.size() == 90);

std::string render_label(VertexLabel label);
/// Index of a base character, or -1 if the character is not in the alphabet.
int alphabet_index(char c);

/// Raised by parsing and validation; carries a human-readable reason.
class HypergraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform hypergraph with edges of size n; the vertex set is the union of the edges.
class Hypergraph {
public:
    Hypergraph() = default;
    /// Validates: uniform edge size, no repeated vertex in an edge, no duplicate edges,
    /// and pairwise intersections of at most n-2 vertices.
    Hypergraph(unsigned dimension, std::vector<Edge> edges);

    /// Skips the MMP checks; for callers that build edges known to satisfy them.
    static Hypergraph unchecked(unsigned dimension, std::vector<Edge> edges);

    unsigned dimension() const { return dimension_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t vertex_count() const { return vertices_.size(); }
    /// Vertices in first-appearance order of the edge list.
    const std::vector<VertexLabel>& vertices() const { return vertices_; }
    /// "k-m".
    std::string size_class() const;

    /// Subhypergraph on the selected edges (in the given order), vertices induced.
    Hypergraph subgraph(const std::vector<std::size_t>& edge_indices) const;

    friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
        return a.dimension_ == b.dimension_ && a.edges_ == b.edges_;
    }

private:
    void index_vertices();

    unsigned dimension_ = 0;
    std::vector<Edge> edges_;
    std::vector<VertexLabel> vertices_;
};

/// Vectors attached to vertices, kept as written; compare projectively through Ray.
using Coordinatization = std::map<VertexLabel, Vector>;

struct ParsedLine {
    Hypergraph hypergraph;
    std::optional<Coordinatization> coordinatization;
    std::string comment;  // trailing "# ..." text, without the '#'
};

/// Comment lines start with "# " (or are a lone '#'); blank lines are skipped too.
bool is_comment_or_blank(std::string_view line);

ParsedLine parse_line(std::string_view text, std::optional<unsigned> expected_dimension = std::nullopt);
std::string serialize(const Hypergraph& h, const Coordinatization* c = nullptr);
inline std::string serialize(const Hypergraph& h, const Coordinatization& c) { return serialize(h, &c); }

/// Isomorphic copy under a seeded relabeling of the same label set plus edge and within-edge reordering.
Hypergraph shuffle(const Hypergraph& h, std::uint64_t seed);
/// Same relabeling as shuffle(h, seed), carried through to the coordinatization.
std::pair<Hypergraph, Coordinatization> shuffle(const Hypergraph& h, const Coordinatization& c, std::uint64_t seed);

}  // namespace ksm
