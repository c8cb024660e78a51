#include <array>
#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_map>

#include "ksmaster/hypergraph.hpp"
#include "ksmaster/random.hpp"

namespace ksm {

std::string render_label(VertexLabel label) {
    std::string out(label / kAlphabet.size(), '+');
    out += kAlphabet[label % kAlphabet.size()];
    return out;
}

int alphabet_index(char c) {
    static const auto table = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        for (std::size_t i = 0; i < kAlphabet.size(); ++i) t[static_cast<unsigned char>(kAlphabet[i])] = int(i);
        return t;
    }();
    return table[static_cast<unsigned char>(c)];
}

// ---------------------------------------------------------------------------
// Hypergraph

Hypergraph::Hypergraph(unsigned dimension, std::vector<Edge> edges) : dimension_(dimension), edges_(std::move(edges)) {
    if (dimension_ < 3) throw HypergraphError("dimension must be at least 3, got " + std::to_string(dimension_));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        if (edge.size() != dimension_) {
            throw HypergraphError("edge " + std::to_string(e + 1) + " has " + std::to_string(edge.size()) +
                                  " vertices, expected " + std::to_string(dimension_));
        }
        Edge sorted = edge;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw HypergraphError("edge " + std::to_string(e + 1) + " repeats a vertex");
        }
    }
    index_vertices();

    // Pairwise intersections through a vertex -> edges index.
    std::unordered_map<VertexLabel, std::vector<std::size_t>> incident;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        for (VertexLabel v : edges_[e]) incident[v].push_back(e);
    }
    std::vector<unsigned> shared(edges_.size(), 0);
    std::vector<std::size_t> touched;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        touched.clear();
        for (VertexLabel v : edges_[e]) {
            for (std::size_t f : incident[v]) {
                if (f <= e) continue;
                if (shared[f]++ == 0) touched.push_back(f);
            }
        }
        for (std::size_t f : touched) {
            if (shared[f] == dimension_) {
                throw HypergraphError("edges " + std::to_string(e + 1) + " and " + std::to_string(f + 1) +
                                      " are duplicates");
            }
            if (shared[f] + 2 > dimension_) {
                throw HypergraphError("edges " + std::to_string(e + 1) + " and " + std::to_string(f + 1) +
                                      " share " + std::to_string(shared[f]) + " vertices (at most " +
                                      std::to_string(dimension_ - 2) + " allowed)");
            }
            shared[f] = 0;
        }
    }
}

Hypergraph Hypergraph::unchecked(unsigned dimension, std::vector<Edge> edges) {
    Hypergraph h;
    h.dimension_ = dimension;
    h.edges_ = std::move(edges);
    h.index_vertices();
    return h;
}

void Hypergraph::index_vertices() {
    vertices_.clear();
    std::vector<bool> seen;
    for (const Edge& edge : edges_) {
        for (VertexLabel v : edge) {
            if (v >= seen.size()) seen.resize(std::max<std::size_t>(v + 1, seen.size() * 2), false);
            if (!seen[v]) {
                seen[v] = true;
                vertices_.push_back(v);
            }
        }
    }
}

std::string Hypergraph::size_class() const {
    return std::to_string(vertex_count()) + "-" + std::to_string(edge_count());
}

Hypergraph Hypergraph::subgraph(const std::vector<std::size_t>& edge_indices) const {
    std::vector<Edge> picked;
    picked.reserve(edge_indices.size());
    for (std::size_t e : edge_indices) picked.push_back(edges_.at(e));
    return unchecked(dimension_, std::move(picked));
}

// ---------------------------------------------------------------------------
// Line grammar

bool is_comment_or_blank(std::string_view line) {
    const auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return true;
    if (b != 0) return false;
    return line[0] == '#' && (line.size() == 1 || std::isspace(static_cast<unsigned char>(line[1])));
}

namespace {

class LineParser {
public:
    explicit LineParser(std::string_view text) : text_(text) {
        while (!text_.empty() && (text_.back() == '\n' || text_.back() == '\r')) text_.remove_suffix(1);
    }

    ParsedLine parse(std::optional<unsigned> expected_dimension) {
        std::vector<Edge> edges = edge_part();
        if (edges.empty()) fail("no edges");
        const unsigned n = expected_dimension.value_or(static_cast<unsigned>(edges.front().size()));
        ParsedLine out{Hypergraph(n, std::move(edges)), std::nullopt, {}};

        std::size_t after = pos_;
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '{') {
            out.coordinatization = coordinatization_part(out.hypergraph);
            after = pos_;
            while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
        }
        if (pos_ < text_.size()) {
            if (text_[pos_] != '#' || pos_ == after) fail("unexpected trailing text");
            out.comment = std::string(text_.substr(pos_ + 1));
            pos_ = text_.size();
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw HypergraphError("column " + std::to_string(pos_ + 1) + ": " + what);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    VertexLabel label() {
        VertexLabel plus = 0;
        while (peek() == '+') {
            ++plus;
            ++pos_;
        }
        if (pos_ >= text_.size()) fail("label expected");
        const int base = alphabet_index(text_[pos_]);
        if (base < 0) fail(std::string("unknown label character '") + text_[pos_] + "'");
        ++pos_;
        return plus * static_cast<VertexLabel>(kAlphabet.size()) + static_cast<VertexLabel>(base);
    }

    std::vector<Edge> edge_part() {
        std::vector<Edge> edges;
        Edge cur;
        for (;;) {
            const char c = peek();
            if (c == ',' || c == '.') {
                if (cur.empty()) fail("empty edge");
                edges.push_back(std::move(cur));
                cur.clear();
                ++pos_;
                if (c == '.') return edges;
            } else if (c == '\0') {
                fail("edge list must end with '.'");
            } else {
                cur.push_back(label());
            }
        }
    }

    Coordinatization coordinatization_part(const Hypergraph& h) {
        Coordinatization coords;
        expect('{');
        for (;;) {
            const std::size_t at = pos_;
            const VertexLabel v = label();
            expect('=');
            expect('{');
            Vector vec;
            for (;;) {
                const std::size_t start = pos_;
                int depth = 0;
                while (pos_ < text_.size()) {
                    const char c = text_[pos_];
                    if (c == '(') ++depth;
                    if (c == ')') --depth;
                    if (depth == 0 && (c == ',' || c == '}')) break;
                    ++pos_;
                }
                if (pos_ >= text_.size()) fail("unterminated vector");
                try {
                    vec.push_back(FieldScalar::parse(text_.substr(start, pos_ - start)));
                } catch (const ExpressionError& e) {
                    throw HypergraphError("column " + std::to_string(start + 1) + ": " + e.what());
                }
                if (text_[pos_++] == '}') break;
            }
            if (vec.size() != h.dimension()) {
                pos_ = at;
                fail("vector for " + render_label(v) + " has " + std::to_string(vec.size()) + " components");
            }
            if (!coords.emplace(v, std::move(vec)).second) {
                pos_ = at;
                fail("vertex " + render_label(v) + " assigned twice");
            }
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect('}');
            expect('.');
            break;
        }
        for (const auto& [v, vec] : coords) {
            if (!std::binary_search(sorted_vertices(h).begin(), sorted_vertices(h).end(), v)) {
                fail("coordinatization names " + render_label(v) + ", which is not a vertex");
            }
        }
        if (coords.size() != h.vertex_count()) {
            for (VertexLabel v : h.vertices()) {
                if (!coords.count(v)) fail("coordinatization misses vertex " + render_label(v));
            }
        }
        return coords;
    }

    const std::vector<VertexLabel>& sorted_vertices(const Hypergraph& h) {
        if (sorted_.empty()) {
            sorted_ = h.vertices();
            std::sort(sorted_.begin(), sorted_.end());
        }
        return sorted_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<VertexLabel> sorted_;
};

}  // namespace

ParsedLine parse_line(std::string_view text, std::optional<unsigned> expected_dimension) {
    return LineParser(text).parse(expected_dimension);
}

std::string serialize(const Hypergraph& h, const Coordinatization* c) {
    std::string out;
    for (std::size_t e = 0; e < h.edges().size(); ++e) {
        if (e) out += ',';
        for (VertexLabel v : h.edges()[e]) out += render_label(v);
    }
    out += '.';
    if (c == nullptr) return out;

    if (c->size() != h.vertex_count()) {
        throw HypergraphError("coordinatization covers " + std::to_string(c->size()) + " vertices, hypergraph has " +
                              std::to_string(h.vertex_count()));
    }
    out += " {";
    bool first = true;
    for (VertexLabel v : h.vertices()) {
        auto it = c->find(v);
        if (it == c->end()) throw HypergraphError("coordinatization misses vertex " + render_label(v));
        if (!first) out += ',';
        first = false;
        out += render_label(v);
        out += "={";
        for (std::size_t k = 0; k < it->second.size(); ++k) {
            if (k) out += ',';
            out += it->second[k].to_string();
        }
        out += '}';
    }
    out += "}.";
    return out;
}

namespace {

struct Shuffled {
    Hypergraph hypergraph;
    std::unordered_map<VertexLabel, VertexLabel> relabel;
};

Shuffled shuffle_impl(const Hypergraph& h, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<VertexLabel> labels = h.vertices();
    std::sort(labels.begin(), labels.end());
    std::vector<VertexLabel> image = labels;
    rng.shuffle(std::span(image));
    std::unordered_map<VertexLabel, VertexLabel> relabel;
    for (std::size_t i = 0; i < labels.size(); ++i) relabel[labels[i]] = image[i];

    std::vector<Edge> edges = h.edges();
    for (Edge& e : edges) {
        for (VertexLabel& v : e) v = relabel[v];
        rng.shuffle(std::span(e));
    }
    rng.shuffle(std::span(edges));
    return {Hypergraph::unchecked(h.dimension(), std::move(edges)), std::move(relabel)};
}

}  // namespace

Hypergraph shuffle(const Hypergraph& h, std::uint64_t seed) { return shuffle_impl(h, seed).hypergraph; }

std::pair<Hypergraph, Coordinatization> shuffle(const Hypergraph& h, const Coordinatization& c, std::uint64_t seed) {
    Shuffled s = shuffle_impl(h, seed);
    Coordinatization out;
    for (const auto& [v, vec] : c) out.emplace(s.relabel.at(v), vec);
    return {std::move(s.hypergraph), std::move(out)};
}

}  // namespace ksm
