#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ksmaster/hypergraph.hpp"

namespace ksm {

/// Total map vertex -> {0,1}.
using Assignment = std::map<VertexLabel, bool>;

/// Exactly-one-per-edge satisfiability over a fixed hypergraph, reusable across edge subsets.
///
/// Conflict-driven search. Propagation is the exactly-one rule: a 1 forces 0 on every co-edge
/// vertex, and an edge with all but one vertex at 0 forces the last one to 1. Conflicts are
/// analyzed to first-UIP clauses; decisions follow activity with phase saving and Luby restarts.
class ColoringSolver {
public:
    explicit ColoringSolver(const Hypergraph& h);

    /// Solve on the edges whose mask entry is nonzero. Returns a 0/1 value per vertex in
    /// h.vertices() order; vertices outside the active edges get 0.
    std::optional<std::vector<std::uint8_t>> solve(std::span<const std::uint8_t> active, bool track_core = false);
    std::optional<std::vector<std::uint8_t>> solve();

    /// After an unsatisfiable solve with track_core: active edges that are already
    /// unsatisfiable on their own (ascending edge indices; not necessarily minimal).
    const std::vector<std::uint32_t>& core() const { return core_; }

    /// Seed the initial decision order (benchmarking and diversification only).
    void randomize(std::uint64_t seed);

    std::size_t vertex_count() const { return vertex_edges_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::uint64_t calls() const { return calls_; }
    std::uint64_t decisions() const { return decisions_; }
    std::uint64_t conflicts() const { return conflicts_; }

    /// Compact vertex index -> label.
    const std::vector<VertexLabel>& labels() const { return labels_; }
    std::span<const std::uint32_t> edge(std::size_t e) const {
        return {edge_vertices_.data() + e * width_, width_};
    }

private:
    using Lit = std::uint32_t;  // 2 * vertex + (1 if the literal means "vertex is 0")
    static constexpr std::uint8_t kUnset = 2;
    static constexpr std::uint32_t kNone = UINT32_MAX;

    struct Reason {
        std::uint32_t clause = kNone;  // index into clauses_
        Lit other = kNone;             // binary at-most-one reason: the other (false) literal
        std::uint32_t edge = kNone;    // edge of a binary at-most-one reason
    };
    struct Clause {
        std::uint32_t start;
        std::uint32_t size;
    };

    bool lit_true(Lit l) const { return value_[l >> 1] == ((l & 1) ^ 1); }
    bool lit_false(Lit l) const { return value_[l >> 1] == (l & 1); }
    std::uint32_t level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

    void reset(std::span<const std::uint8_t> active);
    std::uint32_t add_clause(std::span<const Lit> lits, const std::uint64_t* edges);
    std::uint64_t* var_core(std::uint32_t v) { return var_core_.data() + v * core_words_; }
    const std::uint64_t* clause_core(std::uint32_t c) const { return clause_core_.data() + c * core_words_; }
    void add_reason_core(std::uint64_t* acc, const Reason& r) const;
    void merge(std::uint64_t* acc, const std::uint64_t* more) const;
    void keep(std::span<const Lit> learnt);
    void finish_core();
    void enqueue(Lit l, Reason r);
    bool propagate();
    void analyze(std::vector<Lit>& learnt, std::uint32_t& back_level);
    void backtrack(std::uint32_t target);
    void bump(std::uint32_t v);
    std::uint32_t pick_branch();
    bool search();

    void heap_insert(std::uint32_t v);
    std::uint32_t heap_pop();
    void heap_up(std::size_t i);
    void heap_down(std::size_t i);

    std::size_t width_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::uint32_t> edge_vertices_;             // edge_count * width
    std::vector<std::vector<std::uint32_t>> vertex_edges_;  // incident edges per vertex
    std::vector<VertexLabel> labels_;

    std::span<const std::uint8_t> active_;
    std::vector<std::uint8_t> all_active_;
    std::vector<std::uint8_t> value_;
    std::vector<std::uint8_t> phase_;
    std::vector<std::uint32_t> level_of_;
    std::vector<Reason> reason_;
    std::vector<Lit> trail_;
    std::vector<std::uint32_t> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<Lit> pool_;
    std::vector<Clause> clauses_;
    std::vector<std::vector<std::uint32_t>> watches_;  // per literal: clauses watching it
    std::vector<Lit> conflict_;
    Reason conflict_reason_;

    bool track_core_ = false;
    std::size_t core_words_ = 0;
    std::vector<std::uint64_t> clause_core_;  // per clause: edges its derivation rests on
    std::vector<std::uint64_t> var_core_;     // per variable fixed at level 0
    std::vector<std::uint64_t> acc_;
    std::vector<std::uint32_t> core_;
    // learned clauses with their edge cores, reused by later core-tracking solves whose
    // active set covers the core
    std::vector<Lit> kept_lits_;
    std::vector<std::uint64_t> kept_cores_;
    std::vector<Clause> kept_;

    std::vector<double> activity_;
    double var_inc_ = 1.0;
    std::vector<std::uint32_t> heap_;
    std::vector<std::uint32_t> heap_pos_;
    std::vector<std::uint8_t> seen_;

    std::optional<std::uint64_t> random_seed_;
    std::uint64_t calls_ = 0;
    std::uint64_t decisions_ = 0;
    std::uint64_t conflicts_ = 0;
};

std::optional<Assignment> find_assignment(const Hypergraph& h);
/// True iff no assignment exists: the hypergraph is a KS hypergraph.
bool is_ks(const Hypergraph& h);
/// Every edge has exactly one vertex set to 1. Throws if the assignment misses a vertex.
bool verify_assignment(const Hypergraph& h, const Assignment& a);

}  // namespace ksm
