#include "ksmaster/canon.hpp"

#include <algorithm>
#include <numeric>

namespace ksm {

namespace {

// Bipartite incidence graph: nodes [0, k) are vertices, [k, k+m) are edges.
struct Incidence {
    std::size_t k = 0;
    std::size_t m = 0;
    std::vector<std::vector<std::uint32_t>> adj;
    std::vector<std::vector<std::uint32_t>> edges;  // compact vertex indices
};

Incidence build_incidence(const Hypergraph& h) {
    Incidence g;
    g.k = h.vertex_count();
    g.m = h.edge_count();
    g.adj.resize(g.k + g.m);
    std::unordered_map<VertexLabel, std::uint32_t> index;
    for (std::uint32_t i = 0; i < h.vertices().size(); ++i) index.emplace(h.vertices()[i], i);
    for (std::size_t e = 0; e < g.m; ++e) {
        std::vector<std::uint32_t> members;
        for (VertexLabel v : h.edges()[e]) {
            const std::uint32_t x = index.at(v);
            members.push_back(x);
            g.adj[x].push_back(static_cast<std::uint32_t>(g.k + e));
            g.adj[g.k + e].push_back(x);
        }
        g.edges.push_back(std::move(members));
    }
    return g;
}

// Per-edge sorted multiset of nonzero intersection sizes with the other edges.
std::vector<std::vector<std::uint32_t>> edge_profiles(const Incidence& g) {
    std::vector<std::vector<std::uint32_t>> out(g.m);
    std::vector<std::uint32_t> shared(g.m, 0);
    std::vector<std::uint32_t> touched;
    for (std::size_t e = 0; e < g.m; ++e) {
        touched.clear();
        for (std::uint32_t x : g.edges[e]) {
            for (std::uint32_t node : g.adj[x]) {
                const std::size_t f = node - g.k;
                if (f == e) continue;
                if (shared[f]++ == 0) touched.push_back(static_cast<std::uint32_t>(f));
            }
        }
        for (std::uint32_t f : touched) {
            out[e].push_back(shared[f]);
            shared[f] = 0;
        }
        std::sort(out[e].begin(), out[e].end());
    }
    return out;
}

struct Partition {
    std::vector<std::uint32_t> elems;  // nodes in cell order
    std::vector<std::uint32_t> pos;    // node -> index in elems
    std::vector<std::uint32_t> cell;   // node -> start of its cell
    std::vector<std::uint32_t> end;    // cell start -> one past its last index
};

class Refiner {
public:
    explicit Refiner(const Incidence& g) : g_(g), count_(g.k + g.m, 0) {}

    void refine(Partition& p, std::vector<std::uint32_t> queue) {
        std::vector<std::uint32_t> members;
        std::vector<std::uint32_t> touched;
        std::vector<std::uint32_t> cells;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::uint32_t w = queue[head];
            members.assign(p.elems.begin() + w, p.elems.begin() + p.end[w]);
            touched.clear();
            for (std::uint32_t x : members) {
                for (std::uint32_t y : g_.adj[x]) {
                    if (count_[y]++ == 0) touched.push_back(y);
                }
            }
            cells.clear();
            for (std::uint32_t y : touched) cells.push_back(p.cell[y]);
            std::sort(cells.begin(), cells.end());
            cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

            for (std::uint32_t c : cells) {
                const std::uint32_t e = p.end[c];
                if (e - c == 1) continue;
                auto first = p.elems.begin() + c;
                auto last = p.elems.begin() + e;
                std::sort(first, last, [&](std::uint32_t a, std::uint32_t b) { return count_[a] < count_[b]; });
                if (count_[*first] == count_[*(last - 1)]) continue;
                std::uint32_t start = c;
                for (std::uint32_t i = c; i < e; ++i) {
                    const std::uint32_t node = p.elems[i];
                    if (i > c && count_[node] != count_[p.elems[i - 1]]) {
                        p.end[start] = i;
                        queue.push_back(start);
                        start = i;
                    }
                    p.pos[node] = i;
                    p.cell[node] = start;
                }
                p.end[start] = e;
                queue.push_back(start);
            }
            for (std::uint32_t y : touched) count_[y] = 0;
        }
    }

private:
    const Incidence& g_;
    std::vector<std::uint32_t> count_;
};

using Certificate = std::vector<std::vector<std::uint32_t>>;

class CanonSearch {
public:
    explicit CanonSearch(const Hypergraph& h) : g_(build_incidence(h)), refiner_(g_) {}

    void run() {
        Partition p = initial_partition();
        std::vector<std::uint32_t> queue;
        for (std::uint32_t i = 0; i < p.elems.size(); i = p.end[i]) queue.push_back(i);
        refiner_.refine(p, std::move(queue));
        std::vector<std::uint32_t> fixed;
        descend(p, fixed);
    }

    const Incidence& graph() const { return g_; }
    const std::vector<std::uint32_t>& best_labels() const { return best_pos_; }
    const Certificate& best() const { return best_; }
    std::size_t leaves() const { return leaves_; }
    std::size_t automorphisms() const { return automorphisms_.size(); }

private:
    static constexpr std::size_t kMaxStoredAutomorphisms = 512;

    Partition initial_partition() {
        const std::size_t n = g_.k + g_.m;
        const auto profiles = edge_profiles(g_);

        // vertex key: degree, then the merged intersection profile of its edges
        std::vector<std::vector<std::uint32_t>> key(n);
        for (std::uint32_t x = 0; x < g_.k; ++x) {
            key[x].push_back(0);
            key[x].push_back(static_cast<std::uint32_t>(g_.adj[x].size()));
            std::vector<std::uint32_t> merged;
            for (std::uint32_t node : g_.adj[x]) {
                const auto& pr = profiles[node - g_.k];
                merged.insert(merged.end(), pr.begin(), pr.end());
            }
            std::sort(merged.begin(), merged.end());
            key[x].insert(key[x].end(), merged.begin(), merged.end());
        }
        for (std::size_t e = 0; e < g_.m; ++e) {
            key[g_.k + e].push_back(1);
            key[g_.k + e].insert(key[g_.k + e].end(), profiles[e].begin(), profiles[e].end());
        }

        Partition p;
        p.elems.resize(n);
        std::iota(p.elems.begin(), p.elems.end(), 0);
        std::stable_sort(p.elems.begin(), p.elems.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return key[a] < key[b]; });
        p.pos.resize(n);
        p.cell.resize(n);
        p.end.assign(n, 0);
        std::uint32_t start = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t node = p.elems[i];
            if (i > 0 && key[node] != key[p.elems[i - 1]]) {
                p.end[start] = i;
                start = i;
            }
            p.pos[node] = i;
            p.cell[node] = start;
        }
        if (n > 0) p.end[start] = static_cast<std::uint32_t>(n);
        return p;
    }

    // First non-singleton vertex cell, or k when the vertex part is discrete.
    std::uint32_t target_cell(const Partition& p) const {
        for (std::uint32_t i = 0; i < g_.k; i = p.end[i]) {
            if (p.end[i] - i > 1) return i;
        }
        return static_cast<std::uint32_t>(g_.k);
    }

    void descend(const Partition& p, std::vector<std::uint32_t>& fixed) {
        const std::uint32_t target = target_cell(p);
        if (target == g_.k) {
            leaf(p);
            return;
        }
        std::vector<std::uint32_t> children(p.elems.begin() + target, p.elems.begin() + p.end[target]);
        std::sort(children.begin(), children.end());
        std::vector<std::uint32_t> explored;
        for (std::uint32_t v : children) {
            if (!explored.empty() && equivalent_to_explored(v, explored, fixed)) continue;
            explored.push_back(v);

            Partition child = p;
            // individualize v: {v} first, then the rest of its cell
            const std::uint32_t at = child.pos[v];
            const std::uint32_t other = child.elems[target];
            std::swap(child.elems[target], child.elems[at]);
            child.pos[v] = target;
            child.pos[other] = at;
            const std::uint32_t e = child.end[target];
            child.end[target] = target + 1;
            child.end[target + 1] = e;
            for (std::uint32_t i = target + 1; i < e; ++i) child.cell[child.elems[i]] = target + 1;
            refiner_.refine(child, {target});

            fixed.push_back(v);
            descend(child, fixed);
            fixed.pop_back();
        }
    }

    bool equivalent_to_explored(std::uint32_t v, const std::vector<std::uint32_t>& explored,
                                const std::vector<std::uint32_t>& fixed) const {
        if (automorphisms_.empty()) return false;
        std::vector<std::uint32_t> parent(g_.k);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::uint32_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        bool any = false;
        for (const auto& gamma : automorphisms_) {
            if (!std::all_of(fixed.begin(), fixed.end(), [&](std::uint32_t f) { return gamma[f] == f; })) continue;
            any = true;
            for (std::uint32_t x = 0; x < g_.k; ++x) {
                const std::uint32_t a = find(x);
                const std::uint32_t b = find(gamma[x]);
                if (a != b) parent[a] = b;
            }
        }
        if (!any) return false;
        const std::uint32_t root = find(v);
        return std::any_of(explored.begin(), explored.end(), [&](std::uint32_t u) { return find(u) == root; });
    }

    void leaf(const Partition& p) {
        ++leaves_;
        Certificate cert;
        cert.reserve(g_.m);
        for (const auto& edge : g_.edges) {
            std::vector<std::uint32_t> relabeled;
            relabeled.reserve(edge.size());
            for (std::uint32_t x : edge) relabeled.push_back(p.pos[x]);
            std::sort(relabeled.begin(), relabeled.end());
            cert.push_back(std::move(relabeled));
        }
        std::sort(cert.begin(), cert.end());

        std::vector<std::uint32_t> labels(p.pos.begin(), p.pos.begin() + static_cast<std::ptrdiff_t>(g_.k));
        if (best_pos_.empty() || cert < best_) {
            best_ = std::move(cert);
            best_pos_ = std::move(labels);
            return;
        }
        if (cert == best_ && automorphisms_.size() < kMaxStoredAutomorphisms) {
            // gamma = best^{-1} o current
            std::vector<std::uint32_t> inverse_best(g_.k);
            for (std::uint32_t x = 0; x < g_.k; ++x) inverse_best[best_pos_[x]] = x;
            std::vector<std::uint32_t> gamma(g_.k);
            for (std::uint32_t x = 0; x < g_.k; ++x) gamma[x] = inverse_best[labels[x]];
            automorphisms_.push_back(std::move(gamma));
        }
    }

    Incidence g_;
    Refiner refiner_;
    Certificate best_;
    std::vector<std::uint32_t> best_pos_;
    std::vector<std::vector<std::uint32_t>> automorphisms_;
    std::size_t leaves_ = 0;
};

}  // namespace

CanonicalLabeling canonical_labeling(const Hypergraph& h) {
    CanonSearch search(h);
    search.run();

    CanonicalLabeling out;
    std::vector<Edge> edges;
    for (const auto& e : search.best()) edges.emplace_back(e.begin(), e.end());
    out.hypergraph = Hypergraph::unchecked(h.dimension(), std::move(edges));
    out.form = serialize(out.hypergraph);
    for (std::size_t x = 0; x < h.vertex_count(); ++x) out.relabel.emplace(h.vertices()[x], search.best_labels()[x]);
    out.leaves = search.leaves();
    out.automorphisms = search.automorphisms();
    return out;
}

std::string canonical_form(const Hypergraph& h) { return canonical_labeling(h).form; }

std::pair<Hypergraph, Coordinatization> canonical_relabel(const Hypergraph& h, const Coordinatization& c) {
    CanonicalLabeling lab = canonical_labeling(h);
    Coordinatization out;
    for (const auto& [v, vec] : c) out.emplace(lab.relabel.at(v), vec);
    return {std::move(lab.hypergraph), std::move(out)};
}

bool invariants_match(const Hypergraph& a, const Hypergraph& b) {
    if (a.dimension() != b.dimension() || a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) {
        return false;
    }
    auto degrees = [](const Hypergraph& h) {
        std::unordered_map<VertexLabel, std::uint32_t> deg;
        for (const Edge& e : h.edges()) {
            for (VertexLabel v : e) ++deg[v];
        }
        std::vector<std::uint32_t> out;
        for (const auto& [v, d] : deg) out.push_back(d);
        std::sort(out.begin(), out.end());
        return out;
    };
    if (degrees(a) != degrees(b)) return false;
    auto profile = [](const Hypergraph& h) {
        auto p = edge_profiles(build_incidence(h));
        std::sort(p.begin(), p.end());
        return p;
    };
    return profile(a) == profile(b);
}

bool are_isomorphic(const Hypergraph& a, const Hypergraph& b) {
    if (!invariants_match(a, b)) return false;
    return canonical_form(a) == canonical_form(b);
}

}  // namespace ksm
