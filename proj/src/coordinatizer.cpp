#include "ksmaster/coordinatizer.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <unordered_map>
#include <unordered_set>

#include "ksmaster/generator.hpp"

namespace ksm {

bool verify_coordinatization(const Hypergraph& h, const Coordinatization& c) {
    const std::size_t n = h.dimension();
    unsigned conductor = 1;
    for (VertexLabel v : h.vertices()) {
        auto it = c.find(v);
        if (it == c.end()) throw std::invalid_argument("no vector for vertex " + render_label(v));
        if (it->second.size() != n) {
            throw std::invalid_argument("vector of vertex " + render_label(v) + " has " +
                                        std::to_string(it->second.size()) + " components, expected " +
                                        std::to_string(n));
        }
        for (const auto& x : it->second) conductor = conductor_lcm(conductor, x.conductor());
    }
    std::unordered_map<VertexLabel, Ray> rays;
    for (VertexLabel v : h.vertices()) {
        const Vector& raw = c.at(v);
        if (std::all_of(raw.begin(), raw.end(), [](const FieldScalar& x) { return x.is_zero(); })) return false;
        rays.emplace(v, Ray(raw).lifted(conductor));
    }
    for (const Edge& e : h.edges()) {
        for (std::size_t a = 0; a < e.size(); ++a) {
            for (std::size_t b = a + 1; b < e.size(); ++b) {
                if (!are_orthogonal(rays.at(e[a]), rays.at(e[b]))) return false;
            }
        }
    }
    std::unordered_set<Ray, RayHash> distinct;
    for (const auto& [v, r] : rays) {
        if (!distinct.insert(r).second) return false;
    }
    return true;
}

namespace {

using Clock = std::chrono::steady_clock;

class CoordinateSearch {
public:
    CoordinateSearch(const Hypergraph& h, const std::vector<Ray>& rays, const OrthogonalityGraph& graph,
                     std::vector<std::uint64_t> basis_mask, const CoordinatizeOptions& options)
        : h_(h), rays_(rays), graph_(graph), words_(graph.words()), basis_mask_(std::move(basis_mask)),
          options_(options), start_(Clock::now()) {
        const auto& vertices = h.vertices();
        std::unordered_map<VertexLabel, std::uint32_t> index;
        for (std::uint32_t i = 0; i < vertices.size(); ++i) index.emplace(vertices[i], i);
        neighbours_.resize(vertices.size());
        degree_.assign(vertices.size(), 0);
        for (const Edge& e : h.edges()) {
            for (VertexLabel a : e) {
                ++degree_[index.at(a)];
                for (VertexLabel b : e) {
                    if (a != b) neighbours_[index.at(a)].push_back(index.at(b));
                }
            }
        }
        for (auto& nb : neighbours_) {
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        }
        ray_of_.assign(vertices.size(), kNone);
        used_.assign(words_, 0);
    }

    CoordinatizationSearch run() {
        CoordinatizationSearch out;
        for (auto w : basis_mask_) out.candidate_rays += static_cast<std::size_t>(std::popcount(w));
        const bool found = extend(ray_of_.size());
        out.nodes = nodes_;
        out.complete = !stopped_;
        if (found) {
            Coordinatization c;
            for (std::size_t v = 0; v < ray_of_.size(); ++v) c.emplace(h_.vertices()[v], rays_[ray_of_[v]].components());
            out.coordinatization = std::move(c);
        }
        return out;
    }

private:
    static constexpr std::uint32_t kNone = UINT32_MAX;

    void domain(std::uint32_t v, std::vector<std::uint64_t>& out) const {
        for (std::size_t w = 0; w < words_; ++w) out[w] = basis_mask_[w] & ~used_[w];
        for (std::uint32_t u : neighbours_[v]) {
            if (ray_of_[u] == kNone) continue;
            const std::uint64_t* row = graph_.row(ray_of_[u]);
            for (std::size_t w = 0; w < words_; ++w) out[w] &= row[w];
        }
    }

    bool over_budget() {
        if (options_.max_nodes && nodes_ >= *options_.max_nodes) return true;
        if (options_.max_seconds && (nodes_ & 1023) == 0 &&
            std::chrono::duration<double>(Clock::now() - start_).count() > *options_.max_seconds) {
            return true;
        }
        return false;
    }

    bool extend(std::size_t remaining) {
        if (remaining == 0) return true;
        ++nodes_;
        if (stopped_ || over_budget()) {
            stopped_ = true;
            return false;
        }
        std::uint32_t best = kNone;
        std::size_t best_size = SIZE_MAX;
        std::size_t best_placed = 0;
        std::vector<std::uint64_t> dom(words_);
        std::vector<std::uint64_t> best_dom(words_);
        for (std::uint32_t v = 0; v < ray_of_.size(); ++v) {
            if (ray_of_[v] != kNone) continue;
            domain(v, dom);
            std::size_t size = 0;
            for (auto w : dom) size += static_cast<std::size_t>(std::popcount(w));
            if (size == 0) return false;
            const std::size_t placed = static_cast<std::size_t>(std::count_if(
                neighbours_[v].begin(), neighbours_[v].end(), [&](std::uint32_t u) { return ray_of_[u] != kNone; }));
            const bool better = best == kNone || size < best_size ||
                                (size == best_size && (placed > best_placed ||
                                                       (placed == best_placed && degree_[v] > degree_[best])));
            if (better) {
                best = v;
                best_size = size;
                best_placed = placed;
                best_dom.swap(dom);
            }
        }
        for (std::size_t w = 0; w < words_; ++w) {
            for (std::uint64_t bits = best_dom[w]; bits; bits &= bits - 1) {
                const auto r = static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                ray_of_[best] = r;
                used_[w] |= std::uint64_t{1} << (r % 64);
                if (extend(remaining - 1)) return true;
                used_[w] &= ~(std::uint64_t{1} << (r % 64));
                ray_of_[best] = kNone;
                if (stopped_) return false;
            }
        }
        return false;
    }

    const Hypergraph& h_;
    const std::vector<Ray>& rays_;
    const OrthogonalityGraph& graph_;
    std::size_t words_;
    std::vector<std::uint64_t> basis_mask_;
    const CoordinatizeOptions& options_;
    Clock::time_point start_;
    std::vector<std::vector<std::uint32_t>> neighbours_;
    std::vector<std::size_t> degree_;
    std::vector<std::uint32_t> ray_of_;
    std::vector<std::uint64_t> used_;
    std::uint64_t nodes_ = 0;
    bool stopped_ = false;
};

}  // namespace

CoordinatizationSearch search_coordinatization(const Hypergraph& h, const ComponentSet& components,
                                               const CoordinatizeOptions& options) {
    const unsigned n = h.dimension();
    const std::vector<Ray> rays = enumerate_rays(components, n);
    const OrthogonalityGraph graph(rays);
    std::vector<std::uint64_t> mask(graph.words(), 0);
    for (const Basis& b : enumerate_bases(graph, n)) {
        for (std::uint32_t r : b) mask[r / 64] |= std::uint64_t{1} << (r % 64);
    }
    return CoordinateSearch(h, rays, graph, std::move(mask), options).run();
}

std::optional<Coordinatization> find_coordinatization(const Hypergraph& h, const ComponentSet& components) {
    return search_coordinatization(h, components).coordinatization;
}

}  // namespace ksm
