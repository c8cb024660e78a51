#include "ksmaster/generator.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ksmaster/colorability.hpp"
#include "ksmaster/parallel.hpp"

namespace ksm {

std::vector<Ray> enumerate_rays(const ComponentSet& components, unsigned dimension) {
    if (dimension < 2) throw std::invalid_argument("dimension must be at least 2");
    const auto& values = components.values();
    if (std::none_of(values.begin(), values.end(), [](const FieldScalar& x) { return !x.is_zero(); })) {
        throw std::invalid_argument("component set has no nonzero element");
    }
    std::unordered_set<Ray, RayHash> seen;
    std::vector<Ray> rays;
    std::vector<std::size_t> digit(dimension, 0);
    Vector v(dimension, values[0]);
    for (;;) {
        if (std::any_of(v.begin(), v.end(), [](const FieldScalar& x) { return !x.is_zero(); })) {
            Ray r(v);
            if (seen.insert(r).second) rays.push_back(std::move(r));
        }
        std::size_t k = 0;
        while (k < dimension && ++digit[k] == values.size()) {
            digit[k] = 0;
            v[k] = values[0];
            ++k;
        }
        if (k == dimension) break;
        v[k] = values[digit[k]];
    }
    std::sort(rays.begin(), rays.end());
    return rays;
}

// ---------------------------------------------------------------------------
// Orthogonality

namespace {

// Ray scaled by a positive integer so every power-basis coefficient is integral.
struct IntegralRay {
    bool exact = true;
    std::vector<std::int64_t> coeffs;     // dimension * degree
    std::vector<std::int64_t> conjugate;  // dimension * degree
    std::vector<std::uint32_t> support;
};

constexpr std::int64_t kCoefficientBound = std::int64_t{1} << 40;

std::vector<std::int64_t> integral_conjugate(const Cyclotomic& cy, std::span<const std::int64_t> c) {
    std::vector<std::int64_t> out(cy.degree, 0);
    const long n = static_cast<long>(cy.conductor);
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0) continue;
        const auto& basis = cy.power[static_cast<std::size_t>((n - static_cast<long>(j) % n) % n)];
        for (std::size_t t = 0; t < cy.degree; ++t) out[t] += c[j] * basis[t];
    }
    return out;
}

IntegralRay make_integral(const Ray& r, const Cyclotomic& cy) {
    IntegralRay out;
    const std::size_t d = cy.degree;
    mpz_class scale = 1;
    for (const auto& x : r.components()) {
        for (const auto& q : x.coefficients()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), q.get_den_mpz_t());
    }
    out.coeffs.assign(r.dimension() * d, 0);
    for (std::size_t k = 0; k < r.dimension(); ++k) {
        const auto coeffs = r[k].coefficients();
        if (coeffs.size() != d) {
            out.exact = false;
            return out;
        }
        bool nonzero = false;
        for (std::size_t t = 0; t < d; ++t) {
            const mpz_class z = coeffs[t].get_num() * (scale / coeffs[t].get_den());
            if (!z.fits_slong_p() || abs(z) >= kCoefficientBound) {
                out.exact = false;
                return out;
            }
            out.coeffs[k * d + t] = z.get_si();
            nonzero |= z != 0;
        }
        if (nonzero) out.support.push_back(static_cast<std::uint32_t>(k));
    }
    out.conjugate.assign(r.dimension() * d, 0);
    for (std::uint32_t k : out.support) {
        auto c = integral_conjugate(cy, std::span(out.coeffs).subspan(k * d, d));
        std::copy(c.begin(), c.end(), out.conjugate.begin() + static_cast<std::ptrdiff_t>(k * d));
    }
    return out;
}

bool integral_orthogonal(const IntegralRay& a, const IntegralRay& b, const Cyclotomic& cy,
                         std::vector<__int128>& acc) {
    const std::size_t d = cy.degree;
    std::fill(acc.begin(), acc.end(), 0);
    std::size_t i = 0;
    std::size_t j = 0;
    bool any = false;
    while (i < a.support.size() && j < b.support.size()) {
        if (a.support[i] < b.support[j]) {
            ++i;
        } else if (a.support[i] > b.support[j]) {
            ++j;
        } else {
            const std::size_t k = a.support[i];
            const std::int64_t* u = a.conjugate.data() + k * d;
            const std::int64_t* v = b.coeffs.data() + k * d;
            for (std::size_t s = 0; s < d; ++s) {
                if (u[s] == 0) continue;
                for (std::size_t t = 0; t < d; ++t) acc[s + t] += static_cast<__int128>(u[s]) * v[t];
            }
            any = true;
            ++i;
            ++j;
        }
    }
    if (!any) return true;
    for (std::size_t t = 0; t < d; ++t) {
        __int128 sum = acc[t];
        for (std::size_t e = d; e < acc.size(); ++e) {
            if (acc[e] != 0) sum += acc[e] * cy.power[e % cy.conductor][t];
        }
        if (sum != 0) return false;
    }
    return true;
}

}  // namespace

OrthogonalityGraph::OrthogonalityGraph(const std::vector<Ray>& rays, unsigned threads)
    : size_(rays.size()), words_((rays.size() + 63) / 64) {
    bits_.assign(size_ * words_, 0);
    if (rays.empty()) return;
    unsigned conductor = 1;
    for (const auto& r : rays) conductor = conductor_lcm(conductor, r.conductor());
    const Cyclotomic& cy = cyclotomic(conductor);

    std::vector<Ray> lifted;
    lifted.reserve(rays.size());
    for (const auto& r : rays) lifted.push_back(r.conductor() == conductor ? r : r.lifted(conductor));
    std::vector<IntegralRay> integral(lifted.size());
    parallel_for(lifted.size(), threads, [&](std::size_t a) { integral[a] = make_integral(lifted[a], cy); });

    parallel_for(size_, threads, [&](std::size_t a) {
        std::vector<__int128> acc(2 * cy.degree - 1);
        std::uint64_t* row = bits_.data() + a * words_;
        for (std::size_t b = a + 1; b < size_; ++b) {
            const bool orth = (integral[a].exact && integral[b].exact)
                                  ? integral_orthogonal(integral[a], integral[b], cy, acc)
                                  : are_orthogonal(lifted[a], lifted[b]);
            if (orth) row[b / 64] |= std::uint64_t{1} << (b % 64);
        }
    });
    for (std::size_t a = 0; a < size_; ++a) {
        for (std::size_t b = a + 1; b < size_; ++b) {
            if (adjacent(a, b)) bits_[b * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
        }
    }
}

std::size_t OrthogonalityGraph::degree(std::size_t a) const {
    std::size_t d = 0;
    for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(row(a)[w]));
    return d;
}

// ---------------------------------------------------------------------------
// Bases

namespace {

void extend_clique(const OrthogonalityGraph& g, unsigned dimension, Basis& clique, std::vector<std::uint64_t>& cand,
                   std::vector<Basis>& out) {
    if (clique.size() == dimension) {
        out.push_back(clique);
        return;
    }
    const std::size_t words = g.words();
    std::size_t remaining = 0;
    for (std::size_t w = 0; w < words; ++w) remaining += static_cast<std::size_t>(std::popcount(cand[w]));
    if (clique.size() + remaining < dimension) return;

    std::vector<std::uint64_t> next(words);
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = cand[w];
        while (bits) {
            const unsigned b = static_cast<unsigned>(std::countr_zero(bits));
            bits &= bits - 1;
            const std::size_t v = w * 64 + b;
            // candidates adjacent to v with a higher index
            const std::uint64_t* row = g.row(v);
            bool any = false;
            for (std::size_t x = 0; x < words; ++x) {
                std::uint64_t m = cand[x] & row[x];
                if (x < w) m = 0;
                if (x == w) m &= (b == 63) ? 0 : (~std::uint64_t{0} << (b + 1));
                next[x] = m;
                any |= m != 0;
            }
            if (!any && clique.size() + 1 < dimension) continue;
            clique.push_back(static_cast<std::uint32_t>(v));
            extend_clique(g, dimension, clique, next, out);
            clique.pop_back();
        }
    }
}

std::vector<Basis> bases_from(const OrthogonalityGraph& g, unsigned dimension, std::size_t first) {
    std::vector<Basis> out;
    const std::size_t words = g.words();
    std::vector<std::uint64_t> cand(words);
    const std::uint64_t* row = g.row(first);
    for (std::size_t x = 0; x < words; ++x) cand[x] = row[x];
    // keep only indices above `first`
    for (std::size_t x = 0; x <= first / 64 && x < words; ++x) {
        if (x < first / 64) {
            cand[x] = 0;
        } else {
            const unsigned b = static_cast<unsigned>(first % 64);
            cand[x] &= (b == 63) ? 0 : (~std::uint64_t{0} << (b + 1));
        }
    }
    Basis clique{static_cast<std::uint32_t>(first)};
    extend_clique(g, dimension, clique, cand, out);
    return out;
}

struct Checkpoint {
    std::string path;
    std::string fingerprint;
    std::size_t next = 0;
    std::vector<Basis> bases;
};

std::string fingerprint_of(const OrthogonalityGraph& g, unsigned dimension) {
    std::size_t h = g.size() * 1000003u + dimension;
    for (std::size_t a = 0; a < g.size(); ++a) h = h * 31 + g.degree(a);
    return std::to_string(g.size()) + ":" + std::to_string(dimension) + ":" + std::to_string(h);
}

// Blocks are "block <first> <count>" followed by `count` basis lines; a truncated trailing
// block is dropped on resume.
void load_checkpoint(Checkpoint& cp) {
    std::ifstream in(cp.path);
    if (!in) return;
    std::string line;
    if (!std::getline(in, line)) return;
    if (line != "ksm-bases " + cp.fingerprint) {
        throw std::runtime_error("checkpoint " + cp.path + " was written for a different ray set");
    }
    while (std::getline(in, line)) {
        std::istringstream head(line);
        std::string tag;
        std::size_t first = 0;
        std::size_t count = 0;
        if (!(head >> tag >> first >> count) || tag != "block") break;
        std::vector<Basis> block;
        bool complete = true;
        for (std::size_t i = 0; i < count; ++i) {
            if (!std::getline(in, line)) {
                complete = false;
                break;
            }
            std::istringstream row(line);
            Basis b;
            std::uint32_t x;
            while (row >> x) b.push_back(x);
            block.push_back(std::move(b));
        }
        if (!complete || first != cp.next) break;
        cp.bases.insert(cp.bases.end(), block.begin(), block.end());
        cp.next = first + 1;
    }
}

}  // namespace

std::vector<Basis> enumerate_bases(const OrthogonalityGraph& g, unsigned dimension, const BasisSearchOptions& options) {
    if (dimension < 2) throw std::invalid_argument("dimension must be at least 2");
    const std::size_t total = g.size();

    Checkpoint cp;
    std::ofstream journal;
    if (options.checkpoint) {
        cp.path = *options.checkpoint;
        cp.fingerprint = fingerprint_of(g, dimension);
        load_checkpoint(cp);
        // rewrite the consistent prefix, then append new blocks
        journal.open(cp.path, std::ios::trunc);
        journal << "ksm-bases " << cp.fingerprint << '\n';
        std::size_t i = 0;
        for (std::size_t first = 0; first < cp.next; ++first) {
            std::size_t count = 0;
            while (i + count < cp.bases.size() && cp.bases[i + count][0] == first) ++count;
            journal << "block " << first << ' ' << count << '\n';
            for (std::size_t c = 0; c < count; ++c) {
                const Basis& b = cp.bases[i + c];
                for (std::size_t t = 0; t < b.size(); ++t) journal << (t ? " " : "") << b[t];
                journal << '\n';
            }
            i += count;
        }
        journal.flush();
    }

    std::vector<Basis> out = std::move(cp.bases);
    const unsigned threads = resolve_threads(options.threads);
    const std::size_t chunk = std::max<std::size_t>(threads * 4, 1);
    for (std::size_t start = cp.next; start < total; start += chunk) {
        const std::size_t stop = std::min(total, start + chunk);
        std::vector<std::vector<Basis>> found(stop - start);
        parallel_for(stop - start, threads, [&](std::size_t i) { found[i] = bases_from(g, dimension, start + i); });
        for (std::size_t i = 0; i < found.size(); ++i) {
            if (journal.is_open()) {
                journal << "block " << start + i << ' ' << found[i].size() << '\n';
                for (const Basis& b : found[i]) {
                    for (std::size_t t = 0; t < b.size(); ++t) journal << (t ? " " : "") << b[t];
                    journal << '\n';
                }
            }
            out.insert(out.end(), std::make_move_iterator(found[i].begin()), std::make_move_iterator(found[i].end()));
        }
        if (journal.is_open()) journal.flush();
        if (options.progress) options.progress(stop, total, out.size());
    }
    return out;
}

std::vector<Basis> enumerate_bases(const std::vector<Ray>& rays, unsigned dimension, const BasisSearchOptions& options) {
    return enumerate_bases(OrthogonalityGraph(rays, options.threads), dimension, options);
}

// ---------------------------------------------------------------------------
// Components

std::vector<Hypergraph> split_components(const Hypergraph& h) {
    const auto& edges = h.edges();
    std::vector<std::size_t> parent(edges.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::unordered_map<VertexLabel, std::size_t> owner;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        for (VertexLabel v : edges[e]) {
            auto [it, fresh] = owner.emplace(v, e);
            if (!fresh) {
                const std::size_t a = find(it->second);
                const std::size_t b = find(e);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::vector<std::vector<std::size_t>> groups;
    std::unordered_map<std::size_t, std::size_t> group_of;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::size_t r = find(e);
        auto [it, fresh] = group_of.emplace(r, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(e);
    }
    std::vector<Hypergraph> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(h.subgraph(g));
    return out;
}

namespace {

void assemble(MasterBuild& build) {
    const auto& rays = build.rays;
    const auto& bases = build.bases;
    const unsigned dimension = build.dimension;
    std::vector<std::uint8_t> used(rays.size(), 0);
    for (const Basis& b : bases) {
        for (std::uint32_t r : b) used[r] = 1;
    }
    std::vector<VertexLabel> label(rays.size(), 0);
    VertexLabel next = 0;
    for (std::size_t r = 0; r < rays.size(); ++r) {
        if (used[r]) label[r] = next++;
    }
    std::vector<Edge> edges;
    edges.reserve(bases.size());
    for (const Basis& b : bases) {
        Edge e;
        for (std::uint32_t r : b) e.push_back(label[r]);
        edges.push_back(std::move(e));
    }
    std::vector<std::uint32_t> ray_of(next);
    for (std::size_t r = 0; r < rays.size(); ++r) {
        if (used[r]) ray_of[label[r]] = static_cast<std::uint32_t>(r);
    }

    build.master.hypergraph = Hypergraph::unchecked(dimension, std::move(edges));
    for (VertexLabel v = 0; v < next; ++v) build.master.coordinatization.emplace(v, rays[ray_of[v]].components());
    build.master.ks = is_ks(build.master.hypergraph);

    build.parts.clear();
    for (const Hypergraph& part : split_components(build.master.hypergraph)) {
        // compact relabel in ray order
        std::vector<VertexLabel> members = part.vertices();
        std::sort(members.begin(), members.end());
        std::unordered_map<VertexLabel, VertexLabel> compact;
        for (std::size_t i = 0; i < members.size(); ++i) compact.emplace(members[i], static_cast<VertexLabel>(i));
        std::vector<Edge> relabeled;
        for (const Edge& e : part.edges()) {
            Edge x;
            for (VertexLabel v : e) x.push_back(compact.at(v));
            relabeled.push_back(std::move(x));
        }
        MasterComponent mc;
        mc.hypergraph = Hypergraph::unchecked(dimension, std::move(relabeled));
        for (VertexLabel v : members) mc.coordinatization.emplace(compact.at(v), rays[ray_of[v]].components());
        mc.ks = build.master.ks && is_ks(mc.hypergraph);
        build.parts.push_back(std::move(mc));
    }
}

}  // namespace

MasterBuild build_master(const ComponentSet& components, unsigned dimension, const BasisSearchOptions& options) {
    if (dimension < 3) throw std::invalid_argument("master hypergraphs need dimension at least 3");
    MasterBuild build;
    build.components = components;
    build.dimension = dimension;
    build.rays = enumerate_rays(components, dimension);
    build.bases = enumerate_bases(build.rays, dimension, options);
    assemble(build);
    return build;
}

std::vector<MasterComponent> assemble_master(const ComponentSet& components, unsigned dimension) {
    MasterBuild build = build_master(components, dimension);
    if (build.master.hypergraph.edge_count() == 0) return {};
    return {std::move(build.master)};
}

std::pair<Hypergraph, Coordinatization> basis_hypergraph(const std::vector<Ray>& rays, unsigned dimension) {
    const auto bases = enumerate_bases(rays, dimension);
    std::vector<std::uint8_t> used(rays.size(), 0);
    for (const Basis& b : bases) {
        for (std::uint32_t r : b) used[r] = 1;
    }
    std::vector<Edge> edges;
    for (const Basis& b : bases) edges.emplace_back(b.begin(), b.end());
    Coordinatization c;
    for (std::size_t r = 0; r < rays.size(); ++r) {
        if (used[r]) c.emplace(static_cast<VertexLabel>(r), rays[r].components());
    }
    return {Hypergraph::unchecked(dimension, std::move(edges)), std::move(c)};
}

}  // namespace ksm
