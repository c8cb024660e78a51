#include "ksmaster/criticals.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "ksmaster/canon.hpp"
#include "ksmaster/colorability.hpp"
#include "ksmaster/parallel.hpp"
#include "ksmaster/random.hpp"

namespace ksm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::size_t> active_indices(const std::vector<std::uint8_t>& active) {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < active.size(); ++e) {
        if (active[e]) out.push_back(e);
    }
    return out;
}

void require_ks(ColoringSolver& solver) {
    if (solver.solve()) throw std::invalid_argument("hypergraph is not KS");
}

// One deletion pass over `active` in the given order; leaves a minimal unsatisfiable subset.
// Two shortcuts keep the outcome equal to the plain pass while skipping solver calls:
// an edge outside the latest refutation core can always go, and a witness that violates only
// edge e is flipped locally to find other edges that are also necessary (model rotation).
class Shrinker {
public:
    explicit Shrinker(ColoringSolver& solver) : solver_(solver), vertex_edges_(solver.vertex_count()) {
        for (std::uint32_t e = 0; e < solver.edge_count(); ++e) {
            for (std::uint32_t v : solver.edge(e)) vertex_edges_[v].push_back(e);
        }
    }

    void run(std::vector<std::uint8_t>& active, std::span<const std::size_t> order) {
        const std::size_t m = active.size();
        std::vector<std::uint8_t> in_core(m, 0);
        necessary_.assign(m, 0);
        auto take_core = [&] {
            std::fill(in_core.begin(), in_core.end(), 0);
            for (std::uint32_t e : solver_.core()) in_core[e] = 1;
        };
        if (solver_.solve(active, true)) throw std::logic_error("shrink needs an unsatisfiable edge set");
        take_core();
        for (std::size_t e : order) {
            if (!active[e] || necessary_[e]) continue;
            active[e] = 0;
            if (!in_core[e]) continue;
            if (auto witness = solver_.solve(active, true)) {
                active[e] = 1;
                necessary_[e] = 1;
                rotate(active, std::move(*witness), static_cast<std::uint32_t>(e));
            } else {
                take_core();
            }
        }
    }

private:
    void rotate(const std::vector<std::uint8_t>& active, std::vector<std::uint8_t> witness, std::uint32_t edge) {
        std::vector<std::pair<std::vector<std::uint8_t>, std::uint32_t>> stack;
        stack.emplace_back(std::move(witness), edge);
        std::vector<std::uint32_t> ones;
        while (!stack.empty()) {
            auto [w, e] = std::move(stack.back());
            stack.pop_back();
            ones.clear();
            for (std::uint32_t v : solver_.edge(e)) {
                if (w[v]) ones.push_back(v);
            }
            // Flip one vertex so that e holds exactly one 1. Every other active edge through
            // the flipped vertex then breaks; with exactly one such edge it is necessary too.
            std::span<const std::uint32_t> flips;
            if (ones.empty()) {
                flips = solver_.edge(e);
            } else if (ones.size() == 2) {
                flips = ones;
            } else {
                continue;
            }
            for (std::uint32_t v : flips) {
                std::uint32_t broken = UINT32_MAX;
                std::size_t count = 0;
                for (std::uint32_t f : vertex_edges_[v]) {
                    if (f == e || !active[f]) continue;
                    broken = f;
                    ++count;
                }
                if (count != 1 || necessary_[broken]) continue;
                necessary_[broken] = 1;
                std::vector<std::uint8_t> next = w;
                next[v] ^= 1;
                stack.emplace_back(std::move(next), broken);
            }
        }
    }

    ColoringSolver& solver_;
    std::vector<std::vector<std::uint32_t>> vertex_edges_;
    std::vector<std::uint8_t> necessary_;
};

void shrink(ColoringSolver& solver, std::vector<std::uint8_t>& active, std::span<const std::size_t> order) {
    Shrinker(solver).run(active, order);
}

// Bitset over edge indices.
using Bits = std::vector<std::uint64_t>;

void set(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

// Incremental CDCL over edge-selection variables for the MARCO map. Clauses only ever get
// added; positive ones block everything below a satisfiable subset, negative ones everything
// above an unsatisfiable one. Decisions always try "selected" first.
class MapSolver {
public:
    explicit MapSolver(std::size_t n)
        : n_(n), value_(n, kUnset), level_of_(n, 0), reason_(n, kNone), watches_(2 * n), activity_(n, 0.0),
          seen_(n, 0), negative_of_(n) {}

    void block_up(const std::vector<std::uint8_t>& subset) {
        std::vector<Lit> c;
        for (std::size_t v = 0; v < n_; ++v) {
            if (subset[v]) c.push_back(2 * static_cast<Lit>(v) + 1);
        }
        const auto id = static_cast<std::uint32_t>(negatives_.size());
        negatives_.push_back(c);
        for (Lit l : c) negative_of_[l >> 1].push_back(id);
        add(std::move(c));
    }

    void block_down(const std::vector<std::uint8_t>& subset) {
        std::vector<Lit> c;
        for (std::size_t v = 0; v < n_; ++v) {
            if (!subset[v]) c.push_back(2 * static_cast<Lit>(v));
        }
        add(std::move(c));
    }

    /// A model maximal under inclusion, or none once the map is exhausted.
    std::optional<std::vector<std::uint8_t>> maximal_model() {
        if (unsat_ || !search()) {
            unsat_ = true;
            return std::nullopt;
        }
        std::vector<std::uint8_t> out(n_);
        for (std::size_t v = 0; v < n_; ++v) out[v] = value_[v] == 1 ? 1 : 0;
        backtrack(0);
        // select further edges while no blocked-up clause becomes violated
        for (std::size_t v = 0; v < n_; ++v) {
            if (out[v]) continue;
            const bool free = std::none_of(negative_of_[v].begin(), negative_of_[v].end(), [&](std::uint32_t c) {
                return std::all_of(negatives_[c].begin(), negatives_[c].end(),
                                   [&](Lit l) { return (l >> 1) == v || out[l >> 1]; });
            });
            if (free) out[v] = 1;
        }
        return out;
    }

private:
    using Lit = std::uint32_t;
    static constexpr std::uint8_t kUnset = 2;
    static constexpr std::uint32_t kNone = UINT32_MAX;

    bool lit_true(Lit l) const { return value_[l >> 1] == ((l & 1) ^ 1); }
    bool lit_false(Lit l) const { return value_[l >> 1] == (l & 1); }
    std::uint32_t level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

    void add(std::vector<Lit> c) {
        if (unsat_) return;
        backtrack(0);
        std::erase_if(c, [&](Lit l) { return lit_false(l); });
        if (std::any_of(c.begin(), c.end(), [&](Lit l) { return lit_true(l); })) return;
        if (c.empty()) {
            unsat_ = true;
        } else if (c.size() == 1) {
            enqueue(c[0], kNone);
            if (!propagate()) unsat_ = true;
        } else {
            attach(std::move(c));
        }
    }

    std::uint32_t attach(std::vector<Lit> c) {
        const auto id = static_cast<std::uint32_t>(clauses_.size());
        watches_[c[0]].push_back(id);
        watches_[c[1]].push_back(id);
        clauses_.push_back(std::move(c));
        return id;
    }

    void enqueue(Lit l, std::uint32_t reason) {
        const std::uint32_t v = l >> 1;
        value_[v] = static_cast<std::uint8_t>((l & 1) ^ 1);
        level_of_[v] = level();
        reason_[v] = reason;
        trail_.push_back(l);
    }

    bool propagate() {
        while (qhead_ < trail_.size()) {
            const Lit f = trail_[qhead_++] ^ 1;
            auto& ws = watches_[f];
            std::size_t keep = 0;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                const std::uint32_t id = ws[i];
                auto& c = clauses_[id];
                if (c[0] == f) std::swap(c[0], c[1]);
                if (lit_true(c[0])) {
                    ws[keep++] = id;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k) {
                    if (!lit_false(c[k])) {
                        std::swap(c[1], c[k]);
                        watches_[c[1]].push_back(id);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[keep++] = id;
                if (lit_false(c[0])) {
                    conflict_ = id;
                    for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
                    ws.resize(keep);
                    return false;
                }
                enqueue(c[0], id);
            }
            ws.resize(keep);
        }
        return true;
    }

    void analyze(std::vector<Lit>& learnt, std::uint32_t& back_level) {
        learnt.assign(1, 0);
        int path = 0;
        Lit p = kNone;
        std::size_t index = trail_.size();
        std::uint32_t clause = conflict_;
        for (;;) {
            for (Lit q : clauses_[clause]) {
                if (q == p) continue;
                const std::uint32_t v = q >> 1;
                if (seen_[v] || level_of_[v] == 0) continue;
                seen_[v] = 1;
                activity_[v] += var_inc_;
                if (level_of_[v] == level()) {
                    ++path;
                } else {
                    learnt.push_back(q);
                }
            }
            do {
                --index;
            } while (!seen_[trail_[index] >> 1]);
            p = trail_[index];
            seen_[p >> 1] = 0;
            if (--path == 0) break;
            clause = reason_[p >> 1];
        }
        learnt[0] = p ^ 1;
        back_level = 0;
        std::size_t at = 1;
        for (std::size_t i = 1; i < learnt.size(); ++i) {
            seen_[learnt[i] >> 1] = 0;
            if (level_of_[learnt[i] >> 1] > back_level) {
                back_level = level_of_[learnt[i] >> 1];
                at = i;
            }
        }
        if (learnt.size() > 1) std::swap(learnt[1], learnt[at]);
        var_inc_ /= 0.95;
        if (var_inc_ > 1e100) {
            for (auto& a : activity_) a *= 1e-100;
            var_inc_ *= 1e-100;
        }
    }

    void backtrack(std::uint32_t target) {
        if (level() <= target) return;
        const std::size_t stop = trail_lim_[target];
        for (std::size_t i = stop; i < trail_.size(); ++i) value_[trail_[i] >> 1] = kUnset;
        trail_.resize(stop);
        trail_lim_.resize(target);
        qhead_ = stop;
    }

    bool search() {
        std::vector<Lit> learnt;
        for (;;) {
            if (!propagate()) {
                if (level() == 0) return false;
                std::uint32_t back = 0;
                analyze(learnt, back);
                backtrack(back);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNone);
                } else {
                    enqueue(learnt[0], attach(learnt));
                }
                continue;
            }
            std::uint32_t best = kNone;
            for (std::uint32_t v = 0; v < n_; ++v) {
                if (value_[v] == kUnset && (best == kNone || activity_[v] > activity_[best])) best = v;
            }
            if (best == kNone) return true;
            trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
            enqueue(2 * best, kNone);
        }
    }

    std::size_t n_;
    bool unsat_ = false;
    std::vector<std::uint8_t> value_;
    std::vector<std::uint32_t> level_of_;
    std::vector<std::uint32_t> reason_;
    std::vector<Lit> trail_;
    std::vector<std::uint32_t> trail_lim_;
    std::size_t qhead_ = 0;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<std::uint32_t>> watches_;
    std::uint32_t conflict_ = kNone;
    std::vector<double> activity_;
    double var_inc_ = 1.0;
    std::vector<std::uint8_t> seen_;
    std::vector<std::vector<Lit>> negatives_;
    std::vector<std::vector<std::uint32_t>> negative_of_;
};

struct ClassBook {
    std::map<std::string, CriticalClass> by_form;
    std::map<std::vector<std::size_t>, std::string> seen;  // edge subset -> form

    // Returns true if the subset opened a new class.
    bool add(const Hypergraph& h, const std::vector<std::size_t>& edges, std::uint64_t weight) {
        auto it = seen.find(edges);
        if (it == seen.end()) {
            Hypergraph sub = h.subgraph(edges);
            it = seen.emplace(edges, canonical_form(sub)).first;
            auto [cls, fresh] = by_form.try_emplace(it->second);
            if (fresh) {
                cls->second.form = it->second;
                cls->second.k = sub.vertex_count();
                cls->second.m = sub.edge_count();
                cls->second.representative = std::move(sub);
            }
            cls->second.multiplicity += weight;
            return fresh;
        }
        by_form.at(it->second).multiplicity += weight;
        return false;
    }

    std::vector<CriticalClass> sorted() const {
        std::vector<CriticalClass> out;
        for (const auto& [form, cls] : by_form) out.push_back(cls);
        std::sort(out.begin(), out.end(), [](const CriticalClass& a, const CriticalClass& b) {
            return std::tie(a.m, a.k, a.form) < std::tie(b.m, b.k, b.form);
        });
        return out;
    }
};

CriticalReport exhaustive(const Hypergraph& h, const CriticalBudget& budget, std::uint64_t seed) {
    const auto start = Clock::now();
    CriticalReport report;
    report.mode = CriticalMode::exhaustive;
    report.seed = seed;

    ColoringSolver solver(h);
    require_ks(solver);
    const std::size_t m = h.edge_count();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);

    MapSolver map(m);
    ClassBook book;
    report.complete = true;
    for (;;) {
        if (budget.max_seconds && seconds_since(start) > *budget.max_seconds) {
            report.complete = false;
            break;
        }
        if (budget.max_results && report.subsets >= *budget.max_results) {
            report.complete = false;
            break;
        }
        auto model = map.maximal_model();
        if (!model) break;
        if (solver.solve(*model)) {
            map.block_down(*model);
            continue;
        }
        shrink(solver, *model, order);
        map.block_up(*model);
        ++report.subsets;
        book.add(h, active_indices(*model), 1);
    }
    report.classes = book.sorted();
    report.oracle_calls = solver.calls();
    report.seconds = seconds_since(start);
    return report;
}

CriticalReport stochastic(const Hypergraph& h, const CriticalBudget& budget, std::uint64_t seed) {
    const auto start = Clock::now();
    CriticalReport report;
    report.mode = CriticalMode::stochastic;
    report.seed = seed;
    report.complete = false;

    ColoringSolver probe(h);
    require_ks(probe);
    report.oracle_calls = probe.calls();

    const unsigned threads = resolve_threads(budget.threads);
    const std::size_t m = h.edge_count();
    const std::size_t chunk = std::max<std::size_t>(64, threads * 16);
    ClassBook book;
    for (std::size_t first = 0; first < budget.minimizations; first += chunk) {
        if (budget.max_seconds && seconds_since(start) > *budget.max_seconds) break;
        if (budget.max_results && book.by_form.size() >= *budget.max_results) break;
        const std::size_t count = std::min(chunk, budget.minimizations - first);
        std::vector<std::vector<std::size_t>> found(count);
        std::vector<std::uint64_t> used(count, 0);
        parallel_for(count, threads, [&](std::size_t i) {
            ColoringSolver solver(h);
            std::vector<std::size_t> order(m);
            std::iota(order.begin(), order.end(), 0);
            Rng rng(derive_seed(seed, first + i));
            rng.shuffle(std::span(order));
            std::vector<std::uint8_t> active(m, 1);
            shrink(solver, active, order);
            found[i] = active_indices(active);
            used[i] = solver.calls();
        });
        for (std::size_t i = 0; i < count; ++i) {
            book.add(h, found[i], 1);
            report.oracle_calls += used[i];
        }
        report.subsets += count;
    }
    report.classes = book.sorted();
    report.seconds = seconds_since(start);
    return report;
}

}  // namespace

bool is_critical(const Hypergraph& h) {
    ColoringSolver solver(h);
    if (solver.solve()) return false;
    std::vector<std::uint8_t> active(h.edge_count(), 1);
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
        active[e] = 0;
        const bool colorable = solver.solve(active).has_value();
        active[e] = 1;
        if (!colorable) return false;
    }
    return true;
}

Hypergraph minimize(const Hypergraph& h, std::uint64_t seed) {
    ColoringSolver solver(h);
    require_ks(solver);
    std::vector<std::size_t> order(h.edge_count());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span(order));
    std::vector<std::uint8_t> active(h.edge_count(), 1);
    shrink(solver, active, order);
    return h.subgraph(active_indices(active));
}

CriticalReport enumerate_criticals(const Hypergraph& h, CriticalMode mode, const CriticalBudget& budget,
                                   std::uint64_t seed) {
    return mode == CriticalMode::exhaustive ? exhaustive(h, budget, seed) : stochastic(h, budget, seed);
}

std::string to_string(CriticalMode mode) { return mode == CriticalMode::exhaustive ? "exhaustive" : "stochastic"; }

CriticalMode parse_critical_mode(const std::string& text) {
    if (text == "exhaustive") return CriticalMode::exhaustive;
    if (text == "stochastic") return CriticalMode::stochastic;
    throw std::invalid_argument("unknown criticals mode '" + text + "'");
}

// ---------------------------------------------------------------------------

namespace {

struct ClosedSearch {
    std::size_t k;
    std::size_t m;
    std::size_t words;
    std::vector<Bits> edge_bits;
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> skipped;

    static std::size_t count(const Bits& b) {
        std::size_t c = 0;
        for (auto w : b) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    static bool inside(const Bits& a, const Bits& b) {
        for (std::size_t w = 0; w < a.size(); ++w) {
            if (a[w] & ~b[w]) return false;
        }
        return true;
    }

    bool run(std::size_t e, const Bits& cover) {
        const std::size_t total = edge_bits.size();
        if (chosen.size() == m) {
            if (count(cover) != k) return false;
            for (std::size_t f = e; f < total; ++f) {
                if (inside(edge_bits[f], cover)) return false;
            }
            return std::none_of(skipped.begin(), skipped.end(), [&](std::size_t f) { return inside(edge_bits[f], cover); });
        }
        if (total - e < m - chosen.size()) return false;
        // skipped edges must stay outside the final cover, which only grows
        for (std::size_t f : skipped) {
            if (inside(edge_bits[f], cover)) return false;
        }
        Bits with = cover;
        for (std::size_t w = 0; w < words; ++w) with[w] |= edge_bits[e][w];
        if (count(with) <= k) {
            chosen.push_back(e);
            if (run(e + 1, with)) return true;
            chosen.pop_back();
        }
        if (skipped.size() < total - m) {
            skipped.push_back(e);
            if (run(e + 1, cover)) return true;
            skipped.pop_back();
        }
        return false;
    }
};

}  // namespace

std::optional<std::vector<std::size_t>> find_closed_subhypergraph(const Hypergraph& h, std::size_t k, std::size_t m) {
    if (m > h.edge_count() || m == 0) return std::nullopt;
    std::unordered_map<VertexLabel, std::size_t> index;
    for (VertexLabel v : h.vertices()) index.emplace(v, index.size());
    ClosedSearch search{k, m, (index.size() + 63) / 64, {}, {}, {}};
    for (const Edge& e : h.edges()) {
        Bits b(search.words, 0);
        for (VertexLabel v : e) set(b, index.at(v));
        search.edge_bits.push_back(std::move(b));
    }
    if (!search.run(0, Bits(search.words, 0))) return std::nullopt;
    return search.chosen;
}

}  // namespace ksm
