#include "ksmaster/colorability.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "ksmaster/random.hpp"

namespace ksm {

namespace {

std::uint64_t luby(std::uint64_t i) {
    // i-th term (1-based) of 1,1,2,1,1,2,4,...
    std::uint64_t size = 1;
    std::uint64_t seq = 0;
    while (size < i + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    std::uint64_t x = i;
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::uint64_t{1} << seq;
}

}  // namespace

ColoringSolver::ColoringSolver(const Hypergraph& h)
    : width_(h.dimension()), edge_count_(h.edge_count()), labels_(h.vertices()) {
    std::unordered_map<VertexLabel, std::uint32_t> index;
    for (std::uint32_t i = 0; i < labels_.size(); ++i) index.emplace(labels_[i], i);
    vertex_edges_.resize(labels_.size());
    edge_vertices_.reserve(edge_count_ * width_);
    for (std::size_t e = 0; e < edge_count_; ++e) {
        for (VertexLabel v : h.edges()[e]) {
            const std::uint32_t c = index.at(v);
            edge_vertices_.push_back(c);
            vertex_edges_[c].push_back(static_cast<std::uint32_t>(e));
        }
    }
    const std::size_t nv = labels_.size();
    all_active_.assign(edge_count_, 1);
    value_.assign(nv, kUnset);
    phase_.assign(nv, 1);
    level_of_.assign(nv, 0);
    reason_.assign(nv, Reason{});
    watches_.resize(2 * nv);
    activity_.assign(nv, 0.0);
    heap_pos_.assign(nv, kNone);
    seen_.assign(nv, 0);
    core_words_ = (edge_count_ + 63) / 64;
}

void ColoringSolver::randomize(std::uint64_t seed) { random_seed_ = seed; }

std::optional<std::vector<std::uint8_t>> ColoringSolver::solve() { return solve(all_active_); }

std::optional<std::vector<std::uint8_t>> ColoringSolver::solve(std::span<const std::uint8_t> active, bool track_core) {
    ++calls_;
    track_core_ = track_core;
    core_.clear();
    reset(active);
    if (!search()) {
        if (track_core_) finish_core();
        return std::nullopt;
    }
    std::vector<std::uint8_t> out(value_.size());
    for (std::size_t v = 0; v < value_.size(); ++v) out[v] = value_[v] == 1 ? 1 : 0;
    return out;
}

void ColoringSolver::reset(std::span<const std::uint8_t> active) {
    active_ = active;
    const std::size_t nv = value_.size();
    std::fill(value_.begin(), value_.end(), kUnset);
    std::fill(phase_.begin(), phase_.end(), 1);
    std::fill(reason_.begin(), reason_.end(), Reason{});
    std::fill(activity_.begin(), activity_.end(), 0.0);
    var_inc_ = 1.0;
    trail_.clear();
    trail_lim_.clear();
    qhead_ = 0;
    pool_.clear();
    clauses_.clear();
    clause_core_.clear();
    if (track_core_) {
        var_core_.assign(nv * core_words_, 0);
        acc_.assign(core_words_, 0);
    }
    for (auto& w : watches_) w.clear();

    if (random_seed_) {
        Rng rng(derive_seed(*random_seed_, calls_));
        for (auto& a : activity_) a = static_cast<double>(rng.below(1u << 20)) * 1e-9;
    }

    std::vector<std::uint8_t> live(nv, 0);
    std::vector<Lit> lits(width_);
    std::vector<std::uint64_t> single(core_words_, 0);
    for (std::size_t e = 0; e < edge_count_; ++e) {
        if (!active_[e]) continue;
        const auto members = edge(e);
        for (std::size_t t = 0; t < width_; ++t) {
            lits[t] = 2 * members[t];
            live[members[t]] = 1;
        }
        single[e / 64] = std::uint64_t{1} << (e % 64);
        add_clause(lits, single.data());
        single[e / 64] = 0;
    }
    if (track_core_) {
        for (std::size_t k = 0; k < kept_.size(); ++k) {
            const std::uint64_t* core = kept_cores_.data() + k * core_words_;
            bool covered = true;
            for (std::size_t w = 0; w < core_words_ && covered; ++w) {
                for (std::uint64_t bits = core[w]; bits; bits &= bits - 1) {
                    if (!active_[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))]) {
                        covered = false;
                        break;
                    }
                }
            }
            if (covered) add_clause(std::span(kept_lits_).subspan(kept_[k].start, kept_[k].size), core);
        }
    }

    heap_.clear();
    std::fill(heap_pos_.begin(), heap_pos_.end(), kNone);
    for (std::uint32_t v = 0; v < nv; ++v) {
        if (live[v]) {
            heap_insert(v);
        } else {
            value_[v] = 0;  // in no active edge: fixed without reason at level 0
            level_of_[v] = 0;
        }
    }
}

std::uint32_t ColoringSolver::add_clause(std::span<const Lit> lits, const std::uint64_t* edges) {
    const auto id = static_cast<std::uint32_t>(clauses_.size());
    if (track_core_) clause_core_.insert(clause_core_.end(), edges, edges + core_words_);
    clauses_.push_back({static_cast<std::uint32_t>(pool_.size()), static_cast<std::uint32_t>(lits.size())});
    pool_.insert(pool_.end(), lits.begin(), lits.end());
    watches_[lits[0]].push_back(id);
    watches_[lits[1]].push_back(id);
    return id;
}

void ColoringSolver::enqueue(Lit l, Reason r) {
    const std::uint32_t v = l >> 1;
    value_[v] = static_cast<std::uint8_t>((l & 1) ^ 1);
    level_of_[v] = level();
    reason_[v] = r;
    trail_.push_back(l);
    if (track_core_ && trail_lim_.empty() && (r.clause != kNone || r.other != kNone)) {
        std::uint64_t* core = var_core(v);
        std::fill(core, core + core_words_, 0);
        add_reason_core(core, r);
        if (r.other != kNone) {
            merge(core, var_core(r.other >> 1));
        } else {
            const Clause& c = clauses_[r.clause];
            for (std::uint32_t i = 0; i < c.size; ++i) {
                const std::uint32_t u = pool_[c.start + i] >> 1;
                if (u != v) merge(core, var_core(u));
            }
        }
    }
}

void ColoringSolver::keep(std::span<const Lit> learnt) {
    constexpr std::size_t kLimit = 20000;
    if (kept_.size() >= kLimit) {
        // drop the older half
        const std::size_t drop = kLimit / 2;
        const std::uint32_t shift = kept_[drop].start;
        kept_lits_.erase(kept_lits_.begin(), kept_lits_.begin() + shift);
        kept_cores_.erase(kept_cores_.begin(), kept_cores_.begin() + static_cast<std::ptrdiff_t>(drop * core_words_));
        kept_.erase(kept_.begin(), kept_.begin() + static_cast<std::ptrdiff_t>(drop));
        for (auto& c : kept_) c.start -= shift;
    }
    kept_.push_back({static_cast<std::uint32_t>(kept_lits_.size()), static_cast<std::uint32_t>(learnt.size())});
    kept_lits_.insert(kept_lits_.end(), learnt.begin(), learnt.end());
    kept_cores_.insert(kept_cores_.end(), acc_.begin(), acc_.end());
}

void ColoringSolver::merge(std::uint64_t* acc, const std::uint64_t* more) const {
    for (std::size_t w = 0; w < core_words_; ++w) acc[w] |= more[w];
}

void ColoringSolver::add_reason_core(std::uint64_t* acc, const Reason& r) const {
    if (r.other != kNone) {
        acc[r.edge / 64] |= std::uint64_t{1} << (r.edge % 64);
    } else {
        merge(acc, clause_core(r.clause));
    }
}

void ColoringSolver::finish_core() {
    std::fill(acc_.begin(), acc_.end(), 0);
    add_reason_core(acc_.data(), conflict_reason_);
    for (Lit l : conflict_) merge(acc_.data(), var_core(l >> 1));
    for (std::size_t w = 0; w < core_words_; ++w) {
        for (std::uint64_t bits = acc_[w]; bits; bits &= bits - 1) {
            core_.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
        }
    }
}

bool ColoringSolver::propagate() {
    while (qhead_ < trail_.size()) {
        const Lit p = trail_[qhead_++];
        const std::uint32_t x = p >> 1;
        if ((p & 1) == 0) {
            // x = 1: every co-edge vertex is 0
            for (std::uint32_t e : vertex_edges_[x]) {
                if (!active_[e]) continue;
                for (std::uint32_t y : edge(e)) {
                    if (y == x) continue;
                    if (value_[y] == 1) {
                        conflict_ = {2 * x + 1, 2 * y + 1};
                        conflict_reason_ = Reason{kNone, 2 * x + 1, e};
                        return false;
                    }
                    if (value_[y] == kUnset) enqueue(2 * y + 1, Reason{kNone, 2 * x + 1, e});
                }
            }
        }
        // clauses watching the literal that just became false
        const Lit f = p ^ 1;
        auto& ws = watches_[f];
        std::size_t keep = 0;
        for (std::size_t i = 0; i < ws.size(); ++i) {
            const std::uint32_t c = ws[i];
            Lit* lits = pool_.data() + clauses_[c].start;
            const std::uint32_t size = clauses_[c].size;
            if (lits[0] == f) std::swap(lits[0], lits[1]);
            if (lit_true(lits[0])) {
                ws[keep++] = c;
                continue;
            }
            bool moved = false;
            for (std::uint32_t k = 2; k < size; ++k) {
                if (!lit_false(lits[k])) {
                    std::swap(lits[1], lits[k]);
                    watches_[lits[1]].push_back(c);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[keep++] = c;
            if (lit_false(lits[0])) {
                conflict_.assign(lits, lits + size);
                conflict_reason_ = Reason{c, kNone, kNone};
                for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
                ws.resize(keep);
                return false;
            }
            enqueue(lits[0], Reason{c, kNone});
        }
        ws.resize(keep);
    }
    return true;
}

void ColoringSolver::analyze(std::vector<Lit>& learnt, std::uint32_t& back_level) {
    learnt.assign(1, 0);
    int path = 0;
    Lit p = kNone;
    std::size_t index = trail_.size();
    Lit skip = kNone;  // the implied literal inside its own reason clause
    std::vector<Lit> reason_lits = conflict_;
    if (track_core_) {
        std::fill(acc_.begin(), acc_.end(), 0);
        add_reason_core(acc_.data(), conflict_reason_);
    }
    for (;;) {
        for (Lit q : reason_lits) {
            if (q == skip) continue;
            const std::uint32_t v = q >> 1;
            if (track_core_ && level_of_[v] == 0 && !seen_[v]) merge(acc_.data(), var_core(v));
            if (seen_[v] || level_of_[v] == 0) continue;
            seen_[v] = 1;
            bump(v);
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
        skip = p;
        const Reason& r = reason_[p >> 1];
        if (track_core_) add_reason_core(acc_.data(), r);
        if (r.other != kNone) {
            reason_lits.assign(1, r.other);
        } else {
            const Clause& c = clauses_[r.clause];
            reason_lits.assign(pool_.begin() + c.start, pool_.begin() + c.start + c.size);
        }
    }
    learnt[0] = p ^ 1;
    back_level = 0;
    std::size_t at = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
        const std::uint32_t lv = level_of_[learnt[i] >> 1];
        if (lv > back_level) {
            back_level = lv;
            at = i;
        }
    }
    if (learnt.size() > 1) std::swap(learnt[1], learnt[at]);
    for (std::size_t i = 1; i < learnt.size(); ++i) seen_[learnt[i] >> 1] = 0;
    var_inc_ /= 0.95;
}

void ColoringSolver::backtrack(std::uint32_t target) {
    if (level() <= target) return;
    const std::size_t stop = trail_lim_[target];
    for (std::size_t i = trail_.size(); i-- > stop;) {
        const std::uint32_t v = trail_[i] >> 1;
        phase_[v] = value_[v];
        value_[v] = kUnset;
        reason_[v] = Reason{};
        if (heap_pos_[v] == kNone) heap_insert(v);
    }
    trail_.resize(stop);
    trail_lim_.resize(target);
    qhead_ = stop;
}

void ColoringSolver::bump(std::uint32_t v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (auto& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] != kNone) heap_up(heap_pos_[v]);
}

std::uint32_t ColoringSolver::pick_branch() {
    while (!heap_.empty()) {
        const std::uint32_t v = heap_pop();
        if (value_[v] == kUnset) return v;
    }
    return kNone;
}

bool ColoringSolver::search() {
    std::vector<Lit> learnt;
    std::uint64_t restart = 0;
    std::uint64_t budget = 64 * luby(restart);
    std::uint64_t since = 0;
    for (;;) {
        if (!propagate()) {
            ++conflicts_;
            ++since;
            if (level() == 0) return false;
            std::uint32_t back = 0;
            analyze(learnt, back);
            backtrack(back);
            if (learnt.size() == 1) {
                enqueue(learnt[0], Reason{});
                if (track_core_) std::copy(acc_.begin(), acc_.end(), var_core(learnt[0] >> 1));
            } else {
                const std::uint32_t c = add_clause(learnt, acc_.data());
                if (track_core_) keep(learnt);
                enqueue(learnt[0], Reason{c, kNone, kNone});
            }
            continue;
        }
        if (since >= budget) {
            since = 0;
            budget = 64 * luby(++restart);
            backtrack(0);
            continue;
        }
        const std::uint32_t v = pick_branch();
        if (v == kNone) return true;
        ++decisions_;
        trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
        enqueue(2 * v + (phase_[v] ? 0 : 1), Reason{});
    }
}

void ColoringSolver::heap_insert(std::uint32_t v) {
    heap_pos_[v] = static_cast<std::uint32_t>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
}

std::uint32_t ColoringSolver::heap_pop() {
    const std::uint32_t top = heap_[0];
    heap_pos_[top] = kNone;
    const std::uint32_t last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heap_pos_[last] = 0;
        heap_down(0);
    }
    return top;
}

// Max-heap on activity, ties to the lower vertex index for determinism.
void ColoringSolver::heap_up(std::size_t i) {
    const std::uint32_t v = heap_[i];
    auto before = [&](std::uint32_t a, std::uint32_t b) {
        return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
    };
    while (i > 0) {
        const std::size_t parent = (i - 1) / 2;
        if (!before(v, heap_[parent])) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = static_cast<std::uint32_t>(i);
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<std::uint32_t>(i);
}

void ColoringSolver::heap_down(std::size_t i) {
    const std::uint32_t v = heap_[i];
    auto before = [&](std::uint32_t a, std::uint32_t b) {
        return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
    };
    for (;;) {
        std::size_t child = 2 * i + 1;
        if (child >= heap_.size()) break;
        if (child + 1 < heap_.size() && before(heap_[child + 1], heap_[child])) ++child;
        if (!before(heap_[child], v)) break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = static_cast<std::uint32_t>(i);
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<std::uint32_t>(i);
}

std::optional<Assignment> find_assignment(const Hypergraph& h) {
    ColoringSolver solver(h);
    auto values = solver.solve();
    if (!values) return std::nullopt;
    Assignment a;
    for (std::size_t v = 0; v < values->size(); ++v) a.emplace(solver.labels()[v], (*values)[v] != 0);
    return a;
}

bool is_ks(const Hypergraph& h) {
    ColoringSolver solver(h);
    return !solver.solve().has_value();
}

bool verify_assignment(const Hypergraph& h, const Assignment& a) {
    for (VertexLabel v : h.vertices()) {
        if (!a.count(v)) throw std::invalid_argument("assignment misses vertex " + render_label(v));
    }
    return std::all_of(h.edges().begin(), h.edges().end(), [&](const Edge& e) {
        return std::count_if(e.begin(), e.end(), [&](VertexLabel v) { return a.at(v); }) == 1;
    });
}

}  // namespace ksm
