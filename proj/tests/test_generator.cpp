#include <doctest.h>

#include <array>
#include <bitset>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "ksmaster/colorability.hpp"
#include "ksmaster/generator.hpp"
#include "support.hpp"

using namespace ksm;

namespace {

void check_bases_orthogonal(const std::vector<Ray>& rays, const std::vector<Basis>& bases, unsigned n) {
    std::set<Basis> seen;
    for (const Basis& b : bases) {
        REQUIRE(b.size() == n);
        REQUIRE(std::is_sorted(b.begin(), b.end()));
        REQUIRE(seen.insert(b).second);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x + 1; y < n; ++y) REQUIRE(are_orthogonal(rays[b[x]], rays[b[y]]));
    }
    // two bases never share n-1 rays
    for (auto a = seen.begin(); a != seen.end(); ++a) {
        for (auto b = std::next(a); b != seen.end(); ++b) {
            std::vector<std::uint32_t> common;
            std::set_intersection(a->begin(), a->end(), b->begin(), b->end(), std::back_inserter(common));
            REQUIRE(common.size() <= n - 2);
        }
    }
}

/// Naive O(N^n) basis count for cross-checking the clique search.
std::size_t naive_basis_count(const std::vector<Ray>& rays, unsigned n) {
    std::size_t count = 0;
    std::vector<std::uint32_t> pick;
    auto rec = [&](auto&& self, std::uint32_t from) -> void {
        if (pick.size() == n) {
            ++count;
            return;
        }
        for (std::uint32_t r = from; r < rays.size(); ++r) {
            bool ok = true;
            for (auto p : pick) ok = ok && are_orthogonal(rays[p], rays[r]);
            if (!ok) continue;
            pick.push_back(r);
            self(self, r + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);
    return count;
}


// Floating-point oracle: rays over the given complex values, deduplicated by scaling the
// first nonzero entry to 1, and the number of orthogonal n-tuples among them.
std::pair<std::size_t, std::size_t> numeric_ray_and_basis_count(const std::vector<std::complex<double>>& values) {
    using C = std::complex<double>;
    std::vector<std::array<C, 4>> rays;
    auto same = [](const std::array<C, 4>& a, const std::array<C, 4>& b) {
        for (int i = 0; i < 4; ++i)
            if (std::abs(a[i] - b[i]) > 1e-9) return false;
        return true;
    };
    const std::size_t q = values.size();
    for (std::size_t code = 0; code < q * q * q * q; ++code) {
        std::array<C, 4> v;
        std::size_t c = code;
        for (auto& x : v) {
            x = values[c % q];
            c /= q;
        }
        int lead = 0;
        while (lead < 4 && std::abs(v[lead]) < 1e-12) ++lead;
        if (lead == 4) continue;
        const C s = v[lead];
        for (auto& x : v) x /= s;
        if (std::none_of(rays.begin(), rays.end(), [&](const auto& r) { return same(r, v); })) rays.push_back(v);
    }
    const std::size_t k = rays.size();
    std::vector<std::bitset<4096>> adj(k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            C dot = 0;
            for (int i = 0; i < 4; ++i) dot += std::conj(rays[a][i]) * rays[b][i];
            if (std::abs(dot) < 1e-9) adj[a].set(b);
        }
    }
    std::size_t bases = 0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            if (!adj[a][b]) continue;
            const auto common = adj[a] & adj[b];
            for (std::size_t c = b + 1; c < k; ++c)
                if (common[c]) bases += (common & adj[c]).count();
        }
    }
    return {k, bases};
}

}  // namespace

TEST_SUITE("generator") {

TEST_CASE("ray enumeration sizes") {
    const auto two = enumerate_rays(ComponentSet::parse("0,1"), 2);
    REQUIRE(two.size() == 3);
    CHECK(std::is_sorted(two.begin(), two.end()));
    CHECK(enumerate_rays(ComponentSet::parse("0,±1"), 4).size() == 40);
    CHECK(enumerate_rays(ComponentSet::parse("0,±1,±i"), 4).size() == 156);
}

TEST_CASE("projective dedup merges scalar multiples outside the component set") {
    // oracle: a std::set of canonical rays over all 26 nonzero tuples; (1,1,0) and (w,w,0) collapse
    std::set<Ray> expected;
    const auto comps = ComponentSet::parse("0,1,w");
    for (const auto& a : comps.values())
        for (const auto& b : comps.values())
            for (const auto& c : comps.values())
                if (!(a.is_zero() && b.is_zero() && c.is_zero())) expected.insert(Ray(Vector{a, b, c}));
    CHECK(enumerate_rays(comps, 3).size() == expected.size());
}

TEST_CASE("basis enumeration") {
    const auto r2 = enumerate_rays(ComponentSet::parse("0,1"), 2);
    const auto b2 = enumerate_bases(r2, 2);
    REQUIRE(b2.size() == 1);
    CHECK(r2[b2[0][0]] == Ray(fixtures::parse_vector("1,0")));
    CHECK(r2[b2[0][1]] == Ray(fixtures::parse_vector("0,1")));

    const auto r40 = enumerate_rays(ComponentSet::parse("0,±1"), 4);
    const auto b40 = enumerate_bases(r40, 4);
    CHECK(b40.size() == 32);
    CHECK(naive_basis_count(r40, 4) == 32);
    check_bases_orthogonal(r40, b40, 4);

    const auto r156 = enumerate_rays(ComponentSet::parse("0,±1,±i"), 4);
    const auto b156 = enumerate_bases(r156, 4);
    CHECK(b156.size() == 249);
    check_bases_orthogonal(r156, b156, 4);
}

TEST_CASE("basis enumeration is independent of the thread count") {
    const auto rays = enumerate_rays(ComponentSet::parse("0,±1,±i"), 4);
    const auto one = enumerate_bases(OrthogonalityGraph(rays, 1), 4, {1, {}, {}});
    const auto four = enumerate_bases(OrthogonalityGraph(rays, 4), 4, {4, {}, {}});
    CHECK(one == four);
}

TEST_CASE("checkpoints resume to the same result") {
    const auto rays = enumerate_rays(ComponentSet::parse("0,±1,±i"), 4);
    const auto reference = enumerate_bases(rays, 4);
    const auto path = (std::filesystem::temp_directory_path() / "ksm_checkpoint_test.txt").string();
    std::filesystem::remove(path);
    BasisSearchOptions options;
    options.checkpoint = path;
    CHECK(enumerate_bases(rays, 4, options) == reference);
    // cut the journal in the middle of a block and resume
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    in.close();
    REQUIRE(lines.size() > 10);
    {
        std::ofstream out(path, std::ios::trunc);
        for (std::size_t i = 0; i < lines.size() / 2; ++i) out << lines[i] << '\n';
    }
    CHECK(enumerate_bases(rays, 4, options) == reference);
    CHECK(enumerate_bases(rays, 4, options) == reference);
    // a journal for another ray set is refused
    const auto other = enumerate_rays(ComponentSet::parse("0,±1"), 4);
    CHECK_THROWS(enumerate_bases(other, 4, options));
    std::filesystem::remove(path);
}

TEST_CASE("the {0,±1} master") {
    const auto parts = assemble_master(ComponentSet::parse("0,±1"), 4);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].hypergraph.size_class() == "40-32");
    CHECK(parts[0].ks);
    CHECK(parts[0].coordinatization.size() == 40);
    for (const Edge& e : parts[0].hypergraph.edges())
        for (auto a : e)
            for (auto b : e)
                if (a != b) CHECK(are_orthogonal(parts[0].coordinatization.at(a), parts[0].coordinatization.at(b)));

    const MasterBuild build = build_master(ComponentSet::parse("0,±1"), 4);
    std::multiset<std::string> classes;
    for (const auto& p : build.parts) classes.insert(p.hypergraph.size_class() + (p.ks ? " ks" : ""));
    CHECK(classes == std::multiset<std::string>{"24-24 ks", "16-8"});
}

TEST_CASE("the {0,±1,±i} master") {
    const auto parts = assemble_master(ComponentSet::parse("0,±1,±i"), 4);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].hypergraph.size_class() == "156-249");
    CHECK(parts[0].ks);
}

TEST_CASE("feature (i): components without opposite-sign pairs give no KS master") {
    for (const char* comps : {"0,1", "0,1,-2,3", "0,1,-2,3,4,5"}) {
        const auto parts = assemble_master(ComponentSet::parse(comps), 4);
        for (const auto& p : parts) CHECK_FALSE(p.ks);
    }
}

TEST_CASE("masters are deterministic across thread counts") {
    const auto comps = ComponentSet::parse("0,±1,w");
    const MasterBuild one = build_master(comps, 4, {1, {}, {}});
    const MasterBuild three = build_master(comps, 4, {3, {}, {}});
    CHECK(serialize(one.master.hypergraph, one.master.coordinatization) ==
          serialize(three.master.hypergraph, three.master.coordinatization));
}

TEST_CASE("split components") {
    const auto two = split_components(fixtures::hg("1234,5678."));
    REQUIRE(two.size() == 2);
    CHECK(two[0].size_class() == "4-1");
    CHECK(two[1].size_class() == "4-1");
    CHECK(split_components(fixtures::hg(fixtures::kLine18_9)).size() == 1);

    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Hypergraph h = fixtures::random_hypergraph(rng, 4, 1 + rng.below(10), 30);
        std::multiset<std::vector<VertexLabel>> before(h.edges().begin(), h.edges().end()), after;
        for (const auto& part : split_components(h)) after.insert(part.edges().begin(), part.edges().end());
        CHECK(before == after);
    }
}

TEST_CASE("basis hypergraph of a ray list") {
    const auto rays = enumerate_rays(ComponentSet::parse("0,±1"), 4);
    const auto [h, c] = basis_hypergraph(rays, 4);
    CHECK(h.size_class() == "40-32");
    CHECK(c.size() == 40);
    CHECK_THROWS(build_master(ComponentSet::parse("0,1"), 2));
}

TEST_CASE("ray and basis counts agree with a floating-point enumeration") {
    using C = std::complex<double>;
    const double pi = std::acos(-1.0);
    const C w = std::polar(1.0, 2 * pi / 3);
    const std::vector<C> real_cube_roots = {0.0, 1.0, -1.0, w, -w, w * w, -w * w};
    std::vector<C> with_i = real_cube_roots;
    with_i.push_back(C(0, 1));
    with_i.push_back(C(0, -1));

    const MasterBuild a = build_master(ComponentSet::parse("0,±1,±w,±w2"), 4);
    const auto [ka, ma] = numeric_ray_and_basis_count(real_cube_roots);
    CHECK(a.rays.size() == ka);
    CHECK(a.bases.size() == ma);
    CHECK(a.master.hypergraph.size_class() == "400-1012");

    const MasterBuild b = build_master(ComponentSet::parse("0,±1,±i,±w,±w2"), 4);
    const auto [kb, mb] = numeric_ray_and_basis_count(with_i);
    CHECK(b.rays.size() == kb);
    CHECK(b.bases.size() == mb);
    CHECK(b.master.hypergraph.size_class() == "2092-9313");
}

}
