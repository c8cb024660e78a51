#include <doctest.h>

#include <chrono>

#include "ksmaster/coordinatizer.hpp"
#include "ksmaster/generator.hpp"
#include "support.hpp"

using namespace ksm;

TEST_SUITE("coordinatizer") {

TEST_CASE("verify_coordinatization") {
    const ParsedLine p = parse_line(fixtures::kLine18_9);
    CHECK(verify_coordinatization(p.hypergraph, *p.coordinatization));

    Coordinatization dup = *p.coordinatization;
    dup[0] = dup.at(1);
    CHECK_FALSE(verify_coordinatization(p.hypergraph, dup));

    Coordinatization missing = *p.coordinatization;
    missing.erase(0);
    CHECK_THROWS(verify_coordinatization(p.hypergraph, missing));

    const ParsedLine e = parse_line("1234. {1={1,0,0,0},2={0,1,0,0},3={0,0,1,0},4={0,0,0,1}}.");
    CHECK(verify_coordinatization(e.hypergraph, *e.coordinatization));
    const ParsedLine bad = parse_line("1234. {1={1,0,0,0},2={1,1,0,0},3={0,0,1,0},4={0,0,0,1}}.");
    CHECK_FALSE(verify_coordinatization(bad.hypergraph, *bad.coordinatization));
}

TEST_CASE("18-9 over {0,±1}") {
    const Hypergraph h = fixtures::hg(fixtures::kLine18_9);
    const auto start = std::chrono::steady_clock::now();
    const auto c = find_coordinatization(h, ComponentSet::parse("0,±1"));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(c);
    CHECK(verify_coordinatization(h, *c));
    CHECK(seconds < 1.0);
}

TEST_CASE("a single edge over {0,1} gets the standard basis") {
    const Hypergraph h = fixtures::hg("1234.");
    const auto c = find_coordinatization(h, ComponentSet::parse("0,1"));
    REQUIRE(c);
    CHECK(verify_coordinatization(h, *c));
    std::set<Ray> rays;
    for (const auto& [v, vec] : *c) rays.insert(Ray(vec));
    std::set<Ray> standard;
    for (const char* s : {"1,0,0,0", "0,1,0,0", "0,0,1,0", "0,0,0,1"}) standard.insert(Ray(fixtures::parse_vector(s)));
    CHECK(rays == standard);
}

TEST_CASE("the 6-3 has no coordinatization over {0,±1}") {
    const auto r = search_coordinatization(fixtures::hg(fixtures::kLine6_3), ComponentSet::parse("0,±1"));
    CHECK(r.complete);
    CHECK_FALSE(r.coordinatization);
}

TEST_CASE("budgets report incomplete searches") {
    CoordinatizeOptions options;
    options.max_nodes = 5;
    const auto r = search_coordinatization(fixtures::hg(fixtures::kLine6_3), ComponentSet::parse("0,±1,±i"), options);
    CHECK_FALSE(r.complete);
    CHECK_FALSE(r.coordinatization);
}

TEST_CASE("every connected master component is coordinatizable over its components") {
    const auto comps = ComponentSet::parse("0,±1");
    for (const auto& part : build_master(comps, 4).parts) {
        const auto c = find_coordinatization(part.hypergraph, comps);
        REQUIRE(c);
        CHECK(verify_coordinatization(part.hypergraph, *c));
        CHECK(verify_coordinatization(part.hypergraph, part.coordinatization));
    }
}

}
