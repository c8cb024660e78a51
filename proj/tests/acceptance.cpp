// End-to-end acceptance run: one PASS/FAIL line per criterion, with timings.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ksmaster/blueprint.hpp"
#include "ksmaster/canon.hpp"
#include "ksmaster/colorability.hpp"
#include "ksmaster/coordinatizer.hpp"
#include "ksmaster/criticals.hpp"
#include "ksmaster/generator.hpp"
#include "support.hpp"

using namespace ksm;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Options {
    unsigned jobs = 0;
    std::size_t minimizations = 10000;
    double exhaustive_seconds = 120;
    std::string expect_fail;
    std::string report;
    std::set<int> only;
};

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.precision(s < 10 ? 3 : 1);
    out << std::fixed << s << " s";
    return out.str();
}

const MasterComponent* single_ks(const std::vector<MasterComponent>& parts, std::string& detail) {
    const MasterComponent* found = nullptr;
    int ks = 0;
    for (const auto& p : parts) {
        detail += (detail.empty() ? "" : ", ") + p.hypergraph.size_class() + (p.ks ? " KS" : " non-KS");
        if (p.ks) {
            ++ks;
            found = &p;
        }
    }
    return ks == 1 ? found : nullptr;
}

Outcome master_criterion(const char* comps, unsigned dim, const std::string& expected, double limit) {
    const auto start = Clock::now();
    const auto parts = assemble_master(ComponentSet::parse(comps), dim);
    const double t = since(start);
    Outcome o;
    const MasterComponent* m = single_ks(parts, o.detail);
    o.pass = m && m->hypergraph.size_class() == expected && t < limit;
    o.detail = "{" + std::string(comps) + "} " + std::to_string(dim) + "D -> " + o.detail + "; expected " + expected +
               " KS; " + fmt_seconds(t);
    return o;
}

std::string class_list(const CriticalReport& r) {
    std::string out;
    if (r.classes.size() <= 12) {
        for (const auto& c : r.classes) {
            out += (out.empty() ? "" : " ") + std::to_string(c.k) + "-" + std::to_string(c.m) + "x" +
                   std::to_string(c.multiplicity);
        }
        return out;
    }
    // many classes: count them per size, in report order
    std::vector<std::pair<std::string, int>> sizes;
    for (const auto& c : r.classes) {
        const std::string size = std::to_string(c.k) + "-" + std::to_string(c.m);
        if (sizes.empty() || sizes.back().first != size) sizes.emplace_back(size, 0);
        ++sizes.back().second;
    }
    const std::size_t shown = std::min<std::size_t>(sizes.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
        out += (out.empty() ? "" : " ") + sizes[i].first;
        if (sizes[i].second > 1) out += "(" + std::to_string(sizes[i].second) + " classes)";
    }
    if (shown < sizes.size()) out += " ... " + std::to_string(sizes.size() - shown) + " more sizes up to " + sizes.back().first;
    return out;
}

Outcome criterion3() {
    Outcome o = master_criterion("0,±1,±i,±w,±w2", 4, "400-1012", 600);
    // the same size appears for the set without ±i
    const auto alt = assemble_master(ComponentSet::parse("0,±1,±w,±w2"), 4);
    if (!alt.empty()) o.detail += "; note: {0,±1,±w,±w2} gives " + alt[0].hypergraph.size_class() + (alt[0].ks ? " KS" : "");
    return o;
}

Outcome criterion4(const Options& opt) {
    const auto start = Clock::now();
    const auto parts = assemble_master(ComponentSet::parse("0,±1,w"), 4);
    const double t_master = since(start);
    Outcome o;
    const MasterComponent* m = single_ks(parts, o.detail);
    if (!m || m->hypergraph.size_class() != "180-203") {
        o.detail = "master: " + o.detail;
        return o;
    }
    CriticalBudget budget;
    budget.minimizations = 2000;
    budget.threads = opt.jobs;
    const CriticalReport r = enumerate_criticals(m->hypergraph, CriticalMode::stochastic, budget, 1);
    bool has18 = false, has11 = false;
    for (const auto& c : r.classes) {
        has18 = has18 || (c.k == 18 && c.m == 9);
        has11 = has11 || (c.m == 11 && c.k >= 20 && c.k <= 22);
    }
    const double t = since(start);
    o.pass = has18 && has11 && t_master < 300;
    o.detail = "180-203 KS in " + fmt_seconds(t_master) + "; 2000 minimizations: " + class_list(r) + "; " + fmt_seconds(t);
    return o;
}

Outcome criterion6() {
    const auto start = Clock::now();
    const auto master = assemble_master(ComponentSet::parse("0,±1"), 4).at(0).hypergraph;
    const CriticalReport r = enumerate_criticals(master, CriticalMode::exhaustive);
    const double t = since(start);
    Outcome o;
    o.pass = r.complete && r.classes.size() == 6 && r.classes.front().k == 18 && r.classes.front().m == 9 && t < 1800;
    o.detail = std::string(r.complete ? "complete" : "INCOMPLETE") + ", " + std::to_string(r.subsets) + " subsets in " +
               std::to_string(r.classes.size()) + " classes: " + class_list(r) + "; " + fmt_seconds(t);
    return o;
}

Outcome criterion7(const Options& opt) {
    const auto start = Clock::now();
    const auto master = assemble_master(ComponentSet::parse("0,1,w"), 6).at(0).hypergraph;
    CriticalBudget budget;
    budget.minimizations = opt.minimizations;
    budget.threads = opt.jobs;
    const CriticalReport r = enumerate_criticals(master, CriticalMode::stochastic, budget, 1);
    std::set<std::string> found;
    for (const auto& c : r.classes) found.insert(std::to_string(c.k) + "-" + std::to_string(c.m));
    const std::set<std::string> expected{"21-7", "27-9", "33-11"};
    bool all_critical = true;
    for (const auto& c : r.classes) all_critical = all_critical && is_critical(c.representative);
    const double t_stochastic = since(start);

    CriticalBudget exhaustive;
    exhaustive.max_seconds = opt.exhaustive_seconds;
    const CriticalReport e = enumerate_criticals(master, CriticalMode::exhaustive, exhaustive);

    Outcome o;
    o.pass = found == expected && all_critical && (!e.complete || e.classes.size() == 3);
    o.detail = std::to_string(r.subsets) + " minimizations found " + std::to_string(r.classes.size()) + " classes (" +
               (all_critical ? "all re-verified critical" : "NOT ALL CRITICAL") + "): " + class_list(r) + " [" +
               fmt_seconds(t_stochastic) + "]; exhaustive attempt (" + fmt_seconds(opt.exhaustive_seconds) +
               " budget): complete=" + (e.complete ? "true" : "false") + ", " + std::to_string(e.subsets) +
               " subsets, " + std::to_string(e.classes.size()) + " classes";
    return o;
}

Outcome criterion8() {
    const auto start = Clock::now();
    const ParsedLine p = parse_line(fixtures::kLine18_9);
    const bool listed = verify_coordinatization(p.hypergraph, *p.coordinatization);
    const bool ks = is_ks(p.hypergraph);
    const bool critical = is_critical(p.hypergraph);
    const auto t0 = Clock::now();
    const auto c = find_coordinatization(p.hypergraph, ComponentSet::parse("0,±1"));
    const double t_find = since(t0);
    const bool found = c && verify_coordinatization(p.hypergraph, *c);
    Outcome o;
    o.pass = p.hypergraph.size_class() == "18-9" && listed && ks && critical && found && t_find < 1.0;
    o.detail = "parsed " + p.hypergraph.size_class() + ", listed vectors " + (listed ? "verify" : "FAIL") + ", KS " +
               (ks ? "yes" : "no") + ", critical " + (critical ? "yes" : "no") + ", coordinatization over {0,±1} " +
               (found ? "found" : "NOT found") + " in " + fmt_seconds(t_find) + "; total " + fmt_seconds(since(start));
    return o;
}

Outcome criterion9() {
    const auto start = Clock::now();
    const Hypergraph h = fixtures::hg(fixtures::kLine6_3);
    const bool ks = is_ks(h);
    const bool critical = is_critical(h);
    const auto r = search_coordinatization(h, ComponentSet::parse("0,±1,±i,w,w2,-w,-w2"));
    const double t = since(start);
    Outcome o;
    o.pass = ks && critical && r.complete && !r.coordinatization && t < 60;
    o.detail = std::string("KS ") + (ks ? "yes" : "no") + ", critical " + (critical ? "yes" : "no") +
               ", coordinatization over {0,±1,±i,w,w2,-w,-w2}: " +
               (r.coordinatization ? "FOUND" : (r.complete ? "none (exhaustive)" : "unknown (budget)")) + ", " +
               std::to_string(r.nodes) + " nodes over " + std::to_string(r.candidate_rays) + " rays; " + fmt_seconds(t);
    return o;
}

Outcome criterion10() {
    const auto start = Clock::now();
    int matched = 0, identity = 0;
    std::vector<Ray> rays;
    std::string mismatches;
    for (const auto& a : fixtures::appendix()) {
        const Vector v = fixtures::parse_vector(a.vector);
        rays.push_back(Ray(v));
        BlueprintExpr published;
        for (std::size_t t = 0; t < a.first.size(); ++t) published.terms.push_back({a.negative[t], a.first[t], a.second[t]});
        const auto e = decompose(v);
        if (!e) {
            mismatches += " " + a.label + "(none)";
            continue;
        }
        identity += evaluate(*e) == Ray(v);
        if (evaluate(*e) == evaluate(published)) {
            ++matched;
        } else {
            mismatches += " " + a.label;
        }
    }
    const auto [h, c] = basis_hypergraph(rays, 4);
    const CriticalReport r = enumerate_criticals(h, CriticalMode::exhaustive);
    bool has21_11 = false;
    for (const auto& cl : r.classes) has21_11 = has21_11 || (cl.k == 21 && cl.m == 11 && is_critical(cl.representative));
    const double t = since(start);
    Outcome o;
    o.pass = matched == 21 && identity == 21 && has21_11 && t < 10;
    o.detail = std::to_string(matched) + "/21 match the published expressions" +
               (mismatches.empty() ? "" : " (mismatch:" + mismatches + ")") + ", " + std::to_string(identity) +
               "/21 round trips; basis hypergraph " + h.size_class() + " has criticals " + class_list(r) + "; " +
               fmt_seconds(t);
    return o;
}

Outcome criterion11() {
    const auto start = Clock::now();
    Outcome o;
    bool none = true;
    for (const char* comps : {"0,1", "0,1,-2,3,4,5"}) {
        const auto parts = assemble_master(ComponentSet::parse(comps), 4);
        std::string d;
        for (const auto& p : parts) {
            none = none && !p.ks;
            d += (d.empty() ? "" : ", ") + p.hypergraph.size_class() + (p.ks ? " KS" : " non-KS");
        }
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("{") + comps + "} -> " + (d.empty() ? "no bases" : d);
    }
    const double t = since(start);
    o.pass = none && t < 60;
    o.detail += "; " + fmt_seconds(t);
    return o;
}

Outcome criterion12() {
    const auto start = Clock::now();
    const auto master = assemble_master(ComponentSet::parse("0,±1"), 4).at(0).hypergraph;
    const auto found = find_closed_subhypergraph(master, 24, 24);
    const double t = since(start);
    Outcome o;
    if (!found) {
        o.detail = "no closed 24-24 found; " + fmt_seconds(t);
        return o;
    }
    const Hypergraph sub = master.subgraph(*found);
    std::set<VertexLabel> vs(sub.vertices().begin(), sub.vertices().end());
    std::size_t inside = 0;
    for (const Edge& e : master.edges()) {
        inside += std::all_of(e.begin(), e.end(), [&](VertexLabel v) { return vs.count(v) > 0; });
    }
    o.pass = sub.size_class() == "24-24" && inside == 24 && t < 600;
    o.detail = "subhypergraph " + sub.size_class() + ", " + std::to_string(inside) + " master edges inside its 24 rays, KS " +
               (is_ks(sub) ? "yes" : "no") + "; " + fmt_seconds(t);
    return o;
}

Outcome criterion13() {
    const auto start = Clock::now();
    Rng rng(13);
    std::string detail;
    bool ok = true;

    // solver against the 2^k scan
    std::vector<Hypergraph> corpus = {fixtures::hg("1234."), fixtures::hg(fixtures::kLine6_3),
                                      fixtures::hg(fixtures::kLine18_9), fixtures::hg("1234,5678.")};
    const auto master = assemble_master(ComponentSet::parse("0,±1"), 4).at(0).hypergraph;
    for (const auto& c : enumerate_criticals(master, CriticalMode::exhaustive).classes) {
        if (c.k <= 20) corpus.push_back(c.representative);
    }
    for (int i = 0; i < 500; ++i) {
        const unsigned n = 3 + static_cast<unsigned>(rng.below(3));
        corpus.push_back(fixtures::random_hypergraph(rng, n, 2 + rng.below(16), static_cast<std::uint32_t>(n + 2 + rng.below(20 - n - 1))));
    }
    std::size_t agree = 0;
    for (const auto& h : corpus) {
        const auto a = find_assignment(h);
        const bool brute = fixtures::brute_ks(h);
        agree += (a.has_value() == !brute) && (!a || verify_assignment(h, *a));
    }
    ok = ok && agree == corpus.size();
    detail += "solver " + std::to_string(agree) + "/" + std::to_string(corpus.size());

    // parse/serialize round trips
    std::size_t trips = 0;
    for (int i = 0; i < 1000; ++i) {
        const unsigned n = 3 + static_cast<unsigned>(rng.below(4));
        const Hypergraph h = shuffle(fixtures::random_hypergraph(rng, n, 1 + rng.below(12), static_cast<std::uint32_t>(n + 1 + rng.below(80))), rng.next());
        Coordinatization c;
        for (VertexLabel v : h.vertices()) {
            Vector vec(n, FieldScalar(0));
            vec[rng.below(n)] = FieldScalar(1);
            vec[rng.below(n)] = FieldScalar::parse(i % 2 ? "w" : "-1/2");
            c.emplace(v, vec);
        }
        const std::string text = i % 2 ? serialize(h, c) : serialize(h);
        const ParsedLine p = parse_line(text);
        trips += p.hypergraph == h && (i % 2 ? serialize(p.hypergraph, *p.coordinatization) : serialize(p.hypergraph)) == text;
    }
    ok = ok && trips == 1000;
    detail += ", round trips " + std::to_string(trips) + "/1000";

    // canonical form under shuffles
    std::size_t invariant = 0;
    for (int i = 0; i < 1000; ++i) {
        const Hypergraph h = i % 2 ? master : fixtures::random_hypergraph(rng, 4, 2 + rng.below(14), 24);
        invariant += canonical_form(shuffle(h, rng.next())) == canonical_form(h);
    }
    ok = ok && invariant == 1000;
    detail += ", canonical invariance " + std::to_string(invariant) + "/1000";

    // ray scaling
    static const char* atoms[] = {"0", "1", "-1", "2", "1/3", "i", "-i", "w", "w2", "sqrt(2)", "1+i", "2-w", "(sqrt(5)-1)/2"};
    std::size_t scaled = 0;
    for (int i = 0; i < 10000;) {
        Vector v(4);
        for (auto& x : v) x = FieldScalar::parse(atoms[rng.below(std::size(atoms))]);
        const FieldScalar c = FieldScalar::parse(atoms[1 + rng.below(std::size(atoms) - 1)]);
        if (std::all_of(v.begin(), v.end(), [](const FieldScalar& x) { return x.is_zero(); })) continue;
        Vector w = v;
        for (auto& x : w) x = c * x;
        scaled += Ray(w) == Ray(v) && Ray(w).hash() == Ray(v).hash();
        ++i;
    }
    ok = ok && scaled == 10000;
    detail += ", ray scaling " + std::to_string(scaled) + "/10000; " + fmt_seconds(since(start));
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    std::vector<int> only;
    CLI::App app{"Acceptance criteria"};
    app.add_option("-j,--jobs", opt.jobs, "Worker threads for minimizations, 0 for all cores");
    app.add_option("--minimizations", opt.minimizations, "Seeded minimizations on the 6D master")->capture_default_str();
    app.add_option("--exhaustive-seconds", opt.exhaustive_seconds, "Budget of the exhaustive attempt on the 6D master")
        ->capture_default_str();
    app.add_option("--expect-fail", opt.expect_fail, "Comma-separated criteria known to fail; exit 0 iff exactly these fail");
    app.add_option("--report", opt.report, "Also write the result lines to this file");
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    opt.only.insert(only.begin(), only.end());

    std::set<int> expected_failures;
    {
        std::stringstream ss(opt.expect_fail);
        for (std::string item; std::getline(ss, item, ',');) {
            if (!item.empty()) expected_failures.insert(std::stoi(item));
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"4D {0,±1} master 40-32", [] { return master_criterion("0,±1", 4, "40-32", 10); }},
        {"4D {0,±1,±i} master 156-249", [] { return master_criterion("0,±1,±i", 4, "156-249", 60); }},
        {"4D {0,±1,±i,±w,±w2} master 400-1012", criterion3},
        {"4D {0,±1,w} master 180-203 and its criticals", [&] { return criterion4(opt); }},
        {"6D {0,1,w} master 216-153", [] { return master_criterion("0,1,w", 6, "216-153", 600); }},
        {"exhaustive criticals of 40-32: 6 classes from 18-9", criterion6},
        {"criticals of 216-153: exactly 21-7, 27-9, 33-11", [&] { return criterion7(opt); }},
        {"18-9: parse, listed vectors, KS, critical, coordinatization < 1 s", criterion8},
        {"6-3: KS, critical, no coordinatization over the 9 components", criterion9},
        {"appendix blueprints and the 21-11 critical", criterion10},
        {"no KS master without opposite-sign pairs", criterion11},
        {"40-32 contains a closed 24-24", criterion12},
        {"property suites", criterion13},
    };

    std::ofstream report;
    if (!opt.report.empty()) report.open(opt.report);
    std::set<int> failed;
    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i + 1);
        if (!opt.only.empty() && !opt.only.count(number)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::ostringstream line;
        line << (o.pass ? "PASS" : "FAIL") << "  " << number << ". " << criteria[i].first << " -- " << o.detail;
        std::cout << line.str() << std::endl;
        if (report) report << line.str() << std::endl;
        if (o.pass) {
            ++passed;
        } else {
            failed.insert(number);
        }
    }
    std::set<int> expected;
    for (int f : expected_failures) {
        if (opt.only.empty() || opt.only.count(f)) expected.insert(f);
    }
    std::ostringstream summary;
    summary << passed << " passed, " << failed.size() << " failed";
    if (!expected_failures.empty()) {
        summary << " (documented discrepancies:";
        for (int f : expected_failures) summary << ' ' << f;
        summary << ")";
    }
    std::cout << summary.str() << std::endl;
    if (report) report << summary.str() << std::endl;
    return failed == expected ? 0 : 1;
}
