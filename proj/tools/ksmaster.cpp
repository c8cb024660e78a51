// ksmaster: streaming front end. One hypergraph per line on stdin/stdout, summary on stderr.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ksmaster/blueprint.hpp"
#include "ksmaster/canon.hpp"
#include "ksmaster/colorability.hpp"
#include "ksmaster/coordinatizer.hpp"
#include "ksmaster/criticals.hpp"
#include "ksmaster/generator.hpp"
#include "ksmaster/hypergraph.hpp"
#include "ksmaster/pipeline.hpp"
#include "ksmaster/random.hpp"
#include "ksmaster/stats.hpp"

using namespace ksm;
using json = nlohmann::json;

namespace {

struct Settings {
    unsigned jobs = 1;
    bool skip_bad = false;
    std::uint64_t seed = 0;
    std::string json_path;
    bool quiet = false;

    // master
    unsigned dim = 4;
    std::string components;
    bool split = false;
    bool all = false;
    bool long_running = false;
    std::string checkpoint;
    std::string rays_path;

    // kscheck
    bool non_ks = false;

    // criticals
    std::string mode = "stochastic";
    std::optional<double> max_minutes;
    std::optional<std::size_t> max_results;
    std::size_t runs = 1000;

    // canon
    bool dedup = false;

    // coordinatize
    std::optional<double> max_seconds;
};

std::string with_comment(std::string text, const std::string& comment) {
    if (!comment.empty()) text += " #" + comment;
    return text;
}

Coordinatization restrict_to(const Coordinatization& c, const Hypergraph& h) {
    Coordinatization out;
    for (VertexLabel v : h.vertices()) {
        auto it = c.find(v);
        if (it != c.end()) out.emplace(v, it->second);
    }
    return out;
}

std::string render_line(const Hypergraph& h, const std::optional<Coordinatization>& c) {
    if (!c) return serialize(h);
    const Coordinatization part = restrict_to(*c, h);
    return serialize(h, part);
}

std::string render_vector(const Vector& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].to_string();
    return out + ")";
}

/// argv minus --jobs, so the header does not depend on the worker count.
std::string header(int argc, char** argv) {
    std::string out = "# ksmaster";
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--jobs" || a == "-j") {
            ++i;
            continue;
        }
        if (a.rfind("--jobs=", 0) == 0) continue;
        out += ' ';
        out += a.find_first_of(" \t,") == std::string::npos ? a : "\"" + a + "\"";
    }
    return out;
}

json histogram(const std::map<std::size_t, std::size_t>& h) {
    json out = json::object();
    for (const auto& [k, v] : h) out[std::to_string(k)] = v;
    return out;
}

std::string render_histogram(const std::map<std::size_t, std::size_t>& h) {
    std::string out;
    for (const auto& [k, v] : h) out += (out.empty() ? "" : ",") + std::to_string(k) + ":" + std::to_string(v);
    return out.empty() ? "-" : out;
}

json summary_json(const std::string& command, const PipelineSummary& s, const json& extra) {
    json out;
    out["command"] = command;
    out["items"] = s.stats.items;
    out["rejected"] = s.stats.rejected;
    out["classes"] = s.stats.classes;
    out["degrees"] = histogram(s.stats.degrees);
    out["overlaps"] = histogram(s.stats.overlaps);
    out["delta_pairs"] = s.stats.delta_pairs;
    out["oracle_calls"] = s.stats.oracle_calls;
    out["seconds"] = s.stats.seconds;
    out["errors"] = s.errors;
    if (!extra.is_null()) out["details"] = extra;
    return out;
}

int finish(const Settings& settings, const std::string& command, const PipelineSummary& s, const json& extra = {}) {
    for (const std::string& e : s.errors) std::cerr << "error: " << e << '\n';
    if (!settings.quiet) {
        std::cerr << command << ": " << s.stats.items << " lines, " << s.stats.rejected << " rejected, "
                  << s.stats.oracle_calls << " oracle calls, " << s.stats.seconds << " s\n";
        for (const auto& [cls, n] : s.stats.classes) std::cerr << "  " << cls << "  " << n << '\n';
    }
    if (!settings.json_path.empty()) {
        const json doc = summary_json(command, s, extra);
        if (settings.json_path == "-") {
            std::cerr << doc.dump(2) << '\n';
        } else {
            std::ofstream f(settings.json_path);
            if (!f) throw std::runtime_error("cannot write " + settings.json_path);
            f << doc.dump(2) << '\n';
        }
    }
    return s.ok ? 0 : 1;
}

PipelineOptions pipeline_options(const Settings& s) { return {s.jobs, s.skip_bad, 256}; }

int run_master(const Settings& s) {
    if (s.components.empty()) throw CLI::ValidationError("--components", "is required");
    if (s.dim >= 8 && !s.long_running) {
        throw CLI::ValidationError("--dim", "dimensions of 8 and above take hours; pass --long-running");
    }
    const ComponentSet components = ComponentSet::parse(s.components);
    BasisSearchOptions options;
    options.threads = s.jobs;
    if (!s.checkpoint.empty()) options.checkpoint = s.checkpoint;
    if (s.long_running && !s.quiet) {
        options.progress = [](std::size_t done, std::size_t total, std::size_t found) {
            std::cerr << "\rbases: block " << done << "/" << total << ", " << found << " found" << std::flush;
        };
    }
    const auto start = std::chrono::steady_clock::now();
    const MasterBuild build = build_master(components, s.dim, options);
    if (options.progress) std::cerr << '\n';

    if (!s.rays_path.empty()) {
        std::ofstream f(s.rays_path);
        if (!f) throw std::runtime_error("cannot write " + s.rays_path);
        for (const Ray& r : build.rays) f << r.to_string() << '\n';
    }

    PipelineSummary summary;
    std::vector<const MasterComponent*> chosen;
    if (s.split) {
        for (const auto& part : build.parts) chosen.push_back(&part);
    } else {
        chosen.push_back(&build.master);
    }
    json parts = json::array();
    for (const MasterComponent* mc : chosen) {
        parts.push_back({{"class", mc->hypergraph.size_class()}, {"ks", mc->ks}});
        if (!mc->ks && !s.all) continue;
        if (mc->hypergraph.edge_count() == 0) continue;
        std::cout << with_comment(serialize(mc->hypergraph, mc->coordinatization), mc->ks ? "" : "not-ks") << '\n';
        summary.stats.add(stats(mc->hypergraph));
    }
    summary.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!s.quiet) {
        std::cerr << "master " << components.to_string() << " in " << s.dim << "D: " << build.rays.size() << " rays, "
                  << build.bases.size() << " bases, master " << build.master.hypergraph.size_class()
                  << (build.master.ks ? " KS" : " not KS") << ", " << build.parts.size() << " component(s)\n";
    }
    json extra = {{"rays", build.rays.size()},
                  {"bases", build.bases.size()},
                  {"master", build.master.hypergraph.size_class()},
                  {"master_ks", build.master.ks},
                  {"parts", parts}};
    return finish(s, "master", summary, extra);
}

int run_kscheck(const Settings& s) {
    auto process = [&](std::string_view text, std::size_t) {
        ParsedLine p = parse_line(text);
        LineResult r;
        ColoringSolver solver(p.hypergraph);
        const auto model = solver.solve();
        r.oracle_calls = solver.calls();
        r.stats = stats(p.hypergraph);
        if (!model && !s.non_ks) r.lines.push_back(std::string(text));
        if (model && s.non_ks) {
            std::string witness;
            for (std::size_t i = 0; i < model->size(); ++i) {
                if ((*model)[i]) witness += render_label(p.hypergraph.vertices()[i]);
            }
            r.lines.push_back(std::string(text) + " #colorable " + witness);
        }
        return r;
    };
    return finish(s, "kscheck", run_pipeline(std::cin, std::cout, pipeline_options(s), process));
}

int run_criticals(const Settings& s, const std::string& head) {
    const CriticalMode mode = parse_critical_mode(s.mode);
    CriticalBudget budget;
    if (s.max_minutes) budget.max_seconds = *s.max_minutes * 60.0;
    budget.max_results = s.max_results;
    budget.minimizations = s.runs;
    budget.threads = s.jobs;
    std::cout << head << '\n';
    json reports = json::array();
    auto process = [&](std::string_view text, std::size_t) {
        ParsedLine p = parse_line(text);
        const CriticalReport report = enumerate_criticals(p.hypergraph, mode, budget, s.seed);
        LineResult r;
        r.oracle_calls = report.oracle_calls;
        r.stats = stats(p.hypergraph);
        for (const CriticalClass& c : report.classes) {
            r.lines.push_back(with_comment(render_line(c.representative, p.coordinatization),
                                           "x" + std::to_string(c.multiplicity)));
        }
        json j = {{"input", p.hypergraph.size_class()}, {"mode", to_string(mode)}, {"seed", report.seed},
                  {"complete", report.complete}, {"subsets", report.subsets}, {"seconds", report.seconds}};
        json classes = json::array();
        for (const CriticalClass& c : report.classes) {
            classes.push_back({{"class", std::to_string(c.k) + "-" + std::to_string(c.m)},
                               {"count", c.multiplicity},
                               {"form", c.form}});
        }
        j["classes"] = classes;
        r.key = j.dump();
        return r;
    };
    // summary tables go to stderr in input order
    auto sink = [&](LineResult& r) {
        json j = json::parse(r.key);
        if (!s.quiet) {
            const bool exhaustive = j["mode"] == "exhaustive";
            std::cerr << "criticals of " << j["input"].get<std::string>() << " (" << j["mode"].get<std::string>()
                      << (exhaustive ? (j["complete"].get<bool>() ? ", complete" : ", incomplete") : "") << ", "
                      << j["subsets"].get<std::uint64_t>() << (exhaustive ? " subsets" : " runs") << ")\n";
            for (const json& c : j["classes"]) {
                std::cerr << "  " << c["class"].get<std::string>() << "  " << c["count"].get<std::uint64_t>() << '\n';
            }
        }
        reports.push_back(std::move(j));
    };
    PipelineOptions po = pipeline_options(s);
    po.jobs = 1;  // parallelism goes into the minimizations instead
    po.batch = 1;
    return finish(s, "criticals", run_pipeline(std::cin, std::cout, po, process, sink), reports);
}

int run_canon(const Settings& s) {
    std::unordered_set<std::string> seen;
    std::size_t dropped = 0;
    auto process = [&](std::string_view text, std::size_t) {
        ParsedLine p = parse_line(text);
        LineResult r;
        r.stats = stats(p.hypergraph);
        if (p.coordinatization) {
            auto [h, c] = canonical_relabel(p.hypergraph, *p.coordinatization);
            r.key = serialize(h);
            r.lines.push_back(with_comment(serialize(h, c), p.comment));
        } else {
            r.key = canonical_form(p.hypergraph);
            r.lines.push_back(with_comment(r.key, p.comment));
        }
        return r;
    };
    auto sink = [&](LineResult& r) {
        if (s.dedup && !seen.insert(r.key).second) {
            r.lines.clear();
            ++dropped;
        }
    };
    const PipelineSummary summary = run_pipeline(std::cin, std::cout, pipeline_options(s), process, sink);
    if (s.dedup && !s.quiet) std::cerr << "canon: dropped " << dropped << " duplicate(s)\n";
    return finish(s, "canon", summary, json{{"duplicates", dropped}});
}

int run_coordinatize(const Settings& s) {
    if (s.components.empty()) throw CLI::ValidationError("--components", "is required");
    const ComponentSet components = ComponentSet::parse(s.components);
    CoordinatizeOptions options;
    options.max_seconds = s.max_seconds;
    auto process = [&](std::string_view text, std::size_t) {
        ParsedLine p = parse_line(text);
        LineResult r;
        r.stats = stats(p.hypergraph);
        const CoordinatizationSearch found = search_coordinatization(p.hypergraph, components, options);
        r.oracle_calls = found.nodes;
        if (found.coordinatization) {
            r.lines.push_back(with_comment(serialize(p.hypergraph, *found.coordinatization), p.comment));
        } else {
            const std::string mark = found.complete ? "no-coordinatization" : "coordinatization-unknown";
            r.lines.push_back(with_comment(serialize(p.hypergraph), p.comment.empty() ? mark : p.comment + " " + mark));
        }
        return r;
    };
    return finish(s, "coordinatize", run_pipeline(std::cin, std::cout, pipeline_options(s), process));
}

int run_decompose(const Settings& s) {
    auto process = [&](std::string_view text, std::size_t) {
        ParsedLine p = parse_line(text, 4u);
        if (!p.coordinatization) throw HypergraphError("decompose needs a coordinatization block");
        LineResult r;
        r.stats = stats(p.hypergraph);
        r.lines.push_back("# " + p.hypergraph.size_class());
        for (VertexLabel v : p.hypergraph.vertices()) {
            const Vector& vec = p.coordinatization->at(v);
            const auto expr = decompose(vec);
            std::string out = render_label(v) + " " + render_vector(vec) + " ";
            if (!expr) {
                out += "no named decomposition";
            } else {
                out += expr->to_string();
                if (expr->circular()) out += " circular";
            }
            r.lines.push_back(out);
        }
        return r;
    };
    return finish(s, "decompose", run_pipeline(std::cin, std::cout, pipeline_options(s), process));
}

int run_split(const Settings& s) {
    auto process = [&](std::string_view text, std::size_t) {
        ParsedLine p = parse_line(text);
        LineResult r;
        r.stats = stats(p.hypergraph);
        for (const Hypergraph& part : split_components(p.hypergraph)) {
            r.lines.push_back(render_line(part, p.coordinatization));
        }
        return r;
    };
    return finish(s, "split", run_pipeline(std::cin, std::cout, pipeline_options(s), process));
}

int run_shuffle(const Settings& s, const std::string& head) {
    std::cout << head << '\n';
    auto process = [&](std::string_view text, std::size_t number) {
        ParsedLine p = parse_line(text);
        LineResult r;
        r.stats = stats(p.hypergraph);
        const std::uint64_t seed = derive_seed(s.seed, number);
        if (p.coordinatization) {
            auto [h, c] = shuffle(p.hypergraph, *p.coordinatization, seed);
            r.lines.push_back(with_comment(serialize(h, c), p.comment));
        } else {
            r.lines.push_back(with_comment(serialize(shuffle(p.hypergraph, seed)), p.comment));
        }
        return r;
    };
    return finish(s, "shuffle", run_pipeline(std::cin, std::cout, pipeline_options(s), process));
}

int run_stats(const Settings& s) {
    auto process = [&](std::string_view text, std::size_t) {
        ParsedLine p = parse_line(text);
        LineResult r;
        r.stats = stats(p.hypergraph);
        r.lines.push_back(r.stats->size_class + " degrees=" + render_histogram(r.stats->degrees) +
                          " overlaps=" + render_histogram(r.stats->overlaps) +
                          " delta=" + std::to_string(r.stats->delta_pairs));
        return r;
    };
    const PipelineSummary summary = run_pipeline(std::cin, std::cout, pipeline_options(s), process);
    if (!s.quiet) {
        std::cerr << "degrees " << render_histogram(summary.stats.degrees) << ", overlaps "
                  << render_histogram(summary.stats.overlaps) << ", delta pairs " << summary.stats.delta_pairs << '\n';
    }
    return finish(s, "stats", summary);
}

}  // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    Settings s;
    CLI::App app{"Kochen-Specker hypergraph toolchain (MMP lines on stdin/stdout)"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("-j,--jobs", s.jobs, "Worker threads, 0 for all cores")->capture_default_str();
    app.add_flag("--skip-bad", s.skip_bad, "Report malformed lines and keep going");
    app.add_option("--seed", s.seed, "Seed for randomized commands")->capture_default_str();
    app.add_option("--json", s.json_path, "Write a JSON summary to this file ('-' for stderr)");
    app.add_flag("-q,--quiet", s.quiet, "No summary on stderr");

    auto* master = app.add_subcommand("master", "Generate the master hypergraph from vector components");
    master->add_option("--dim", s.dim, "Dimension")->capture_default_str()->check(CLI::Range(2u, 32u));
    master->add_option("--components", s.components, "Component list, e.g. \"0,±1,i\"")->required();
    master->add_flag("--split", s.split, "Emit connected components instead of the whole master");
    master->add_flag("--all", s.all, "Also emit non-KS output, marked #not-ks");
    master->add_flag("--long-running", s.long_running, "Allow 8D and above; reports progress");
    master->add_option("--checkpoint", s.checkpoint, "Resumable basis-enumeration state file");
    master->add_option("--rays", s.rays_path, "Also write the ray list to this file");

    auto* kscheck = app.add_subcommand("kscheck", "Pass through KS lines only");
    kscheck->add_flag("--non-ks", s.non_ks, "Pass through colorable lines instead, with a witness");

    auto* criticals = app.add_subcommand("criticals", "Minimal KS subhypergraphs of each line");
    criticals->add_option("--mode", s.mode, "exhaustive or stochastic")
        ->capture_default_str()
        ->check(CLI::IsMember({"exhaustive", "stochastic"}));
    criticals->add_option("--max-minutes", s.max_minutes, "Time budget per line");
    criticals->add_option("--max-results", s.max_results, "Stop after this many results");
    criticals->add_option("--runs", s.runs, "Stochastic minimizations per line")->capture_default_str();

    auto* canon = app.add_subcommand("canon", "Rewrite lines in canonical form");
    canon->add_flag("--dedup", s.dedup, "Keep the first line of each isomorphism class");

    auto* coordinatize = app.add_subcommand("coordinatize", "Search vectors over the components for each line");
    coordinatize->add_option("--components", s.components, "Component list")->required();
    coordinatize->add_option("--max-seconds", s.max_seconds, "Time budget per line");

    auto* decompose_cmd = app.add_subcommand("decompose", "Two-qubit state expressions for 4D coordinatizations");
    auto* split = app.add_subcommand("split", "Split lines into connected components");
    auto* shuffle_cmd = app.add_subcommand("shuffle", "Random isomorphic relabeling of each line");
    auto* stats_cmd = app.add_subcommand("stats", "Degree and edge-intersection statistics");

    CLI11_PARSE(app, argc, argv);
    const std::string head = header(argc, argv);

    try {
        if (*master) return run_master(s);
        if (*kscheck) return run_kscheck(s);
        if (*criticals) return run_criticals(s, head);
        if (*canon) return run_canon(s);
        if (*coordinatize) return run_coordinatize(s);
        if (*decompose_cmd) return run_decompose(s);
        if (*split) return run_split(s);
        if (*shuffle_cmd) return run_shuffle(s, head);
        if (*stats_cmd) return run_stats(s);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
