// Python bindings. Hypergraphs cross the boundary as MMP lines.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ksmaster/blueprint.hpp"
#include "ksmaster/canon.hpp"
#include "ksmaster/colorability.hpp"
#include "ksmaster/coordinatizer.hpp"
#include "ksmaster/criticals.hpp"
#include "ksmaster/generator.hpp"
#include "ksmaster/stats.hpp"

namespace py = pybind11;
using namespace ksm;

namespace {

Hypergraph parse(const std::string& line) { return parse_line(line).hypergraph; }

py::dict stats_dict(const Hypergraph& h) {
    const HypergraphStats s = stats(h);
    py::dict d;
    d["size_class"] = s.size_class;
    d["degrees"] = s.degrees;
    d["overlaps"] = s.overlaps;
    d["delta_pairs"] = s.delta_pairs;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kochen-Specker hypergraph toolchain";

    py::register_exception<HypergraphError>(m, "HypergraphError", PyExc_ValueError);

    m.def("size_class", [](const std::string& line) { return parse(line).size_class(); });
    m.def("normalize", [](const std::string& line) {
        const ParsedLine p = parse_line(line);
        return p.coordinatization ? serialize(p.hypergraph, *p.coordinatization) : serialize(p.hypergraph);
    }, "Parse a line and serialize it back.");
    m.def("stats", [](const std::string& line) { return stats_dict(parse(line)); });

    m.def("is_ks", [](const std::string& line) { return is_ks(parse(line)); });
    m.def("is_critical", [](const std::string& line) { return is_critical(parse(line)); });
    m.def("find_assignment", [](const std::string& line) -> std::optional<std::map<std::string, int>> {
        const auto a = find_assignment(parse(line));
        if (!a) return std::nullopt;
        std::map<std::string, int> out;
        for (const auto& [v, one] : *a) out[render_label(v)] = one;
        return out;
    }, "A 0/1 labeling with exactly one 1 per edge, or None for a KS hypergraph.");

    m.def("canonical_form", [](const std::string& line) { return canonical_form(parse(line)); });
    m.def("are_isomorphic", [](const std::string& a, const std::string& b) { return are_isomorphic(parse(a), parse(b)); });
    m.def("shuffle", [](const std::string& line, std::uint64_t seed) { return serialize(shuffle(parse(line), seed)); });

    m.def("minimize", [](const std::string& line, std::uint64_t seed) { return serialize(minimize(parse(line), seed)); });
    m.def(
        "criticals",
        [](const std::string& line, const std::string& mode, std::size_t minimizations, std::optional<double> max_seconds,
           std::uint64_t seed, unsigned threads) {
            CriticalBudget budget;
            budget.minimizations = minimizations;
            budget.max_seconds = max_seconds;
            budget.threads = threads;
            CriticalReport r;
            {
                py::gil_scoped_release release;
                r = enumerate_criticals(parse(line), parse_critical_mode(mode), budget, seed);
            }
            py::list classes;
            for (const auto& c : r.classes) {
                py::dict d;
                d["form"] = c.form;
                d["size_class"] = std::to_string(c.k) + "-" + std::to_string(c.m);
                d["representative"] = serialize(c.representative);
                d["multiplicity"] = c.multiplicity;
                classes.append(d);
            }
            py::dict out;
            out["complete"] = r.complete;
            out["subsets"] = r.subsets;
            out["classes"] = classes;
            return out;
        },
        py::arg("line"), py::arg("mode") = "stochastic", py::arg("minimizations") = 1000, py::arg("max_seconds") = py::none(),
        py::arg("seed") = 0, py::arg("threads") = 1);

    m.def(
        "master",
        [](const std::string& components, unsigned dimension) {
            std::vector<std::pair<std::string, bool>> out;
            for (const auto& c : assemble_master(ComponentSet::parse(components), dimension)) {
                out.emplace_back(serialize(c.hypergraph, c.coordinatization), c.ks);
            }
            return out;
        },
        py::arg("components"), py::arg("dimension"), "Master hypergraph lines with their KS flag.");

    m.def("coordinatize", [](const std::string& line, const std::string& components) -> std::optional<std::string> {
        const Hypergraph h = parse(line);
        const auto c = find_coordinatization(h, ComponentSet::parse(components));
        if (!c) return std::nullopt;
        return serialize(h, *c);
    });

    m.def("decompose", [](const std::vector<std::string>& vector) -> std::optional<std::string> {
        Vector v;
        for (const auto& x : vector) v.push_back(FieldScalar::parse(x));
        const auto e = decompose(std::span<const FieldScalar>(v));
        if (!e) return std::nullopt;
        return e->to_string();
    }, "Blueprint of a 4-dimensional vector given as component strings, or None.");
}
