#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksmaster/hypergraph.hpp"

namespace ksm {

/// Minimal KS edge subsets are the minimal unsatisfiable subsets of the exactly-one constraints.

bool is_critical(const Hypergraph& h);

/// Deletes edges in a seeded random order, keeping each deletion that leaves the hypergraph KS.
/// One pass yields a critical. Throws if h is not KS.
Hypergraph minimize(const Hypergraph& h, std::uint64_t seed);

enum class CriticalMode { exhaustive, stochastic };

struct CriticalBudget {
    std::optional<double> max_seconds;
    /// Stop after this many distinct classes (stochastic) or raw subsets (exhaustive).
    std::optional<std::size_t> max_results;
    /// Stochastic mode: number of seeded minimizations.
    std::size_t minimizations = 1000;
    unsigned threads = 1;
};

struct CriticalClass {
    std::string form;  // canonical line
    std::size_t k = 0;
    std::size_t m = 0;
    Hypergraph representative;  // edge subset of the input, first found
    std::uint64_t multiplicity = 0;  // subsets (exhaustive) or minimization runs (stochastic) in this class
};

struct CriticalReport {
    CriticalMode mode = CriticalMode::exhaustive;
    std::uint64_t seed = 0;
    bool complete = false;          // exhaustive only: every minimal KS subset was found
    std::uint64_t subsets = 0;      // raw subsets found (exhaustive) or minimizations run (stochastic)
    std::uint64_t oracle_calls = 0;
    double seconds = 0;
    std::vector<CriticalClass> classes;  // sorted by (m, k, form)
};

/// Throws if h is not KS.
CriticalReport enumerate_criticals(const Hypergraph& h, CriticalMode mode, const CriticalBudget& budget = {},
                                   std::uint64_t seed = 0);

std::string to_string(CriticalMode mode);
CriticalMode parse_critical_mode(const std::string& text);

/// An edge subset with exactly k vertices and m edges that contains every edge of h lying
/// inside its vertex set. Returns edge indices into h, ascending.
std::optional<std::vector<std::size_t>> find_closed_subhypergraph(const Hypergraph& h, std::size_t k, std::size_t m);

}  // namespace ksm
