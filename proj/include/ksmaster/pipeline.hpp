#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ksmaster/stats.hpp"

namespace ksm {

/// What one input line turned into.
struct LineResult {
    std::vector<std::string> lines;     // written in order, unless the sink drops them
    std::optional<std::string> error;   // set when the line is rejected
    std::optional<HypergraphStats> stats;
    std::uint64_t oracle_calls = 0;
    std::string key;                    // free for the sink, e.g. a canonical form for dedup
};

struct PipelineOptions {
    unsigned jobs = 1;
    bool skip_bad = false;
    /// Lines handed to the workers per round; output is flushed after each round.
    std::size_t batch = 256;
};

struct PipelineSummary {
    RunStats stats;
    std::vector<std::string> errors;  // "line N: reason"
    bool ok = true;                   // false if a line was rejected without skip_bad
};

/// Reads lines, processes them on up to `jobs` workers and writes results in input order.
/// Blank lines and comment lines are dropped. `process` gets the line and its 1-based number
/// and must not touch shared state; exceptions count as rejections. `sink`, if given, runs in
/// input order and may clear result.lines. Stops at the first rejected line unless skip_bad.
PipelineSummary run_pipeline(std::istream& in, std::ostream& out, const PipelineOptions& options,
                             const std::function<LineResult(std::string_view, std::size_t)>& process,
                             const std::function<void(LineResult&)>& sink = {});

}  // namespace ksm
