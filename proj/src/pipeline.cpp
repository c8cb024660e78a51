#include "ksmaster/pipeline.hpp"

#include <chrono>
#include <istream>
#include <ostream>

#include "ksmaster/hypergraph.hpp"
#include "ksmaster/parallel.hpp"

namespace ksm {

PipelineSummary run_pipeline(std::istream& in, std::ostream& out, const PipelineOptions& options,
                             const std::function<LineResult(std::string_view, std::size_t)>& process,
                             const std::function<void(LineResult&)>& sink) {
    const auto start = std::chrono::steady_clock::now();
    const unsigned jobs = resolve_threads(options.jobs);
    const std::size_t batch = std::max<std::size_t>(options.batch, 1) * jobs;
    PipelineSummary summary;
    std::vector<std::pair<std::size_t, std::string>> pending;
    std::vector<LineResult> results;
    std::size_t number = 0;
    bool eof = false;

    while (!eof && summary.ok) {
        pending.clear();
        std::string line;
        while (pending.size() < batch) {
            if (!std::getline(in, line)) {
                eof = true;
                break;
            }
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (is_comment_or_blank(line)) continue;
            pending.emplace_back(number, std::move(line));
        }
        results.assign(pending.size(), LineResult{});
        parallel_for(pending.size(), jobs, [&](std::size_t i) {
            try {
                results[i] = process(pending[i].second, pending[i].first);
            } catch (const std::exception& e) {
                results[i] = LineResult{};
                results[i].error = e.what();
            }
        });
        for (std::size_t i = 0; i < results.size(); ++i) {
            LineResult& r = results[i];
            if (r.error) {
                ++summary.stats.rejected;
                summary.errors.push_back("line " + std::to_string(pending[i].first) + ": " + *r.error);
                if (!options.skip_bad) {
                    summary.ok = false;
                    break;
                }
                continue;
            }
            if (r.stats) {
                summary.stats.add(*r.stats);
            } else {
                ++summary.stats.items;
            }
            summary.stats.oracle_calls += r.oracle_calls;
            if (sink) sink(r);
            for (const std::string& text : r.lines) out << text << '\n';
        }
        out.flush();
    }
    summary.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

}  // namespace ksm
