#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ksmaster/field.hpp"
#include "ksmaster/hypergraph.hpp"

namespace ksm {

/// Ray indices of one orthogonal basis, ascending.
using Basis = std::vector<std::uint32_t>;

/// All nonzero n-tuples over the components, deduplicated projectively and sorted.
std::vector<Ray> enumerate_rays(const ComponentSet& components, unsigned dimension);

/// Pairwise orthogonality as one bitset row per ray, computed with exact integer arithmetic.
class OrthogonalityGraph {
public:
    OrthogonalityGraph() = default;
    explicit OrthogonalityGraph(const std::vector<Ray>& rays, unsigned threads = 1);

    std::size_t size() const { return size_; }
    std::size_t words() const { return words_; }
    bool adjacent(std::size_t a, std::size_t b) const { return (row(a)[b / 64] >> (b % 64)) & 1u; }
    const std::uint64_t* row(std::size_t a) const { return bits_.data() + a * words_; }
    std::size_t degree(std::size_t a) const;

private:
    std::size_t size_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

struct BasisSearchOptions {
    unsigned threads = 1;
    /// Resumable state file; completed first-ray blocks are appended as they finish.
    std::optional<std::string> checkpoint;
    /// Called after each first-ray block: (blocks done, total blocks, bases so far).
    std::function<void(std::size_t, std::size_t, std::size_t)> progress;
};

/// Every size-n set of mutually orthogonal rays, once each, in lexicographic index order.
std::vector<Basis> enumerate_bases(const std::vector<Ray>& rays, unsigned dimension,
                                   const BasisSearchOptions& options = {});
std::vector<Basis> enumerate_bases(const OrthogonalityGraph& graph, unsigned dimension,
                                   const BasisSearchOptions& options = {});

struct MasterComponent {
    Hypergraph hypergraph;
    Coordinatization coordinatization;
    bool ks = false;
};

struct MasterBuild {
    ComponentSet components;
    unsigned dimension = 0;
    std::vector<Ray> rays;      // all rays over the components, sorted
    std::vector<Basis> bases;   // indices into rays
    /// Every ray lying in some basis and every basis, unsplit; labels follow ray order.
    MasterComponent master;
    /// Connected components of the master, each compactly relabeled in ray order.
    std::vector<MasterComponent> parts;
};

/// Rays, bases, the assembled master and its connected components, each flagged KS or not.
MasterBuild build_master(const ComponentSet& components, unsigned dimension, const BasisSearchOptions& options = {});
/// The unsplit master as a single entry, or nothing if no basis exists. Connected
/// components are in build_master(...).parts and split_components().
std::vector<MasterComponent> assemble_master(const ComponentSet& components, unsigned dimension);

/// Edge partition into connected components under shared vertices; labels are kept.
std::vector<Hypergraph> split_components(const Hypergraph& h);

/// Hypergraph of all orthogonal bases among the given rays, labeled in list order.
/// Rays that lie in no basis are left out.
std::pair<Hypergraph, Coordinatization> basis_hypergraph(const std::vector<Ray>& rays, unsigned dimension);

}  // namespace ksm
