#pragma once

#include "pinsim/registry.hpp"
#include "pinsim/semver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinsim {

struct ResolveOptions {
    bool include_dev_at_root = false;  // npm never installs transitive dev deps
    bool strict = true;                // fail vs. skip on unresolvable requirements
};

struct ResolvedNode {
    std::string package;
    Version version;
};

struct ResolvedEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    VersionConstraint constraint;
};

// A requirement that could not be resolved (non-strict mode only).
struct DanglingRequirement {
    std::uint32_t from = 0;
    std::string package;
    std::string constraint;
};

// Dependency graph produced by resolve(). Node 0 is the distinguished root
// standing for the manifest; in CSV exports it appears as package "" at
// version "0.0.0-root". Every edge's target satisfies the edge constraint and
// every non-root node is reachable from the root.
class ResolvedGraph {
public:
    static constexpr std::uint32_t kRoot = 0;

    std::vector<ResolvedNode> nodes;  // [0] is the root
    std::vector<ResolvedEdge> edges;
    std::vector<DanglingRequirement> dangling;
    std::int64_t resolved_at = 0;

    // size(G): node count excluding the root.
    std::size_t size() const { return nodes.empty() ? 0 : nodes.size() - 1; }

    std::vector<std::uint32_t> root_edge_targets() const;

    void write_nodes_csv(std::ostream& out) const;
    void write_edges_csv(std::ostream& out) const;
};

// Resolves a manifest against a time view with a deterministic
// breadth-first deduplicating algorithm:
//   - requirements are processed level by level from the root; within a
//     level they are ordered by (package name, declaring node);
//   - each requirement first reuses the highest already-installed version of
//     the package that satisfies its constraint, otherwise installs the
//     latest visible satisfying version as a new node;
//   - edges to already-installed nodes close cycles without re-expansion.
//
// In strict mode an unsatisfiable requirement throws
// Error(unresolvable_requirement) carrying the path from the root; otherwise
// it is recorded in graph.dangling and the edge is omitted.
ResolvedGraph resolve(const TimeView& view, const Manifest& manifest,
                      const ResolveOptions& opts = {});

// The pin transform: caret/tilde-shaped constraints are frozen to their
// declared lower bound; floating-major and satisfiable other constraints are
// frozen to the lowest version visible in the view; pinned constraints pass
// through; anything unresolvable is kept as-is with a diagnostic.
Manifest pin_manifest(const Manifest& manifest, const TimeView& view,
                      std::vector<std::string>* diagnostics = nullptr);

enum class VersioningStrategy { FloatingOnly, PinningOnly, Mixed, NoProd };

std::string_view to_string(VersioningStrategy s);

// Project-level strategy from production constraint classes only; "other"
// constraints do not participate in the determination.
VersioningStrategy classify_strategy(const Manifest& manifest);

} // namespace pinsim
