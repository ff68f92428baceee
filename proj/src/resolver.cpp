#include "pinsim/resolver.hpp"

#include "pinsim/csv.hpp"
#include "pinsim/error.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace pinsim {

namespace {

struct Requirement {
    std::uint32_t from;
    std::string package;
    const VersionConstraint* constraint;
};

std::string root_version_text() { return "0.0.0-root"; }

std::string describe_path(const ResolvedGraph& g, const std::vector<std::uint32_t>& parent,
                          std::uint32_t node) {
    std::vector<std::string> chain;
    std::uint32_t cur = node;
    while (true) {
        if (cur == ResolvedGraph::kRoot) {
            chain.push_back("root");
            break;
        }
        chain.push_back(g.nodes[cur].package + "@" + g.nodes[cur].version.str());
        cur = parent[cur];
    }
    std::reverse(chain.begin(), chain.end());
    std::string out;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (i) out += " > ";
        out += chain[i];
    }
    return out;
}

} // namespace

std::vector<std::uint32_t> ResolvedGraph::root_edge_targets() const {
    std::vector<std::uint32_t> targets;
    for (const ResolvedEdge& e : edges) {
        if (e.from == kRoot) targets.push_back(e.to);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    return targets;
}

void ResolvedGraph::write_nodes_csv(std::ostream& out) const {
    out << "package,version\n";
    for (const ResolvedNode& n : nodes) {
        csv::write_row(out, {n.package, n.package.empty() ? root_version_text() : n.version.str()});
    }
}

void ResolvedGraph::write_edges_csv(std::ostream& out) const {
    out << "from_pkg,from_version,to_pkg,to_version,constraint,class\n";
    for (const ResolvedEdge& e : edges) {
        const ResolvedNode& from = nodes[e.from];
        const ResolvedNode& to = nodes[e.to];
        csv::write_row(out, {from.package,
                             from.package.empty() ? root_version_text() : from.version.str(),
                             to.package, to.version.str(), e.constraint.source,
                             std::string(to_string(e.constraint.kind))});
    }
}

ResolvedGraph resolve(const TimeView& view, const Manifest& manifest, const ResolveOptions& opts) {
    ResolvedGraph g;
    g.resolved_at = view.cutoff();
    g.nodes.push_back(ResolvedNode{"", Version::parse(root_version_text())});

    std::vector<std::uint32_t> parent{ResolvedGraph::kRoot};
    std::map<std::string, std::vector<std::uint32_t>, std::less<>> installed;

    std::vector<Requirement> frontier;
    for (const auto& [name, c] : manifest.dependencies) {
        frontier.push_back({ResolvedGraph::kRoot, name, &c});
    }
    if (opts.include_dev_at_root) {
        for (const auto& [name, c] : manifest.dev_dependencies) {
            frontier.push_back({ResolvedGraph::kRoot, name, &c});
        }
    }

    while (!frontier.empty()) {
        std::stable_sort(frontier.begin(), frontier.end(),
                         [&g](const Requirement& a, const Requirement& b) {
                             if (a.package != b.package) return a.package < b.package;
                             const ResolvedNode& na = g.nodes[a.from];
                             const ResolvedNode& nb = g.nodes[b.from];
                             if (na.package != nb.package) return na.package < nb.package;
                             if (na.version != nb.version) return na.version < nb.version;
                             return a.constraint->source < b.constraint->source;
                         });

        std::vector<Requirement> next;
        for (const Requirement& req : frontier) {
            // Reuse the highest installed version that satisfies the constraint.
            constexpr std::uint32_t kNone = UINT32_MAX;
            std::uint32_t reuse = kNone;
            if (auto it = installed.find(req.package); it != installed.end()) {
                for (std::uint32_t idx : it->second) {
                    if (!satisfies(g.nodes[idx].version, *req.constraint)) continue;
                    if (reuse == kNone || g.nodes[idx].version > g.nodes[reuse].version) reuse = idx;
                }
            }
            if (reuse != kNone) {
                g.edges.push_back({req.from, reuse, *req.constraint});
                continue;
            }

            std::optional<Version> picked;
            try {
                picked = view.latest_satisfying(req.package, *req.constraint);
            } catch (const Error& e) {
                if (e.code() != errc::unknown_package) throw;
            }
            if (!picked) {
                if (opts.strict) {
                    throw_error(errc::unresolvable_requirement,
                                "unresolvable requirement \"" + req.package + "\" (\"" +
                                    req.constraint->source + "\") at " +
                                    describe_path(g, parent, req.from));
                }
                g.dangling.push_back({req.from, req.package, req.constraint->source});
                continue;
            }

            const std::uint32_t node = static_cast<std::uint32_t>(g.nodes.size());
            g.nodes.push_back(ResolvedNode{req.package, *picked});
            parent.push_back(req.from);
            installed[req.package].push_back(node);
            g.edges.push_back({req.from, node, *req.constraint});

            const Release* release = view.find_release(req.package, *picked);
            if (release) {
                for (const auto& [dep, c] : release->dependencies) {
                    next.push_back({node, dep, &c});
                }
            }
        }
        frontier = std::move(next);
    }
    return g;
}

Manifest pin_manifest(const Manifest& manifest, const TimeView& view,
                      std::vector<std::string>* diagnostics) {
    auto pin_map = [&](const std::map<std::string, VersionConstraint>& deps) {
        std::map<std::string, VersionConstraint> pinned;
        for (const auto& [name, c] : deps) {
            switch (c.kind) {
            case ConstraintClass::Pinned:
                pinned.emplace(name, c);
                break;
            case ConstraintClass::FloatingMinor:
            case ConstraintClass::FloatingPatch: {
                // The declared lower bound is the minimal version specified.
                auto lower = c.lower_bound();
                if (lower) {
                    pinned.emplace(name, VersionConstraint::exact(*lower));
                } else {
                    pinned.emplace(name, c);
                    if (diagnostics) {
                        diagnostics->push_back(manifest.name + ": no lower bound for " + name +
                                               " (\"" + c.source + "\"), left unchanged");
                    }
                }
                break;
            }
            default: {
                // Floating-major and other: fall back to the lowest version
                // visible at the reference time.
                std::optional<Version> lowest;
                try {
                    lowest = view.lowest_satisfying(name, c);
                } catch (const Error& e) {
                    if (e.code() != errc::unknown_package) throw;
                }
                if (lowest) {
                    pinned.emplace(name, VersionConstraint::exact(*lowest));
                } else {
                    pinned.emplace(name, c);
                    if (diagnostics) {
                        diagnostics->push_back(manifest.name + ": cannot pin " + name + " (\"" +
                                               c.source + "\"), left unchanged");
                    }
                }
                break;
            }
            }
        }
        return pinned;
    };

    Manifest out;
    out.name = manifest.name;
    out.dependencies = pin_map(manifest.dependencies);
    out.dev_dependencies = pin_map(manifest.dev_dependencies);
    return out;
}

std::string_view to_string(VersioningStrategy s) {
    switch (s) {
    case VersioningStrategy::FloatingOnly: return "floating-only";
    case VersioningStrategy::PinningOnly: return "pinning-only";
    case VersioningStrategy::Mixed: return "mixed";
    case VersioningStrategy::NoProd: return "no-prod";
    }
    return "no-prod";
}

VersioningStrategy classify_strategy(const Manifest& manifest) {
    std::size_t floating = 0;
    std::size_t pinned = 0;
    for (const auto& [name, c] : manifest.dependencies) {
        if (is_floating(c.kind)) ++floating;
        else if (c.kind == ConstraintClass::Pinned) ++pinned;
    }
    if (floating > 0 && pinned > 0) return VersioningStrategy::Mixed;
    if (floating > 0) return VersioningStrategy::FloatingOnly;
    if (pinned > 0) return VersioningStrategy::PinningOnly;
    return VersioningStrategy::NoProd;
}

} // namespace pinsim
