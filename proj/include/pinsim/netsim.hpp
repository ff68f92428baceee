#pragma once

#include "pinsim/semver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace pinsim {

// Package-level dependency network. Edges point dependent -> dependency and
// carry the declared constraint class. Cycles are allowed, self-loops are
// not.
class EcosystemNetwork {
public:
    struct EdgeRef {
        std::uint32_t node;
        ConstraintClass cls;
    };

    class Builder {
    public:
        // Returns the node index. Re-adding a name updates its attributes.
        std::uint32_t add_package(std::string name, std::uint64_t downloads,
                                  std::optional<std::uint32_t> maintainers = std::nullopt);
        void add_edge(std::string_view dependent, std::string_view dependency,
                      ConstraintClass cls);
        EcosystemNetwork build();

    private:
        friend class EcosystemNetwork;
        std::vector<std::string> names_;
        std::vector<std::uint64_t> downloads_;
        std::vector<std::optional<std::uint32_t>> maintainers_;
        std::vector<std::tuple<std::uint32_t, std::uint32_t, ConstraintClass>> edges_;
        std::uint32_t lookup(std::string_view name);
        std::vector<std::pair<std::string, std::uint32_t>> index_;
    };

    // nodes.csv: package,downloads[,maintainers]; edges.csv:
    // dependent,dependency,class. Headers expected; unknown edge endpoints
    // and self-loops are data errors.
    static EcosystemNetwork load_csv(std::istream& nodes, std::istream& edges);
    static EcosystemNetwork load_csv_files(const std::string& nodes_path,
                                           const std::string& edges_path);
    void write_nodes_csv(std::ostream& out) const;
    void write_edges_csv(std::ostream& out) const;

    std::size_t node_count() const { return names_.size(); }
    std::size_t edge_count() const { return edge_total_; }
    const std::string& name(std::uint32_t node) const { return names_[node]; }
    std::optional<std::uint32_t> find(std::string_view name) const;
    std::uint64_t downloads(std::uint32_t node) const { return downloads_[node]; }
    std::uint64_t total_downloads() const { return total_downloads_; }
    bool has_maintainer_data() const { return has_maintainers_; }
    std::uint32_t maintainers(std::uint32_t node) const { return maintainers_[node]; }
    std::size_t out_degree(std::uint32_t node) const;  // direct dependencies

    // CSR adjacency in both directions.
    const EdgeRef* deps_begin(std::uint32_t node) const;
    const EdgeRef* deps_end(std::uint32_t node) const;
    const EdgeRef* dependents_begin(std::uint32_t node) const;
    const EdgeRef* dependents_end(std::uint32_t node) const;

private:
    std::vector<std::string> names_;
    std::vector<std::uint64_t> downloads_;
    std::vector<std::uint32_t> maintainers_;
    bool has_maintainers_ = false;
    std::uint64_t total_downloads_ = 0;
    std::size_t edge_total_ = 0;
    std::vector<std::uint32_t> dep_offsets_;
    std::vector<EdgeRef> dep_edges_;
    std::vector<std::uint32_t> rev_offsets_;
    std::vector<EdgeRef> rev_edges_;
    std::vector<std::pair<std::string, std::uint32_t>> index_;  // sorted by name
};

enum class PinningMechanism { LocalPinning, TransitivePinning };
enum class FloatingMode { AssumeAllFloating, HonorDeclared };
enum class DefenseStrategy {
    Downloads,
    OutDegree,
    Betweenness,
    DownloadsTimesOutDegree,
    DownloadsTimesBetweenness,
};

std::string_view to_string(PinningMechanism m);
std::string_view to_string(DefenseStrategy s);
std::optional<PinningMechanism> mechanism_from_string(std::string_view name);
std::optional<DefenseStrategy> strategy_from_string(std::string_view name);

// Which packages are defended, how their pinning blocks propagation, and
// whether declared edge classes are honored. The defended list is ordered so
// prefixes give the n = k plan.
struct DefensePlan {
    PinningMechanism mechanism = PinningMechanism::TransitivePinning;
    std::vector<std::uint32_t> defended;
    FloatingMode floating_mode = FloatingMode::AssumeAllFloating;
};

// Packages affected when `target` publishes a malicious update, excluding
// the target itself.
//
// Local pinning: the seed set W holds direct dependents w of the target with
// w not defended (and, when declared classes are honored, a floating edge
// w -> target); the affected set is W plus everything reverse-reachable from
// W. Defended packages beyond the final edge are still affected: pinning
// direct dependencies does not stop the attack arriving through a floating
// chain.
//
// Transitive pinning: reverse BFS from the target that never visits a
// defended package; a defended package's whole downstream is protected
// unless reachable another way. When declared classes are honored the first
// step additionally requires a floating edge into the target (the only edge
// whose class matters: deeper dependents re-resolve that same declaration).
std::vector<std::uint32_t> affected_set(const EcosystemNetwork& net, std::uint32_t target,
                                        const DefensePlan& plan);

// Download-weighted coverage of the affected set: the fraction of all
// downloads belonging to packages the attack reaches.
double impact(const EcosystemNetwork& net, std::uint32_t target, const DefensePlan& plan);
double impact_by_name(const EcosystemNetwork& net, std::string_view target,
                      const DefensePlan& plan);

// Arithmetic mean of impact over the target set.
double risk(const EcosystemNetwork& net, const std::vector<std::uint32_t>& targets,
            const DefensePlan& plan, unsigned jobs = 1);

// Undefended impact for every package, computed by SCC condensation and
// reverse-topological bitset propagation. Matches per-target BFS exactly.
std::vector<double> all_impacts(const EcosystemNetwork& net);

struct AttackSelection {
    enum class Kind { TopImpact, RandomActive, Fragile };
    Kind kind = Kind::TopImpact;
    std::size_t count = 0;
    std::uint64_t seed = 0;  // RandomActive only
};

// Target list per selection strategy: TopImpact sorts by undefended impact
// (ties by name); RandomActive draws a seeded uniform sample; Fragile takes
// the bottom-k by maintainer count (requires maintainer data).
std::vector<std::uint32_t> rank_targets(const EcosystemNetwork& net, const AttackSelection& sel);

// Brandes betweenness on the dependency direction (dependent -> dependency),
// unweighted, counting ordered source/target pairs with endpoints excluded.
// sample_count == 0 (or >= node count) runs every source exactly; otherwise
// accumulation runs from `sample_count` seeded pivots scaled by n/k.
std::vector<double> betweenness(const EcosystemNetwork& net, std::size_t sample_count = 0,
                                std::uint64_t seed = 0);

// Top-n packages by strategy score, ties broken by package name. A
// precomputed betweenness vector avoids recomputation across strategies.
std::vector<std::uint32_t> select_defense(const EcosystemNetwork& net, DefenseStrategy strategy,
                                          std::size_t n,
                                          const std::vector<double>* betweenness_scores = nullptr);

struct CurvePoint {
    std::size_t n = 0;
    double risk = 0.0;
};

// risk(A) for every defended-prefix size 0..n_max of the strategy's ranking.
std::vector<CurvePoint> defense_curve(const EcosystemNetwork& net,
                                      const std::vector<std::uint32_t>& targets,
                                      PinningMechanism mechanism, DefenseStrategy strategy,
                                      std::size_t n_max,
                                      FloatingMode mode = FloatingMode::AssumeAllFloating,
                                      unsigned jobs = 1,
                                      const std::vector<double>* betweenness_scores = nullptr);

void write_curve_csv(std::ostream& out, PinningMechanism mechanism, DefenseStrategy strategy,
                     const std::vector<CurvePoint>& points);

} // namespace pinsim
