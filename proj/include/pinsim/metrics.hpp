#pragma once

#include "pinsim/registry.hpp"
#include "pinsim/resolver.hpp"
#include "pinsim/semver.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pinsim {

// A security advisory covering a range of vulnerable versions of one package.
struct Advisory {
    std::string id;
    std::string package;
    VersionConstraint affected;
    std::int64_t published_at = 0;
};

class AdvisoryDb {
public:
    void add(Advisory advisory);  // throws Error(data_error) on duplicate id

    static AdvisoryDb load(std::istream& in);
    static AdvisoryDb load_file(const std::string& path);
    void write(std::ostream& out) const;

    const std::vector<Advisory>* find(std::string_view package) const;
    std::size_t size() const { return count_; }

private:
    std::map<std::string, std::vector<Advisory>, std::less<>> by_package_;
    std::map<std::string, bool> ids_;
    std::size_t count_ = 0;
};

enum class Condition { Control, Pinning };
std::string_view to_string(Condition c);

// One panel row: a project observed at one of the five schedule times under
// one condition, with all five outcome metrics and the graph size.
struct MetricRecord {
    std::string project;
    int time_index = 0;  // 0..4
    Condition condition = Condition::Control;
    std::uint64_t n_floating = 0;
    std::uint64_t n_auto_updates = 0;
    std::uint64_t n_vuln = 0;
    std::uint64_t n_outdated_deps = 0;
    std::uint64_t n_bloated = 0;
    std::uint64_t size_g = 0;
};

// Edges whose constraint class is any floating variant (root edges included).
std::uint64_t n_floating(const ResolvedGraph& g);

// Automatic updates between t0 and t: for every floating edge of the t0
// graph, the target package's publish events in (t0, t] are replayed in time
// order, counting each newly visible satisfying release that strictly
// exceeds the currently installed version (which it then becomes). Floating
// edges that exist only in the t graph replay from their first possible
// appearance (the declaring release's publish time).
std::uint64_t n_auto_updates(const Manifest& manifest, const RegistrySnapshot& snapshot,
                             std::int64_t t0, std::int64_t t, const ResolveOptions& opts);

// Non-root nodes matched by at least one advisory published at or before t.
// Counted per node: duplicate versions of a package each count.
std::uint64_t n_vuln(const ResolvedGraph& g, const AdvisoryDb& db, std::int64_t t);

// Direct (root-edge) targets strictly below the highest visible stable
// version of their package. Prerelease-only newer versions do not count.
std::uint64_t n_outdated_deps(const ResolvedGraph& g, const TimeView& view);

// Packages present at two or more distinct versions.
std::uint64_t n_bloated(const ResolvedGraph& g);

struct PanelBuildResult {
    std::vector<MetricRecord> records;
    std::vector<std::string> dropped;  // per-project diagnostics
};

// Builds the balanced panel: 10 records per project (5 times x control /
// pinning). The pinning condition resolves pin_manifest(m) against the t0
// view. A project with any failed resolution is dropped entirely so the
// panel stays balanced.
PanelBuildResult build_panel(const std::vector<Manifest>& projects,
                             const RegistrySnapshot& snapshot,
                             const std::array<std::int64_t, 5>& schedule, const AdvisoryDb& db,
                             const ResolveOptions& opts, unsigned jobs = 1);

void write_panel_csv(std::ostream& out, const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_panel_csv(std::istream& in);

inline constexpr std::array<const char*, 5> kMetricNames = {
    "n_floating", "n_auto_updates", "n_vuln", "n_outdated_deps", "n_bloated"};

std::uint64_t metric_value(const MetricRecord& r, std::string_view metric);

} // namespace pinsim
