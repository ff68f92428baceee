#pragma once

#include "pinsim/semver.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pinsim {

// One published release of a package.
struct Release {
    std::string package;
    Version version;
    std::int64_t published_at = 0;  // epoch seconds UTC
    std::map<std::string, VersionConstraint> dependencies;
    std::map<std::string, VersionConstraint> dev_dependencies;
};

// The root of a resolution. Unlike a Release it has no version and may name
// packages absent from the registry (an error at resolve time).
struct Manifest {
    std::string name;
    std::map<std::string, VersionConstraint> dependencies;
    std::map<std::string, VersionConstraint> dev_dependencies;
};

class TimeView;

// Immutable database of releases with publish timestamps and per-package
// annual download counts. Populate with add()/set_downloads(), then call
// finalize(); after that the snapshot is read-only and safe to share across
// threads.
class RegistrySnapshot {
public:
    struct PackageEntry {
        std::vector<Release> releases;          // sorted by version after finalize()
        std::vector<std::uint32_t> by_time;     // release indices ordered by (published_at, version)
        std::uint64_t downloads = 0;
    };

    // Throws Error(duplicate_release) when (package, version) already exists
    // and Error(data_error) when a release depends on itself.
    void add(Release release);
    void set_downloads(std::string_view package, std::uint64_t downloads);
    void finalize();

    // Reads the line-delimited JSON record stream described in the file docs
    // (one release object per line). Errors carry the one-based line number.
    static RegistrySnapshot load(std::istream& in);
    static RegistrySnapshot load_file(const std::string& path);
    void write(std::ostream& out) const;

    const PackageEntry* find(std::string_view package) const;
    bool has_package(std::string_view package) const { return find(package) != nullptr; }
    std::size_t package_count() const { return packages_.size(); }
    std::size_t release_count() const { return release_count_; }
    std::uint64_t downloads(std::string_view package) const;
    const std::map<std::string, PackageEntry, std::less<>>& packages() const { return packages_; }

    TimeView at(std::int64_t cutoff) const;

private:
    std::map<std::string, PackageEntry, std::less<>> packages_;
    std::size_t release_count_ = 0;
};

// A snapshot restricted to releases with published_at <= cutoff (inclusive,
// mirroring npm's --before behavior). Cheap value object.
class TimeView {
public:
    TimeView(const RegistrySnapshot& base, std::int64_t cutoff) : base_(&base), cutoff_(cutoff) {}

    std::int64_t cutoff() const { return cutoff_; }
    const RegistrySnapshot& base() const { return *base_; }

    bool visible(const Release& r) const { return r.published_at <= cutoff_; }

    // Highest visible version satisfying c. Prereleases are admitted only
    // when the constraint itself mentions one (the satisfies() rule).
    // Throws Error(unknown_package) when the package is absent entirely.
    std::optional<Version> latest_satisfying(std::string_view package,
                                             const VersionConstraint& c) const;

    // Lowest visible satisfying version; same contract as latest_satisfying.
    std::optional<Version> lowest_satisfying(std::string_view package,
                                             const VersionConstraint& c) const;

    // Highest visible non-prerelease version, if any.
    std::optional<Version> latest_stable(std::string_view package) const;

    // Visible release record, or nullptr.
    const Release* find_release(std::string_view package, const Version& v) const;

    std::size_t visible_count(std::string_view package) const;

private:
    const RegistrySnapshot::PackageEntry* entry(std::string_view package) const;

    const RegistrySnapshot* base_;
    std::int64_t cutoff_;
};

// Manifest (de)serialization: one JSON object per line with keys
// name / dependencies / dev_dependencies.
std::vector<Manifest> load_manifests(std::istream& in);
std::vector<Manifest> load_manifests_file(const std::string& path);
Manifest parse_manifest_json(std::string_view json_text);
std::string manifest_to_json(const Manifest& m);
void write_manifests(std::ostream& out, const std::vector<Manifest>& manifests);

} // namespace pinsim
