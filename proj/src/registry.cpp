#include "pinsim/registry.hpp"

#include "pinsim/error.hpp"
#include "pinsim/time.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pinsim {

using nlohmann::json;

namespace {

std::map<std::string, VersionConstraint> parse_dep_map(const json& j, const char* key) {
    std::map<std::string, VersionConstraint> deps;
    if (!j.contains(key)) return deps;
    const json& m = j.at(key);
    if (m.is_null()) return deps;
    if (!m.is_object()) throw std::runtime_error(std::string(key) + " must be an object");
    for (const auto& [name, value] : m.items()) {
        if (!value.is_string()) throw std::runtime_error(std::string(key) + " values must be strings");
        deps.emplace(name, VersionConstraint::parse(value.get<std::string>()));
    }
    return deps;
}

json dep_map_to_json(const std::map<std::string, VersionConstraint>& deps) {
    json m = json::object();
    for (const auto& [name, c] : deps) m[name] = c.source;
    return m;
}

} // namespace

void RegistrySnapshot::add(Release release) {
    if (release.dependencies.count(release.package) ||
        release.dev_dependencies.count(release.package)) {
        throw_error(errc::data_error,
                    "release " + release.package + "@" + release.version.str() +
                        " depends on itself");
    }
    PackageEntry& entry = packages_[release.package];
    for (const Release& existing : entry.releases) {
        if (existing.version == release.version) {
            throw_error(errc::duplicate_release,
                        "duplicate release " + release.package + "@" + release.version.str());
        }
    }
    entry.releases.push_back(std::move(release));
    ++release_count_;
}

void RegistrySnapshot::set_downloads(std::string_view package, std::uint64_t downloads) {
    packages_[std::string(package)].downloads = downloads;
}

void RegistrySnapshot::finalize() {
    for (auto& [name, entry] : packages_) {
        std::sort(entry.releases.begin(), entry.releases.end(),
                  [](const Release& a, const Release& b) { return a.version < b.version; });
        entry.by_time.resize(entry.releases.size());
        for (std::uint32_t i = 0; i < entry.by_time.size(); ++i) entry.by_time[i] = i;
        std::sort(entry.by_time.begin(), entry.by_time.end(),
                  [&entry](std::uint32_t a, std::uint32_t b) {
                      if (entry.releases[a].published_at != entry.releases[b].published_at) {
                          return entry.releases[a].published_at < entry.releases[b].published_at;
                      }
                      return entry.releases[a].version < entry.releases[b].version;
                  });
    }
}

RegistrySnapshot RegistrySnapshot::load(std::istream& in) {
    RegistrySnapshot snapshot;
    std::map<std::string, std::uint64_t> seen_downloads;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("registry line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        try {
            Release r;
            r.package = j.at("name").get<std::string>();
            r.version = Version::parse(j.at("version").get<std::string>());
            r.published_at = parse_rfc3339(j.at("published_at").get<std::string>());
            r.dependencies = parse_dep_map(j, "dependencies");
            r.dev_dependencies = parse_dep_map(j, "dev_dependencies");
            if (j.contains("downloads")) {
                const std::uint64_t d = j.at("downloads").get<std::uint64_t>();
                auto [it, inserted] = seen_downloads.emplace(r.package, d);
                if (!inserted && it->second != d) {
                    throw std::runtime_error("conflicting downloads for package " + r.package);
                }
                snapshot.set_downloads(r.package, d);
            }
            snapshot.add(std::move(r));
        } catch (const Error& e) {
            if (e.code() == errc::duplicate_release) {
                throw Error(errc::duplicate_release,
                            "registry line " + std::to_string(line_no) + ": " + e.what());
            }
            throw ParseError("registry line " + std::to_string(line_no) + ": " + e.what(), line_no);
        } catch (const std::exception& e) {
            throw ParseError("registry line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
    snapshot.finalize();
    return snapshot;
}

RegistrySnapshot RegistrySnapshot::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(errc::io_error, "cannot open registry file: " + path);
    return load(in);
}

void RegistrySnapshot::write(std::ostream& out) const {
    for (const auto& [name, entry] : packages_) {
        for (const Release& r : entry.releases) {
            json j;
            j["name"] = r.package;
            j["version"] = r.version.str();
            j["published_at"] = format_rfc3339(r.published_at);
            j["dependencies"] = dep_map_to_json(r.dependencies);
            j["dev_dependencies"] = dep_map_to_json(r.dev_dependencies);
            j["downloads"] = entry.downloads;
            out << j.dump() << '\n';
        }
    }
}

const RegistrySnapshot::PackageEntry* RegistrySnapshot::find(std::string_view package) const {
    auto it = packages_.find(package);
    return it == packages_.end() ? nullptr : &it->second;
}

std::uint64_t RegistrySnapshot::downloads(std::string_view package) const {
    const PackageEntry* e = find(package);
    return e ? e->downloads : 0;
}

TimeView RegistrySnapshot::at(std::int64_t cutoff) const { return TimeView(*this, cutoff); }

// ---------------------------------------------------------------------------
// TimeView
// ---------------------------------------------------------------------------

const RegistrySnapshot::PackageEntry* TimeView::entry(std::string_view package) const {
    const auto* e = base_->find(package);
    if (!e) throw_error(errc::unknown_package, "unknown package: " + std::string(package));
    return e;
}

std::optional<Version> TimeView::latest_satisfying(std::string_view package,
                                                   const VersionConstraint& c) const {
    const auto* e = entry(package);
    for (auto it = e->releases.rbegin(); it != e->releases.rend(); ++it) {
        if (!visible(*it)) continue;
        if (satisfies(it->version, c)) return it->version;
    }
    return std::nullopt;
}

std::optional<Version> TimeView::lowest_satisfying(std::string_view package,
                                                   const VersionConstraint& c) const {
    const auto* e = entry(package);
    for (const Release& r : e->releases) {
        if (!visible(r)) continue;
        if (satisfies(r.version, c)) return r.version;
    }
    return std::nullopt;
}

std::optional<Version> TimeView::latest_stable(std::string_view package) const {
    const auto* e = entry(package);
    for (auto it = e->releases.rbegin(); it != e->releases.rend(); ++it) {
        if (!visible(*it)) continue;
        if (!it->version.is_prerelease()) return it->version;
    }
    return std::nullopt;
}

const Release* TimeView::find_release(std::string_view package, const Version& v) const {
    const auto* e = base_->find(package);
    if (!e) return nullptr;
    for (const Release& r : e->releases) {
        if (r.version == v && visible(r)) return &r;
    }
    return nullptr;
}

std::size_t TimeView::visible_count(std::string_view package) const {
    const auto* e = base_->find(package);
    if (!e) return 0;
    std::size_t n = 0;
    for (const Release& r : e->releases) {
        if (visible(r)) ++n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

Manifest parse_manifest_json(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what(), 0);
    }
    try {
        Manifest m;
        m.name = j.value("name", "");
        m.dependencies = parse_dep_map(j, "dependencies");
        m.dev_dependencies = parse_dep_map(j, "dev_dependencies");
        return m;
    } catch (const std::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what(), 0);
    }
}

std::string manifest_to_json(const Manifest& m) {
    json j;
    j["name"] = m.name;
    j["dependencies"] = dep_map_to_json(m.dependencies);
    j["dev_dependencies"] = dep_map_to_json(m.dev_dependencies);
    return j.dump();
}

std::vector<Manifest> load_manifests(std::istream& in) {
    std::vector<Manifest> manifests;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            manifests.push_back(parse_manifest_json(line));
        } catch (const ParseError& e) {
            throw ParseError("projects line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
    return manifests;
}

std::vector<Manifest> load_manifests_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(errc::io_error, "cannot open projects file: " + path);
    return load_manifests(in);
}

void write_manifests(std::ostream& out, const std::vector<Manifest>& manifests) {
    for (const Manifest& m : manifests) out << manifest_to_json(m) << '\n';
}

} // namespace pinsim
