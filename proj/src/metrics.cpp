#include "pinsim/metrics.hpp"

#include "pinsim/csv.hpp"
#include "pinsim/error.hpp"
#include "pinsim/time.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace pinsim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// AdvisoryDb
// ---------------------------------------------------------------------------

void AdvisoryDb::add(Advisory advisory) {
    auto [it, inserted] = ids_.emplace(advisory.id, true);
    if (!inserted) throw_error(errc::data_error, "duplicate advisory id: " + advisory.id);
    by_package_[advisory.package].push_back(std::move(advisory));
    ++count_;
}

AdvisoryDb AdvisoryDb::load(std::istream& in) {
    AdvisoryDb db;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            Advisory a;
            a.id = j.at("id").get<std::string>();
            a.package = j.at("package").get<std::string>();
            a.affected = VersionConstraint::parse(j.at("affected").get<std::string>());
            a.published_at = parse_rfc3339(j.at("published_at").get<std::string>());
            db.add(std::move(a));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError("advisories line " + std::to_string(line_no) + ": " + e.what(),
                             line_no);
        }
    }
    return db;
}

AdvisoryDb AdvisoryDb::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(errc::io_error, "cannot open advisories file: " + path);
    return load(in);
}

void AdvisoryDb::write(std::ostream& out) const {
    for (const auto& [pkg, advisories] : by_package_) {
        for (const Advisory& a : advisories) {
            json j;
            j["id"] = a.id;
            j["package"] = a.package;
            j["affected"] = a.affected.source;
            j["published_at"] = format_rfc3339(a.published_at);
            out << j.dump() << '\n';
        }
    }
}

const std::vector<Advisory>* AdvisoryDb::find(std::string_view package) const {
    auto it = by_package_.find(package);
    return it == by_package_.end() ? nullptr : &it->second;
}

std::string_view to_string(Condition c) {
    return c == Condition::Control ? "control" : "pinning";
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

std::uint64_t n_floating(const ResolvedGraph& g) {
    std::uint64_t count = 0;
    for (const ResolvedEdge& e : g.edges) {
        if (is_floating(e.constraint.kind)) ++count;
    }
    return count;
}

namespace {

// Identity of a dependency declaration across the two resolutions. The
// declaring package's version is deliberately absent: when a package merely
// updates itself, its unchanged declarations are the same logical edges, not
// new ones.
using EdgeKey = std::tuple<std::string, std::string, std::string>;

EdgeKey edge_key(const ResolvedGraph& g, const ResolvedEdge& e) {
    return {g.nodes[e.from].package, g.nodes[e.to].package, e.constraint.source};
}

// Replays publish events of `package` in (window_start, t], starting from
// `current`, counting installs of satisfying releases that strictly exceed
// the running version.
std::uint64_t replay_edge(const RegistrySnapshot& snapshot, const std::string& package,
                          const VersionConstraint& c, std::optional<Version> current,
                          std::int64_t window_start, std::int64_t t) {
    const auto* entry = snapshot.find(package);
    if (!entry) return 0;
    std::uint64_t count = 0;
    for (std::uint32_t idx : entry->by_time) {
        const Release& r = entry->releases[idx];
        if (r.published_at <= window_start || r.published_at > t) continue;
        if (!satisfies(r.version, c)) continue;
        if (!current) {
            current = r.version;  // first install, not an update
        } else if (r.version > *current) {
            ++count;
            current = r.version;
        }
    }
    return count;
}

} // namespace

std::uint64_t n_auto_updates(const Manifest& manifest, const RegistrySnapshot& snapshot,
                             std::int64_t t0, std::int64_t t, const ResolveOptions& opts) {
    if (t < t0) throw_error(errc::domain_error, "n_auto_updates requires t >= t0");
    const ResolvedGraph g0 = resolve(snapshot.at(t0), manifest, opts);
    if (t == t0) return 0;
    const ResolvedGraph gt = resolve(snapshot.at(t), manifest, opts);

    std::uint64_t count = 0;
    std::set<EdgeKey> in_t0;
    for (const ResolvedEdge& e : g0.edges) {
        if (!is_floating(e.constraint.kind)) continue;
        in_t0.insert(edge_key(g0, e));
        count += replay_edge(snapshot, g0.nodes[e.to].package, e.constraint,
                             g0.nodes[e.to].version, t0, t);
    }
    for (const ResolvedEdge& e : gt.edges) {
        if (!is_floating(e.constraint.kind)) continue;
        if (in_t0.count(edge_key(gt, e))) continue;
        // New edge: it can exist only once its declaring release is
        // installed, which is no earlier than that release's publish time.
        const ResolvedNode& from = gt.nodes[e.from];
        std::int64_t start = t0;
        if (!from.package.empty()) {
            if (const Release* rel = snapshot.at(t).find_release(from.package, from.version)) {
                start = std::max(t0, rel->published_at);
            }
        }
        const std::string& target = gt.nodes[e.to].package;
        std::optional<Version> current;
        try {
            current = snapshot.at(start).latest_satisfying(target, e.constraint);
        } catch (const Error& err) {
            if (err.code() != errc::unknown_package) throw;
        }
        count += replay_edge(snapshot, target, e.constraint, current, start, t);
    }
    return count;
}

std::uint64_t n_vuln(const ResolvedGraph& g, const AdvisoryDb& db, std::int64_t t) {
    std::uint64_t count = 0;
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        const ResolvedNode& node = g.nodes[i];
        const auto* advisories = db.find(node.package);
        if (!advisories) continue;
        for (const Advisory& a : *advisories) {
            if (a.published_at <= t && satisfies(node.version, a.affected)) {
                ++count;
                break;
            }
        }
    }
    return count;
}

std::uint64_t n_outdated_deps(const ResolvedGraph& g, const TimeView& view) {
    std::uint64_t count = 0;
    for (std::uint32_t target : g.root_edge_targets()) {
        const ResolvedNode& node = g.nodes[target];
        std::optional<Version> latest;
        try {
            latest = view.latest_stable(node.package);
        } catch (const Error& e) {
            if (e.code() != errc::unknown_package) throw;
        }
        if (latest && node.version < *latest) ++count;
    }
    return count;
}

std::uint64_t n_bloated(const ResolvedGraph& g) {
    std::map<std::string_view, std::set<std::string>> versions;
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        versions[g.nodes[i].package].insert(g.nodes[i].version.str());
    }
    std::uint64_t count = 0;
    for (const auto& [pkg, vs] : versions) {
        if (vs.size() >= 2) ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Panel assembly
// ---------------------------------------------------------------------------

namespace {

struct ProjectOutcome {
    std::vector<MetricRecord> records;
    std::string diagnostic;  // non-empty means dropped
};

ProjectOutcome evaluate_project(const Manifest& project, const RegistrySnapshot& snapshot,
                                const std::array<std::int64_t, 5>& schedule, const AdvisoryDb& db,
                                const ResolveOptions& opts) {
    ProjectOutcome outcome;
    try {
        const TimeView t0_view = snapshot.at(schedule[0]);
        const Manifest pinned = pin_manifest(project, t0_view);
        for (int ti = 0; ti < 5; ++ti) {
            const std::int64_t t = schedule[ti];
            const TimeView view = snapshot.at(t);
            for (Condition cond : {Condition::Control, Condition::Pinning}) {
                const Manifest& m = cond == Condition::Control ? project : pinned;
                const ResolvedGraph g = resolve(view, m, opts);
                MetricRecord rec;
                rec.project = project.name;
                rec.time_index = ti;
                rec.condition = cond;
                rec.n_floating = n_floating(g);
                rec.n_auto_updates = n_auto_updates(m, snapshot, schedule[0], t, opts);
                rec.n_vuln = n_vuln(g, db, t);
                rec.n_outdated_deps = n_outdated_deps(g, view);
                rec.n_bloated = n_bloated(g);
                rec.size_g = g.size();
                outcome.records.push_back(std::move(rec));
            }
        }
    } catch (const std::exception& e) {
        outcome.records.clear();
        outcome.diagnostic = project.name + ": " + e.what();
    }
    return outcome;
}

} // namespace

PanelBuildResult build_panel(const std::vector<Manifest>& projects,
                             const RegistrySnapshot& snapshot,
                             const std::array<std::int64_t, 5>& schedule, const AdvisoryDb& db,
                             const ResolveOptions& opts, unsigned jobs) {
    for (int i = 1; i < 5; ++i) {
        if (schedule[i] <= schedule[i - 1]) {
            throw_error(errc::invalid_config, "panel schedule must be strictly increasing");
        }
    }

    std::vector<ProjectOutcome> outcomes(projects.size());
    if (jobs <= 1 || projects.size() <= 1) {
        for (std::size_t i = 0; i < projects.size(); ++i) {
            outcomes[i] = evaluate_project(projects[i], snapshot, schedule, db, opts);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= projects.size()) break;
                outcomes[i] = evaluate_project(projects[i], snapshot, schedule, db, opts);
            }
        };
        std::vector<std::thread> pool;
        const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(projects.size()));
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    PanelBuildResult result;
    for (ProjectOutcome& o : outcomes) {
        if (!o.diagnostic.empty()) {
            result.dropped.push_back(std::move(o.diagnostic));
        } else {
            for (MetricRecord& r : o.records) result.records.push_back(std::move(r));
        }
    }
    return result;
}

void write_panel_csv(std::ostream& out, const std::vector<MetricRecord>& records) {
    out << "project,time_index,condition,n_floating,n_auto_updates,n_vuln,n_outdated_deps,"
           "n_bloated,size_g\n";
    for (const MetricRecord& r : records) {
        csv::write_row(out, {r.project, std::to_string(r.time_index),
                             std::string(to_string(r.condition)), std::to_string(r.n_floating),
                             std::to_string(r.n_auto_updates), std::to_string(r.n_vuln),
                             std::to_string(r.n_outdated_deps), std::to_string(r.n_bloated),
                             std::to_string(r.size_g)});
    }
}

namespace {

std::uint64_t parse_u64_field(const std::string& s, std::size_t line_no) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("panel line " + std::to_string(line_no) + ": bad number \"" + s + "\"",
                         line_no);
    }
    return value;
}

} // namespace

std::vector<MetricRecord> read_panel_csv(std::istream& in) {
    std::vector<MetricRecord> records;
    const auto rows = csv::read_all(in);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (i == 0 && !row.empty() && row[0] == "project") continue;  // header
        if (row.size() != 9) {
            throw ParseError("panel line " + std::to_string(i + 1) + ": expected 9 fields", i + 1);
        }
        MetricRecord r;
        r.project = row[0];
        r.time_index = static_cast<int>(parse_u64_field(row[1], i + 1));
        if (row[2] == "control") {
            r.condition = Condition::Control;
        } else if (row[2] == "pinning") {
            r.condition = Condition::Pinning;
        } else {
            throw ParseError("panel line " + std::to_string(i + 1) + ": bad condition", i + 1);
        }
        r.n_floating = parse_u64_field(row[3], i + 1);
        r.n_auto_updates = parse_u64_field(row[4], i + 1);
        r.n_vuln = parse_u64_field(row[5], i + 1);
        r.n_outdated_deps = parse_u64_field(row[6], i + 1);
        r.n_bloated = parse_u64_field(row[7], i + 1);
        r.size_g = parse_u64_field(row[8], i + 1);
        records.push_back(std::move(r));
    }
    return records;
}

std::uint64_t metric_value(const MetricRecord& r, std::string_view metric) {
    if (metric == "n_floating") return r.n_floating;
    if (metric == "n_auto_updates") return r.n_auto_updates;
    if (metric == "n_vuln") return r.n_vuln;
    if (metric == "n_outdated_deps") return r.n_outdated_deps;
    if (metric == "n_bloated") return r.n_bloated;
    throw_error(errc::domain_error, "unknown metric: " + std::string(metric));
}

} // namespace pinsim
