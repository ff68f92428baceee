#include "pinsim/synth.hpp"

#include "pinsim/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace pinsim {

namespace {

// All randomness flows through these helpers; std::mt19937_64 output is
// specified bit-exactly by the standard and none of the std distribution
// templates (which are not) are used.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::uint64_t next() { return engine(); }

    std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

    // Geometric with the given mean (>= 1 draws).
    std::uint32_t geometric(double mean) {
        if (mean <= 1.0) return 1;
        const auto threshold =
            static_cast<std::uint64_t>(18446744073709551615.0 / mean);  // p = 1/mean
        std::uint32_t count = 1;
        while (count < 1000 && next() >= threshold) ++count;
        return count;
    }

    // Mean = mean, uniform over [0, 2*mean].
    std::uint32_t around_mean(double mean) {
        const auto span = static_cast<std::uint64_t>(2.0 * mean + 1.0);
        return static_cast<std::uint32_t>(below(span));
    }

    // Index into cumulative per-2^32 thresholds.
    std::size_t weighted(const std::vector<std::uint64_t>& cumulative) {
        const std::uint64_t r = next() >> 32;
        for (std::size_t i = 0; i < cumulative.size(); ++i) {
            if (r < cumulative[i]) return i;
        }
        return cumulative.size() - 1;
    }

    // Heavy-tailed positive integer: uniform base scaled by a geometric
    // power of two (the count of trailing one bits).
    std::uint64_t heavy_tail(std::uint64_t base_min, std::uint64_t base_span, int max_doublings) {
        const std::uint64_t base = base_min + below(base_span);
        const int doublings = std::min(std::countr_one(next()), max_doublings);
        return base << doublings;
    }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        const auto threshold = static_cast<std::uint64_t>(p * 18446744073709551615.0);
        return next() < threshold;
    }
};

std::vector<std::uint64_t> cumulative_weights(const std::array<double, 5>& mix) {
    std::vector<std::uint64_t> cumulative(5, 0);
    double acc = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        acc += mix[i];
        cumulative[i] = static_cast<std::uint64_t>(acc * 4294967296.0);
    }
    cumulative[4] = 4294967296ULL;
    return cumulative;
}

std::string package_name(std::uint32_t index, std::uint32_t total) {
    int width = 1;
    for (std::uint32_t limit = 10; limit < total; limit *= 10) ++width;
    std::ostringstream out;
    out << 'p';
    std::string digits = std::to_string(index);
    out << std::string(static_cast<std::size_t>(width) - digits.size(), '0') << digits;
    return out.str();
}

constexpr std::array<ConstraintClass, 5> kMixOrder = {
    ConstraintClass::FloatingMajor, ConstraintClass::FloatingMinor, ConstraintClass::FloatingPatch,
    ConstraintClass::Pinned, ConstraintClass::Other};

std::string constraint_text(ConstraintClass cls, const Version& anchor, const Version& alt) {
    switch (cls) {
    case ConstraintClass::FloatingMajor: return ">=" + anchor.str();
    case ConstraintClass::FloatingMinor: return "^" + anchor.str();
    case ConstraintClass::FloatingPatch: return "~" + anchor.str();
    case ConstraintClass::Pinned: return anchor.str();
    case ConstraintClass::Other: return "^" + anchor.str() + " || ^" + alt.str();
    }
    return anchor.str();
}

// Versions of one package in publish order.
std::vector<Version> version_chain(Rng& rng, std::size_t count) {
    std::vector<Version> versions;
    versions.reserve(count);
    Version v;
    v.major = 1;
    versions.push_back(v);
    for (std::size_t i = 1; i < count; ++i) {
        const std::uint64_t bump = rng.below(100);
        if (bump < 10) {
            ++v.major;
            v.minor = 0;
            v.patch = 0;
        } else if (bump < 35) {
            ++v.minor;
            v.patch = 0;
        } else {
            ++v.patch;
        }
        versions.push_back(v);
    }
    return versions;
}

// Releases published at or before `time`, as (index into chain) count.
std::size_t visible_release_count(const std::vector<std::int64_t>& times, std::int64_t time) {
    std::size_t n = 0;
    while (n < times.size() && times[n] <= time) ++n;
    return n;
}

struct TargetSampler {
    GenConfig::Attachment attachment;
    std::vector<std::uint32_t> pool;  // preferential: node repeated per selection

    void add_node(std::uint32_t idx) { pool.push_back(idx); }

    // Picks up to `want` distinct targets among nodes satisfying `eligible`
    // (monotone prefix: the first `limit` nodes are eligible).
    std::vector<std::uint32_t> pick(Rng& rng, std::uint32_t limit, std::uint32_t want) {
        std::vector<std::uint32_t> chosen;
        if (limit == 0 || want == 0) return chosen;
        std::set<std::uint32_t> seen;
        const std::uint32_t attempts = want * 8 + 8;
        for (std::uint32_t a = 0; a < attempts && chosen.size() < want; ++a) {
            std::uint32_t candidate;
            if (attachment == GenConfig::Attachment::Preferential && !pool.empty()) {
                candidate = pool[rng.below(pool.size())];
                if (candidate >= limit) continue;
            } else {
                candidate = static_cast<std::uint32_t>(rng.below(limit));
            }
            if (seen.insert(candidate).second) {
                chosen.push_back(candidate);
                pool.push_back(candidate);  // reinforce
            }
        }
        return chosen;
    }
};

} // namespace

void GenConfig::validate() const {
    if (n_packages == 0) throw_error(errc::invalid_config, "n_packages must be positive");
    if (releases_per_package < 1.0) {
        throw_error(errc::invalid_config, "releases_per_package must be >= 1");
    }
    if (deps_per_release < 0.0) throw_error(errc::invalid_config, "deps_per_release must be >= 0");
    if (window_end <= window_start) {
        throw_error(errc::invalid_config, "time window must be non-empty");
    }
    double sum = 0.0;
    for (double w : class_mix) {
        if (w < 0.0) throw_error(errc::invalid_config, "class mix weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw_error(errc::invalid_config, "class mix weights must sum to 1");
    }
    if (advisory_rate < 0.0 || advisory_rate > 1.0) {
        throw_error(errc::invalid_config, "advisory_rate must be in [0, 1]");
    }
}

GeneratedRegistry generate_registry(const GenConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const auto mix = cumulative_weights(cfg.class_mix);
    const std::uint64_t window = static_cast<std::uint64_t>(cfg.window_end - cfg.window_start);

    GeneratedRegistry out;
    std::vector<std::vector<std::int64_t>> publish_times(cfg.n_packages);
    std::vector<std::vector<Version>> versions(cfg.n_packages);
    std::vector<std::string> names(cfg.n_packages);
    TargetSampler sampler{cfg.attachment, {}};

    for (std::uint32_t i = 0; i < cfg.n_packages; ++i) {
        names[i] = package_name(i, cfg.n_packages);
        const std::uint32_t release_count = rng.geometric(cfg.releases_per_package);
        std::vector<std::int64_t> times(release_count);
        for (auto& t : times) t = cfg.window_start + static_cast<std::int64_t>(rng.below(window + 1));
        std::sort(times.begin(), times.end());
        // Distinct publish instants keep the replay order unambiguous.
        for (std::size_t k = 1; k < times.size(); ++k) {
            if (times[k] <= times[k - 1]) times[k] = times[k - 1] + 1;
        }
        publish_times[i] = times;
        versions[i] = version_chain(rng, release_count);

        for (std::size_t r = 0; r < release_count; ++r) {
            Release release;
            release.package = names[i];
            release.version = versions[i][r];
            release.published_at = times[r];

            const std::uint32_t want = rng.around_mean(cfg.deps_per_release);
            for (std::uint32_t target : sampler.pick(rng, i, want)) {
                const std::size_t visible =
                    visible_release_count(publish_times[target], release.published_at);
                if (visible == 0) continue;  // target not yet published
                const std::size_t anchor_idx = rng.below(visible);
                const std::size_t alt_idx = rng.below(visible);
                const ConstraintClass cls = kMixOrder[rng.weighted(mix)];
                release.dependencies.emplace(
                    names[target],
                    VersionConstraint::parse(constraint_text(cls, versions[target][anchor_idx],
                                                             versions[target][alt_idx])));
            }
            out.registry.add(std::move(release));
        }
        sampler.add_node(i);
        out.registry.set_downloads(names[i], rng.heavy_tail(1000, 9000, 14));

        if (rng.chance(cfg.advisory_rate)) {
            Advisory a;
            a.id = "ADV-" + names[i] + "-1";
            a.package = names[i];
            const std::size_t cut = rng.below(versions[i].size());
            a.affected = VersionConstraint::parse("<=" + versions[i][cut].str());
            a.published_at =
                cfg.window_start + static_cast<std::int64_t>(rng.below(window + 1));
            out.advisories.add(std::move(a));
        }
    }
    out.registry.finalize();
    return out;
}

std::vector<Manifest> generate_projects(const GenConfig& cfg, const RegistrySnapshot& registry,
                                        std::int64_t anchor_time, std::uint32_t count) {
    cfg.validate();
    Rng rng(cfg.seed ^ 0x70726f6a65637473ULL);  // independent stream per artifact

    // Packages with at least one release visible at the anchor time, with
    // their visible versions.
    std::vector<std::pair<std::string, std::vector<Version>>> anchored;
    for (const auto& [name, entry] : registry.packages()) {
        std::vector<Version> visible;
        for (const Release& r : entry.releases) {
            if (r.published_at <= anchor_time) visible.push_back(r.version);
        }
        if (!visible.empty()) anchored.emplace_back(name, std::move(visible));
    }

    const auto mix = cumulative_weights(cfg.class_mix);
    std::vector<Manifest> projects;
    projects.reserve(count);
    int width = 1;
    for (std::uint32_t limit = 10; limit < std::max(count, 1u); limit *= 10) ++width;
    for (std::uint32_t i = 0; i < count; ++i) {
        Manifest m;
        std::string digits = std::to_string(i);
        m.name = "proj" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
        if (anchored.empty()) {
            projects.push_back(std::move(m));
            continue;
        }
        // Mix tiny projects (one dep on one of the earliest packages, whose
        // closures are near-empty in the acyclic registry) with deep ones so
        // resolved graph sizes span from a handful of nodes upward.
        const bool shallow = rng.chance(0.4);
        const std::size_t pool =
            shallow ? std::max<std::size_t>(1, anchored.size() / 50) : anchored.size();
        const std::uint32_t want = shallow ? 1 : 1 + rng.around_mean(cfg.deps_per_release);
        std::set<std::size_t> picked;
        for (std::uint32_t a = 0; a < want * 8 + 8 && picked.size() < want; ++a) {
            picked.insert(rng.below(pool));
        }
        for (std::size_t idx : picked) {
            const auto& [name, visible] = anchored[idx];
            // Anchor at the newest visible release, the way a fresh
            // `install` records a dependency; unions take a second random
            // anchor for their other branch.
            const Version& anchor = visible.back();
            const Version& alt = visible[rng.below(visible.size())];
            const ConstraintClass cls = kMixOrder[rng.weighted(mix)];
            m.dependencies.emplace(name,
                                   VersionConstraint::parse(constraint_text(cls, anchor, alt)));
        }
        // Occasional dev dependency; only installed when asked for.
        if (rng.chance(0.3)) {
            const auto& [name, visible] = anchored[rng.below(anchored.size())];
            if (!m.dependencies.count(name)) {
                const Version& anchor = visible[rng.below(visible.size())];
                m.dev_dependencies.emplace(
                    name, VersionConstraint::parse(constraint_text(ConstraintClass::FloatingMinor,
                                                                   anchor, anchor)));
            }
        }
        projects.push_back(std::move(m));
    }
    return projects;
}

EcosystemNetwork generate_network(const GenConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed ^ 0x6e6574776f726bULL);
    const auto mix = cumulative_weights(cfg.class_mix);

    EcosystemNetwork::Builder builder;
    std::vector<std::string> names(cfg.n_packages);
    std::vector<std::uint32_t> in_degree(cfg.n_packages, 0);
    std::vector<std::vector<std::uint32_t>> targets_of(cfg.n_packages);
    TargetSampler sampler{cfg.attachment, {}};

    for (std::uint32_t i = 0; i < cfg.n_packages; ++i) {
        names[i] = package_name(i, cfg.n_packages);
        const std::uint32_t want = rng.around_mean(cfg.deps_per_release);
        for (std::uint32_t target : sampler.pick(rng, i, want)) {
            targets_of[i].push_back(target);
            ++in_degree[target];
        }
        sampler.add_node(i);
    }

    for (std::uint32_t i = 0; i < cfg.n_packages; ++i) {
        const std::uint64_t tail = rng.heavy_tail(100, 900, 10);
        const std::uint64_t downloads = tail * (1 + in_degree[i]);
        const auto maintainers = static_cast<std::uint32_t>(1 + rng.below(10));
        builder.add_package(names[i], downloads, maintainers);
    }
    for (std::uint32_t i = 0; i < cfg.n_packages; ++i) {
        for (std::uint32_t target : targets_of[i]) {
            builder.add_edge(names[i], names[target], kMixOrder[rng.weighted(mix)]);
        }
    }
    return builder.build();
}

} // namespace pinsim
