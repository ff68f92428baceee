#pragma once

#include "pinsim/metrics.hpp"
#include "pinsim/netsim.hpp"
#include "pinsim/registry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace pinsim {

// Configuration for the deterministic generators. All sampling runs on a
// single mt19937_64 stream with integer-only draws, so a fixed seed yields
// byte-identical artifacts on every platform.
struct GenConfig {
    std::uint64_t seed = 1;
    std::uint32_t n_packages = 100;
    double releases_per_package = 5.0;  // geometric mean
    std::int64_t window_start = 0;      // publish window
    std::int64_t window_end = 0;
    // Constraint class weights in the order floating-major, floating-minor,
    // floating-patch, pinned, other. The defaults lean floating-minor with
    // pinning second; they are a documented configuration, not a measured
    // distribution.
    std::array<double, 5> class_mix = {0.016, 0.720, 0.040, 0.220, 0.004};
    double deps_per_release = 3.0;  // mean
    enum class Attachment { Uniform, Preferential };
    Attachment attachment = Attachment::Preferential;
    double advisory_rate = 0.0;  // fraction of packages carrying one advisory

    void validate() const;  // throws Error(invalid_config)
};

struct GeneratedRegistry {
    RegistrySnapshot registry;
    AdvisoryDb advisories;
};

// Synthetic registry: packages p000..p{n-1}; release dependencies target
// strictly lower-indexed packages and are anchored at versions published
// before the declaring release, so every generated manifest resolves in
// strict mode at any time at or after its anchors.
GeneratedRegistry generate_registry(const GenConfig& cfg);

// Project manifests whose constraints are anchored at versions visible at
// `anchor_time`; resolvable in strict mode at any t >= anchor_time.
std::vector<Manifest> generate_projects(const GenConfig& cfg, const RegistrySnapshot& registry,
                                        std::int64_t anchor_time, std::uint32_t count);

// Synthetic package-level dependency network. Preferential attachment
// produces a heavy-tailed in-degree; downloads correlate with in-degree.
EcosystemNetwork generate_network(const GenConfig& cfg);

} // namespace pinsim
