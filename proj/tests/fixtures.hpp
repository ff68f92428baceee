#pragma once

// Shared fixtures used across the unit and acceptance suites.

#include "pinsim/metrics.hpp"
#include "pinsim/netsim.hpp"
#include "pinsim/registry.hpp"
#include "pinsim/time.hpp"

#include <map>
#include <string>

namespace fixtures {

inline std::int64_t at_day(int day) {
    // Day offsets from a fixed epoch keep fixture timestamps readable.
    return pinsim::parse_rfc3339("2022-01-01T00:00:00Z") + day * pinsim::kSecondsPerDay;
}

inline pinsim::Release release(const std::string& package, const std::string& version, int day,
                               std::map<std::string, std::string> deps = {}) {
    pinsim::Release r;
    r.package = package;
    r.version = pinsim::Version::parse(version);
    r.published_at = at_day(day);
    for (const auto& [name, constraint] : deps) {
        r.dependencies.emplace(name, pinsim::VersionConstraint::parse(constraint));
    }
    return r;
}

// Diamond registry: x has two minor versions, y requires the newer one, and
// every x version pulls four floating z dependencies. The pin transform on a
// root depending on {x:^1.2.0, y:^2.0.0} forces a second copy of x and the
// extra floating edges that come with it.
inline pinsim::RegistrySnapshot fix_r_registry() {
    pinsim::RegistrySnapshot reg;
    const std::map<std::string, std::string> z_deps = {
        {"z1", "^1.0.0"}, {"z2", "^1.0.0"}, {"z3", "^1.0.0"}, {"z4", "^1.0.0"}};
    reg.add(release("x", "1.2.0", 10, z_deps));
    reg.add(release("x", "1.3.0", 20, z_deps));
    reg.add(release("y", "2.0.0", 30, {{"x", "^1.3.0"}}));
    reg.add(release("z1", "1.0.0", 1));
    reg.add(release("z2", "1.0.0", 1));
    reg.add(release("z3", "1.0.0", 1));
    reg.add(release("z4", "1.0.0", 1));
    reg.finalize();
    return reg;
}

inline pinsim::Manifest fix_r_manifest() {
    pinsim::Manifest m;
    m.name = "fix-r";
    m.dependencies.emplace("x", pinsim::VersionConstraint::parse("^1.2.0"));
    m.dependencies.emplace("y", pinsim::VersionConstraint::parse("^2.0.0"));
    return m;
}

inline std::int64_t fix_r_time() { return at_day(60); }

// Nine-package attack fixture. B is the attacked upstream; C and D depend on
// it directly, E depends only on C, F on both C and D, and G/H/I only on F.
// A is a bystander. Download counts make impact(B) = 1,019,400 / 1,109,400.
inline pinsim::EcosystemNetwork fix_n_network() {
    pinsim::EcosystemNetwork::Builder b;
    b.add_package("A", 90000, 3);
    b.add_package("B", 0, 1);
    b.add_package("C", 1000000, 5);
    b.add_package("D", 10000, 2);
    b.add_package("E", 5000, 1);
    b.add_package("F", 2000, 2);
    b.add_package("G", 1000, 1);
    b.add_package("H", 900, 4);
    b.add_package("I", 500, 1);
    using CC = pinsim::ConstraintClass;
    b.add_edge("C", "B", CC::FloatingMinor);
    b.add_edge("D", "B", CC::FloatingMinor);
    b.add_edge("E", "C", CC::FloatingMinor);
    b.add_edge("F", "C", CC::FloatingMinor);
    b.add_edge("F", "D", CC::FloatingMinor);
    b.add_edge("G", "F", CC::FloatingMinor);
    b.add_edge("H", "F", CC::FloatingMinor);
    b.add_edge("I", "F", CC::FloatingMinor);
    return b.build();
}

inline constexpr double kFixNTotalDownloads = 1109400.0;
inline constexpr double kFixNImpactB = 1019400.0 / 1109400.0;

inline std::uint32_t node(const pinsim::EcosystemNetwork& net, const std::string& name) {
    return *net.find(name);
}

} // namespace fixtures
