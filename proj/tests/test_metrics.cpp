#include "pinsim/metrics.hpp"

#include "pinsim/error.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <sstream>

using namespace pinsim;

namespace {

AdvisoryDb advisories_with(const std::string& package, const std::string& affected, int day,
                           const std::string& id = "ADV-1") {
    AdvisoryDb db;
    Advisory a;
    a.id = id;
    a.package = package;
    a.affected = VersionConstraint::parse(affected);
    a.published_at = fixtures::at_day(day);
    db.add(std::move(a));
    return db;
}

} // namespace

TEST_CASE("n_floating counts floating edges including the root's") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("a", "1.0.0", 1, {{"c", "~2.0.0"}}));
    reg.add(fixtures::release("b", "1.0.0", 1));
    reg.add(fixtures::release("c", "2.0.0", 1));
    reg.finalize();
    Manifest m;
    m.name = "counts";
    m.dependencies.emplace("a", VersionConstraint::parse("^1.0.0"));
    m.dependencies.emplace("b", VersionConstraint::parse("1.0.0"));
    const auto g = resolve(reg.at(fixtures::at_day(10)), m);
    CHECK(n_floating(g) == 2);  // root->a and a->c float; root->b is pinned
}

TEST_CASE("fully pinned chain has zero floating edges") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("a", "1.0.0", 1, {{"b", "1.0.0"}}));
    reg.add(fixtures::release("b", "1.0.0", 1, {{"c", "1.0.0"}}));
    reg.add(fixtures::release("c", "1.0.0", 1));
    reg.finalize();
    Manifest m;
    m.name = "chain";
    m.dependencies.emplace("a", VersionConstraint::parse("1.0.0"));
    const auto g = resolve(reg.at(fixtures::at_day(10)), m);
    CHECK(g.size() == 3);
    CHECK(n_floating(g) == 0);
    // Identity: floating + pinned + other partitions all edges.
    std::uint64_t pinned = 0, other = 0;
    for (const auto& e : g.edges) {
        if (e.constraint.kind == ConstraintClass::Pinned) ++pinned;
        if (e.constraint.kind == ConstraintClass::Other) ++other;
    }
    CHECK(n_floating(g) + pinned + other == g.edges.size());
}

TEST_CASE("bloat fixture: pinning strictly increases floating edges and bloat") {
    const auto reg = fixtures::fix_r_registry();
    const TimeView view = reg.at(fixtures::fix_r_time());
    const Manifest control = fixtures::fix_r_manifest();
    const Manifest pinned = pin_manifest(control, view);

    const auto g_control = resolve(view, control);
    const auto g_pinned = resolve(view, pinned);

    CHECK(n_floating(g_control) == 7);
    CHECK(n_floating(g_pinned) == 9);
    CHECK(n_bloated(g_control) == 0);
    CHECK(n_bloated(g_pinned) == 1);
    CHECK(n_floating(g_pinned) > n_floating(g_control));
    CHECK(n_bloated(g_pinned) > n_bloated(g_control));
}

TEST_CASE("n_auto_updates replays publish events per floating edge") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("c", "1.0.0", 0));
    reg.add(fixtures::release("c", "1.1.0", 10));
    reg.add(fixtures::release("c", "1.1.1", 20));
    reg.finalize();
    Manifest m;
    m.name = "replay";
    m.dependencies.emplace("c", VersionConstraint::parse("^1.0.0"));

    const ResolveOptions opts;
    CHECK(n_auto_updates(m, reg, fixtures::at_day(0), fixtures::at_day(30), opts) == 2);
    CHECK(n_auto_updates(m, reg, fixtures::at_day(0), fixtures::at_day(15), opts) == 1);
    CHECK(n_auto_updates(m, reg, fixtures::at_day(0), fixtures::at_day(0), opts) == 0);
}

TEST_CASE("n_auto_updates ignores backports below the running version") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("c", "1.0.0", 0));
    reg.add(fixtures::release("c", "1.2.0", 5));
    reg.add(fixtures::release("c", "1.1.5", 10));  // backport, below current 1.2.0
    reg.finalize();
    Manifest m;
    m.name = "backport";
    m.dependencies.emplace("c", VersionConstraint::parse("^1.0.0"));
    CHECK(n_auto_updates(m, reg, fixtures::at_day(0), fixtures::at_day(30), ResolveOptions{}) ==
          1);
}

TEST_CASE("pinned manifests never auto-update") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("c", "1.0.0", 0));
    reg.add(fixtures::release("c", "1.1.0", 10));
    reg.finalize();
    Manifest m;
    m.name = "frozen";
    m.dependencies.emplace("c", VersionConstraint::parse("1.0.0"));
    CHECK(n_auto_updates(m, reg, fixtures::at_day(0), fixtures::at_day(30), ResolveOptions{}) ==
          0);
}

TEST_CASE("new transitive edges replay from their first possible appearance") {
    RegistrySnapshot reg;
    // a@2.0.0 (published mid-window) introduces a floating dep on d.
    reg.add(fixtures::release("a", "1.0.0", 0));
    reg.add(fixtures::release("a", "2.0.0", 10, {{"d", "^1.0.0"}}));
    reg.add(fixtures::release("d", "1.0.0", 0));
    reg.add(fixtures::release("d", "1.1.0", 5));   // before the edge exists: no update
    reg.add(fixtures::release("d", "1.2.0", 20));  // after: one update
    reg.finalize();
    Manifest m;
    m.name = "newdep";
    m.dependencies.emplace("a", VersionConstraint::parse(">=1.0.0"));
    CHECK(n_auto_updates(m, reg, fixtures::at_day(1), fixtures::at_day(30), ResolveOptions{}) ==
          2);  // a 1.0.0->2.0.0, d 1.1.0->1.2.0
}

TEST_CASE("a declaring package updating itself does not double-count its targets") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("a", "1.0.0", 0, {{"d", "^1.0.0"}}));
    reg.add(fixtures::release("a", "1.1.0", 10, {{"d", "^1.0.0"}}));  // same declaration
    reg.add(fixtures::release("d", "1.0.0", 0));
    reg.add(fixtures::release("d", "1.1.0", 20));
    reg.finalize();
    Manifest m;
    m.name = "persist";
    m.dependencies.emplace("a", VersionConstraint::parse("^1.0.0"));
    // Two updates total: a 1.0.0->1.1.0 and d 1.0.0->1.1.0 (replayed once).
    CHECK(n_auto_updates(m, reg, fixtures::at_day(1), fixtures::at_day(30), ResolveOptions{}) ==
          2);
}

TEST_CASE("n_vuln respects advisory visibility and counts per node") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("c", "2.0.3", 1));
    reg.finalize();
    Manifest m;
    m.name = "vuln";
    m.dependencies.emplace("c", VersionConstraint::parse("2.0.3"));
    const auto g = resolve(reg.at(fixtures::at_day(10)), m);

    const auto before = advisories_with("c", "<2.1.0", 5);
    CHECK(n_vuln(g, before, fixtures::at_day(10)) == 1);
    const auto after = advisories_with("c", "<2.1.0", 50);
    CHECK(n_vuln(g, after, fixtures::at_day(10)) == 0);

    // Monotone in t for a fixed graph.
    CHECK(n_vuln(g, after, fixtures::at_day(60)) == 1);
}

TEST_CASE("bloated graphs count each vulnerable copy") {
    const auto reg = fixtures::fix_r_registry();
    const TimeView view = reg.at(fixtures::fix_r_time());
    const Manifest pinned = pin_manifest(fixtures::fix_r_manifest(), view);
    const auto g = resolve(view, pinned);  // contains x@1.2.0 and x@1.3.0

    const auto db = advisories_with("x", "<1.9.0", 0);
    CHECK(n_vuln(g, db, view.cutoff()) == 2);
}

TEST_CASE("a node matching several advisories counts once") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("c", "2.0.3", 1));
    reg.finalize();
    Manifest m;
    m.name = "multi";
    m.dependencies.emplace("c", VersionConstraint::parse("2.0.3"));
    const auto g = resolve(reg.at(fixtures::at_day(10)), m);

    AdvisoryDb db;
    Advisory a1;
    a1.id = "A1";
    a1.package = "c";
    a1.affected = VersionConstraint::parse("<2.1.0");
    a1.published_at = fixtures::at_day(0);
    Advisory a2 = a1;
    a2.id = "A2";
    db.add(a1);
    db.add(a2);
    CHECK(n_vuln(g, db, fixtures::at_day(10)) == 1);
    CHECK_THROWS_AS(db.add(a1), Error);  // duplicate id
}

TEST_CASE("n_outdated_deps compares direct deps against the latest stable") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("a", "1.2.0", 1));
    reg.add(fixtures::release("a", "1.3.0", 5));
    reg.add(fixtures::release("b", "1.0.0", 1));
    reg.add(fixtures::release("b", "2.0.0-rc.1", 5));  // prerelease only
    reg.finalize();

    Manifest m;
    m.name = "outdated";
    m.dependencies.emplace("a", VersionConstraint::parse("1.2.0"));
    m.dependencies.emplace("b", VersionConstraint::parse("^1.0.0"));
    const TimeView view = reg.at(fixtures::at_day(10));
    const auto g = resolve(view, m);

    // a sits below stable 1.3.0; b's only newer release is a prerelease.
    CHECK(n_outdated_deps(g, view) == 1);

    Manifest fresh;
    fresh.name = "fresh";
    fresh.dependencies.emplace("a", VersionConstraint::parse("^1.2.0"));
    CHECK(n_outdated_deps(resolve(view, fresh), view) == 0);
}

TEST_CASE("n_bloated counts packages with multiple versions") {
    RegistrySnapshot reg;
    reg.add(fixtures::release("a", "1.0.0", 1, {{"x", "1.2.0"}}));
    reg.add(fixtures::release("x", "1.2.0", 1));
    reg.add(fixtures::release("x", "1.3.0", 1));
    reg.finalize();
    Manifest m;
    m.name = "bloat";
    m.dependencies.emplace("a", VersionConstraint::parse("1.0.0"));
    m.dependencies.emplace("x", VersionConstraint::parse("1.3.0"));
    const auto g = resolve(reg.at(fixtures::at_day(10)), m);
    CHECK(g.size() == 3);
    CHECK(n_bloated(g) == 1);  // x at 1.2.0 and 1.3.0
}

TEST_CASE("build_panel emits ten records per surviving project") {
    const auto reg = fixtures::fix_r_registry();
    const AdvisoryDb db;
    std::array<std::int64_t, 5> schedule;
    for (int i = 0; i < 5; ++i) schedule[i] = fixtures::at_day(40 + i * 10);

    Manifest ok1 = fixtures::fix_r_manifest();
    ok1.name = "p1";
    Manifest ok2 = fixtures::fix_r_manifest();
    ok2.name = "p2";

    const auto result = build_panel({ok1, ok2}, reg, schedule, db, ResolveOptions{});
    CHECK(result.records.size() == 20);
    CHECK(result.dropped.empty());

    // Pinning condition shows at least as much bloat at every time.
    for (int ti = 0; ti < 5; ++ti) {
        std::uint64_t control = 0, pinning = 0;
        for (const auto& r : result.records) {
            if (r.project == "p1" && r.time_index == ti) {
                if (r.condition == Condition::Control) control = r.n_bloated;
                if (r.condition == Condition::Pinning) pinning = r.n_bloated;
            }
        }
        CHECK(pinning >= control);
    }
}

TEST_CASE("a project failing any resolution is dropped entirely") {
    const auto reg = fixtures::fix_r_registry();
    const AdvisoryDb db;
    std::array<std::int64_t, 5> schedule;
    for (int i = 0; i < 5; ++i) schedule[i] = fixtures::at_day(40 + i * 10);

    Manifest good = fixtures::fix_r_manifest();
    good.name = "good";
    Manifest bad;
    bad.name = "bad";
    bad.dependencies.emplace("ghost", VersionConstraint::parse("^1.0.0"));

    const auto result = build_panel({good, bad}, reg, schedule, db, ResolveOptions{});
    CHECK(result.records.size() == 10);
    REQUIRE(result.dropped.size() == 1);
    CHECK(result.dropped[0].find("bad") != std::string::npos);
}

TEST_CASE("panel schedule must be strictly increasing") {
    const auto reg = fixtures::fix_r_registry();
    const AdvisoryDb db;
    std::array<std::int64_t, 5> schedule{};
    CHECK_THROWS_AS(build_panel({}, reg, schedule, db, ResolveOptions{}), Error);
}

TEST_CASE("panel csv round trip") {
    MetricRecord r;
    r.project = "p,with comma";
    r.time_index = 3;
    r.condition = Condition::Pinning;
    r.n_floating = 1;
    r.n_auto_updates = 2;
    r.n_vuln = 3;
    r.n_outdated_deps = 4;
    r.n_bloated = 5;
    r.size_g = 6;

    std::ostringstream out;
    write_panel_csv(out, {r});
    std::istringstream in(out.str());
    const auto records = read_panel_csv(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].project == "p,with comma");
    CHECK(records[0].time_index == 3);
    CHECK(records[0].condition == Condition::Pinning);
    CHECK(metric_value(records[0], "n_vuln") == 3);
    CHECK(records[0].size_g == 6);
}

TEST_CASE("parallel panel build matches sequential") {
    const auto reg = fixtures::fix_r_registry();
    const AdvisoryDb db;
    std::array<std::int64_t, 5> schedule;
    for (int i = 0; i < 5; ++i) schedule[i] = fixtures::at_day(40 + i * 10);
    std::vector<Manifest> projects;
    for (int i = 0; i < 6; ++i) {
        Manifest m = fixtures::fix_r_manifest();
        m.name = "p" + std::to_string(i);
        projects.push_back(std::move(m));
    }
    const auto seq = build_panel(projects, reg, schedule, db, ResolveOptions{}, 1);
    const auto par = build_panel(projects, reg, schedule, db, ResolveOptions{}, 4);
    REQUIRE(seq.records.size() == par.records.size());
    for (std::size_t i = 0; i < seq.records.size(); ++i) {
        CHECK(seq.records[i].project == par.records[i].project);
        CHECK(seq.records[i].n_floating == par.records[i].n_floating);
        CHECK(seq.records[i].size_g == par.records[i].size_g);
    }
}
