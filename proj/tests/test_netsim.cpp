#include "pinsim/netsim.hpp"

#include "pinsim/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace pinsim;

namespace {

std::set<std::string> affected_names(const EcosystemNetwork& net, const std::string& target,
                                     const DefensePlan& plan) {
    std::set<std::string> out;
    for (std::uint32_t idx : affected_set(net, fixtures::node(net, target), plan)) {
        out.insert(net.name(idx));
    }
    return out;
}

DefensePlan plan_with(const EcosystemNetwork& net, PinningMechanism mech,
                      std::vector<std::string> defended) {
    DefensePlan plan;
    plan.mechanism = mech;
    for (const auto& name : defended) plan.defended.push_back(fixtures::node(net, name));
    return plan;
}

// Random digraph as both a TinyGraph (oracle) and an EcosystemNetwork.
struct RandomNet {
    oracles::TinyGraph tiny;
    EcosystemNetwork net;
};

RandomNet random_network(std::mt19937_64& rng, std::size_t n, double edge_prob) {
    oracles::TinyGraph tiny;
    tiny.deps.resize(n);
    EcosystemNetwork::Builder builder;
    for (std::size_t i = 0; i < n; ++i) {
        builder.add_package("n" + std::to_string(i), 100 + (rng() % 900), 1 + (rng() % 5));
    }
    const std::uint64_t threshold =
        static_cast<std::uint64_t>(edge_prob * 18446744073709551615.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            if (rng() < threshold) {
                tiny.deps[a].push_back(static_cast<std::uint32_t>(b));
                builder.add_edge("n" + std::to_string(a), "n" + std::to_string(b),
                                 rng() % 4 == 0 ? ConstraintClass::Pinned
                                                : ConstraintClass::FloatingMinor);
            }
        }
    }
    return {std::move(tiny), builder.build()};
}

} // namespace

TEST_CASE("fixture impact matches the download arithmetic") {
    const auto net = fixtures::fix_n_network();
    CHECK(net.node_count() == 9);
    CHECK(net.edge_count() == 8);
    CHECK(net.total_downloads() == 1109400);

    const DefensePlan undefended;
    CHECK(impact_by_name(net, "B", undefended) ==
          doctest::Approx(fixtures::kFixNImpactB).epsilon(1e-12));
    CHECK(affected_names(net, "B", undefended) ==
          std::set<std::string>{"C", "D", "E", "F", "G", "H", "I"});

    // An isolated package has no dependents.
    CHECK(impact_by_name(net, "A", undefended) == 0.0);
    CHECK(impact_by_name(net, "I", undefended) == 0.0);
}

TEST_CASE("local pinning of C protects exactly C and E") {
    const auto net = fixtures::fix_n_network();
    const auto plan = plan_with(net, PinningMechanism::LocalPinning, {"C"});
    CHECK(affected_names(net, "B", plan) == std::set<std::string>{"D", "F", "G", "H", "I"});
}

TEST_CASE("transitive pinning of F protects F, G, H and I") {
    const auto net = fixtures::fix_n_network();
    const auto plan = plan_with(net, PinningMechanism::TransitivePinning, {"F"});
    CHECK(affected_names(net, "B", plan) == std::set<std::string>{"C", "D", "E"});
    CHECK(impact_by_name(net, "B", plan) ==
          doctest::Approx(1015000.0 / 1109400.0).epsilon(1e-12));
}

TEST_CASE("local pinning of F protects nothing") {
    const auto net = fixtures::fix_n_network();
    const auto plan = plan_with(net, PinningMechanism::LocalPinning, {"F"});
    CHECK(affected_names(net, "B", plan) ==
          std::set<std::string>{"C", "D", "E", "F", "G", "H", "I"});
}

TEST_CASE("risk is the mean impact over the target set") {
    const auto net = fixtures::fix_n_network();
    const DefensePlan undefended;
    const std::vector<std::uint32_t> just_b = {fixtures::node(net, "B")};
    CHECK(risk(net, just_b, undefended) ==
          doctest::Approx(fixtures::kFixNImpactB).epsilon(1e-12));

    const std::vector<std::uint32_t> b_and_c = {fixtures::node(net, "B"),
                                                fixtures::node(net, "C")};
    const double impact_c = 9400.0 / 1109400.0;
    CHECK(risk(net, b_and_c, undefended) ==
          doctest::Approx((fixtures::kFixNImpactB + impact_c) / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS(risk(net, {}, undefended), Error);
}

TEST_CASE("full-network transitive defense drives risk to zero") {
    const auto net = fixtures::fix_n_network();
    DefensePlan plan;
    plan.mechanism = PinningMechanism::TransitivePinning;
    for (std::uint32_t i = 0; i < net.node_count(); ++i) plan.defended.push_back(i);
    std::vector<std::uint32_t> all;
    for (std::uint32_t i = 0; i < net.node_count(); ++i) all.push_back(i);
    CHECK(risk(net, all, plan) == 0.0);
}

TEST_CASE("honor-declared mode blocks pinned final edges for both mechanisms") {
    EcosystemNetwork::Builder b;
    b.add_package("core", 10, 1);
    b.add_package("mid", 20, 1);
    b.add_package("leaf", 30, 1);
    b.add_edge("mid", "core", ConstraintClass::Pinned);       // mid pins core
    b.add_edge("leaf", "mid", ConstraintClass::FloatingMinor);
    const auto net = b.build();

    for (auto mech : {PinningMechanism::LocalPinning, PinningMechanism::TransitivePinning}) {
        DefensePlan plan;
        plan.mechanism = mech;
        plan.floating_mode = FloatingMode::HonorDeclared;
        CHECK(affected_set(net, fixtures::node(net, "core"), plan).empty());
        // The same attack on mid flows: leaf's edge floats.
        CHECK(affected_set(net, fixtures::node(net, "mid"), plan).size() == 1);
    }

    // Default mode ignores declared classes entirely.
    DefensePlan assume;
    assume.mechanism = PinningMechanism::TransitivePinning;
    CHECK(affected_set(net, fixtures::node(net, "core"), assume).size() == 2);
}

TEST_CASE("affected sets match simple-path enumeration on random digraphs") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = 4 + rng() % 9;  // up to 12 nodes
        const auto rn = random_network(rng, n, 0.25);
        const auto target = static_cast<std::uint32_t>(rng() % n);

        std::set<std::uint32_t> defended;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng() % 4 == 0) defended.insert(static_cast<std::uint32_t>(i));
        }
        DefensePlan local;
        local.mechanism = PinningMechanism::LocalPinning;
        local.defended.assign(defended.begin(), defended.end());
        DefensePlan transitive = local;
        transitive.mechanism = PinningMechanism::TransitivePinning;

        const auto got_local = affected_set(rn.net, target, local);
        const auto got_trans = affected_set(rn.net, target, transitive);
        const auto want_local = oracles::local_affected(rn.tiny, target, defended);
        const auto want_trans = oracles::transitive_affected(rn.tiny, target, defended);

        CHECK(std::set<std::uint32_t>(got_local.begin(), got_local.end()) == want_local);
        CHECK(std::set<std::uint32_t>(got_trans.begin(), got_trans.end()) == want_trans);

        // Dominance: transitive blocks at least as much as local.
        for (std::uint32_t v : got_trans) {
            CHECK(std::find(got_local.begin(), got_local.end(), v) != got_local.end());
        }
    }
}

TEST_CASE("adding a defended package never increases impact") {
    std::mt19937_64 rng(22);
    const auto rn = random_network(rng, 10, 0.3);
    for (auto mech : {PinningMechanism::LocalPinning, PinningMechanism::TransitivePinning}) {
        DefensePlan plan;
        plan.mechanism = mech;
        double previous = risk(rn.net, {0, 1, 2}, plan);
        for (std::uint32_t d = 3; d < 9; ++d) {
            plan.defended.push_back(d);
            const double current = risk(rn.net, {0, 1, 2}, plan);
            CHECK(current <= previous + 1e-15);
            previous = current;
        }
    }
}

TEST_CASE("all_impacts equals per-target BFS") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 20; ++round) {
        const std::size_t n = 5 + rng() % 20;
        const auto rn = random_network(rng, n, 0.2);
        const auto fast = all_impacts(rn.net);
        const DefensePlan undefended;
        for (std::uint32_t v = 0; v < n; ++v) {
            CHECK(fast[v] == doctest::Approx(impact(rn.net, v, undefended)).epsilon(1e-12));
        }
    }
}

TEST_CASE("all_impacts handles cycles") {
    EcosystemNetwork::Builder b;
    b.add_package("a", 100, 1);
    b.add_package("b", 200, 1);
    b.add_package("c", 400, 1);
    b.add_edge("a", "b", ConstraintClass::FloatingMinor);
    b.add_edge("b", "a", ConstraintClass::FloatingMinor);  // 2-cycle
    b.add_edge("c", "a", ConstraintClass::FloatingMinor);
    const auto net = b.build();
    const auto impacts = all_impacts(net);
    // Attacking a reaches b (cycle mate) and c.
    CHECK(impacts[fixtures::node(net, "a")] == doctest::Approx(600.0 / 700.0));
    CHECK(impacts[fixtures::node(net, "b")] == doctest::Approx(500.0 / 700.0));
    CHECK(impacts[fixtures::node(net, "c")] == 0.0);
}

TEST_CASE("betweenness on a path counts the middle vertex once") {
    EcosystemNetwork::Builder b;
    b.add_package("a", 1, 1);
    b.add_package("b", 1, 1);
    b.add_package("c", 1, 1);
    b.add_edge("a", "b", ConstraintClass::FloatingMinor);
    b.add_edge("b", "c", ConstraintClass::FloatingMinor);
    const auto net = b.build();
    const auto bc = betweenness(net);
    CHECK(bc[fixtures::node(net, "b")] == doctest::Approx(1.0));
    CHECK(bc[fixtures::node(net, "a")] == 0.0);
    CHECK(bc[fixtures::node(net, "c")] == 0.0);
}

TEST_CASE("betweenness of a bidirectional star center is (n-1)(n-2)") {
    EcosystemNetwork::Builder b;
    const int leaves = 5;
    b.add_package("hub", 1, 1);
    for (int i = 0; i < leaves; ++i) b.add_package("leaf" + std::to_string(i), 1, 1);
    for (int i = 0; i < leaves; ++i) {
        b.add_edge("leaf" + std::to_string(i), "hub", ConstraintClass::FloatingMinor);
        b.add_edge("hub", "leaf" + std::to_string(i), ConstraintClass::FloatingMinor);
    }
    const auto net = b.build();
    const auto bc = betweenness(net);
    const double n = leaves + 1;
    CHECK(bc[fixtures::node(net, "hub")] == doctest::Approx((n - 1) * (n - 2)));
}

TEST_CASE("betweenness matches brute-force path enumeration on random digraphs") {
    std::mt19937_64 rng(24);
    for (int round = 0; round < 30; ++round) {
        const std::size_t n = 3 + rng() % 8;  // up to 10 nodes
        const auto rn = random_network(rng, n, 0.3);
        const auto fast = betweenness(rn.net);
        const auto slow = oracles::brute_force_betweenness(rn.tiny);
        for (std::size_t v = 0; v < n; ++v) {
            CHECK(fast[v] == doctest::Approx(slow[v]).epsilon(1e-9));
        }
    }
}

TEST_CASE("sampled betweenness with every pivot equals exact") {
    std::mt19937_64 rng(25);
    const auto rn = random_network(rng, 12, 0.25);
    const auto exact = betweenness(rn.net);
    const auto sampled = betweenness(rn.net, rn.net.node_count(), 99);
    for (std::size_t v = 0; v < rn.net.node_count(); ++v) CHECK(exact[v] == sampled[v]);
    // A proper subsample is deterministic under a fixed seed.
    const auto s1 = betweenness(rn.net, 4, 7);
    const auto s2 = betweenness(rn.net, 4, 7);
    CHECK(s1 == s2);
}

TEST_CASE("defense selection strategies and tie-breaking") {
    const auto net = fixtures::fix_n_network();
    CHECK(select_defense(net, DefenseStrategy::OutDegree, 1) ==
          std::vector<std::uint32_t>{fixtures::node(net, "F")});
    CHECK(select_defense(net, DefenseStrategy::Downloads, 1) ==
          std::vector<std::uint32_t>{fixtures::node(net, "C")});
    CHECK(select_defense(net, DefenseStrategy::Downloads, 0).empty());
    CHECK(select_defense(net, DefenseStrategy::Downloads, 99).size() == net.node_count());

    // Ties (all zero scores on some strategy) break by package name.
    EcosystemNetwork::Builder b;
    b.add_package("zeta", 5, 1);
    b.add_package("alpha", 5, 1);
    const auto tie_net = b.build();
    const auto picked = select_defense(tie_net, DefenseStrategy::Downloads, 2);
    CHECK(tie_net.name(picked[0]) == "alpha");
    CHECK(tie_net.name(picked[1]) == "zeta");
}

TEST_CASE("target ranking strategies") {
    const auto net = fixtures::fix_n_network();

    AttackSelection top;
    top.kind = AttackSelection::Kind::TopImpact;
    top.count = 1;
    CHECK(rank_targets(net, top) == std::vector<std::uint32_t>{fixtures::node(net, "B")});

    top.count = 100;
    CHECK(rank_targets(net, top).size() == net.node_count());

    AttackSelection random_sel;
    random_sel.kind = AttackSelection::Kind::RandomActive;
    random_sel.count = 4;
    random_sel.seed = 5;
    const auto r1 = rank_targets(net, random_sel);
    const auto r2 = rank_targets(net, random_sel);
    CHECK(r1 == r2);
    CHECK(r1.size() == 4);

    AttackSelection fragile;
    fragile.kind = AttackSelection::Kind::Fragile;
    fragile.count = 2;
    const auto f = rank_targets(net, fragile);
    REQUIRE(f.size() == 2);
    CHECK(net.maintainers(f[0]) <= net.maintainers(f[1]));
}

TEST_CASE("fragile selection requires maintainer data") {
    EcosystemNetwork::Builder b;
    b.add_package("a", 1, std::nullopt);
    const auto net = b.build();
    AttackSelection fragile;
    fragile.kind = AttackSelection::Kind::Fragile;
    fragile.count = 1;
    try {
        rank_targets(net, fragile);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::missing_maintainer_data);
    }
}

TEST_CASE("defense curve composes ranking, defense and risk") {
    const auto net = fixtures::fix_n_network();
    const std::vector<std::uint32_t> targets = {fixtures::node(net, "B")};
    const auto curve = defense_curve(net, targets, PinningMechanism::TransitivePinning,
                                     DefenseStrategy::OutDegree, 1);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].n == 0);
    CHECK(curve[0].risk == doctest::Approx(fixtures::kFixNImpactB).epsilon(1e-12));
    CHECK(curve[1].n == 1);  // defends F
    CHECK(curve[1].risk == doctest::Approx(1015000.0 / 1109400.0).epsilon(1e-12));

    std::ostringstream out;
    write_curve_csv(out, PinningMechanism::TransitivePinning, DefenseStrategy::OutDegree, curve);
    CHECK(out.str().find("mechanism,strategy,n,risk") != std::string::npos);
    CHECK(out.str().find("transitive,out-degree,0,") != std::string::npos);
}

TEST_CASE("network csv round trip") {
    const auto net = fixtures::fix_n_network();
    std::ostringstream nodes, edges;
    net.write_nodes_csv(nodes);
    net.write_edges_csv(edges);

    std::istringstream nin(nodes.str()), ein(edges.str());
    const auto back = EcosystemNetwork::load_csv(nin, ein);
    CHECK(back.node_count() == net.node_count());
    CHECK(back.edge_count() == net.edge_count());
    CHECK(back.total_downloads() == net.total_downloads());
    CHECK(back.has_maintainer_data());
    CHECK(impact_by_name(back, "B", DefensePlan{}) ==
          doctest::Approx(fixtures::kFixNImpactB).epsilon(1e-12));
}

TEST_CASE("network loading rejects bad input") {
    {
        std::istringstream nodes("package,downloads\na,1\n");
        std::istringstream edges("dependent,dependency,class\na,b,floating-minor\n");
        CHECK_THROWS_AS(EcosystemNetwork::load_csv(nodes, edges), Error);  // unknown endpoint
    }
    {
        std::istringstream nodes("package,downloads\na,1\n");
        std::istringstream edges("dependent,dependency,class\na,a,floating-minor\n");
        CHECK_THROWS_AS(EcosystemNetwork::load_csv(nodes, edges), Error);  // self-loop
    }
    {
        std::istringstream nodes("package,downloads\na,1\nb,2\n");
        std::istringstream edges("dependent,dependency,class\na,b,mystery\n");
        CHECK_THROWS_AS(EcosystemNetwork::load_csv(nodes, edges), ParseError);  // bad class
    }
}

TEST_CASE("zero-download networks cannot compute impact") {
    EcosystemNetwork::Builder b;
    b.add_package("a", 0, 1);
    b.add_package("b", 0, 1);
    b.add_edge("a", "b", ConstraintClass::FloatingMinor);
    const auto net = b.build();
    try {
        impact(net, 0, DefensePlan{});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::zero_downloads);
    }
}
