#include "pinsim/panel.hpp"

#include "pinsim/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace pinsim;

namespace {

// Balanced panel generator with planted slopes, entity/time effects and
// optional noise; one observation per cell.
std::vector<PanelObservation> planted_panel(std::mt19937_64& rng, std::size_t n_entities,
                                            std::size_t n_times, double b_pin, double b_size,
                                            double b_inter, double noise_sd) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, noise_sd);
    std::vector<double> alpha(n_entities);
    std::vector<double> beta(n_times);
    for (auto& a : alpha) a = 4.0 * unit(rng) - 2.0;
    for (auto& b : beta) b = 2.0 * unit(rng) - 1.0;

    std::vector<PanelObservation> obs;
    for (std::size_t e = 0; e < n_entities; ++e) {
        for (std::size_t t = 0; t < n_times; ++t) {
            PanelObservation o;
            o.entity = "e" + std::to_string(e);
            o.time = static_cast<int>(t);
            o.x_pinning = unit(rng) < 0.5 ? 0.0 : 1.0;
            o.x_lnsize = 5.0 * unit(rng);
            o.x_interaction = o.x_pinning * o.x_lnsize;
            o.y = b_pin * o.x_pinning + b_size * o.x_lnsize + b_inter * o.x_interaction +
                  alpha[e] + beta[t] + (noise_sd > 0.0 ? noise(rng) : 0.0);
            obs.push_back(std::move(o));
        }
    }
    return obs;
}

} // namespace

TEST_CASE("exact linear relation is recovered exactly") {
    std::mt19937_64 rng(11);
    auto obs = planted_panel(rng, 20, 5, 0.0, 2.0, 0.0, 0.0);
    const PanelFit fit = fit_twfe(obs);
    CHECK(fit.balanced);
    CHECK(std::abs(fit.coef[1] - 2.0) < 1e-10);
    CHECK(std::abs(fit.coef[0]) < 1e-10);
    CHECK(std::abs(fit.coef[2]) < 1e-10);
    CHECK(fit.r2_within == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("constant response gives zero coefficients") {
    std::mt19937_64 rng(12);
    auto obs = planted_panel(rng, 10, 5, 0.0, 0.0, 0.0, 0.0);
    for (auto& o : obs) o.y = 7.5;
    const PanelFit fit = fit_twfe(obs);
    for (double c : fit.coef) CHECK(std::abs(c) < 1e-10);
}

TEST_CASE("within estimator equals the LSDV oracle on balanced panels") {
    std::mt19937_64 rng(13);
    for (int round = 0; round < 10; ++round) {
        const auto obs = planted_panel(rng, 30, 5, -0.5, 1.1, 0.08, 0.3);
        const PanelFit fit = fit_twfe(obs);
        const auto lsdv = oracles::lsdv_slopes(obs);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(fit.coef[k] - lsdv[k]) < 1e-8);
    }
}

TEST_CASE("unbalanced panels fall back to alternating demeaning and match LSDV") {
    std::mt19937_64 rng(14);
    auto obs = planted_panel(rng, 25, 5, -0.4, 0.9, 0.05, 0.2);
    // Drop a handful of cells.
    obs.erase(obs.begin() + 3);
    obs.erase(obs.begin() + 17);
    obs.erase(obs.begin() + 40);
    const PanelFit fit = fit_twfe(obs);
    CHECK_FALSE(fit.balanced);
    const auto lsdv = oracles::lsdv_slopes(obs);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(fit.coef[k] - lsdv[k]) < 1e-6);
}

TEST_CASE("slopes are invariant to added entity and time effects") {
    std::mt19937_64 rng(15);
    const auto base = planted_panel(rng, 20, 5, -0.3, 0.7, 0.02, 0.1);
    const PanelFit before = fit_twfe(base);

    auto shifted = base;
    for (auto& o : shifted) {
        const double entity_shift = 10.0 * static_cast<double>(o.entity.back() - '0');
        const double time_shift = 3.0 * o.time;
        o.y += entity_shift + time_shift;
    }
    const PanelFit after = fit_twfe(shifted);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(before.coef[k] - after.coef[k]) < 1e-9);
}

TEST_CASE("too few groups and rank deficiency are rejected") {
    std::mt19937_64 rng(16);
    auto single_entity = planted_panel(rng, 1, 5, 0.0, 1.0, 0.0, 0.1);
    CHECK_THROWS_AS(fit_twfe(single_entity), Error);

    // Pinning determined by the entity: absorbed by fixed effects.
    auto collinear = planted_panel(rng, 10, 5, 0.0, 1.0, 0.0, 0.1);
    for (auto& o : collinear) {
        o.x_pinning = (o.entity == "e0" || o.entity == "e1") ? 1.0 : 0.0;
        o.x_interaction = o.x_pinning * o.x_lnsize;
        o.y = o.x_lnsize;
    }
    try {
        fit_twfe(collinear);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::rank_deficient);
    }
}

TEST_CASE("standard errors cover planted coefficients") {
    std::mt19937_64 rng(17);
    int covered = 0;
    const int rounds = 20;
    for (int round = 0; round < rounds; ++round) {
        const auto obs = planted_panel(rng, 60, 5, -0.5, 1.1, 0.08, 0.25);
        const PanelFit fit = fit_twfe(obs);
        const double planted[3] = {-0.5, 1.1, 0.08};
        bool all = true;
        for (int k = 0; k < 3; ++k) {
            if (std::abs(fit.coef[k] - planted[k]) > 3.0 * fit.std_error[k]) all = false;
        }
        if (all) ++covered;
    }
    CHECK(covered >= rounds - 2);
}

TEST_CASE("cohens f2 formula and labels") {
    CHECK(cohens_f2(0.715, 0.5) == doctest::Approx(0.7543859649).epsilon(1e-9));
    CHECK(cohens_f2(0.3, 0.3) == 0.0);
    CHECK(cohens_f2(0.154, 0.10) == doctest::Approx(0.0638297872).epsilon(1e-9));
    CHECK(f2_label(cohens_f2(0.154, 0.10)) == "small");
    CHECK(f2_label(0.40) == "large");
    CHECK(f2_label(0.2) == "medium");
    CHECK(f2_label(0.001) == "negligible");
    CHECK_THROWS_AS(cohens_f2(0.5, 0.7), Error);
    CHECK_THROWS_AS(cohens_f2(1.0, 0.5), Error);
    CHECK_THROWS_AS(cohens_f2(0.5, -0.1), Error);
}

TEST_CASE("metric observations apply the log transforms") {
    MetricRecord r;
    r.project = "p";
    r.time_index = 2;
    r.condition = Condition::Pinning;
    r.n_vuln = 0;
    r.size_g = 0;
    const auto obs = observations_for_metric({r}, "n_vuln");
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].y == 0.0);        // ln(0 + 1)
    CHECK(obs[0].x_lnsize == 0.0); // ln(max(0,1))
    CHECK(obs[0].x_pinning == 1.0);
    CHECK(obs[0].x_interaction == obs[0].x_pinning * obs[0].x_lnsize);
}

TEST_CASE("fit_all_metrics writes one report row per metric") {
    // Synthetic records where pinning raises n_outdated_deps.
    std::mt19937_64 rng(18);
    std::vector<MetricRecord> records;
    for (int p = 0; p < 12; ++p) {
        for (int t = 0; t < 5; ++t) {
            for (Condition cond : {Condition::Control, Condition::Pinning}) {
                MetricRecord r;
                r.project = "p" + std::to_string(p);
                r.time_index = t;
                r.condition = cond;
                const bool pin = cond == Condition::Pinning;
                r.n_floating = 10 + (rng() % 5) - (pin ? 2 : 0);
                r.n_auto_updates = pin ? 1 : 3;
                r.n_vuln = (rng() % 3) + (pin ? 1 : 0);
                r.n_outdated_deps = (pin ? 6 : 2) + t + (rng() % 2);
                r.n_bloated = pin ? 2 : 1;
                r.size_g = 20 + (rng() % 10);
                records.push_back(std::move(r));
            }
        }
    }
    const auto reports = fit_all_metrics(records);
    REQUIRE(reports.size() == 5);
    for (const auto& rep : reports) {
        CHECK(rep.full.n_obs == records.size());
        CHECK(rep.full.r2_within >= rep.r2_reduced);
        CHECK(rep.f2 >= 0.0);
    }
    // The planted effect: pinning raises outdated counts.
    const auto& outdated = reports[3];
    CHECK(outdated.metric == "n_outdated_deps");
    CHECK(outdated.full.coef[0] > 0.0);

    std::ostringstream out;
    write_fit_report_csv(out, reports);
    CHECK(out.str().find("n_outdated_deps") != std::string::npos);
    CHECK(out.str().find("metric,coef_pinning") != std::string::npos);
}
