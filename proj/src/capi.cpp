#include "pinsim.h"

#include "pinsim/error.hpp"
#include "pinsim/io.hpp"
#include "pinsim/metrics.hpp"
#include "pinsim/netsim.hpp"
#include "pinsim/panel.hpp"
#include "pinsim/registry.hpp"
#include "pinsim/resolver.hpp"
#include "pinsim/semver.hpp"
#include "pinsim/synth.hpp"
#include "pinsim/time.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

using namespace pinsim;

// ---------------------------------------------------------------------------
// Handles and error plumbing
// ---------------------------------------------------------------------------

struct pinsim_registry {
    RegistrySnapshot snapshot;
};
struct pinsim_advisories {
    AdvisoryDb db;
};
struct pinsim_graph {
    ResolvedGraph graph;
};
struct pinsim_network {
    EcosystemNetwork net;
};

namespace {

thread_local std::string g_last_error;

pinsim_status status_for(const Error& e) {
    switch (e.code()) {
    case errc::parse_error: return PINSIM_ERROR_PARSE;
    case errc::io_error: return PINSIM_ERROR_IO;
    case errc::unresolvable_requirement: return PINSIM_ERROR_UNRESOLVABLE;
    case errc::invalid_config:
    case errc::domain_error: return PINSIM_ERROR_INVALID_ARGUMENT;
    default: return PINSIM_ERROR_DATA;
    }
}

pinsim_status fail(pinsim_status status, const char* message) {
    g_last_error = message;
    return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
pinsim_status guarded(Fn&& fn) {
    try {
        fn();
        return PINSIM_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_for(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PINSIM_ERROR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return PINSIM_ERROR_INTERNAL;
    }
}

pinsim_status copy_out(const std::string& value, char* out, size_t out_cap) {
    if (!out || out_cap == 0) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null output buffer");
    if (value.size() + 1 > out_cap) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(out, value.c_str(), value.size() + 1);
    return PINSIM_OK;
}

GenConfig to_gen_config(const pinsim_gen_config& c) {
    GenConfig cfg;
    cfg.seed = c.seed;
    cfg.n_packages = c.n_packages;
    cfg.releases_per_package = c.releases_per_package;
    cfg.window_start = c.window_start;
    cfg.window_end = c.window_end;
    cfg.class_mix = {c.mix_floating_major, c.mix_floating_minor, c.mix_floating_patch,
                     c.mix_pinned, c.mix_other};
    cfg.deps_per_release = c.deps_per_release;
    cfg.attachment = c.preferential_attachment ? GenConfig::Attachment::Preferential
                                               : GenConfig::Attachment::Uniform;
    cfg.advisory_rate = c.advisory_rate;
    return cfg;
}

ResolveOptions to_resolve_options(const pinsim_resolve_options* opts) {
    ResolveOptions o;
    if (opts) {
        o.include_dev_at_root = opts->include_dev_at_root != 0;
        o.strict = opts->strict != 0;
    }
    return o;
}

} // namespace

// ---------------------------------------------------------------------------
// Basics
// ---------------------------------------------------------------------------

const char* pinsim_version(void) { return "1.0.0"; }

const char* pinsim_status_name(pinsim_status status) {
    switch (status) {
    case PINSIM_OK: return "ok";
    case PINSIM_ERROR_INVALID_ARGUMENT: return "invalid-argument";
    case PINSIM_ERROR_PARSE: return "parse-error";
    case PINSIM_ERROR_IO: return "io-error";
    case PINSIM_ERROR_DATA: return "data-error";
    case PINSIM_ERROR_UNRESOLVABLE: return "unresolvable";
    case PINSIM_ERROR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* pinsim_last_error(void) { return g_last_error.c_str(); }

pinsim_status pinsim_classify_constraint(const char* constraint, char* out, size_t out_cap) {
    if (!constraint) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null constraint");
    std::string result;
    const pinsim_status s = guarded([&]() {
        const VersionConstraint c = VersionConstraint::parse(constraint);
        result = std::string(to_string(c.kind));
    });
    if (s != PINSIM_OK) return s;
    return copy_out(result, out, out_cap);
}

pinsim_status pinsim_classify_manifest(const char* manifest_json, char* out, size_t out_cap) {
    if (!manifest_json) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null manifest");
    std::string result;
    const pinsim_status s = guarded([&]() {
        const Manifest m = parse_manifest_json(manifest_json);
        result = std::string(to_string(classify_strategy(m)));
    });
    if (s != PINSIM_OK) return s;
    return copy_out(result, out, out_cap);
}

pinsim_status pinsim_version_compare(const char* a, const char* b, int* out) {
    if (!a || !b || !out) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() { *out = Version::compare(Version::parse(a), Version::parse(b)); });
}

pinsim_status pinsim_constraint_satisfied(const char* version, const char* constraint, int* out) {
    if (!version || !constraint || !out) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&]() {
        *out = satisfies(Version::parse(version), VersionConstraint::parse(constraint)) ? 1 : 0;
    });
}

pinsim_status pinsim_parse_time(const char* rfc3339, int64_t* out_epoch_seconds) {
    if (!rfc3339 || !out_epoch_seconds) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() { *out_epoch_seconds = parse_rfc3339(rfc3339); });
}

// ---------------------------------------------------------------------------
// Registry / advisories
// ---------------------------------------------------------------------------

pinsim_status pinsim_registry_load(const char* path, pinsim_registry** out) {
    if (!path || !out) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = std::make_unique<pinsim_registry>();
        handle->snapshot = RegistrySnapshot::load_file(path);
        *out = handle.release();
    });
}

void pinsim_registry_free(pinsim_registry* registry) { delete registry; }

size_t pinsim_registry_package_count(const pinsim_registry* registry) {
    return registry ? registry->snapshot.package_count() : 0;
}

size_t pinsim_registry_release_count(const pinsim_registry* registry) {
    return registry ? registry->snapshot.release_count() : 0;
}

pinsim_status pinsim_advisories_load(const char* path, pinsim_advisories** out) {
    if (!path || !out) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        auto handle = std::make_unique<pinsim_advisories>();
        handle->db = AdvisoryDb::load_file(path);
        *out = handle.release();
    });
}

void pinsim_advisories_free(pinsim_advisories* advisories) { delete advisories; }

size_t pinsim_advisories_count(const pinsim_advisories* advisories) {
    return advisories ? advisories->db.size() : 0;
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

void pinsim_resolve_options_defaults(pinsim_resolve_options* opts) {
    if (!opts) return;
    opts->include_dev_at_root = 0;
    opts->strict = 1;
    opts->pin_direct = 0;
}

namespace {

pinsim_status resolve_impl(const pinsim_registry* registry, const Manifest& manifest,
                           int64_t cutoff, const pinsim_resolve_options* opts,
                           pinsim_graph** out) {
    return guarded([&]() {
        const TimeView view = registry->snapshot.at(cutoff);
        const ResolveOptions options = to_resolve_options(opts);
        Manifest effective = manifest;
        if (opts && opts->pin_direct) effective = pin_manifest(manifest, view);
        auto handle = std::make_unique<pinsim_graph>();
        handle->graph = resolve(view, effective, options);
        *out = handle.release();
    });
}

} // namespace

pinsim_status pinsim_resolve_manifest_json(const pinsim_registry* registry,
                                           const char* manifest_json, int64_t cutoff,
                                           const pinsim_resolve_options* opts, pinsim_graph** out) {
    if (!registry || !manifest_json || !out) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    Manifest manifest;
    const pinsim_status s = guarded([&]() { manifest = parse_manifest_json(manifest_json); });
    if (s != PINSIM_OK) return s;
    return resolve_impl(registry, manifest, cutoff, opts, out);
}

pinsim_status pinsim_resolve_manifest_file(const pinsim_registry* registry,
                                           const char* manifest_path, int64_t cutoff,
                                           const pinsim_resolve_options* opts, pinsim_graph** out) {
    if (!registry || !manifest_path || !out) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    Manifest manifest;
    const pinsim_status s = guarded([&]() {
        std::ifstream in(manifest_path);
        if (!in) throw_error(errc::io_error, std::string("cannot open manifest: ") + manifest_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        manifest = parse_manifest_json(buf.str());
    });
    if (s != PINSIM_OK) return s;
    return resolve_impl(registry, manifest, cutoff, opts, out);
}

void pinsim_graph_free(pinsim_graph* graph) { delete graph; }

pinsim_status pinsim_graph_get_stats(const pinsim_graph* graph, pinsim_graph_stats* out) {
    if (!graph || !out) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        out->nodes = graph->graph.size();
        out->edges = graph->graph.edges.size();
        out->n_floating = n_floating(graph->graph);
        out->n_bloated = n_bloated(graph->graph);
        out->dangling = graph->graph.dangling.size();
    });
}

pinsim_status pinsim_graph_write_csv(const pinsim_graph* graph, const char* nodes_path,
                                     const char* edges_path) {
    if (!graph || !nodes_path || !edges_path) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&]() {
        write_file_atomic(nodes_path, [&](std::ostream& out) { graph->graph.write_nodes_csv(out); });
        write_file_atomic(edges_path, [&](std::ostream& out) { graph->graph.write_edges_csv(out); });
    });
}

// ---------------------------------------------------------------------------
// Panel pipeline
// ---------------------------------------------------------------------------

pinsim_status pinsim_build_panel(const pinsim_registry* registry,
                                 const pinsim_advisories* advisories, const char* projects_path,
                                 const int64_t schedule[5], const pinsim_resolve_options* opts,
                                 unsigned jobs, const char* out_csv_path,
                                 pinsim_panel_summary* out_summary) {
    if (!registry || !advisories || !projects_path || !schedule || !out_csv_path) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&]() {
        const std::vector<Manifest> projects = load_manifests_file(projects_path);
        std::array<std::int64_t, 5> sched;
        for (int i = 0; i < 5; ++i) sched[i] = schedule[i];
        const PanelBuildResult result = build_panel(projects, registry->snapshot, sched,
                                                    advisories->db, to_resolve_options(opts),
                                                    jobs == 0 ? 1 : jobs);
        write_file_atomic(out_csv_path,
                          [&](std::ostream& out) { write_panel_csv(out, result.records); });
        if (out_summary) {
            out_summary->n_projects = projects.size();
            out_summary->n_dropped = result.dropped.size();
            out_summary->n_records = result.records.size();
        }
        for (const std::string& diag : result.dropped) {
            std::fprintf(stderr, "pinsim: dropped project: %s\n", diag.c_str());
        }
    });
}

pinsim_status pinsim_fit_panel(const char* panel_csv_path, const char* report_csv_path) {
    if (!panel_csv_path || !report_csv_path) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&]() {
        std::ifstream in(panel_csv_path);
        if (!in) throw_error(errc::io_error, std::string("cannot open panel: ") + panel_csv_path);
        const std::vector<MetricRecord> records = read_panel_csv(in);
        const std::vector<MetricFitReport> reports = fit_all_metrics(records);
        write_file_atomic(report_csv_path,
                          [&](std::ostream& out) { write_fit_report_csv(out, reports); });
    });
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

void pinsim_gen_config_defaults(pinsim_gen_config* cfg) {
    if (!cfg) return;
    GenConfig d;
    cfg->seed = d.seed;
    cfg->n_packages = d.n_packages;
    cfg->releases_per_package = d.releases_per_package;
    cfg->window_start = parse_rfc3339("2019-09-12T00:00:00Z");
    cfg->window_end = parse_rfc3339("2023-09-07T00:00:00Z");
    cfg->mix_floating_major = d.class_mix[0];
    cfg->mix_floating_minor = d.class_mix[1];
    cfg->mix_floating_patch = d.class_mix[2];
    cfg->mix_pinned = d.class_mix[3];
    cfg->mix_other = d.class_mix[4];
    cfg->deps_per_release = d.deps_per_release;
    cfg->preferential_attachment = d.attachment == GenConfig::Attachment::Preferential ? 1 : 0;
    cfg->advisory_rate = d.advisory_rate;
}

pinsim_status pinsim_generate_registry(const pinsim_gen_config* cfg, const char* registry_path,
                                       const char* advisories_path, uint32_t n_projects,
                                       int64_t project_anchor_time, const char* projects_path) {
    if (!cfg || !registry_path || !advisories_path) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    if (n_projects > 0 && !projects_path) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "projects path required when n_projects > 0");
    }
    return guarded([&]() {
        const GenConfig config = to_gen_config(*cfg);
        GeneratedRegistry generated = generate_registry(config);
        write_file_atomic(registry_path,
                          [&](std::ostream& out) { generated.registry.write(out); });
        write_file_atomic(advisories_path,
                          [&](std::ostream& out) { generated.advisories.write(out); });
        if (n_projects > 0) {
            const std::vector<Manifest> projects =
                generate_projects(config, generated.registry, project_anchor_time, n_projects);
            write_file_atomic(projects_path,
                              [&](std::ostream& out) { write_manifests(out, projects); });
        }
    });
}

pinsim_status pinsim_generate_network(const pinsim_gen_config* cfg, const char* nodes_path,
                                      const char* edges_path) {
    if (!cfg || !nodes_path || !edges_path) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&]() {
        const EcosystemNetwork net = generate_network(to_gen_config(*cfg));
        write_file_atomic(nodes_path, [&](std::ostream& out) { net.write_nodes_csv(out); });
        write_file_atomic(edges_path, [&](std::ostream& out) { net.write_edges_csv(out); });
    });
}

// ---------------------------------------------------------------------------
// Network simulation
// ---------------------------------------------------------------------------

pinsim_status pinsim_network_load(const char* nodes_path, const char* edges_path,
                                  pinsim_network** out) {
    if (!nodes_path || !edges_path || !out) {
        return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&]() {
        auto handle = std::make_unique<pinsim_network>();
        handle->net = EcosystemNetwork::load_csv_files(nodes_path, edges_path);
        *out = handle.release();
    });
}

void pinsim_network_free(pinsim_network* network) { delete network; }

size_t pinsim_network_node_count(const pinsim_network* network) {
    return network ? network->net.node_count() : 0;
}

size_t pinsim_network_edge_count(const pinsim_network* network) {
    return network ? network->net.edge_count() : 0;
}

pinsim_status pinsim_network_impact(const pinsim_network* network, const char* package,
                                    double* out) {
    if (!network || !package || !out) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() { *out = impact_by_name(network->net, package, DefensePlan{}); });
}

namespace {

AttackSelection to_selection(pinsim_attack_kind kind, size_t count, uint64_t seed) {
    AttackSelection sel;
    switch (kind) {
    case PINSIM_ATTACK_TOP_IMPACT: sel.kind = AttackSelection::Kind::TopImpact; break;
    case PINSIM_ATTACK_RANDOM: sel.kind = AttackSelection::Kind::RandomActive; break;
    case PINSIM_ATTACK_FRAGILE: sel.kind = AttackSelection::Kind::Fragile; break;
    }
    sel.count = count;
    sel.seed = seed;
    return sel;
}

} // namespace

pinsim_status pinsim_rank_targets(const pinsim_network* network, pinsim_attack_kind kind,
                                  size_t count, uint64_t seed, const char* out_csv_path) {
    if (!network || !out_csv_path) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        const std::vector<std::uint32_t> targets =
            rank_targets(network->net, to_selection(kind, count, seed));
        const std::vector<double> impacts = all_impacts(network->net);
        write_file_atomic(out_csv_path, [&](std::ostream& out) {
            out << "rank,package,impact\n";
            char buf[40];
            for (std::size_t i = 0; i < targets.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.12g", impacts[targets[i]]);
                out << i + 1 << ',' << network->net.name(targets[i]) << ',' << buf << '\n';
            }
        });
    });
}

pinsim_status pinsim_defense_curve(const pinsim_network* network, pinsim_attack_kind attack_kind,
                                   size_t attack_count, uint64_t attack_seed,
                                   pinsim_mechanism mechanism, pinsim_defense_strategy strategy,
                                   size_t n_max, int honor_declared_classes,
                                   uint32_t betweenness_samples, unsigned jobs,
                                   const char* out_csv_path) {
    if (!network || !out_csv_path) return fail(PINSIM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() {
        const std::vector<std::uint32_t> targets =
            rank_targets(network->net, to_selection(attack_kind, attack_count, attack_seed));
        const PinningMechanism mech = mechanism == PINSIM_LOCAL_PINNING
                                          ? PinningMechanism::LocalPinning
                                          : PinningMechanism::TransitivePinning;
        DefenseStrategy strat = DefenseStrategy::Downloads;
        switch (strategy) {
        case PINSIM_DEFENSE_DOWNLOADS: strat = DefenseStrategy::Downloads; break;
        case PINSIM_DEFENSE_OUT_DEGREE: strat = DefenseStrategy::OutDegree; break;
        case PINSIM_DEFENSE_BETWEENNESS: strat = DefenseStrategy::Betweenness; break;
        case PINSIM_DEFENSE_DOWNLOADS_X_OUT_DEGREE:
            strat = DefenseStrategy::DownloadsTimesOutDegree;
            break;
        case PINSIM_DEFENSE_DOWNLOADS_X_BETWEENNESS:
            strat = DefenseStrategy::DownloadsTimesBetweenness;
            break;
        }
        std::vector<double> bc;
        const std::vector<double>* bptr = nullptr;
        if (strat == DefenseStrategy::Betweenness ||
            strat == DefenseStrategy::DownloadsTimesBetweenness) {
            bc = betweenness(network->net, betweenness_samples, attack_seed);
            bptr = &bc;
        }
        const FloatingMode mode = honor_declared_classes ? FloatingMode::HonorDeclared
                                                         : FloatingMode::AssumeAllFloating;
        const std::vector<CurvePoint> points =
            defense_curve(network->net, targets, mech, strat, n_max, mode,
                          jobs == 0 ? 1 : jobs, bptr);
        write_file_atomic(out_csv_path,
                          [&](std::ostream& out) { write_curve_csv(out, mech, strat, points); });
    });
}
