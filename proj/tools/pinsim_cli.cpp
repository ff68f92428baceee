// Command-line front end for the pinsim shared library. Everything
// simulation-related goes through the C API in pinsim.h; this file only
// parses flags, shuttles paths, and writes run logs.

#include "pinsim.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

constexpr const char* kDefaultT0 = "2022-09-12T00:00:00Z";
constexpr int64_t kDay = 86400;

[[nodiscard]] int fail_status(pinsim_status status) {
    std::cerr << "pinsim: error (" << pinsim_status_name(status) << "): " << pinsim_last_error()
              << "\n";
    return kExitData;
}

int64_t parse_time_or_throw(const std::string& text) {
    int64_t out = 0;
    if (pinsim_parse_time(text.c_str(), &out) != PINSIM_OK) {
        throw CLI::ValidationError("time", "invalid RFC3339 timestamp: " + text);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// fnv1a over file bytes, for the run log.
uint64_t file_fingerprint(const std::string& path, uint64_t* size_out) {
    std::ifstream in(path, std::ios::binary);
    uint64_t hash = 1469598103934665603ULL;
    uint64_t size = 0;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ULL;
        }
        size += static_cast<uint64_t>(got);
    }
    if (size_out) *size_out = size;
    return hash;
}

struct RunLog {
    std::string subcommand;
    std::optional<uint64_t> seed;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    json counts = json::object();
    std::string path;  // empty: derive from first output

    void write() const {
        std::string target = path;
        if (target.empty()) {
            if (outputs.empty()) return;
            target = outputs.front() + ".runlog.json";
        }
        json j;
        j["subcommand"] = subcommand;
        if (seed) j["seed"] = *seed;
        j["inputs"] = json::array();
        for (const std::string& p : inputs) {
            uint64_t size = 0;
            const uint64_t hash = file_fingerprint(p, &size);
            j["inputs"].push_back({{"path", p}, {"bytes", size}, {"fnv1a", hash}});
        }
        j["outputs"] = json::array();
        for (const std::string& p : outputs) {
            uint64_t size = 0;
            const uint64_t hash = file_fingerprint(p, &size);
            j["outputs"].push_back({{"path", p}, {"bytes", size}, {"fnv1a", hash}});
        }
        j["counts"] = counts;
        // Wall-clock stamp; excluded from determinism comparisons.
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        j["timestamp_epoch_seconds"] =
            std::chrono::duration_cast<std::chrono::seconds>(now).count();
        std::ofstream out(target);
        out << j.dump(2) << "\n";
    }
};

struct GenFlags {
    uint64_t seed = 1;
    uint32_t packages = 100;
    double releases_mean = 5.0;
    double deps_mean = 3.0;
    std::string window_start = "2019-09-12T00:00:00Z";
    std::string window_end = "2023-09-07T00:00:00Z";
    std::vector<double> class_mix;
    std::string attachment = "preferential";
    double advisory_rate = 0.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Generator seed");
        cmd->add_option("--packages", packages, "Number of packages");
        cmd->add_option("--releases-mean", releases_mean, "Mean releases per package");
        cmd->add_option("--deps-mean", deps_mean, "Mean dependencies per release");
        cmd->add_option("--window-start", window_start, "Publish window start (RFC3339)");
        cmd->add_option("--window-end", window_end, "Publish window end (RFC3339)");
        cmd->add_option("--class-mix", class_mix,
                        "Constraint class weights: major,minor,patch,pinned,other")
            ->delimiter(',')
            ->expected(5);
        cmd->add_option("--attachment", attachment, "Target sampling: uniform|preferential")
            ->check(CLI::IsMember({"uniform", "preferential"}));
        cmd->add_option("--advisory-rate", advisory_rate,
                        "Fraction of packages with one advisory");
    }

    pinsim_gen_config to_config() const {
        pinsim_gen_config cfg;
        pinsim_gen_config_defaults(&cfg);
        cfg.seed = seed;
        cfg.n_packages = packages;
        cfg.releases_per_package = releases_mean;
        cfg.deps_per_release = deps_mean;
        cfg.window_start = parse_time_or_throw(window_start);
        cfg.window_end = parse_time_or_throw(window_end);
        if (!class_mix.empty()) {
            cfg.mix_floating_major = class_mix[0];
            cfg.mix_floating_minor = class_mix[1];
            cfg.mix_floating_patch = class_mix[2];
            cfg.mix_pinned = class_mix[3];
            cfg.mix_other = class_mix[4];
        }
        cfg.preferential_attachment = attachment == "preferential" ? 1 : 0;
        cfg.advisory_rate = advisory_rate;
        return cfg;
    }
};

std::array<int64_t, 5> build_schedule(const std::string& t0_text,
                                      const std::vector<std::string>& explicit_schedule,
                                      int interval_days) {
    std::array<int64_t, 5> schedule{};
    if (!explicit_schedule.empty()) {
        for (int i = 0; i < 5; ++i) schedule[i] = parse_time_or_throw(explicit_schedule[i]);
        return schedule;
    }
    const int64_t t0 = parse_time_or_throw(t0_text);
    for (int i = 0; i < 5; ++i) schedule[i] = t0 + static_cast<int64_t>(i) * interval_days * kDay;
    return schedule;
}

pinsim_attack_kind attack_kind_from(const std::string& name) {
    if (name == "top-impact") return PINSIM_ATTACK_TOP_IMPACT;
    if (name == "random") return PINSIM_ATTACK_RANDOM;
    return PINSIM_ATTACK_FRAGILE;
}

pinsim_defense_strategy strategy_from(const std::string& name) {
    if (name == "downloads") return PINSIM_DEFENSE_DOWNLOADS;
    if (name == "out-degree") return PINSIM_DEFENSE_OUT_DEGREE;
    if (name == "betweenness") return PINSIM_DEFENSE_BETWEENNESS;
    if (name == "downloads-x-out-degree") return PINSIM_DEFENSE_DOWNLOADS_X_OUT_DEGREE;
    return PINSIM_DEFENSE_DOWNLOADS_X_BETWEENNESS;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pinsim: dependency pinning and supply-chain attack simulation"};
    app.require_subcommand(1);

    std::string run_log_path;
    app.add_option("--run-log", run_log_path, "Run log JSON path (default: <output>.runlog.json)");

    // --- gen-registry ------------------------------------------------------
    auto* gen_registry = app.add_subcommand("gen-registry", "Generate a synthetic registry");
    GenFlags gr_flags;
    gr_flags.add_to(gen_registry);
    std::string gr_out = "registry.jsonl";
    std::string gr_advisories_out = "advisories.jsonl";
    std::string gr_projects_out = "projects.jsonl";
    uint32_t gr_projects = 0;
    std::string gr_t0 = kDefaultT0;
    gen_registry->add_option("--out", gr_out, "Registry JSONL output");
    gen_registry->add_option("--advisories-out", gr_advisories_out, "Advisories JSONL output");
    gen_registry->add_option("--projects", gr_projects, "Also generate N project manifests");
    gen_registry->add_option("--projects-out", gr_projects_out, "Projects JSONL output");
    gen_registry->add_option("--t0", gr_t0, "Anchor time for project constraints (RFC3339)");

    // --- gen-network -------------------------------------------------------
    auto* gen_network = app.add_subcommand("gen-network", "Generate a synthetic dependency network");
    GenFlags gn_flags;
    gn_flags.add_to(gen_network);
    std::string gn_nodes_out = "nodes.csv";
    std::string gn_edges_out = "edges.csv";
    gen_network->add_option("--nodes-out", gn_nodes_out, "Nodes CSV output");
    gen_network->add_option("--edges-out", gn_edges_out, "Edges CSV output");

    // --- classify ----------------------------------------------------------
    auto* classify = app.add_subcommand("classify", "Classify version constraints or a manifest");
    std::vector<std::string> classify_constraints;
    std::string classify_manifest_path;
    classify->add_option("--constraint", classify_constraints,
                         "Constraint text (repeatable); prints one class per line");
    classify->add_option("--manifest", classify_manifest_path,
                         "Manifest JSON file; prints the project versioning strategy");

    // --- resolve -----------------------------------------------------------
    auto* resolve_cmd = app.add_subcommand("resolve", "Resolve one manifest at a point in time");
    std::string rs_registry, rs_manifest;
    std::string rs_at = kDefaultT0;
    std::string rs_nodes_out = "resolved_nodes.csv";
    std::string rs_edges_out = "resolved_edges.csv";
    bool rs_dev = false, rs_no_strict = false, rs_pin = false;
    resolve_cmd->add_option("--registry", rs_registry, "Registry JSONL")->required();
    resolve_cmd->add_option("--manifest", rs_manifest, "Manifest JSON file")->required();
    resolve_cmd->add_option("--at", rs_at, "Resolution cutoff (RFC3339)");
    resolve_cmd->add_flag("--dev", rs_dev, "Include the root's dev dependencies");
    resolve_cmd->add_flag("--no-strict", rs_no_strict, "Skip unresolvable requirements");
    resolve_cmd->add_flag("--pin", rs_pin, "Apply the pin transform before resolving");
    resolve_cmd->add_option("--nodes-out", rs_nodes_out, "Node list CSV output");
    resolve_cmd->add_option("--edges-out", rs_edges_out, "Edge list CSV output");

    // --- metrics -----------------------------------------------------------
    auto* metrics_cmd = app.add_subcommand(
        "metrics", "Build the metrics panel (5 times x control/pinning per project)");
    std::string mt_registry, mt_advisories, mt_projects;
    std::string mt_out = "panel.csv";
    std::string mt_t0 = kDefaultT0;
    std::vector<std::string> mt_schedule;
    int mt_interval_days = 90;
    bool mt_dev = false, mt_no_strict = false;
    unsigned mt_jobs = 1;
    metrics_cmd->add_option("--registry", mt_registry, "Registry JSONL")->required();
    metrics_cmd->add_option("--advisories", mt_advisories, "Advisories JSONL")->required();
    metrics_cmd->add_option("--projects", mt_projects, "Projects JSONL")->required();
    metrics_cmd->add_option("--out", mt_out, "Panel CSV output");
    metrics_cmd->add_option("--t0", mt_t0, "Schedule start (RFC3339)");
    metrics_cmd->add_option("--interval-days", mt_interval_days, "Days between schedule points");
    metrics_cmd->add_option("--schedule", mt_schedule, "Explicit five RFC3339 times")
        ->delimiter(',')
        ->expected(5);
    metrics_cmd->add_flag("--dev", mt_dev, "Include root dev dependencies");
    metrics_cmd->add_flag("--no-strict", mt_no_strict, "Skip unresolvable requirements");
    metrics_cmd->add_option("--jobs", mt_jobs, "Worker threads");

    // --- panel -------------------------------------------------------------
    auto* panel_cmd = app.add_subcommand("panel", "Fit the fixed-effects models on a panel CSV");
    std::string pn_panel;
    std::string pn_out = "fit_report.csv";
    panel_cmd->add_option("--panel", pn_panel, "Panel CSV from the metrics stage")->required();
    panel_cmd->add_option("--out", pn_out, "Fit report CSV output");

    // --- rank-targets ------------------------------------------------------
    auto* rank_cmd = app.add_subcommand("rank-targets", "Rank attack targets in a network");
    std::string rk_nodes, rk_edges;
    std::string rk_out = "targets.csv";
    std::string rk_selection = "top-impact";
    size_t rk_m = 100;
    uint64_t rk_seed = 1;
    rank_cmd->add_option("--nodes", rk_nodes, "Nodes CSV")->required();
    rank_cmd->add_option("--edges", rk_edges, "Edges CSV")->required();
    rank_cmd->add_option("--selection", rk_selection, "top-impact|random|fragile")
        ->check(CLI::IsMember({"top-impact", "random", "fragile"}));
    rank_cmd->add_option("-m,--count", rk_m, "Number of targets");
    rank_cmd->add_option("--seed", rk_seed, "Sampling seed (random selection)");
    rank_cmd->add_option("--out", rk_out, "Target CSV output");

    // --- defense-curve -----------------------------------------------------
    auto* curve_cmd = app.add_subcommand("defense-curve",
                                         "Risk while defending the strategy's top 0..n packages");
    std::string dc_nodes, dc_edges;
    std::string dc_out = "curve.csv";
    std::string dc_mechanism = "transitive";
    std::string dc_strategy = "downloads-x-betweenness";
    std::string dc_attack = "top-impact";
    size_t dc_n_max = 100;
    size_t dc_attack_m = 1000;
    uint64_t dc_attack_seed = 1;
    bool dc_honor = false;
    uint32_t dc_betweenness_samples = 0;
    unsigned dc_jobs = 1;
    curve_cmd->add_option("--nodes", dc_nodes, "Nodes CSV")->required();
    curve_cmd->add_option("--edges", dc_edges, "Edges CSV")->required();
    curve_cmd->add_option("--mechanism", dc_mechanism, "local|transitive")
        ->check(CLI::IsMember({"local", "transitive"}));
    curve_cmd->add_option("--strategy", dc_strategy,
                          "downloads|out-degree|betweenness|downloads-x-out-degree|"
                          "downloads-x-betweenness")
        ->check(CLI::IsMember({"downloads", "out-degree", "betweenness",
                               "downloads-x-out-degree", "downloads-x-betweenness"}));
    curve_cmd->add_option("--attack", dc_attack, "top-impact|random|fragile")
        ->check(CLI::IsMember({"top-impact", "random", "fragile"}));
    curve_cmd->add_option("--n-max", dc_n_max, "Largest defended set");
    curve_cmd->add_option("--attack-m", dc_attack_m, "Attack target count");
    curve_cmd->add_option("--attack-seed", dc_attack_seed, "Attack sampling seed");
    curve_cmd->add_flag("--honor-declared", dc_honor, "Honor declared edge classes");
    curve_cmd->add_option("--betweenness-samples", dc_betweenness_samples,
                          "Betweenness pivot count (0 = exact)");
    curve_cmd->add_option("--jobs", dc_jobs, "Worker threads");
    curve_cmd->add_option("--out", dc_out, "Curve CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the usage message
        return code == 0 ? kExitOk : kExitUsage;
    }

    RunLog log;
    log.path = run_log_path;

    try {
        if (gen_registry->parsed()) {
            log.subcommand = "gen-registry";
            log.seed = gr_flags.seed;
            const pinsim_gen_config cfg = gr_flags.to_config();
            const pinsim_status s = pinsim_generate_registry(
                &cfg, gr_out.c_str(), gr_advisories_out.c_str(), gr_projects,
                parse_time_or_throw(gr_t0), gr_projects_out.c_str());
            if (s != PINSIM_OK) return fail_status(s);
            log.outputs = {gr_out, gr_advisories_out};
            if (gr_projects > 0) log.outputs.push_back(gr_projects_out);
            log.counts["packages"] = gr_flags.packages;
            log.counts["projects"] = gr_projects;
            log.write();
        } else if (gen_network->parsed()) {
            log.subcommand = "gen-network";
            log.seed = gn_flags.seed;
            const pinsim_gen_config cfg = gn_flags.to_config();
            const pinsim_status s =
                pinsim_generate_network(&cfg, gn_nodes_out.c_str(), gn_edges_out.c_str());
            if (s != PINSIM_OK) return fail_status(s);
            log.outputs = {gn_nodes_out, gn_edges_out};
            log.counts["packages"] = gn_flags.packages;
            log.write();
        } else if (classify->parsed()) {
            if (classify_constraints.empty() && classify_manifest_path.empty()) {
                std::cerr << "pinsim: classify needs --constraint or --manifest\n";
                return kExitUsage;
            }
            char buf[64];
            for (const std::string& text : classify_constraints) {
                const pinsim_status s = pinsim_classify_constraint(text.c_str(), buf, sizeof(buf));
                if (s != PINSIM_OK) return fail_status(s);
                std::cout << buf << "\n";
            }
            if (!classify_manifest_path.empty()) {
                const std::string content = read_file(classify_manifest_path);
                const pinsim_status s = pinsim_classify_manifest(content.c_str(), buf, sizeof(buf));
                if (s != PINSIM_OK) return fail_status(s);
                std::cout << buf << "\n";
            }
        } else if (resolve_cmd->parsed()) {
            log.subcommand = "resolve";
            pinsim_registry* registry = nullptr;
            pinsim_status s = pinsim_registry_load(rs_registry.c_str(), &registry);
            if (s != PINSIM_OK) return fail_status(s);
            pinsim_resolve_options opts;
            pinsim_resolve_options_defaults(&opts);
            opts.include_dev_at_root = rs_dev ? 1 : 0;
            opts.strict = rs_no_strict ? 0 : 1;
            opts.pin_direct = rs_pin ? 1 : 0;
            pinsim_graph* graph = nullptr;
            s = pinsim_resolve_manifest_file(registry, rs_manifest.c_str(),
                                             parse_time_or_throw(rs_at), &opts, &graph);
            if (s != PINSIM_OK) {
                pinsim_registry_free(registry);
                return fail_status(s);
            }
            s = pinsim_graph_write_csv(graph, rs_nodes_out.c_str(), rs_edges_out.c_str());
            if (s == PINSIM_OK) {
                pinsim_graph_stats stats;
                pinsim_graph_get_stats(graph, &stats);
                std::cout << "nodes=" << stats.nodes << " edges=" << stats.edges
                          << " n_floating=" << stats.n_floating
                          << " n_bloated=" << stats.n_bloated << " dangling=" << stats.dangling
                          << "\n";
                log.inputs = {rs_registry, rs_manifest};
                log.outputs = {rs_nodes_out, rs_edges_out};
                log.counts["nodes"] = stats.nodes;
                log.counts["edges"] = stats.edges;
                log.write();
            }
            pinsim_graph_free(graph);
            pinsim_registry_free(registry);
            if (s != PINSIM_OK) return fail_status(s);
        } else if (metrics_cmd->parsed()) {
            log.subcommand = "metrics";
            pinsim_registry* registry = nullptr;
            pinsim_status s = pinsim_registry_load(mt_registry.c_str(), &registry);
            if (s != PINSIM_OK) return fail_status(s);
            pinsim_advisories* advisories = nullptr;
            s = pinsim_advisories_load(mt_advisories.c_str(), &advisories);
            if (s != PINSIM_OK) {
                pinsim_registry_free(registry);
                return fail_status(s);
            }
            const std::array<int64_t, 5> schedule =
                build_schedule(mt_t0, mt_schedule, mt_interval_days);
            pinsim_resolve_options opts;
            pinsim_resolve_options_defaults(&opts);
            opts.include_dev_at_root = mt_dev ? 1 : 0;
            opts.strict = mt_no_strict ? 0 : 1;
            pinsim_panel_summary summary{};
            s = pinsim_build_panel(registry, advisories, mt_projects.c_str(), schedule.data(),
                                   &opts, mt_jobs, mt_out.c_str(), &summary);
            pinsim_advisories_free(advisories);
            pinsim_registry_free(registry);
            if (s != PINSIM_OK) return fail_status(s);
            std::cout << "projects=" << summary.n_projects << " dropped=" << summary.n_dropped
                      << " records=" << summary.n_records << "\n";
            log.inputs = {mt_registry, mt_advisories, mt_projects};
            log.outputs = {mt_out};
            log.counts["projects"] = summary.n_projects;
            log.counts["dropped"] = summary.n_dropped;
            log.counts["records"] = summary.n_records;
            log.write();
        } else if (panel_cmd->parsed()) {
            log.subcommand = "panel";
            const pinsim_status s = pinsim_fit_panel(pn_panel.c_str(), pn_out.c_str());
            if (s != PINSIM_OK) return fail_status(s);
            log.inputs = {pn_panel};
            log.outputs = {pn_out};
            log.write();
        } else if (rank_cmd->parsed()) {
            log.subcommand = "rank-targets";
            log.seed = rk_seed;
            pinsim_network* network = nullptr;
            pinsim_status s = pinsim_network_load(rk_nodes.c_str(), rk_edges.c_str(), &network);
            if (s != PINSIM_OK) return fail_status(s);
            s = pinsim_rank_targets(network, attack_kind_from(rk_selection), rk_m, rk_seed,
                                    rk_out.c_str());
            pinsim_network_free(network);
            if (s != PINSIM_OK) return fail_status(s);
            log.inputs = {rk_nodes, rk_edges};
            log.outputs = {rk_out};
            log.counts["targets"] = rk_m;
            log.write();
        } else if (curve_cmd->parsed()) {
            log.subcommand = "defense-curve";
            log.seed = dc_attack_seed;
            pinsim_network* network = nullptr;
            pinsim_status s = pinsim_network_load(dc_nodes.c_str(), dc_edges.c_str(), &network);
            if (s != PINSIM_OK) return fail_status(s);
            s = pinsim_defense_curve(
                network, attack_kind_from(dc_attack), dc_attack_m, dc_attack_seed,
                dc_mechanism == "local" ? PINSIM_LOCAL_PINNING : PINSIM_TRANSITIVE_PINNING,
                strategy_from(dc_strategy), dc_n_max, dc_honor ? 1 : 0, dc_betweenness_samples,
                dc_jobs, dc_out.c_str());
            pinsim_network_free(network);
            if (s != PINSIM_OK) return fail_status(s);
            log.inputs = {dc_nodes, dc_edges};
            log.outputs = {dc_out};
            log.counts["n_max"] = dc_n_max;
            log.counts["attack_m"] = dc_attack_m;
            log.write();
        }
    } catch (const CLI::Error& e) {
        std::cerr << "pinsim: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "pinsim: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}
