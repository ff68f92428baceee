/*
 * pinsim C API: dependency-pinning and supply-chain attack simulation.
 *
 * The library owns all simulation state behind opaque handles. Every
 * function returns a pinsim_status; on failure pinsim_last_error() holds a
 * thread-local message valid until the next failing call on the same thread.
 * Output files are written atomically (temp file + rename).
 */

#ifndef PINSIM_H
#define PINSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PINSIM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PINSIM_API __attribute__((visibility("default")))
#else
#define PINSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pinsim_status {
    PINSIM_OK = 0,
    PINSIM_ERROR_INVALID_ARGUMENT = 1,
    PINSIM_ERROR_PARSE = 2,
    PINSIM_ERROR_IO = 3,
    PINSIM_ERROR_DATA = 4,
    PINSIM_ERROR_UNRESOLVABLE = 5,
    PINSIM_ERROR_INTERNAL = 6,
} pinsim_status;

PINSIM_API const char* pinsim_version(void);
PINSIM_API const char* pinsim_status_name(pinsim_status status);
PINSIM_API const char* pinsim_last_error(void);

/* ------------------------------------------------------------------ */
/* Versions and constraints                                            */
/* ------------------------------------------------------------------ */

/* Writes the constraint class ("floating-major", "floating-minor",
 * "floating-patch", "pinned", "other") into out. */
PINSIM_API pinsim_status pinsim_classify_constraint(const char* constraint, char* out,
                                                    size_t out_cap);

/* Project versioning strategy ("floating-only", "pinning-only", "mixed",
 * "no-prod") of a manifest JSON document. */
PINSIM_API pinsim_status pinsim_classify_manifest(const char* manifest_json, char* out,
                                                  size_t out_cap);

/* Semver order: *out is <0, 0 or >0. */
PINSIM_API pinsim_status pinsim_version_compare(const char* a, const char* b, int* out);

/* *out = 1 iff the version satisfies the constraint. */
PINSIM_API pinsim_status pinsim_constraint_satisfied(const char* version, const char* constraint,
                                                     int* out);

/* RFC 3339 -> epoch seconds. */
PINSIM_API pinsim_status pinsim_parse_time(const char* rfc3339, int64_t* out_epoch_seconds);

/* ------------------------------------------------------------------ */
/* Registry snapshots and advisories                                   */
/* ------------------------------------------------------------------ */

typedef struct pinsim_registry pinsim_registry;
typedef struct pinsim_advisories pinsim_advisories;

PINSIM_API pinsim_status pinsim_registry_load(const char* path, pinsim_registry** out);
PINSIM_API void pinsim_registry_free(pinsim_registry* registry);
PINSIM_API size_t pinsim_registry_package_count(const pinsim_registry* registry);
PINSIM_API size_t pinsim_registry_release_count(const pinsim_registry* registry);

PINSIM_API pinsim_status pinsim_advisories_load(const char* path, pinsim_advisories** out);
PINSIM_API void pinsim_advisories_free(pinsim_advisories* advisories);
PINSIM_API size_t pinsim_advisories_count(const pinsim_advisories* advisories);

/* ------------------------------------------------------------------ */
/* Resolution                                                          */
/* ------------------------------------------------------------------ */

typedef struct pinsim_graph pinsim_graph;

typedef struct pinsim_resolve_options {
    int include_dev_at_root; /* root dev dependencies join the resolution */
    int strict;              /* fail instead of skipping unresolvables */
    int pin_direct;          /* apply the pin transform before resolving */
} pinsim_resolve_options;

PINSIM_API void pinsim_resolve_options_defaults(pinsim_resolve_options* opts);

/* Resolves one manifest (a JSON document) at the cutoff time. */
PINSIM_API pinsim_status pinsim_resolve_manifest_json(const pinsim_registry* registry,
                                                      const char* manifest_json, int64_t cutoff,
                                                      const pinsim_resolve_options* opts,
                                                      pinsim_graph** out);
PINSIM_API pinsim_status pinsim_resolve_manifest_file(const pinsim_registry* registry,
                                                      const char* manifest_path, int64_t cutoff,
                                                      const pinsim_resolve_options* opts,
                                                      pinsim_graph** out);
PINSIM_API void pinsim_graph_free(pinsim_graph* graph);

typedef struct pinsim_graph_stats {
    uint64_t nodes; /* excluding the root */
    uint64_t edges;
    uint64_t n_floating;
    uint64_t n_bloated;
    uint64_t dangling;
} pinsim_graph_stats;

PINSIM_API pinsim_status pinsim_graph_get_stats(const pinsim_graph* graph,
                                                pinsim_graph_stats* out);
PINSIM_API pinsim_status pinsim_graph_write_csv(const pinsim_graph* graph, const char* nodes_path,
                                                const char* edges_path);

/* ------------------------------------------------------------------ */
/* Metrics panel and regression                                        */
/* ------------------------------------------------------------------ */

typedef struct pinsim_panel_summary {
    uint64_t n_projects;
    uint64_t n_dropped;
    uint64_t n_records;
} pinsim_panel_summary;

/* Builds the balanced metrics panel (10 rows per surviving project: five
 * schedule times under control and pinning) and writes it as CSV. */
PINSIM_API pinsim_status pinsim_build_panel(const pinsim_registry* registry,
                                            const pinsim_advisories* advisories,
                                            const char* projects_path, const int64_t schedule[5],
                                            const pinsim_resolve_options* opts, unsigned jobs,
                                            const char* out_csv_path,
                                            pinsim_panel_summary* out_summary);

/* Fits the two-way fixed-effects model for each metric in a panel CSV and
 * writes one report row per metric. */
PINSIM_API pinsim_status pinsim_fit_panel(const char* panel_csv_path, const char* report_csv_path);

/* ------------------------------------------------------------------ */
/* Generators                                                          */
/* ------------------------------------------------------------------ */

typedef struct pinsim_gen_config {
    uint64_t seed;
    uint32_t n_packages;
    double releases_per_package;
    int64_t window_start;
    int64_t window_end;
    double mix_floating_major;
    double mix_floating_minor;
    double mix_floating_patch;
    double mix_pinned;
    double mix_other;
    double deps_per_release;
    int preferential_attachment; /* 0 = uniform */
    double advisory_rate;
} pinsim_gen_config;

PINSIM_API void pinsim_gen_config_defaults(pinsim_gen_config* cfg);

/* Writes registry.jsonl and advisories.jsonl; optionally n_projects
 * manifests (anchored at project_anchor_time) to projects_path. */
PINSIM_API pinsim_status pinsim_generate_registry(const pinsim_gen_config* cfg,
                                                  const char* registry_path,
                                                  const char* advisories_path,
                                                  uint32_t n_projects,
                                                  int64_t project_anchor_time,
                                                  const char* projects_path);

PINSIM_API pinsim_status pinsim_generate_network(const pinsim_gen_config* cfg,
                                                 const char* nodes_path, const char* edges_path);

/* ------------------------------------------------------------------ */
/* Ecosystem network simulation                                        */
/* ------------------------------------------------------------------ */

typedef struct pinsim_network pinsim_network;

PINSIM_API pinsim_status pinsim_network_load(const char* nodes_path, const char* edges_path,
                                             pinsim_network** out);
PINSIM_API void pinsim_network_free(pinsim_network* network);
PINSIM_API size_t pinsim_network_node_count(const pinsim_network* network);
PINSIM_API size_t pinsim_network_edge_count(const pinsim_network* network);

/* Undefended download-weighted impact of compromising one package. */
PINSIM_API pinsim_status pinsim_network_impact(const pinsim_network* network, const char* package,
                                               double* out);

typedef enum pinsim_attack_kind {
    PINSIM_ATTACK_TOP_IMPACT = 0,
    PINSIM_ATTACK_RANDOM = 1,
    PINSIM_ATTACK_FRAGILE = 2,
} pinsim_attack_kind;

/* Writes "rank,package,impact" rows for the selected targets. */
PINSIM_API pinsim_status pinsim_rank_targets(const pinsim_network* network,
                                             pinsim_attack_kind kind, size_t count, uint64_t seed,
                                             const char* out_csv_path);

typedef enum pinsim_mechanism {
    PINSIM_LOCAL_PINNING = 0,
    PINSIM_TRANSITIVE_PINNING = 1,
} pinsim_mechanism;

typedef enum pinsim_defense_strategy {
    PINSIM_DEFENSE_DOWNLOADS = 0,
    PINSIM_DEFENSE_OUT_DEGREE = 1,
    PINSIM_DEFENSE_BETWEENNESS = 2,
    PINSIM_DEFENSE_DOWNLOADS_X_OUT_DEGREE = 3,
    PINSIM_DEFENSE_DOWNLOADS_X_BETWEENNESS = 4,
} pinsim_defense_strategy;

/* risk(A) while defending the strategy's top 0..n_max packages; CSV columns
 * mechanism,strategy,n,risk. betweenness_samples == 0 means exact. */
PINSIM_API pinsim_status pinsim_defense_curve(const pinsim_network* network,
                                              pinsim_attack_kind attack_kind, size_t attack_count,
                                              uint64_t attack_seed, pinsim_mechanism mechanism,
                                              pinsim_defense_strategy strategy, size_t n_max,
                                              int honor_declared_classes,
                                              uint32_t betweenness_samples, unsigned jobs,
                                              const char* out_csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PINSIM_H */
