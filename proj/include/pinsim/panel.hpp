#pragma once

#include "pinsim/metrics.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pinsim {

// One row of the regression design: ln(M+1) against the pinning flag,
// ln(size(G)) and their interaction, with entity (project) and time fixed
// effects absorbed by the estimator.
struct PanelObservation {
    std::string entity;
    int time = 0;
    double y = 0.0;
    double x_pinning = 0.0;
    double x_lnsize = 0.0;
    double x_interaction = 0.0;  // x_pinning * x_lnsize, exactly
};

struct PanelFit {
    // Slopes and classical standard errors for (pinning, lnsize, interaction).
    std::array<double, 3> coef{};
    std::array<double, 3> std_error{};
    double r2_within = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_entities = 0;
    std::size_t n_times = 0;
    bool balanced = false;
};

// Two-way within estimator. Balanced panels use the exact transform
// (subtract entity mean and time mean, add the grand mean); unbalanced
// panels fall back to alternating demeaning iterated to a 1e-10 tolerance.
// Standard errors are classical with dof = n - k - n_entities - n_times + 1.
// Throws Error(too_few_groups) with fewer than two entities or times and
// Error(rank_deficient) when the demeaned design is singular.
PanelFit fit_twfe(const std::vector<PanelObservation>& obs);

// Local effect size (r2_full - r2_reduced) / (1 - r2_full).
// Requires 0 <= r2_reduced <= r2_full < 1.
double cohens_f2(double r2_full, double r2_reduced);

// Conventional labels: >=0.35 large, >=0.15 medium, >=0.02 small.
std::string_view f2_label(double f2);

// Builds observations for one metric from panel records, applying the
// ln(M+1) response transform and guarding ln(size) at ln(1) for empty graphs.
std::vector<PanelObservation> observations_for_metric(const std::vector<MetricRecord>& records,
                                                      std::string_view metric);

struct MetricFitReport {
    std::string metric;
    PanelFit full;
    double r2_reduced = 0.0;  // within-R2 of the lnsize-only model
    double f2 = 0.0;
    std::string effect_label;
};

// Fits the full model plus the lnsize-only reduced model for every metric
// present in the records and derives the Cohen's f2 of adding the pinning
// terms.
std::vector<MetricFitReport> fit_all_metrics(const std::vector<MetricRecord>& records);

void write_fit_report_csv(std::ostream& out, const std::vector<MetricFitReport>& reports);

} // namespace pinsim
