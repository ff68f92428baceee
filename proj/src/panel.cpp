#include "pinsim/panel.hpp"

#include "pinsim/csv.hpp"
#include "pinsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

namespace pinsim {

namespace {

constexpr double kDemeanTolerance = 1e-10;
constexpr int kMaxDemeanIterations = 10000;

struct Design {
    std::vector<double> y;
    std::array<std::vector<double>, 3> x;
    std::vector<std::size_t> entity;  // dense indices
    std::vector<std::size_t> time;
    std::size_t n_entities = 0;
    std::size_t n_times = 0;
    bool balanced = false;
};

Design index_observations(const std::vector<PanelObservation>& obs) {
    Design d;
    std::map<std::string, std::size_t> entities;
    std::map<int, std::size_t> times;
    for (const PanelObservation& o : obs) {
        entities.emplace(o.entity, 0);
        times.emplace(o.time, 0);
    }
    std::size_t k = 0;
    for (auto& [name, idx] : entities) idx = k++;
    k = 0;
    for (auto& [t, idx] : times) idx = k++;
    d.n_entities = entities.size();
    d.n_times = times.size();

    d.y.reserve(obs.size());
    d.entity.reserve(obs.size());
    d.time.reserve(obs.size());
    for (const PanelObservation& o : obs) {
        d.y.push_back(o.y);
        d.x[0].push_back(o.x_pinning);
        d.x[1].push_back(o.x_lnsize);
        d.x[2].push_back(o.x_interaction);
        d.entity.push_back(entities.at(o.entity));
        d.time.push_back(times.at(o.time));
    }

    // Balanced iff every (entity, time) cell holds the same number of
    // observations. The panel builder emits two per cell (control/pinning);
    // the exact within transform stays exact for any constant cell count.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
    for (std::size_t i = 0; i < obs.size(); ++i) ++cells[{d.entity[i], d.time[i]}];
    if (cells.size() == d.n_entities * d.n_times) {
        const std::size_t c = cells.begin()->second;
        d.balanced = std::all_of(cells.begin(), cells.end(),
                                 [c](const auto& cell) { return cell.second == c; });
    }
    return d;
}

void within_transform_balanced(const Design& d, std::vector<double>& series) {
    std::vector<double> entity_mean(d.n_entities, 0.0);
    std::vector<double> time_mean(d.n_times, 0.0);
    const double cell = static_cast<double>(series.size()) /
                        static_cast<double>(d.n_entities * d.n_times);
    double grand = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        entity_mean[d.entity[i]] += series[i];
        time_mean[d.time[i]] += series[i];
        grand += series[i];
    }
    for (double& m : entity_mean) m /= static_cast<double>(d.n_times) * cell;
    for (double& m : time_mean) m /= static_cast<double>(d.n_entities) * cell;
    grand /= static_cast<double>(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        series[i] = series[i] - entity_mean[d.entity[i]] - time_mean[d.time[i]] + grand;
    }
}

void within_transform_unbalanced(const Design& d, std::vector<double>& series) {
    std::vector<std::size_t> entity_count(d.n_entities, 0);
    std::vector<std::size_t> time_count(d.n_times, 0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        ++entity_count[d.entity[i]];
        ++time_count[d.time[i]];
    }
    for (int iter = 0; iter < kMaxDemeanIterations; ++iter) {
        double max_change = 0.0;
        std::vector<double> mean(d.n_entities, 0.0);
        for (std::size_t i = 0; i < series.size(); ++i) mean[d.entity[i]] += series[i];
        for (std::size_t e = 0; e < d.n_entities; ++e) mean[e] /= static_cast<double>(entity_count[e]);
        for (std::size_t i = 0; i < series.size(); ++i) series[i] -= mean[d.entity[i]];
        for (double m : mean) max_change = std::max(max_change, std::abs(m));

        std::vector<double> tmean(d.n_times, 0.0);
        for (std::size_t i = 0; i < series.size(); ++i) tmean[d.time[i]] += series[i];
        for (std::size_t t = 0; t < d.n_times; ++t) tmean[t] /= static_cast<double>(time_count[t]);
        for (std::size_t i = 0; i < series.size(); ++i) series[i] -= tmean[d.time[i]];
        for (double m : tmean) max_change = std::max(max_change, std::abs(m));

        if (max_change < kDemeanTolerance) return;
    }
}

// Solves the 3x3 system A b = c by Gaussian elimination with partial
// pivoting; also inverts A for the covariance. Throws on singularity.
void solve_normal_equations(std::array<std::array<double, 3>, 3> a, std::array<double, 3> c,
                            std::array<double, 3>& b, std::array<std::array<double, 3>, 3>& inv) {
    double scale = 0.0;
    for (const auto& row : a) {
        for (double v : row) scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) throw_error(errc::rank_deficient, "demeaned design matrix is zero");

    // Augment with the identity to obtain the inverse.
    std::array<std::array<double, 6>, 3> m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
        m[i][3 + i] = 1.0;
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        }
        if (std::abs(m[pivot][col]) < 1e-12 * scale) {
            throw_error(errc::rank_deficient, "demeaned design matrix is singular");
        }
        std::swap(m[col], m[pivot]);
        const double d = m[col][col];
        for (int j = 0; j < 6; ++j) m[col][j] /= d;
        for (int row = 0; row < 3; ++row) {
            if (row == col) continue;
            const double f = m[row][col];
            for (int j = 0; j < 6; ++j) m[row][j] -= f * m[col][j];
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) inv[i][j] = m[i][3 + j];
    }
    for (int i = 0; i < 3; ++i) {
        b[i] = 0.0;
        for (int j = 0; j < 3; ++j) b[i] += inv[i][j] * c[j];
    }
}

struct WithinFit {
    std::array<double, 3> coef{};
    std::array<double, 3> std_error{};
    double r2 = 0.0;
};

// Shared core for the full and reduced models; `active` masks the regressors
// that participate (inactive columns are forced to zero).
WithinFit fit_within(const Design& d, const std::array<bool, 3>& active) {
    std::vector<double> y = d.y;
    std::array<std::vector<double>, 3> x = d.x;
    if (d.balanced) {
        within_transform_balanced(d, y);
        for (auto& col : x) within_transform_balanced(d, col);
    } else {
        within_transform_unbalanced(d, y);
        for (auto& col : x) within_transform_unbalanced(d, col);
    }

    const std::size_t n = y.size();
    std::size_t k_active = 0;
    for (bool b : active) k_active += b ? 1 : 0;

    std::array<std::array<double, 3>, 3> xtx{};
    std::array<double, 3> xty{};
    for (std::size_t i = 0; i < n; ++i) {
        for (int p = 0; p < 3; ++p) {
            if (!active[p]) continue;
            xty[p] += x[p][i] * y[i];
            for (int q = 0; q < 3; ++q) {
                if (!active[q]) continue;
                xtx[p][q] += x[p][i] * x[q][i];
            }
        }
    }
    for (int p = 0; p < 3; ++p) {
        if (!active[p]) xtx[p][p] = 1.0;  // keep the system non-singular; b[p] = 0
    }

    WithinFit fit;
    std::array<std::array<double, 3>, 3> inv{};
    solve_normal_equations(xtx, xty, fit.coef, inv);
    for (int p = 0; p < 3; ++p) {
        if (!active[p]) fit.coef[p] = 0.0;
    }

    double rss = 0.0;
    double tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0.0;
        for (int p = 0; p < 3; ++p) fitted += fit.coef[p] * x[p][i];
        const double resid = y[i] - fitted;
        rss += resid * resid;
        tss += y[i] * y[i];  // demeaned y has zero mean
    }
    fit.r2 = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    if (fit.r2 < 0.0 && fit.r2 > -1e-12) fit.r2 = 0.0;

    const double dof = static_cast<double>(n) - static_cast<double>(k_active) -
                       static_cast<double>(d.n_entities) - static_cast<double>(d.n_times) + 1.0;
    const double s2 = dof > 0.0 ? std::max(rss, 0.0) / dof : 0.0;
    for (int p = 0; p < 3; ++p) {
        fit.std_error[p] = active[p] ? std::sqrt(std::max(s2 * inv[p][p], 0.0)) : 0.0;
    }
    return fit;
}

} // namespace

PanelFit fit_twfe(const std::vector<PanelObservation>& obs) {
    const Design d = index_observations(obs);
    if (d.n_entities < 2 || d.n_times < 2) {
        throw_error(errc::too_few_groups, "panel needs at least 2 entities and 2 times");
    }
    const WithinFit w = fit_within(d, {true, true, true});
    PanelFit fit;
    fit.coef = w.coef;
    fit.std_error = w.std_error;
    fit.r2_within = w.r2;
    fit.n_obs = obs.size();
    fit.n_entities = d.n_entities;
    fit.n_times = d.n_times;
    fit.balanced = d.balanced;
    return fit;
}

double cohens_f2(double r2_full, double r2_reduced) {
    if (!(0.0 <= r2_reduced && r2_reduced <= r2_full && r2_full < 1.0)) {
        throw_error(errc::domain_error, "cohens_f2 requires 0 <= r2_reduced <= r2_full < 1");
    }
    return (r2_full - r2_reduced) / (1.0 - r2_full);
}

std::string_view f2_label(double f2) {
    if (f2 >= 0.35) return "large";
    if (f2 >= 0.15) return "medium";
    if (f2 >= 0.02) return "small";
    return "negligible";
}

std::vector<PanelObservation> observations_for_metric(const std::vector<MetricRecord>& records,
                                                      std::string_view metric) {
    std::vector<PanelObservation> obs;
    obs.reserve(records.size());
    for (const MetricRecord& r : records) {
        PanelObservation o;
        o.entity = r.project;
        o.time = r.time_index;
        o.y = std::log1p(static_cast<double>(metric_value(r, metric)));
        o.x_pinning = r.condition == Condition::Pinning ? 1.0 : 0.0;
        o.x_lnsize = std::log(static_cast<double>(std::max<std::uint64_t>(r.size_g, 1)));
        o.x_interaction = o.x_pinning * o.x_lnsize;
        obs.push_back(std::move(o));
    }
    return obs;
}

std::vector<MetricFitReport> fit_all_metrics(const std::vector<MetricRecord>& records) {
    std::vector<MetricFitReport> reports;
    for (const char* metric : kMetricNames) {
        const auto obs = observations_for_metric(records, metric);
        const Design d = index_observations(obs);
        if (d.n_entities < 2 || d.n_times < 2) {
            throw_error(errc::too_few_groups, "panel needs at least 2 entities and 2 times");
        }
        MetricFitReport report;
        report.metric = metric;
        const WithinFit full = fit_within(d, {true, true, true});
        const WithinFit reduced = fit_within(d, {false, true, false});
        report.full.coef = full.coef;
        report.full.std_error = full.std_error;
        report.full.r2_within = full.r2;
        report.full.n_obs = obs.size();
        report.full.n_entities = d.n_entities;
        report.full.n_times = d.n_times;
        report.full.balanced = d.balanced;
        report.r2_reduced = std::min(reduced.r2, full.r2);
        report.f2 = full.r2 < 1.0 ? cohens_f2(full.r2, std::max(0.0, report.r2_reduced)) : 0.0;
        report.effect_label = std::string(f2_label(report.f2));
        reports.push_back(std::move(report));
    }
    return reports;
}

void write_fit_report_csv(std::ostream& out, const std::vector<MetricFitReport>& reports) {
    out << "metric,coef_pinning,se_pinning,coef_lnsize,se_lnsize,coef_interaction,"
           "se_interaction,r2_within,r2_reduced,f2,effect_size,n_obs,n_entities,n_times,"
           "balanced\n";
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    for (const MetricFitReport& r : reports) {
        csv::write_row(out, {r.metric, fmt(r.full.coef[0]), fmt(r.full.std_error[0]),
                             fmt(r.full.coef[1]), fmt(r.full.std_error[1]), fmt(r.full.coef[2]),
                             fmt(r.full.std_error[2]), fmt(r.full.r2_within), fmt(r.r2_reduced),
                             fmt(r.f2), r.effect_label, std::to_string(r.full.n_obs),
                             std::to_string(r.full.n_entities), std::to_string(r.full.n_times),
                             r.full.balanced ? "1" : "0"});
    }
}

} // namespace pinsim
