// Dummy-variable OLS reference for the two-way fixed-effects model: the
// design matrix carries the three slopes, an intercept, and explicit entity
// and time dummies (first level dropped). Solved by column-pivoted QR.

#include "oracles.hpp"

#include <Eigen/Dense>

#include <map>

namespace oracles {

std::vector<double> lsdv_slopes(const std::vector<pinsim::PanelObservation>& obs) {
    std::map<std::string, int> entities;
    std::map<int, int> times;
    for (const auto& o : obs) {
        entities.emplace(o.entity, 0);
        times.emplace(o.time, 0);
    }
    int k = 0;
    for (auto& [name, idx] : entities) idx = k++;
    k = 0;
    for (auto& [t, idx] : times) idx = k++;

    const auto n = static_cast<Eigen::Index>(obs.size());
    const auto ne = static_cast<Eigen::Index>(entities.size());
    const auto nt = static_cast<Eigen::Index>(times.size());
    const Eigen::Index cols = 3 + 1 + (ne - 1) + (nt - 1);

    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, cols);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& o = obs[static_cast<std::size_t>(i)];
        design(i, 0) = o.x_pinning;
        design(i, 1) = o.x_lnsize;
        design(i, 2) = o.x_interaction;
        design(i, 3) = 1.0;
        const int e = entities.at(o.entity);
        const int t = times.at(o.time);
        if (e > 0) design(i, 3 + e) = 1.0;
        if (t > 0) design(i, 3 + ne + t - 1) = 1.0;
        y(i) = o.y;
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
    return {beta(0), beta(1), beta(2)};
}

} // namespace oracles
