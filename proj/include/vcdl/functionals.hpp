#pragma once
// Closed-form functionals of piecewise-constant distributions: expected and
// empirical losses, (in)validity, disagreement mass.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "vcdl/interval_union.hpp"
#include "vcdl/loss.hpp"
#include "vcdl/piecewise_density.hpp"

namespace vcdl {

namespace detail {

inline std::vector<double> interior_cuts(const IntervalUnion& region) {
    std::vector<double> cuts;
    for (double p : region.endpoints()) {
        if (p > 0.0 && p < 1.0) cuts.push_back(p);
    }
    return cuts;
}

/// Grid of `d` cut at every interior endpoint of the given regions. On each
/// resulting piece, membership in every region is constant (up to endpoints).
inline std::vector<double> cut_grid(const PiecewiseDensity& d, std::initializer_list<const IntervalUnion*> regions) {
    std::vector<double> cuts;
    for (const auto* r : regions) {
        auto c = interior_cuts(*r);
        cuts.insert(cuts.end(), c.begin(), c.end());
    }
    std::sort(cuts.begin(), cuts.end());
    return merge_grids(d.breakpoints(), cuts);
}

inline double midpoint(const std::vector<double>& grid, std::size_t i) { return 0.5 * (grid[i] + grid[i + 1]); }

}  // namespace detail

/// L_P(q; l) = E_{X~P}[ l(f_q(X)) ], summed exactly over the common grid.
inline double expected_loss(const PiecewiseDensity& P, const PiecewiseDensity& q, const LossSpec& loss) {
    const auto grid = merge_grids(P.breakpoints(), q.breakpoints());
    const auto pm = P.masses_on(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        if (pm[i] <= 0.0) continue;
        const double l = loss(q.density_at(detail::midpoint(grid, i)));
        if (l == kInf) return kInf;
        total += pm[i] * l;
    }
    return total;
}

/// L_S(q; l), the sample mean of l(f_q(x_i)).
inline double empirical_loss(std::span<const double> sample, const PiecewiseDensity& q, const LossSpec& loss) {
    if (sample.empty()) throw std::invalid_argument("empirical_loss: empty sample");
    double total = 0.0;
    for (double x : sample) {
        const double l = loss(q.density_at(x));
        if (l == kInf) return kInf;
        total += l;
    }
    return total / static_cast<double>(sample.size());
}

/// I(q) = q-measure of the complement of the valid region.
inline double invalidity(const PiecewiseDensity& q, const IntervalUnion& valid) {
    const auto grid = detail::cut_grid(q, {&valid});
    const auto m = q.masses_on(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!valid.contains(detail::midpoint(grid, i))) total += m[i];
    }
    return std::min(1.0, total);
}

/// V(q) = 1 - I(q), computed directly as the mass inside the region.
inline double validity(const PiecewiseDensity& q, const IntervalUnion& valid) {
    const auto grid = detail::cut_grid(q, {&valid});
    const auto m = q.masses_on(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (valid.contains(detail::midpoint(grid, i))) total += m[i];
    }
    return std::min(1.0, total);
}

/// q-measure of the symmetric difference of h1 and h2.
inline double disagreement_mass(const PiecewiseDensity& q, const IntervalUnion& h1, const IntervalUnion& h2) {
    const auto grid = detail::cut_grid(q, {&h1, &h2});
    const auto m = q.masses_on(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = detail::midpoint(grid, i);
        if (h1.contains(x) != h2.contains(x)) total += m[i];
    }
    return std::min(1.0, total);
}

/// E_{X~P}[ 1[X in supp(q)] ln(1/f_q(X)) ]. Always finite.
inline double support_clipped_loss(const PiecewiseDensity& P, const PiecewiseDensity& q) {
    const auto grid = merge_grids(P.breakpoints(), q.breakpoints());
    const auto pm = P.masses_on(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        if (pm[i] <= 0.0) continue;
        const double f = q.density_at(detail::midpoint(grid, i));
        if (f > 0.0) total += pm[i] * -std::log(f);
    }
    return total;
}

/// E_{X~P}[ l(f_q(X)) * 1[h(X) = W(X)] ]: the loss collected only where two
/// regions agree.
inline double expected_loss_on_agreement(const PiecewiseDensity& P, const PiecewiseDensity& q, const LossSpec& loss,
                                         const IntervalUnion& h, const IntervalUnion& W) {
    auto grid = detail::cut_grid(P, {&h, &W});
    grid = merge_grids(grid, q.breakpoints());
    const auto pm = P.masses_on(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        if (pm[i] <= 0.0) continue;
        const double x = detail::midpoint(grid, i);
        if (h.contains(x) != W.contains(x)) continue;
        const double l = loss(q.density_at(x));
        if (l == kInf) return kInf;
        total += pm[i] * l;
    }
    return total;
}

}  // namespace vcdl
