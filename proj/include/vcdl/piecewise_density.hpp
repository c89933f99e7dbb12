#pragma once
/*
Piecewise-constant probability distributions on the unit interval.

A distribution is a breakpoint grid 0 = t_0 < t_1 < ... < t_m = 1 and one mass
per half-open cell [t_i, t_{i+1}). The density on cell i is
masses[i] / (t_{i+1} - t_i), so every functional of two distributions (total
variation, KL, expected losses, invalidity) reduces to a finite sum over the
union of their grids and is exact up to floating-point rounding.
*/

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vcdl/interval_union.hpp"
#include "vcdl/numeric.hpp"

namespace vcdl {

struct DensityBounds {
    double alpha;  // min density over cells with positive mass
    double beta;   // max density over all cells
};

class PiecewiseDensity {
public:
    /// Checked constructor. Masses must be nonnegative and sum to 1 within kExactTol.
    PiecewiseDensity(std::vector<double> breakpoints, std::vector<double> masses)
        : breakpoints_(std::move(breakpoints)), masses_(std::move(masses)) {
        validate();
    }

    /// Normalizes nonnegative weights (not all zero) into a distribution.
    static PiecewiseDensity from_weights(std::vector<double> breakpoints, std::vector<double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("from_weights: negative or non-finite weight");
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("from_weights: weights sum to zero");
        for (double& w : weights) w /= total;
        return PiecewiseDensity(std::move(breakpoints), std::move(weights));
    }

    /// The uniform distribution u (one cell, density 1).
    static PiecewiseDensity uniform() { return PiecewiseDensity({0.0, 1.0}, {1.0}); }

    /// Equal-width histogram with masses.size() bins.
    static PiecewiseDensity histogram(std::vector<double> masses) {
        auto grid = equal_grid(masses.size());
        return PiecewiseDensity(std::move(grid), std::move(masses));
    }

    static std::vector<double> equal_grid(std::size_t bins) {
        if (bins == 0) throw std::invalid_argument("equal_grid: zero bins");
        std::vector<double> grid(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(bins);
        return grid;
    }

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& masses() const noexcept { return masses_; }
    std::size_t cells() const noexcept { return masses_.size(); }

    double cell_lo(std::size_t i) const { return breakpoints_[i]; }
    double cell_hi(std::size_t i) const { return breakpoints_[i + 1]; }
    double cell_length(std::size_t i) const { return breakpoints_[i + 1] - breakpoints_[i]; }
    double cell_density(std::size_t i) const { return masses_[i] / cell_length(i); }

    /// Index of the cell [t_i, t_{i+1}) containing x. Requires 0 <= x < 1.
    std::size_t cell_index(double x) const {
        if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("PiecewiseDensity: point outside [0,1)");
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
        return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    }

    double density_at(double x) const { return cell_density(cell_index(x)); }

    DensityBounds bounds() const {
        DensityBounds b{kInf, 0.0};
        for (std::size_t i = 0; i < cells(); ++i) {
            const double f = cell_density(i);
            if (masses_[i] > 0.0) b.alpha = std::min(b.alpha, f);
            b.beta = std::max(b.beta, f);
        }
        return b;
    }

    /// Probability of [a, b]. Cells lying wholly inside contribute their stored mass verbatim.
    double mass_in(double a, double b) const {
        a = std::max(a, 0.0);
        b = std::min(b, 1.0);
        if (!(b > a)) return 0.0;
        double total = 0.0;
        std::size_t i = static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), a) -
                                                 breakpoints_.begin()) - 1;
        for (; i < cells() && breakpoints_[i] < b; ++i) {
            const double lo = std::max(a, breakpoints_[i]);
            const double hi = std::min(b, breakpoints_[i + 1]);
            if (hi <= lo) continue;
            if (lo == breakpoints_[i] && hi == breakpoints_[i + 1]) {
                total += masses_[i];
            } else {
                total += masses_[i] * ((hi - lo) / cell_length(i));
            }
        }
        return total;
    }

    /// Masses re-expressed on an arbitrary grid over [0,1].
    std::vector<double> masses_on(const std::vector<double>& grid) const {
        std::vector<double> out(grid.size() - 1, 0.0);
        std::size_t i = 0;
        for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
            const double lo = grid[j];
            const double hi = grid[j + 1];
            while (i < cells() && breakpoints_[i + 1] <= lo) ++i;
            double acc = 0.0;
            for (std::size_t c = i; c < cells() && breakpoints_[c] < hi; ++c) {
                const double a = std::max(lo, breakpoints_[c]);
                const double b = std::min(hi, breakpoints_[c + 1]);
                if (b <= a) continue;
                if (a == breakpoints_[c] && b == breakpoints_[c + 1]) {
                    acc += masses_[c];
                } else {
                    acc += masses_[c] * ((b - a) / cell_length(c));
                }
            }
            out[j] = acc;
        }
        return out;
    }

    /// Same distribution expressed on `grid`, which must start at 0 and end at 1.
    PiecewiseDensity on_grid(const std::vector<double>& grid) const {
        return PiecewiseDensity(grid, masses_on(grid));
    }

    /// Image under x -> 1 - x.
    PiecewiseDensity reflected() const {
        std::vector<double> bp(breakpoints_.size());
        for (std::size_t i = 0; i < bp.size(); ++i) bp[i] = 1.0 - breakpoints_[bp.size() - 1 - i];
        std::vector<double> m(masses_.rbegin(), masses_.rend());
        return PiecewiseDensity(std::move(bp), std::move(m));
    }

    friend bool operator==(const PiecewiseDensity&, const PiecewiseDensity&) = default;

private:
    void validate() const {
        if (breakpoints_.size() < 2) throw std::invalid_argument("PiecewiseDensity: need at least two breakpoints");
        if (masses_.size() + 1 != breakpoints_.size())
            throw std::invalid_argument("PiecewiseDensity: masses must have one entry per cell");
        if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
            throw std::invalid_argument("PiecewiseDensity: grid must start at 0 and end at 1");
        for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
            if (!(breakpoints_[i] < breakpoints_[i + 1]))
                throw std::invalid_argument("PiecewiseDensity: breakpoints must be strictly increasing");
        }
        double total = 0.0;
        for (double m : masses_) {
            if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("PiecewiseDensity: negative or non-finite mass");
            total += m;
        }
        if (std::abs(total - 1.0) > kExactTol)
            throw std::invalid_argument("PiecewiseDensity: masses sum to " + std::to_string(total) + ", not 1");
    }

    std::vector<double> breakpoints_;
    std::vector<double> masses_;
};

/// Sorted union of two grids.
inline std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline double density_at(const PiecewiseDensity& d, double x) { return d.density_at(x); }

/// Both distributions on the union of their grids.
inline std::pair<PiecewiseDensity, PiecewiseDensity> refine(const PiecewiseDensity& a, const PiecewiseDensity& b) {
    if (a.breakpoints() == b.breakpoints()) return {a, b};
    const auto grid = merge_grids(a.breakpoints(), b.breakpoints());
    return {a.on_grid(grid), b.on_grid(grid)};
}

/// (1 - w) * a + w * b.
inline PiecewiseDensity mix(const PiecewiseDensity& a, const PiecewiseDensity& b, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("mix: weight outside [0,1]");
    auto [ra, rb] = refine(a, b);
    std::vector<double> m(ra.cells());
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = w == 0.0 ? ra.masses()[i] : (1.0 - w) * ra.masses()[i] + w * rb.masses()[i];
    }
    return PiecewiseDensity(ra.breakpoints(), std::move(m));
}

/// Conditions `d` on `region`. Returns nullopt when the region carries no mass,
/// leaving the fallback to the caller.
inline std::optional<PiecewiseDensity> restrict_to(const PiecewiseDensity& d, const IntervalUnion& region) {
    std::vector<double> cuts;
    for (double p : region.endpoints()) {
        if (p > 0.0 && p < 1.0) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    const auto grid = merge_grids(d.breakpoints(), cuts);
    auto m = d.masses_on(grid);
    double kept = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        if (!region.contains(mid)) m[i] = 0.0;
        kept += m[i];
    }
    if (!(kept > 0.0)) return std::nullopt;
    for (double& x : m) x /= kept;
    return PiecewiseDensity(grid, std::move(m));
}

/// Total variation distance, 1/2 sum |a - b| over the common grid.
inline double tv(const PiecewiseDensity& a, const PiecewiseDensity& b) {
    auto [ra, rb] = refine(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < ra.cells(); ++i) s += std::abs(ra.masses()[i] - rb.masses()[i]);
    return std::min(1.0, 0.5 * s);
}

/// KL(p || q); +inf when p has mass where q has none.
inline double kl(const PiecewiseDensity& p, const PiecewiseDensity& q) {
    auto [rp, rq] = refine(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < rp.cells(); ++i) {
        const double pm = rp.masses()[i];
        if (pm <= 0.0) continue;
        const double qm = rq.masses()[i];
        if (qm <= 0.0) return kInf;
        s += pm * std::log(pm / qm);
    }
    return std::max(0.0, s);
}

/// n i.i.d. draws by inverse CDF: pick a cell by cumulative mass, then a
/// uniform point inside it. Zero-mass cells are never chosen.
template <class URBG>
std::vector<double> sample(const PiecewiseDensity& d, URBG& gen, std::size_t n) {
    std::vector<double> cum(d.cells());
    std::partial_sum(d.masses().begin(), d.masses().end(), cum.begin());
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < d.cells(); ++i) {
        if (d.masses()[i] > 0.0) last_positive = i;
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = uniform01(gen) * cum.back();
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::size_t c = std::min(static_cast<std::size_t>(it - cum.begin()), last_positive);
        const double lo = d.cell_lo(c);
        const double hi = d.cell_hi(c);
        double x = lo + uniform01(gen) * (hi - lo);
        if (x >= hi) x = std::nextafter(hi, lo);
        out.push_back(x);
    }
    return out;
}

}  // namespace vcdl
