#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vcdl {

struct Interval {
    double lo{0.0};
    double hi{0.0};

    double length() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// A finite union of disjoint closed intervals inside [0,1].
///
/// Construction sorts the input and merges overlapping or touching pieces, so
/// the stored list always satisfies hi_j < lo_{j+1}. An empty list is the
/// empty set. Membership is the closed-interval rule.
class IntervalUnion {
public:
    IntervalUnion() = default;

    explicit IntervalUnion(std::vector<Interval> pieces) : intervals_(std::move(pieces)) {
        for (const auto& iv : intervals_) {
            if (!(iv.lo <= iv.hi)) throw std::invalid_argument("IntervalUnion: interval with lo > hi");
            if (iv.lo < 0.0 || iv.hi > 1.0) throw std::invalid_argument("IntervalUnion: interval outside [0,1]");
        }
        std::sort(intervals_.begin(), intervals_.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
        std::vector<Interval> merged;
        merged.reserve(intervals_.size());
        for (const auto& iv : intervals_) {
            if (!merged.empty() && iv.lo <= merged.back().hi) {
                merged.back().hi = std::max(merged.back().hi, iv.hi);
            } else {
                merged.push_back(iv);
            }
        }
        intervals_ = std::move(merged);
    }

    IntervalUnion(std::initializer_list<Interval> pieces) : IntervalUnion(std::vector<Interval>(pieces)) {}

    static IntervalUnion full() { return IntervalUnion({Interval{0.0, 1.0}}); }
    static IntervalUnion empty_set() { return IntervalUnion(); }

    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    std::size_t size() const noexcept { return intervals_.size(); }
    bool empty() const noexcept { return intervals_.empty(); }

    bool contains(double x) const noexcept {
        // First interval whose hi >= x; x is inside iff its lo <= x.
        auto it = std::lower_bound(intervals_.begin(), intervals_.end(), x,
                                   [](const Interval& iv, double v) { return iv.hi < v; });
        return it != intervals_.end() && it->lo <= x;
    }

    /// Lebesgue measure.
    double length() const noexcept {
        double total = 0.0;
        for (const auto& iv : intervals_) total += iv.length();
        return total;
    }

    /// Length of the intersection with [a, b].
    double overlap(double a, double b) const noexcept {
        double total = 0.0;
        for (const auto& iv : intervals_) {
            const double lo = std::max(a, iv.lo);
            const double hi = std::min(b, iv.hi);
            if (hi > lo) total += hi - lo;
        }
        return total;
    }

    /// Image under x -> 1 - x.
    IntervalUnion reflected() const {
        std::vector<Interval> out;
        out.reserve(intervals_.size());
        for (const auto& iv : intervals_) out.push_back({1.0 - iv.hi, 1.0 - iv.lo});
        return IntervalUnion(std::move(out));
    }

    /// Every interval endpoint, in order.
    std::vector<double> endpoints() const {
        std::vector<double> pts;
        pts.reserve(2 * intervals_.size());
        for (const auto& iv : intervals_) {
            pts.push_back(iv.lo);
            pts.push_back(iv.hi);
        }
        return pts;
    }

    friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

private:
    std::vector<Interval> intervals_;
};

}  // namespace vcdl
