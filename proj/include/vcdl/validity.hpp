#pragma once
// Validity oracle with query accounting, and the realizable learner for
// unions of at most k intervals.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcdl/interval_union.hpp"

namespace vcdl {

/// Answers point queries against the true valid region and counts every one.
/// One instance per replication; the counter is not synchronized.
class ValidityOracle {
public:
    explicit ValidityOracle(IntervalUnion valid_region) : region_(std::move(valid_region)) {}

    bool query(double x) {
        if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("ValidityOracle: query outside [0,1)");
        ++count_;
        return region_.contains(x);
    }

    std::uint64_t query_count() const noexcept { return count_; }
    void reset() noexcept { count_ = 0; }

    const IntervalUnion& region() const noexcept { return region_; }

private:
    IntervalUnion region_;
    std::uint64_t count_{0};
};

/// Unions of at most k closed intervals; VC dimension 2k.
struct IntervalUnionClass {
    std::size_t k{1};

    explicit IntervalUnionClass(std::size_t max_intervals) : k(max_intervals) {
        if (k == 0) throw std::invalid_argument("IntervalUnionClass: k must be positive");
    }

    std::size_t vc_dimension() const noexcept { return 2 * k; }
    bool contains(const IntervalUnion& h) const noexcept { return h.size() <= k; }
};

struct LabeledPoint {
    double x{0.0};
    bool label{false};  // true = valid

    friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// Thrown when no union of <= k intervals fits the labels.
class NonRealizable : public std::runtime_error {
public:
    NonRealizable(std::size_t runs, std::size_t k)
        : std::runtime_error("labels need " + std::to_string(runs) + " intervals but the class allows " +
                             std::to_string(k)),
          runs_(runs) {}
    explicit NonRealizable(const std::string& why) : std::runtime_error(why), runs_(0) {}
    std::size_t runs() const noexcept { return runs_; }

private:
    std::size_t runs_;
};

/// Zero-error hypothesis from the class: sort by x, take each maximal run of
/// consecutive positive labels, and return the tightest closed interval
/// [min, max] of every run.
inline IntervalUnion consistent_intervals(std::span<const LabeledPoint> sample, const IntervalUnionClass& cls) {
    std::vector<LabeledPoint> pts(sample.begin(), sample.end());
    std::sort(pts.begin(), pts.end(), [](const LabeledPoint& a, const LabeledPoint& b) {
        return a.x < b.x || (a.x == b.x && a.label < b.label);
    });
    std::vector<Interval> runs;
    bool in_run = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (i > 0 && pts[i - 1].x == p.x && pts[i - 1].label != p.label) {
            throw NonRealizable("point " + std::to_string(p.x) + " carries both labels");
        }
        if (p.label) {
            if (in_run) {
                runs.back().hi = p.x;
            } else {
                runs.push_back({p.x, p.x});
                in_run = true;
            }
        } else {
            in_run = false;
        }
    }
    if (runs.size() > cls.k) throw NonRealizable(runs.size(), cls.k);
    return IntervalUnion(std::move(runs));
}

/// Labels every point valid without consulting the oracle. Only sound for
/// samples from a fully-valid source.
inline std::vector<LabeledPoint> auto_label_valid(std::span<const double> sample) {
    std::vector<LabeledPoint> out;
    out.reserve(sample.size());
    for (double x : sample) out.push_back({x, true});
    return out;
}

/// Labels every point through the oracle (one query each).
inline std::vector<LabeledPoint> label_with_oracle(std::span<const double> sample, ValidityOracle& oracle) {
    std::vector<LabeledPoint> out;
    out.reserve(sample.size());
    for (double x : sample) out.push_back({x, oracle.query(x)});
    return out;
}

}  // namespace vcdl
