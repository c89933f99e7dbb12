#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vcdl/numeric.hpp"

namespace vcdl {

/// A non-increasing local loss l(f) evaluated at a density value f >= 0.
///
/// Three kinds are supported: the log-loss ln(1/f) (infinite at f = 0), the
/// capped log-loss min(M, ln(1/f)), and a user table interpolated linearly
/// between knots (z_j, l_j) and held constant outside them.
class LossSpec {
public:
    enum class Kind { Log, CappedLog, Table };

    static LossSpec log() { return LossSpec(Kind::Log, 0.0, {}); }

    static LossSpec capped_log(double cap) {
        if (!(cap > 0.0) || !std::isfinite(cap)) throw std::invalid_argument("capped_log: cap must be positive");
        return LossSpec(Kind::CappedLog, cap, {});
    }

    static LossSpec table(std::vector<std::pair<double, double>> knots) {
        if (knots.empty()) throw std::invalid_argument("loss table: no knots");
        std::sort(knots.begin(), knots.end());
        for (std::size_t i = 0; i < knots.size(); ++i) {
            const auto [z, v] = knots[i];
            if (!(z >= 0.0) || !std::isfinite(z) || !std::isfinite(v))
                throw std::invalid_argument("loss table: knots must be finite with z >= 0");
            if (i > 0 && z == knots[i - 1].first) throw std::invalid_argument("loss table: duplicate knot");
            if (i > 0 && v > knots[i - 1].second) throw std::invalid_argument("loss table: loss must be non-increasing");
        }
        return LossSpec(Kind::Table, 0.0, std::move(knots));
    }

    /// l(z) = max(0, 1 - z), clipped to [0, 1].
    static LossSpec linear_hinge() { return table({{0.0, 1.0}, {1.0, 0.0}}); }

    Kind kind() const noexcept { return kind_; }
    double cap() const noexcept { return cap_; }
    const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

    double operator()(double f) const {
        switch (kind_) {
            case Kind::Log:
                return f > 0.0 ? -std::log(f) : kInf;
            case Kind::CappedLog:
                return f > 0.0 ? std::min(cap_, -std::log(f)) : cap_;
            case Kind::Table:
                break;
        }
        if (f <= knots_.front().first) return knots_.front().second;
        if (f >= knots_.back().first) return knots_.back().second;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), f,
                                   [](double v, const std::pair<double, double>& k) { return v < k.first; });
        const auto& [z1, l1] = *it;
        const auto& [z0, l0] = *(it - 1);
        return l0 + (l1 - l0) * ((f - z0) / (z1 - z0));
    }

    /// True when the loss lies in some [0, M].
    bool bounded_nonnegative() const noexcept {
        return kind_ == Kind::Table && knots_.back().second >= 0.0;
    }

    /// sup_f l(f); +inf for the log-loss.
    double upper_bound() const noexcept {
        switch (kind_) {
            case Kind::Log: return kInf;
            case Kind::CappedLog: return cap_;
            case Kind::Table: return knots_.front().second;
        }
        return kInf;
    }

    std::string name() const {
        switch (kind_) {
            case Kind::Log: return "log";
            case Kind::CappedLog: return "capped_log";
            case Kind::Table: return "table";
        }
        return "?";
    }

private:
    LossSpec(Kind k, double cap, std::vector<std::pair<double, double>> knots)
        : kind_(k), cap_(cap), knots_(std::move(knots)) {}

    Kind kind_;
    double cap_;
    std::vector<std::pair<double, double>> knots_;
};

}  // namespace vcdl
