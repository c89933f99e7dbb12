#pragma once
/*
Problem environments.

  make_realizable_instance       P in Q, exact per-model invalidity targets
  make_lower_bound_instance      the two-instance construction sharing Q = {P, P~}
  make_mismatched_instance       Q need not contain P; every model has validity >= floor
  make_zero_validity_instance    a zero-validity model wins capped-log ERM by tie-break

Generated regions are bin-aligned so every functional is exact on the bin grid.
*/

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcdl/functionals.hpp"
#include "vcdl/interval_union.hpp"
#include "vcdl/loss.hpp"
#include "vcdl/numeric.hpp"
#include "vcdl/piecewise_density.hpp"
#include "vcdl/validity.hpp"

namespace vcdl {

struct ProblemInstance {
    std::string generator;
    PiecewiseDensity P;
    std::vector<PiecewiseDensity> Q;
    IntervalUnion valid_region;
    std::optional<IntervalUnionClass> validity_class;
    std::optional<PiecewiseDensity> d_ref;
    double c{0.0};      // declared validity lower bound of d_ref
    double gamma{0.0};  // declared minimum validity over Q
    double alpha{0.0};  // declared density bounds over Q (on supports)
    double beta{0.0};
    std::size_t q_star_index{0};  // under the log-loss
    bool realizable{false};       // P is an element of Q
};

class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Smallest-index fully-valid model minimizing L_P(q; loss), or nullopt when
/// Q has no fully-valid model.
inline std::optional<std::size_t> q_star(const ProblemInstance& inst, const LossSpec& loss) {
    std::optional<std::size_t> best;
    double best_loss = kInf;
    for (std::size_t i = 0; i < inst.Q.size(); ++i) {
        if (invalidity(inst.Q[i], inst.valid_region) > kExactTol) continue;
        const double l = expected_loss(inst.P, inst.Q[i], loss);
        if (!best || l < best_loss) {
            best = i;
            best_loss = l;
        }
    }
    return best;
}

/// Every violated ProblemInstance invariant, as text. Empty when the instance is consistent.
inline std::vector<std::string> instance_violations(const ProblemInstance& inst) {
    std::vector<std::string> out;
    if (inst.Q.empty()) {
        out.push_back("Q is empty");
        return out;
    }
    if (invalidity(inst.P, inst.valid_region) > kExactTol) out.push_back("P is not fully valid");
    if (inst.realizable) {
        const bool member = std::any_of(inst.Q.begin(), inst.Q.end(),
                                        [&](const PiecewiseDensity& q) { return tv(q, inst.P) <= kExactTol; });
        if (!member) out.push_back("realizable instance but P is not in Q");
    }
    for (std::size_t i = 0; i < inst.Q.size(); ++i) {
        const auto& q = inst.Q[i];
        if (validity(q, inst.valid_region) + kExactTol < inst.gamma)
            out.push_back("Q[" + std::to_string(i) + "] validity below declared gamma");
        const auto b = q.bounds();
        if (b.alpha + kExactTol < inst.alpha) out.push_back("Q[" + std::to_string(i) + "] density below declared alpha");
        if (b.beta > inst.beta + kExactTol) out.push_back("Q[" + std::to_string(i) + "] density above declared beta");
    }
    const auto qs = q_star(inst, LossSpec::log());
    if (!qs) {
        out.push_back("Q has no fully-valid model");
    } else if (*qs != inst.q_star_index) {
        out.push_back("q_star_index is " + std::to_string(inst.q_star_index) + ", expected " + std::to_string(*qs));
    }
    if (inst.validity_class && !inst.validity_class->contains(inst.valid_region))
        out.push_back("valid region is not in the declared validity class");
    if (inst.d_ref && validity(*inst.d_ref, inst.valid_region) + kExactTol < inst.c)
        out.push_back("d_ref validity below declared c");
    return out;
}

namespace detail {

/// Valid-bin mask with at most k runs and at least one invalid bin.
template <class URBG>
std::vector<bool> random_valid_mask(URBG& gen, std::size_t bins, std::size_t k, std::optional<std::size_t> valid_bins) {
    if (valid_bins && (*valid_bins == 0 || *valid_bins >= bins))
        throw InstanceError("valid_bins must lie in [1, bins)");
    const std::size_t min_valid = valid_bins.value_or((bins + 1) / 2);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const std::size_t runs = 1 + uniform_index(gen, k);
        if (2 * runs > bins + 1) continue;
        // 2*runs distinct cut positions in {0..bins}, sorted: s1 < e1 < s2 < e2 ...
        std::vector<std::size_t> cuts;
        while (cuts.size() < 2 * runs) {
            const std::size_t c = uniform_index(gen, bins + 1);
            if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<bool> mask(bins, false);
        std::size_t count = 0;
        for (std::size_t r = 0; r < runs; ++r) {
            for (std::size_t b = cuts[2 * r]; b < cuts[2 * r + 1]; ++b) mask[b] = true;
            count += cuts[2 * r + 1] - cuts[2 * r];
        }
        if (count == bins) continue;
        if (valid_bins ? count != *valid_bins : count < min_valid) continue;
        return mask;
    }
    throw InstanceError("could not place a valid region with the requested shape");
}

inline IntervalUnion region_from_mask(const std::vector<bool>& mask) {
    const double B = static_cast<double>(mask.size());
    std::vector<Interval> pieces;
    for (std::size_t i = 0; i < mask.size();) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < mask.size() && mask[j]) ++j;
        pieces.push_back({static_cast<double>(i) / B, static_cast<double>(j) / B});
        i = j;
    }
    return IntervalUnion(std::move(pieces));
}

/// Random positive weights on the selected bins, normalized to sum 1 (zero elsewhere).
template <class URBG>
std::vector<double> random_shape(URBG& gen, const std::vector<bool>& on, double floor_weight = 0.1) {
    std::vector<double> w(on.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < on.size(); ++i) {
        if (!on[i]) continue;
        w[i] = floor_weight + (1.0 - floor_weight) * uniform01(gen);
        total += w[i];
    }
    if (!(total > 0.0)) throw InstanceError("random_shape: no bins selected");
    for (double& x : w) x /= total;
    return w;
}

inline std::vector<double> flat_shape(const std::vector<bool>& on) {
    std::vector<double> w(on.size(), 0.0);
    const auto n = static_cast<double>(std::count(on.begin(), on.end(), true));
    if (n == 0) throw InstanceError("flat_shape: no bins selected");
    for (std::size_t i = 0; i < on.size(); ++i) w[i] = on[i] ? 1.0 / n : 0.0;
    return w;
}

inline double max_density(const std::vector<double>& shape, double scale) {
    double m = 0.0;
    for (double s : shape) m = std::max(m, s * scale * static_cast<double>(shape.size()));
    return m;
}

/// Scales a normalized shape to `mass`, falling back to the flat shape when the
/// density cap would be exceeded.
inline std::vector<double> capped_part(const std::vector<double>& shape, const std::vector<bool>& on, double mass,
                                       double beta_cap) {
    if (mass == 0.0) return std::vector<double>(shape.size(), 0.0);
    const std::vector<double>* use = &shape;
    std::vector<double> flat;
    if (max_density(shape, mass) > beta_cap) {
        flat = flat_shape(on);
        if (max_density(flat, mass) > beta_cap + kExactTol)
            throw InstanceError("infeasible: mass " + std::to_string(mass) + " exceeds the density cap on its bins");
        use = &flat;
    }
    std::vector<double> out(shape.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mass * (*use)[i];
    return out;
}

/// Histogram with `valid_mass` spread by `valid_shape` and the rest by `invalid_shape`.
inline PiecewiseDensity two_part_histogram(const std::vector<double>& valid_shape, const std::vector<bool>& valid_on,
                                           const std::vector<double>& invalid_shape,
                                           const std::vector<bool>& invalid_on, double invalid_mass, double beta_cap) {
    auto v = capped_part(valid_shape, valid_on, 1.0 - invalid_mass, beta_cap);
    const auto inv = capped_part(invalid_shape, invalid_on, invalid_mass, beta_cap);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += inv[i];
    return PiecewiseDensity::histogram(std::move(v));
}

inline std::vector<double> blend(const std::vector<double>& a, const std::vector<double>& b, double s) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - s) * a[i] + s * b[i];
    return out;
}

inline std::vector<bool> complement(const std::vector<bool>& m) {
    std::vector<bool> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = !m[i];
    return out;
}

inline void declare_bounds(ProblemInstance& inst) {
    inst.alpha = kInf;
    inst.beta = 0.0;
    inst.gamma = 1.0;
    for (const auto& q : inst.Q) {
        const auto b = q.bounds();
        inst.alpha = std::min(inst.alpha, b.alpha);
        inst.beta = std::max(inst.beta, b.beta);
        inst.gamma = std::min(inst.gamma, validity(q, inst.valid_region));
    }
}

inline void finish(ProblemInstance& inst) {
    declare_bounds(inst);
    const auto qs = q_star(inst, LossSpec::log());
    if (!qs) throw InstanceError("generated class has no fully-valid model");
    inst.q_star_index = *qs;
    const auto v = instance_violations(inst);
    if (!v.empty()) throw InstanceError("generated instance violates: " + v.front());
}

}  // namespace detail

struct RealizableOptions {
    std::size_t bins{16};
    std::size_t size_Q{20};
    /// Target invalidity of each model; profile[0] = 0 is P itself.
    std::vector<double> invalidity_profile{0.0};
    std::size_t max_intervals{2};
    double beta_cap{16.0};
    std::optional<std::size_t> valid_bins;
};

/// P is a random histogram inside the valid region and Q[0] = P. Every other
/// Q[i] has exact invalidity profile[i]; its valid part blends P's shape with
/// a random shape so the class spans near and far alternatives.
template <class URBG>
ProblemInstance make_realizable_instance(URBG& gen, const RealizableOptions& opt) {
    if (opt.bins < 2) throw InstanceError("realizable instance needs at least 2 bins");
    if (opt.size_Q < 1) throw InstanceError("realizable instance needs |Q| >= 1");
    if (opt.invalidity_profile.size() != opt.size_Q)
        throw InstanceError("invalidity profile must have one entry per model");
    if (opt.invalidity_profile[0] != 0.0) throw InstanceError("profile[0] must be 0 (it is P)");
    for (double t : opt.invalidity_profile) {
        if (!(t >= 0.0 && t < 1.0)) throw InstanceError("profile values must lie in [0,1)");
    }

    const auto valid_on = detail::random_valid_mask(gen, opt.bins, opt.max_intervals, opt.valid_bins);
    const auto invalid_on = detail::complement(valid_on);
    const auto region = detail::region_from_mask(valid_on);
    const auto p_shape = detail::random_shape(gen, valid_on);

    ProblemInstance inst{"realizable", PiecewiseDensity::histogram(p_shape), {}, region,
                         IntervalUnionClass(opt.max_intervals), std::nullopt};
    inst.realizable = true;
    inst.Q.push_back(inst.P);
    for (std::size_t i = 1; i < opt.size_Q; ++i) {
        const double s = uniform01(gen);
        const auto valid_shape = detail::blend(p_shape, detail::random_shape(gen, valid_on), s);
        const auto invalid_shape = detail::random_shape(gen, invalid_on);
        inst.Q.push_back(detail::two_part_histogram(valid_shape, valid_on, invalid_shape, invalid_on,
                                                    opt.invalidity_profile[i], opt.beta_cap));
    }
    detail::finish(inst);
    return inst;
}

struct MismatchedOptions {
    std::size_t bins{16};
    std::size_t size_Q{10};
    double gamma_floor{0.5};
    double beta_cap{16.0};
    std::size_t max_intervals{2};
    std::optional<std::size_t> valid_bins;
};

/// Q[0] is fully valid (but not P); every other model has validity drawn in
/// [gamma_floor, 1]. d_ref = u with c = length of the valid region.
template <class URBG>
ProblemInstance make_mismatched_instance(URBG& gen, const MismatchedOptions& opt) {
    if (opt.bins < 2) throw InstanceError("mismatched instance needs at least 2 bins");
    if (opt.size_Q < 1) throw InstanceError("mismatched instance needs |Q| >= 1");
    if (!(opt.gamma_floor > 0.0 && opt.gamma_floor <= 1.0)) throw InstanceError("gamma_floor must lie in (0,1]");
    if (!(opt.beta_cap >= 1.0)) throw InstanceError("beta_cap must be >= 1");

    const auto valid_on = detail::random_valid_mask(gen, opt.bins, opt.max_intervals, opt.valid_bins);
    const auto invalid_on = detail::complement(valid_on);
    const auto region = detail::region_from_mask(valid_on);
    const auto p_shape = detail::random_shape(gen, valid_on);

    const double B = static_cast<double>(opt.bins);
    const double n_inv = static_cast<double>(std::count(invalid_on.begin(), invalid_on.end(), true));
    const double n_val = B - n_inv;
    const double lowest_validity = std::max(opt.gamma_floor, 1.0 - opt.beta_cap * n_inv / B);
    if (lowest_validity > std::min(1.0, opt.beta_cap * n_val / B))
        throw InstanceError("infeasible: validity floor cannot be met under the density cap");

    ProblemInstance inst{"mismatched", PiecewiseDensity::histogram(p_shape), {}, region,
                         IntervalUnionClass(opt.max_intervals), PiecewiseDensity::uniform()};
    inst.c = validity(*inst.d_ref, region);
    inst.realizable = false;
    for (std::size_t i = 0; i < opt.size_Q; ++i) {
        const double s = i == 0 ? 0.3 + 0.7 * uniform01(gen) : uniform01(gen);
        const auto valid_shape = detail::blend(p_shape, detail::random_shape(gen, valid_on), s);
        const double v = i == 0 ? 1.0 : lowest_validity + (1.0 - lowest_validity) * uniform01(gen);
        inst.Q.push_back(detail::two_part_histogram(valid_shape, valid_on, detail::random_shape(gen, invalid_on),
                                                    invalid_on, 1.0 - v, opt.beta_cap));
    }
    detail::finish(inst);
    inst.gamma = opt.gamma_floor;
    return inst;
}

struct ZeroValidityOptions {
    std::size_t bins{10};
    std::size_t valid_bins{8};
    std::size_t data_bins{4};  // bins carrying P, all valid
    std::size_t size_Q{6};
    std::size_t max_intervals{2};
    double beta_cap{16.0};
};

/// Every model puts zero density where P lives, so under the capped log-loss
/// all models tie at the cap and the lowest index wins ERM. Q[0] has all its
/// mass on invalid bins; Q[1] is fully valid; the rest mix the two parts.
/// d_ref = u, c = valid length.
template <class URBG>
ProblemInstance make_zero_validity_instance(URBG& gen, const ZeroValidityOptions& opt) {
    if (opt.size_Q < 2) throw InstanceError("zero-validity instance needs |Q| >= 2");
    if (opt.data_bins == 0 || opt.data_bins >= opt.valid_bins)
        throw InstanceError("data_bins must lie in [1, valid_bins)");

    const auto valid_on = detail::random_valid_mask(gen, opt.bins, opt.max_intervals, opt.valid_bins);
    const auto invalid_on = detail::complement(valid_on);
    const auto region = detail::region_from_mask(valid_on);

    // choose the data bins among the valid ones
    std::vector<std::size_t> valid_idx;
    for (std::size_t i = 0; i < opt.bins; ++i) {
        if (valid_on[i]) valid_idx.push_back(i);
    }
    for (std::size_t i = valid_idx.size(); i > 1; --i) std::swap(valid_idx[i - 1], valid_idx[uniform_index(gen, i)]);
    std::vector<bool> data_on(opt.bins, false);
    for (std::size_t j = 0; j < opt.data_bins; ++j) data_on[valid_idx[j]] = true;
    std::vector<bool> free_on(opt.bins, false);
    for (std::size_t j = opt.data_bins; j < valid_idx.size(); ++j) free_on[valid_idx[j]] = true;

    ProblemInstance inst{"zero_validity", PiecewiseDensity::histogram(detail::random_shape(gen, data_on)), {}, region,
                         IntervalUnionClass(opt.max_intervals), PiecewiseDensity::uniform()};
    inst.c = validity(*inst.d_ref, region);
    inst.realizable = false;
    for (std::size_t i = 0; i < opt.size_Q; ++i) {
        const double v = i == 0 ? 0.0 : (i == 1 ? 1.0 : uniform01(gen));
        inst.Q.push_back(detail::two_part_histogram(detail::random_shape(gen, free_on), free_on,
                                                    detail::random_shape(gen, invalid_on), invalid_on, 1.0 - v,
                                                    opt.beta_cap));
    }
    detail::finish(inst);
    return inst;
}

struct LowerBoundPair {
    ProblemInstance first;   // data from P, invalid region (1 - 2 eps2, 1]
    ProblemInstance second;  // data from P~, invalid region [0, 2 eps2)
};

/// Q = {P, P~} with P uniform on [0, 1 - 2 eps2] and P~ uniform on [2 eps2, 1].
inline LowerBoundPair make_lower_bound_instance(double eps2) {
    if (!(eps2 > 0.0 && eps2 < 0.25)) throw std::invalid_argument("lower bound instance needs 0 < eps2 < 1/4");
    const double a = 2.0 * eps2;
    const double b = 1.0 - 2.0 * eps2;
    const double edge = a / b;
    const double middle = 1.0 - edge;
    const std::vector<double> grid{0.0, a, b, 1.0};
    const PiecewiseDensity P(grid, {edge, middle, 0.0});
    const PiecewiseDensity P_tilde(grid, {0.0, middle, edge});

    auto build = [&](const PiecewiseDensity& data, IntervalUnion region, std::size_t truth) {
        ProblemInstance inst{"lower_bound", data, {P, P_tilde}, std::move(region), IntervalUnionClass(1),
                             std::nullopt};
        inst.realizable = true;
        detail::declare_bounds(inst);
        inst.q_star_index = truth;
        return inst;
    };
    return {build(P, IntervalUnion{{0.0, b}}, 0), build(P_tilde, IntervalUnion{{a, 1.0}}, 1)};
}

}  // namespace vcdl
