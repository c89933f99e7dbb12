#pragma once
/*
Model selection procedures.

  erm                      lowest-index minimizer of the empirical loss over a finite class
  alg1_finite_log_loss     log-loss ERM mixed with u at weight min(eps1, eps2)/8; zero queries
  alg2_valid_restriction   bounded-loss ERM restricted to a learned estimate of the valid region
  alg3_valid_restriction_log
                           capped-log ERM, mixed with a reference distribution of known
                           validity c at weight eps1/8, then restricted as in alg2

Every hidden constant of the sample-size formulas is a field of LearnParams
(C1, C2, C3) so runs are reproducible and the constant is reported with the result.
*/

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcdl/functionals.hpp"
#include "vcdl/loss.hpp"
#include "vcdl/numeric.hpp"
#include "vcdl/piecewise_density.hpp"
#include "vcdl/validity.hpp"

namespace vcdl {

struct LearnParams {
    double eps1{0.2};   // loss slack
    double eps2{0.05};  // invalidity budget
    double delta{0.1};  // failure probability
    double M{1.0};      // loss cap / bound
    double gamma{1.0};  // validity lower bound over Q
    double C1{2.0};
    double C2{8.0};
    double C3{4.0};
    /// When set, replaces gamma in the S_q size: the instance promises that
    /// every eps1-suboptimal model has at least this validity.
    std::optional<double> suboptimal_validity;

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        auto open01 = [&](double v, const char* name) {
            if (!(v > 0.0 && v < 1.0)) out.push_back(std::string(name) + " must lie in (0,1)");
        };
        open01(eps1, "eps1");
        open01(eps2, "eps2");
        open01(delta, "delta");
        if (!(M > 0.0) || !std::isfinite(M)) out.push_back("M must be positive");
        if (!(gamma > 0.0 && gamma <= 1.0)) out.push_back("gamma must lie in (0,1]");
        if (!(C1 > 0.0)) out.push_back("C1 must be positive");
        if (!(C2 > 0.0)) out.push_back("C2 must be positive");
        if (!(C3 > 0.0)) out.push_back("C3 must be positive");
        if (suboptimal_validity && !(*suboptimal_validity > 0.0 && *suboptimal_validity <= 1.0))
            out.push_back("suboptimal_validity must lie in (0,1]");
        return out;
    }

    void check() const {
        const auto v = violations();
        if (v.empty()) return;
        std::string msg = "invalid LearnParams:";
        for (const auto& s : v) msg += " " + s + ";";
        throw std::invalid_argument(msg);
    }

    double eps_min() const noexcept { return std::min(eps1, eps2); }
};

/// Sampling handle for the data distribution. Learners can draw from it but
/// never read the underlying masses.
class SampleSource {
public:
    explicit SampleSource(PiecewiseDensity P) : P_(std::move(P)) {}

    std::vector<double> draw(Rng& rng, std::size_t n) {
        drawn_ += n;
        return sample(P_, rng, n);
    }

    std::uint64_t samples_drawn() const noexcept { return drawn_; }

private:
    PiecewiseDensity P_;
    std::uint64_t drawn_{0};
};

struct ErmChoice {
    std::size_t index{0};
    double empirical_loss{0.0};
    bool tie{false};           // another model attains the same minimum
    bool all_infinite{false};  // every model has L_S = +inf
};

/// Lowest-index minimizer of L_S(q; loss) over Q. +inf participates in the ordering.
inline ErmChoice erm(std::span<const PiecewiseDensity> Q, std::span<const double> S, const LossSpec& loss) {
    if (Q.empty()) throw std::invalid_argument("erm: empty model class");
    if (S.empty()) throw std::invalid_argument("erm: empty sample");
    ErmChoice best;
    best.empirical_loss = kInf;
    bool first = true;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        const double l = empirical_loss(S, Q[i], loss);
        if (first || l < best.empirical_loss) {
            best.index = i;
            best.empirical_loss = l;
            best.tie = false;
            first = false;
        } else if (l == best.empirical_loss) {
            best.tie = true;
        }
    }
    best.all_infinite = best.empirical_loss == kInf;
    return best;
}

// ---------------------------------------------------------------------------
// Sample-size calculators
// ---------------------------------------------------------------------------

/// ceil(C1 (ln|Q| + ln(1/delta)) / min(eps1^2, eps2)), at least 1.
inline std::uint64_t n_erm_realizable(double size_Q, const LearnParams& p) {
    if (!(size_Q >= 1.0)) throw std::invalid_argument("n_erm_realizable: |Q| must be >= 1");
    const double denom = std::min(p.eps1 * p.eps1, p.eps2);
    return std::max<std::uint64_t>(1, ceil_count(p.C1 * (std::log(size_Q) + std::log(1.0 / p.delta)) / denom));
}

/// Sample size for the log-loss mixture learner: the ERM size scaled by
/// ln^2(1/min(eps1, eps2, alpha)). The 1/beta polylog factor is not included.
inline std::uint64_t n_mixture_log_loss(double size_Q, double alpha, const LearnParams& p) {
    if (!(size_Q >= 1.0)) throw std::invalid_argument("n_mixture_log_loss: |Q| must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("n_mixture_log_loss: alpha must be positive");
    const double floor_eps = std::min({p.eps1, p.eps2, alpha});
    const double lg = std::log(1.0 / floor_eps);
    const double denom = std::min(p.eps1 * p.eps1, p.eps2);
    return std::max<std::uint64_t>(
        1, ceil_count(p.C1 * lg * lg * (std::log(size_Q) + std::log(1.0 / p.delta)) / denom));
}

/// Hoeffding size for uniform loss estimation: ceil(C2 M^2 (ln|Q| + ln(2/delta)) / eps1^2).
inline std::uint64_t n_loss_estimation(double M, double size_Q, const LearnParams& p) {
    if (!(M > 0.0)) throw std::invalid_argument("n_loss_estimation: M must be positive");
    if (!(size_Q >= 1.0)) throw std::invalid_argument("n_loss_estimation: |Q| must be >= 1");
    return std::max<std::uint64_t>(
        1, ceil_count(p.C2 * M * M * (std::log(size_Q) + std::log(2.0 / p.delta)) / (p.eps1 * p.eps1)));
}

/// Realizable PAC size for a class of VC dimension D at accuracy eps:
/// ceil(C3 (D ln(1/eps) + ln(1/delta)) / eps).
inline std::uint64_t n_vc_realizable(std::size_t D, double eps, double delta, double C3 = 4.0) {
    if (D == 0) throw std::invalid_argument("n_vc_realizable: VC dimension must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("n_vc_realizable: eps must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("n_vc_realizable: delta must lie in (0,1)");
    const double Dd = static_cast<double>(D);
    return ceil_count(C3 * (Dd * std::log(1.0 / eps) + std::log(1.0 / delta)) / eps);
}

/// Query bound of the general improper learner, ln|Q| / (eps1^2 eps2) with
/// unit constant. Used only as a comparison curve.
inline double prior_work_query_bound(double size_Q, const LearnParams& p) {
    return std::log(size_Q) / (p.eps1 * p.eps1 * p.eps2);
}

/// Accuracy target for the validity fit under the ERM model in alg2.
inline double alg2_model_target(const LearnParams& p) {
    return p.suboptimal_validity.value_or(p.gamma) * p.eps2 / 2.0;
}

/// Accuracy target for the validity fit under the mixed model in alg3.
inline double alg3_model_target(double c, const LearnParams& p) { return c * p.eps1 * p.eps2 / 16.0; }

/// Accuracy target for the validity fit under P (both alg2 and alg3).
inline double data_target(const LearnParams& p) { return p.eps1 / (2.0 * p.M); }

// ---------------------------------------------------------------------------
// Learners
// ---------------------------------------------------------------------------

struct LearnOutcome {
    PiecewiseDensity model;
    std::size_t erm_index{0};
    std::uint64_t samples_used{0};  // draws from P
    std::uint64_t queries_used{0};  // oracle calls during the run
    bool fallback_triggered{false}; // restriction had zero mass; model is the ERM
    ErmChoice erm_choice{};
    std::optional<IntervalUnion> hypothesis;  // learned valid region (alg2/alg3)
    std::uint64_t model_sample_size{0};       // |S_q|, every point queried
    std::uint64_t data_label_sample_size{0};  // |S_P|, auto-labeled
};

inline LearnOutcome alg1_finite_log_loss(std::span<const PiecewiseDensity> Q, SampleSource& source,
                                         const LearnParams& p, Rng& rng) {
    p.check();
    if (Q.empty()) throw std::invalid_argument("alg1: empty model class");
    double alpha = kInf;
    for (const auto& q : Q) alpha = std::min(alpha, q.bounds().alpha);
    const double size_Q = static_cast<double>(Q.size());
    const std::uint64_t n = std::max(n_erm_realizable(size_Q, p), n_mixture_log_loss(size_Q, alpha, p));

    const std::uint64_t before = source.samples_drawn();
    const auto S = source.draw(rng, n);
    const auto choice = erm(Q, S, LossSpec::log());
    auto model = mix(Q[choice.index], PiecewiseDensity::uniform(), p.eps_min() / 8.0);

    return LearnOutcome{std::move(model), choice.index, source.samples_drawn() - before, 0, false, choice,
                        std::nullopt, 0, 0};
}

namespace detail {

inline LearnOutcome restrict_with_learned_region(std::span<const PiecewiseDensity> Q, const ErmChoice& choice,
                                                 const PiecewiseDensity& proposal, const IntervalUnionClass& cls,
                                                 SampleSource& source, ValidityOracle& oracle, double model_target,
                                                 const LearnParams& p, Rng& rng, std::uint64_t samples_so_far) {
    const std::size_t D = cls.vc_dimension();
    const std::uint64_t n_data = n_vc_realizable(D, data_target(p), p.delta, p.C3);
    const std::uint64_t n_model = n_vc_realizable(D, model_target, p.delta, p.C3);

    const std::uint64_t queries_before = oracle.query_count();
    const std::uint64_t drawn_before = source.samples_drawn();

    const auto S_P = source.draw(rng, n_data);
    const auto S_q = sample(proposal, rng, n_model);

    auto labeled = auto_label_valid(S_P);
    const auto queried = label_with_oracle(S_q, oracle);
    labeled.insert(labeled.end(), queried.begin(), queried.end());

    auto h = consistent_intervals(labeled, cls);
    auto restricted = restrict_to(proposal, h);
    const bool fallback = !restricted.has_value();
    PiecewiseDensity model = fallback ? Q[choice.index] : std::move(*restricted);

    return LearnOutcome{std::move(model),
                        choice.index,
                        samples_so_far + (source.samples_drawn() - drawn_before),
                        oracle.query_count() - queries_before,
                        fallback,
                        choice,
                        std::move(h),
                        n_model,
                        n_data};
}

}  // namespace detail

/// Bounded-loss ERM restricted to a learned valid region. `loss` must take
/// values in [0, p.M]; every model in Q is assumed to have validity >= p.gamma.
inline LearnOutcome alg2_valid_restriction(std::span<const PiecewiseDensity> Q, const IntervalUnionClass& cls,
                                           SampleSource& source, ValidityOracle& oracle, const LossSpec& loss,
                                           const LearnParams& p, Rng& rng) {
    p.check();
    if (Q.empty()) throw std::invalid_argument("alg2: empty model class");
    if (!loss.bounded_nonnegative() || loss.upper_bound() > p.M)
        throw std::invalid_argument("alg2: loss must be bounded in [0, M]");
    if (!(data_target(p) < 1.0)) throw std::invalid_argument("alg2: eps1 / (2M) must be below 1");

    const std::uint64_t drawn_before = source.samples_drawn();
    const auto S = source.draw(rng, n_loss_estimation(p.M, static_cast<double>(Q.size()), p));
    const auto choice = erm(Q, S, loss);
    const auto& q_erm = Q[choice.index];
    return detail::restrict_with_learned_region(Q, choice, q_erm, cls, source, oracle, alg2_model_target(p), p, rng,
                                                source.samples_drawn() - drawn_before);
}

/// Capped-log ERM mixed with a reference distribution `d_ref` whose validity
/// is at least `c`, then restricted to a learned valid region. On zero
/// restricted mass the plain ERM model is returned.
inline LearnOutcome alg3_valid_restriction_log(std::span<const PiecewiseDensity> Q, const IntervalUnionClass& cls,
                                               const PiecewiseDensity& d_ref, double c, SampleSource& source,
                                               ValidityOracle& oracle, const LearnParams& p, Rng& rng) {
    p.check();
    if (Q.empty()) throw std::invalid_argument("alg3: empty model class");
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("alg3: reference validity c must lie in (0,1]");
    if (!(data_target(p) < 1.0)) throw std::invalid_argument("alg3: eps1 / (2M) must be below 1");

    const auto loss = LossSpec::capped_log(p.M);
    const std::uint64_t drawn_before = source.samples_drawn();
    const auto S = source.draw(rng, n_loss_estimation(p.M, static_cast<double>(Q.size()), p));
    const auto choice = erm(Q, S, loss);
    const auto proposal = mix(Q[choice.index], d_ref, p.eps1 / 8.0);
    return detail::restrict_with_learned_region(Q, choice, proposal, cls, source, oracle, alg3_model_target(c, p), p,
                                                rng, source.samples_drawn() - drawn_before);
}

}  // namespace vcdl
