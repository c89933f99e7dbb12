#pragma once
/*
Named acceptance suites, shared by the acceptance binary and `vcdl verify`.

Each suite returns pass/fail plus a one-line detail. Runtime limits are part
of the pass condition. Seeds are fixed, so a suite's verdict is reproducible.
*/

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "vcdl/exactcheck.hpp"
#include "vcdl/experiments.hpp"
#include "vcdl/functionals.hpp"
#include "vcdl/instances.hpp"
#include "vcdl/learners.hpp"

namespace vcdl::acceptance {

struct SuiteResult {
    int criterion{0};
    std::string name;
    bool passed{false};
    double seconds{0.0};
    double time_limit{0.0};
    std::string detail;
};

namespace detail {

/// Collects failed checks; the first few messages end up in the detail line.
struct Checks {
    std::uint64_t total{0};
    std::uint64_t failed{0};
    std::vector<std::string> messages;

    void expect(bool ok, const std::string& what) {
        ++total;
        if (ok) return;
        ++failed;
        if (messages.size() < 3) messages.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        const bool ok = (std::isinf(want) && got == want) || std::abs(got - want) <= tol;
        expect(ok, what + " got " + format_double(got) + " want " + format_double(want));
    }
    std::string summary() const {
        std::ostringstream os;
        os << (total - failed) << "/" << total << " checks";
        for (const auto& m : messages) os << "; " << m;
        return os.str();
    }
};

template <class URBG>
PiecewiseDensity random_density(URBG& gen, std::size_t cells, double zero_prob = 0.0) {
    std::vector<double> cuts;
    while (cuts.size() + 1 < cells) {
        const double c = uniform01(gen);
        if (c > 0.0 && std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> grid{0.0};
    grid.insert(grid.end(), cuts.begin(), cuts.end());
    grid.push_back(1.0);
    std::vector<double> w(cells);
    bool any = false;
    for (auto& x : w) {
        x = uniform01(gen) < zero_prob ? 0.0 : uniform01(gen) + 1e-3;
        any = any || x > 0.0;
    }
    if (!any) w[uniform_index(gen, cells)] = 1.0;
    return PiecewiseDensity::from_weights(std::move(grid), std::move(w));
}

template <class URBG>
std::vector<double> random_masses(URBG& gen, const std::vector<bool>& on) {
    std::vector<double> w(on.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < on.size(); ++i) {
        if (on[i]) total += (w[i] = 0.05 + uniform01(gen));
    }
    for (auto& x : w) x /= total;
    return w;
}

template <class URBG>
IntervalUnion random_union(URBG& gen, std::size_t max_pieces) {
    const std::size_t k = 1 + uniform_index(gen, max_pieces);
    std::vector<double> ends(2 * k);
    for (auto& e : ends) e = uniform01(gen);
    std::sort(ends.begin(), ends.end());
    std::vector<Interval> pieces;
    for (std::size_t i = 0; i < k; ++i) pieces.push_back({ends[2 * i], ends[2 * i + 1]});
    return IntervalUnion(std::move(pieces));
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline SuiteResult finish(int criterion, std::string name, double limit, std::chrono::steady_clock::time_point t0,
                          bool ok, std::string detail) {
    SuiteResult r{criterion, std::move(name), ok, elapsed(t0), limit, std::move(detail)};
    if (r.seconds > limit) {
        r.passed = false;
        r.detail += "; runtime over limit";
    }
    return r;
}

inline std::string freq_detail(const char* label, double freq, double limit, const char* rel) {
    std::ostringstream os;
    os << label << " " << format_double(freq) << " " << rel << " " << format_double(limit);
    return os.str();
}

}  // namespace detail

inline SuiteResult exact_functionals() {
    const auto t0 = std::chrono::steady_clock::now();
    detail::Checks c;
    const double tol = 1e-12;
    const auto u = PiecewiseDensity::uniform();
    const PiecewiseDensity d({0.0, 0.5, 1.0}, {0.25, 0.75});
    const PiecewiseDensity half({0.0, 0.5, 1.0}, {0.5, 0.5});
    const PiecewiseDensity left({0.0, 0.5, 1.0}, {1.0, 0.0});

    c.near(u.density_at(0.3), 1.0, tol, "density u");
    c.near(d.density_at(0.7), 1.5, tol, "density d(0.7)");
    c.near(d.density_at(0.2), 0.5, tol, "density d(0.2)");
    c.near(tv(half, d), 0.25, tol, "tv halves");
    c.near(tv(d, d), 0.0, tol, "tv self");
    c.near(tv(left, PiecewiseDensity({0.0, 0.5, 1.0}, {0.0, 1.0})), 1.0, tol, "tv disjoint");
    const double kl_hand = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    c.near(kl(half, d), kl_hand, tol, "kl halves");
    c.near(kl(d, d), 0.0, tol, "kl self");
    c.expect(kl(half, left) == kInf, "kl support mismatch");
    c.near(expected_loss(u, u, LossSpec::log()), 0.0, tol, "expected_loss u,u");
    c.near(expected_loss(half, d, LossSpec::log()), 0.5 * std::log(2.0) + 0.5 * std::log(1.0 / 1.5), tol,
           "expected_loss halves");
    c.expect(expected_loss(half, left, LossSpec::log()) == kInf, "expected_loss support");
    const double S[] = {0.1, 0.6};
    c.near(empirical_loss(S, d, LossSpec::log()), (std::log(2.0) + std::log(1.0 / 1.5)) / 2.0, tol, "empirical");
    c.near(invalidity(u, IntervalUnion{{0.0, 0.9}}), 0.1, tol, "invalidity u");
    c.near(invalidity(d, IntervalUnion::full()), 0.0, tol, "invalidity full");
    const auto lb = make_lower_bound_instance(0.1);
    c.near(invalidity(lb.first.Q[1], lb.first.valid_region), 0.25, tol, "invalidity lower-bound pair");
    c.near(tv(lb.first.Q[0], lb.first.Q[1]), 0.25, tol, "tv lower-bound pair");
    const auto r1 = restrict_to(u, IntervalUnion{{0.0, 0.5}});
    c.expect(r1 && std::abs(r1->density_at(0.2) - 2.0) <= tol && r1->density_at(0.7) == 0.0, "restrict u");
    c.expect(!restrict_to(u, IntervalUnion::empty_set()), "restrict empty");
    const auto r2 = restrict_to(d, IntervalUnion{{0.0, 0.5}});
    c.expect(r2 && std::abs(r2->density_at(0.2) - 2.0) <= tol, "restrict d");
    const auto m = mix(left, u, 0.25);
    c.near(m.density_at(0.2), 1.75, tol, "mix first half");
    c.near(m.density_at(0.7), 0.25, tol, "mix second half");
    c.near(disagreement_mass(u, IntervalUnion{{0.0, 0.5}}, IntervalUnion{{0.0, 0.6}}), 0.1, tol, "disagreement u");
    c.near(disagreement_mass(d, IntervalUnion::full(), IntervalUnion{{0.0, 0.5}}), 0.75, tol, "disagreement d");
    c.near(support_clipped_loss(u, left), 0.5 * std::log(0.5), tol, "support clipped u");
    c.near(support_clipped_loss(d, d), 0.25 * std::log(2.0) + 0.75 * std::log(1.0 / 1.5), tol, "support clipped d");

    Rng gen(20240601);
    for (int i = 0; i < 1000; ++i) {
        const auto a = detail::random_density(gen, 1 + uniform_index(gen, 8), 0.2);
        const auto b = detail::random_density(gen, 1 + uniform_index(gen, 8), 0.2);
        const auto e = detail::random_density(gen, 1 + uniform_index(gen, 8), 0.2);
        const double t = tv(a, b);
        c.expect(t >= 0.0 && t <= 1.0, "tv range");
        c.expect(std::abs(t - tv(b, a)) <= tol, "tv symmetry");
        c.expect(tv(a, a) <= tol, "tv identity");
        c.expect(t <= tv(a, e) + tv(e, b) + tol, "tv triangle");
        const double k = kl(a, b);
        c.expect(k == kInf || t <= std::sqrt(k / 2.0) + tol, "pinsker");
    }
    return detail::finish(1, "exact-functionals", 5.0, t0, c.failed == 0, c.summary());
}

inline SuiteResult flip_test() {
    const auto t0 = std::chrono::steady_clock::now();
    const PiecewiseDensity P({0.0, 0.5, 1.0}, {0.5, 0.5});
    const PiecewiseDensity q({0.0, 0.5, 1.0}, {0.3, 0.7});
    const double delta = 0.1;
    const double t = tv(P, q);
    const std::uint64_t n = ceil_count(2.0 * std::log(1.0 / delta) / (t * t));
    const std::uint64_t reps = 2000;
    const auto est = flip_probability(P, q, n, reps, 0x4c454d4d41ULL, LossSpec::log());
    const double limit = binomial_slack_limit(delta, reps);
    const bool ok = n == 116 && std::abs(t - 0.2) <= 1e-12 && est.summary.frequency <= limit;
    std::ostringstream os;
    os << "n=" << n << ", " << detail::freq_detail("flip frequency", est.summary.frequency, limit, "<=");
    return detail::finish(2, "flip-test", 10.0, t0, ok, os.str());
}

inline SuiteResult likelihood_ratio() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
    const PiecewiseDensity P(grid, {0.5, 0.5, 0.0});
    const PiecewiseDensity q(grid, {0.5, 0.0, 0.5});
    const IntervalUnion W{{0.0, 0.5}};
    const double eps = invalidity(q, W);
    const std::uint64_t reps = 10000;
    bool ok = invalidity(P, W) == 0.0 && std::abs(eps - 0.5) <= 1e-12;
    std::ostringstream os;
    for (std::uint64_t n : {5u, 10u}) {
        const auto est = flip_probability(P, q, n, reps, 0x4c52ULL + n, LossSpec::log());
        const double bound = std::exp(-static_cast<double>(n) * eps);
        const double limit = binomial_slack_limit(bound, reps);
        ok = ok && est.summary.frequency <= limit;
        os << "n=" << n << ": " << detail::freq_detail("flip", est.summary.frequency, limit, "<=") << "; ";
    }
    return detail::finish(3, "likelihood-ratio", 10.0, t0, ok, os.str());
}

inline SuiteResult product_tv() {
    const auto t0 = std::chrono::steady_clock::now();
    detail::Checks c;
    const double tol = 1e-12;
    Rng gen(0x5052);
    for (int i = 0; i < 200; ++i) {
        const std::size_t m = 1 + uniform_index(gen, 6);
        const auto grid = PiecewiseDensity::equal_grid(m);
        const std::vector<bool> all(m, true);
        const PiecewiseDensity P(grid, detail::random_masses(gen, all));
        const PiecewiseDensity q(grid, detail::random_masses(gen, all));
        const std::uint64_t n = 1 + uniform_index(gen, 4);
        const auto sums = product_sums(P, q, n);
        const auto rep = product_tv_report(P, q, n);
        c.expect(rep.sandwich_holds(tol), "sandwich m=" + std::to_string(m) + " n=" + std::to_string(n));
        c.expect(std::abs((1.0 - sums.half_abs_diff) - sums.min_sum) <= tol, "scheffe");
        if (n == 1) c.expect(std::abs(sums.half_abs_diff - tv(P, q)) <= tol, "n=1 equals tv");
    }
    for (int i = 0; i < 50; ++i) {
        const std::size_t m = 2 + uniform_index(gen, 7);
        const std::size_t n = 1 + uniform_index(gen, 6);
        std::vector<bool> valid(m);
        for (std::size_t j = 0; j < m; ++j) valid[j] = j < m / 2 + uniform_index(gen, (m + 1) / 2);
        if (std::all_of(valid.begin(), valid.end(), [](bool b) { return b; })) valid.back() = false;
        const auto grid = PiecewiseDensity::equal_grid(m);
        std::vector<Interval> pieces;
        for (std::size_t j = 0; j < m; ++j)
            if (valid[j]) pieces.push_back({grid[j], grid[j + 1]});
        const IntervalUnion W(std::move(pieces));
        const std::vector<bool> all(m, true);
        const PiecewiseDensity P(grid, detail::random_masses(gen, valid));
        const PiecewiseDensity q(grid, detail::random_masses(gen, all));
        const double I = invalidity(q, W);
        const double eps = I * (0.5 + 0.49 * uniform01(gen));
        const auto rep = product_tv_report(P, q, n, eps);
        c.expect(invalidity(P, W) == 0.0, "P fully valid");
        c.expect(rep.margin_holds(), "margin m=" + std::to_string(m) + " n=" + std::to_string(n));
        c.expect(rep.sandwich_holds(tol), "sandwich (invalid pair)");
    }
    return detail::finish(4, "product-tv", 60.0, t0, c.failed == 0, c.summary());
}

inline ExperimentConfig mixture_log_loss_config() {
    ExperimentConfig cfg;
    cfg.kind = "alg1";
    cfg.experiment_id = "mixture_log_loss";
    cfg.instance.generator = "realizable";
    cfg.instance.seed = 0x7431;
    cfg.instance.resample_each_rep = true;
    cfg.instance.options = {{"bins", 16},
                            {"size_Q", 20},
                            {"max_intervals", 2},
                            {"beta_cap", 16.0},
                            {"profile_cycle", {0.0, 0.02, 0.04, 0.06, 0.1, 0.2, 0.4}}};
    cfg.params.eps1 = 0.2;
    cfg.params.eps2 = 0.05;
    cfg.params.delta = 0.1;
    cfg.params.C1 = 2.0;
    cfg.reps = 500;
    cfg.base_seed = 0x5431;
    return cfg;
}

inline SuiteResult mixture_log_loss() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = mixture_log_loss_config();
    const auto res = run_experiment(cfg);
    const auto& s = res.summaries.front();
    const double limit = binomial_slack_limit(cfg.params.delta, cfg.reps);
    const double cap = std::log(8.0 / cfg.params.eps_min());
    bool floor_ok = true;
    for (const auto& r : res.records) floor_ok = floor_ok && std::isfinite(r.model_loss) && r.model_loss <= cap;
    std::ostringstream os;
    os << detail::freq_detail("failure frequency", s.failure.frequency, limit, "<=")
       << (floor_ok ? "; every log-loss finite and <= ln(8/eps_min)" : "; log-loss cap violated");
    return detail::finish(5, "mixture-log-loss", 120.0, t0, s.failure.frequency <= limit && floor_ok, os.str());
}

inline SuiteResult lower_bound_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps2 = 0.05;
    const auto small = lower_bound_experiment(eps2, 2, 10000, 0x7432);
    const auto large = lower_bound_experiment(eps2, 40000, 1000, 0x7433);
    const bool ok = small.worst_frequency() >= 0.20 && large.worst_frequency() <= 0.01;
    std::ostringstream os;
    os << "n=2: " << detail::freq_detail("worst failure", small.worst_frequency(), 0.20, ">=")
       << "; n=40000: " << detail::freq_detail("worst failure", large.worst_frequency(), 0.01, "<=");
    return detail::finish(6, "lower-bound", 30.0, t0, ok, os.str());
}

inline ExperimentConfig bounded_loss_restriction_config() {
    ExperimentConfig cfg;
    cfg.kind = "alg2";
    cfg.experiment_id = "bounded_loss_restriction";
    cfg.instance.generator = "mismatched";
    cfg.instance.seed = 0x7433;
    cfg.instance.resample_each_rep = true;
    cfg.instance.options = {{"bins", 16}, {"size_Q", 10}, {"gamma_floor", 0.5}, {"beta_cap", 16.0},
                            {"max_intervals", 2}};
    cfg.params.eps1 = 0.2;
    cfg.params.eps2 = 0.1;
    cfg.params.delta = 0.1;
    cfg.params.M = 1.0;
    cfg.params.gamma = 0.5;
    cfg.loss = LossSpec::linear_hinge();
    cfg.reps = 300;
    cfg.base_seed = 0x5433;
    return cfg;
}

inline SuiteResult bounded_loss_restriction() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = bounded_loss_restriction_config();
    const auto res = run_experiment(cfg);
    const auto& s = res.summaries.front();
    const double limit = binomial_slack_limit(cfg.params.delta, cfg.reps);
    const std::uint64_t expected_queries = n_vc_realizable(4, 0.025, 0.1, cfg.params.C3);
    bool queries_ok = expected_queries == 2730;
    for (const auto& r : res.records) queries_ok = queries_ok && r.n_queries == expected_queries;

    // S_P labels must come for free: the oracle total equals |S_q| alone
    const auto inst = build_instance(cfg.instance, 0);
    SampleSource src(inst.P);
    ValidityOracle oracle(inst.valid_region);
    Rng rng(1);
    const auto out = alg2_valid_restriction(inst.Q, *inst.validity_class, src, oracle, cfg.loss, cfg.params, rng);
    const bool sp_free = out.data_label_sample_size > 0 && oracle.query_count() == out.model_sample_size;

    std::ostringstream os;
    os << detail::freq_detail("failure frequency", s.failure.frequency, limit, "<=") << "; queries per run "
       << (queries_ok ? "all " : "NOT all ") << expected_queries << "; S_P queries "
       << (sp_free ? "0" : "nonzero");
    return detail::finish(7, "bounded-loss-restriction", 180.0, t0, s.failure.frequency <= limit && queries_ok && sp_free, os.str());
}

inline ExperimentConfig capped_log_restriction_config() {
    ExperimentConfig cfg;
    cfg.kind = "alg3";
    cfg.experiment_id = "capped_log_restriction";
    cfg.instance.generator = "zero_validity";
    cfg.instance.seed = 0x7434;
    cfg.instance.resample_each_rep = true;
    cfg.instance.options = {{"bins", 10},   {"valid_bins", 8},      {"data_bins", 4},
                            {"size_Q", 6},  {"max_intervals", 2},   {"beta_cap", 16.0}};
    cfg.params.eps1 = 0.2;
    cfg.params.eps2 = 0.1;
    cfg.params.delta = 0.1;
    cfg.params.M = 4.0;
    cfg.reps = 300;
    cfg.base_seed = 0x5434;
    return cfg;
}

inline SuiteResult capped_log_restriction() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = capped_log_restriction_config();
    bool instance_ok = true;
    for (std::uint64_t rep = 0; rep < cfg.reps; ++rep) {
        const auto inst = build_instance(cfg.instance, rep);
        instance_ok = instance_ok && std::abs(inst.c - 0.8) <= 1e-12 && inst.beta <= 16.0 &&
                      validity(inst.Q[0], inst.valid_region) == 0.0;
    }
    const auto res = run_experiment(cfg);
    const auto& s = res.summaries.front();
    const double limit = binomial_slack_limit(cfg.params.delta, cfg.reps);
    const std::uint64_t expected_queries =
        n_vc_realizable(4, alg3_model_target(0.8, cfg.params), cfg.params.delta, cfg.params.C3);
    bool queries_ok = true, winner_ok = true;
    for (const auto& r : res.records) {
        queries_ok = queries_ok && r.n_queries == expected_queries;
        winner_ok = winner_ok && r.erm_index == 0;
    }
    const double fallback_freq = static_cast<double>(s.fallbacks) / static_cast<double>(s.reps);
    std::ostringstream os;
    os << detail::freq_detail("failure frequency", s.failure.frequency, limit, "<=") << "; "
       << detail::freq_detail("fallback frequency", fallback_freq, cfg.params.delta, "<=") << "; queries per run "
       << (queries_ok ? "all " : "NOT all ") << expected_queries << "; zero-validity ERM winner "
       << (winner_ok && instance_ok ? "every run" : "NOT every run");
    const bool ok = s.failure.frequency <= limit && fallback_freq <= cfg.params.delta && queries_ok && winner_ok &&
                    instance_ok;
    return detail::finish(8, "capped-log-restriction", 180.0, t0, ok, os.str());
}

inline SuiteResult restriction() {
    const auto t0 = std::chrono::steady_clock::now();
    detail::Checks c;
    const double tol = 1e-12;
    Rng gen(0x5245);
    std::uint64_t tested_bound = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto q = detail::random_density(gen, 2 + uniform_index(gen, 10), 0.2);
        const auto W = detail::random_union(gen, 3);
        const auto P0 = restrict_to(detail::random_density(gen, 2 + uniform_index(gen, 6)), W);
        if (!P0) continue;

        // the true region removes all invalid mass
        if (const auto rw = restrict_to(q, W)) c.expect(invalidity(*rw, W) <= tol, "restrict to W is valid");

        // loss collected where h and W agree never exceeds the total loss
        const auto h = uniform01(gen) < 0.5 ? detail::random_union(gen, 3) : [&] {
            std::vector<Interval> pieces;
            for (const auto& iv : W.intervals()) {
                const double lo = std::clamp(iv.lo + 0.1 * (uniform01(gen) - 0.5), 0.0, 1.0);
                const double hi = std::clamp(iv.hi + 0.1 * (uniform01(gen) - 0.5), lo, 1.0);
                pieces.push_back({lo, hi});
            }
            return IntervalUnion(std::move(pieces));
        }();
        if (const auto rh = restrict_to(q, h)) {
            const double z = 0.5 + 2.0 * uniform01(gen);
            const double top = 0.5 + uniform01(gen);
            const auto loss = LossSpec::table({{0.0, top}, {z, 0.0}});
            c.expect(expected_loss_on_agreement(*P0, *rh, loss, h, W) <= expected_loss(*P0, q, loss) + tol,
                     "restricted loss bound");
            const auto capped = LossSpec::table({{0.0, top}, {z, top / 3.0}, {2.0 * z, 0.0}});
            c.expect(expected_loss_on_agreement(*P0, *rh, capped, h, W) <= expected_loss(*P0, q, capped) + tol,
                     "restricted loss bound (three knots)");
        }

        // invalidity bound under the disagreement precondition
        const double V = validity(q, W);
        if (!(V > 0.0)) continue;
        const double V_hat = V * (0.05 + 0.95 * uniform01(gen));
        const double dis = disagreement_mass(q, h, W);
        const double eps_needed = 2.0 * dis / V_hat;
        if (!(eps_needed < 1.0)) continue;
        const double eps = eps_needed + (1.0 - eps_needed) * uniform01(gen) * uniform01(gen);
        const auto rh = restrict_to(q, h);
        c.expect(rh.has_value(), "restriction defined under the precondition");
        if (rh) c.expect(invalidity(*rh, W) <= eps + tol, "restricted invalidity <= eps");
        ++tested_bound;
    }
    std::string detail_line = c.summary() + "; " + std::to_string(tested_bound) + " triples met the precondition";
    return detail::finish(9, "restriction", 10.0, t0, c.failed == 0 && tested_bound >= 100, detail_line);
}

struct Suite {
    std::string name;
    std::function<SuiteResult()> run;
};

inline const std::vector<Suite>& suites() {
    static const std::vector<Suite> all{
        {"exact-functionals", exact_functionals}, {"flip-test", flip_test},     {"likelihood-ratio", likelihood_ratio},
        {"product-tv", product_tv},               {"mixture-log-loss", mixture_log_loss}, {"lower-bound", lower_bound_suite},
        {"bounded-loss-restriction", bounded_loss_restriction},                   {"capped-log-restriction", capped_log_restriction}, {"restriction", restriction},
    };
    return all;
}

inline std::string format_result(const SuiteResult& r) {
    std::ostringstream os;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", r.seconds);
    os << (r.passed ? "PASS" : "FAIL") << " [" << r.criterion << "] " << r.name << " (" << secs << ", limit "
       << r.time_limit << "s): " << r.detail;
    return os.str();
}

}  // namespace vcdl::acceptance
