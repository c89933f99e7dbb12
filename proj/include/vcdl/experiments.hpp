#pragma once
/*
Configuration-driven experiment harness.

A config is a JSON object (schema in README.md). run_experiment executes the
replications, evaluates every learned model with the exact functionals, and
returns one RunRecord per replication plus per-experiment summaries. Output
is a pure function of the config: replication r uses the seed
derive_seed(base_seed, r), or derive_seed(base_seed, axis_index, r) inside a
sweep, and records are emitted in replication order whatever the thread count.
*/

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vcdl/exactcheck.hpp"
#include "vcdl/functionals.hpp"
#include "vcdl/instances.hpp"
#include "vcdl/learners.hpp"
#include "vcdl/serialization.hpp"
#include "vcdl/stats.hpp"

namespace vcdl {

inline constexpr const char* kRunSchema = "vcdl_run_v1";

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid experiment config:";
        for (const auto& p : v) s += "\n  - " + p;
        return s;
    }
    std::vector<std::string> problems_;
};

struct InstanceSpec {
    std::string generator;  // realizable | mismatched | zero_validity | pair | inline
    std::uint64_t seed{0};
    bool resample_each_rep{false};
    json options = json::object();
    std::optional<ProblemInstance> fixed;  // pair / inline
};

struct SweepAxis {
    std::string kind;   // experiment kind of every sub-run
    std::string param;  // eps1 eps2 delta M gamma C1 C2 C3 suboptimal_validity n reps
    std::vector<double> values;
};

struct ExperimentConfig {
    std::string kind;
    std::string experiment_id;
    InstanceSpec instance;
    LearnParams params;
    LossSpec loss = LossSpec::log();
    std::uint64_t reps{1};
    std::uint64_t base_seed{0};
    std::uint64_t n{0};
    std::vector<std::uint64_t> n_values;  // product_tv
    std::size_t q_index{0};
    std::optional<double> margin_eps;
    CiMethod ci{CiMethod::Normal};
    std::string output;
    std::optional<SweepAxis> sweep;
};

struct RunRecord {
    std::string experiment_id;
    std::uint64_t rep{0};
    std::uint64_t seed{0};
    std::uint64_t n_samples{0};
    std::uint64_t n_queries{0};
    double model_loss{0.0};  // L_P(output; l) for learners, L_S(q; l) for flip tests
    double loss_gap{0.0};
    double invalidity{0.0};
    double tv_to_P{0.0};
    bool fallback_triggered{false};
    bool success_loss{false};
    bool success_validity{false};
    std::size_t erm_index{0};
    bool erm_tie{false};
    bool erm_all_infinite{false};
    LearnParams params;
    std::string axis_param;
    double axis_value{std::numeric_limits<double>::quiet_NaN()};
};

struct RunSummary {
    std::string experiment_id;
    std::uint64_t reps{0};
    BinomialSummary loss_failure;
    BinomialSummary validity_failure;
    BinomialSummary failure;  // either criterion
    std::uint64_t fallbacks{0};
    std::uint64_t total_queries{0};
    std::uint64_t total_samples{0};
    std::string axis_param;
    double axis_value{std::numeric_limits<double>::quiet_NaN()};
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<RunSummary> summaries;
    std::vector<ProductTVReport> product_tv;
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline const std::set<std::string>& experiment_kinds() {
    static const std::set<std::string> k{"alg1",    "alg2",       "alg3",        "flip_test",
                                         "flipprob", "product_tv", "lower_bound", "sweep"};
    return k;
}

inline const std::set<std::string>& sweep_params() {
    static const std::set<std::string> p{"eps1", "eps2", "delta", "M", "gamma", "C1",
                                         "C2",   "C3",   "suboptimal_validity", "n", "reps"};
    return p;
}

template <class T>
void read_field(const json& j, const char* key, T& out, std::vector<std::string>& errors, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        errors.push_back(where + key + ": wrong type");
    }
}

inline LearnParams parse_params(const json& j, std::vector<std::string>& errors) {
    LearnParams p;
    if (!j.is_object()) {
        errors.push_back("params: must be an object");
        return p;
    }
    static const std::set<std::string> known{"eps1", "eps2", "delta", "M", "gamma", "C1", "C2", "C3",
                                             "suboptimal_validity"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) errors.push_back("params." + k + ": unknown parameter");
    }
    read_field(j, "eps1", p.eps1, errors, "params.");
    read_field(j, "eps2", p.eps2, errors, "params.");
    read_field(j, "delta", p.delta, errors, "params.");
    read_field(j, "M", p.M, errors, "params.");
    read_field(j, "gamma", p.gamma, errors, "params.");
    read_field(j, "C1", p.C1, errors, "params.");
    read_field(j, "C2", p.C2, errors, "params.");
    read_field(j, "C3", p.C3, errors, "params.");
    if (j.contains("suboptimal_validity")) {
        double v = 0.0;
        read_field(j, "suboptimal_validity", v, errors, "params.");
        p.suboptimal_validity = v;
    }
    for (const auto& v : p.violations()) errors.push_back("params: " + v);
    return p;
}

inline InstanceSpec parse_instance(const json& j, const std::filesystem::path& base_dir,
                                   std::vector<std::string>& errors) {
    InstanceSpec s;
    if (!j.is_object()) {
        errors.push_back("instance: must be an object");
        return s;
    }
    s.options = j;
    read_field(j, "generator", s.generator, errors, "instance.");
    read_field(j, "seed", s.seed, errors, "instance.");
    read_field(j, "resample_each_rep", s.resample_each_rep, errors, "instance.");
    static const std::set<std::string> gens{"realizable", "mismatched", "zero_validity", "pair", "inline"};
    if (!gens.count(s.generator)) {
        errors.push_back("instance.generator: must be one of realizable, mismatched, zero_validity, pair, inline");
        return s;
    }
    try {
        if (s.generator == "pair") {
            const auto P = density_from_json(j.at("P"));
            const auto q = density_from_json(j.at("q"));
            const auto W = j.contains("valid") ? intervals_from_json(j.at("valid")) : IntervalUnion::full();
            ProblemInstance inst{"pair", P, {q}, W, std::nullopt, std::nullopt};
            s.fixed = std::move(inst);
        } else if (s.generator == "inline") {
            if (j.contains("instance")) {
                s.fixed = instance_from_json(j.at("instance"));
            } else if (j.contains("path")) {
                std::filesystem::path path = j.at("path").get<std::string>();
                if (path.is_relative()) path = base_dir / path;
                s.fixed = instance_from_json(read_json_file(path.string()));
            } else {
                errors.push_back("instance: inline generator needs \"instance\" or \"path\"");
            }
        }
    } catch (const std::exception& e) {
        errors.push_back(std::string("instance: ") + e.what());
    }
    return s;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir = ".") {
    std::vector<std::string> errors;
    ExperimentConfig cfg;
    if (!j.is_object()) throw ConfigError({"config: top level must be an object"});

    detail::read_field(j, "kind", cfg.kind, errors, "");
    if (!detail::experiment_kinds().count(cfg.kind))
        errors.push_back("kind: must be one of alg1, alg2, alg3, flip_test, flipprob, product_tv, lower_bound, sweep");
    cfg.experiment_id = cfg.kind;
    detail::read_field(j, "experiment_id", cfg.experiment_id, errors, "");
    detail::read_field(j, "reps", cfg.reps, errors, "");
    detail::read_field(j, "base_seed", cfg.base_seed, errors, "");
    detail::read_field(j, "n", cfg.n, errors, "");
    detail::read_field(j, "n_values", cfg.n_values, errors, "");
    detail::read_field(j, "q_index", cfg.q_index, errors, "");
    detail::read_field(j, "output", cfg.output, errors, "");
    if (j.contains("margin_eps")) {
        double v = 0.0;
        detail::read_field(j, "margin_eps", v, errors, "");
        cfg.margin_eps = v;
    }
    if (j.contains("ci")) {
        std::string ci;
        detail::read_field(j, "ci", ci, errors, "");
        if (ci == "normal") cfg.ci = CiMethod::Normal;
        else if (ci == "clopper_pearson") cfg.ci = CiMethod::ClopperPearson;
        else errors.push_back("ci: must be normal or clopper_pearson");
    }
    cfg.params = detail::parse_params(j.value("params", json::object()), errors);
    if (j.contains("loss")) {
        try {
            cfg.loss = loss_from_json(j.at("loss"));
        } catch (const std::exception& e) {
            errors.push_back(std::string("loss: ") + e.what());
        }
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        SweepAxis axis;
        detail::read_field(s, "kind", axis.kind, errors, "sweep.");
        detail::read_field(s, "param", axis.param, errors, "sweep.");
        detail::read_field(s, "values", axis.values, errors, "sweep.");
        cfg.sweep = std::move(axis);
    }

    const std::string kind = cfg.kind == "sweep" && cfg.sweep ? cfg.sweep->kind : cfg.kind;
    if (cfg.kind == "sweep") {
        if (!cfg.sweep) {
            errors.push_back("sweep: required for kind sweep");
        } else {
            if (cfg.sweep->kind == "sweep" || !detail::experiment_kinds().count(cfg.sweep->kind))
                errors.push_back("sweep.kind: must name a non-sweep experiment kind");
            if (!detail::sweep_params().count(cfg.sweep->param))
                errors.push_back("sweep.param: unknown parameter \"" + cfg.sweep->param + "\"");
            if (cfg.sweep->values.empty()) errors.push_back("sweep.values: must be non-empty");
        }
    }
    if (cfg.reps < 1) errors.push_back("reps: must be >= 1");

    const bool learner = kind == "alg1" || kind == "alg2" || kind == "alg3";
    const bool flip = kind == "flip_test" || kind == "flipprob";
    if (learner || flip || kind == "product_tv") {
        if (!j.contains("instance")) {
            errors.push_back("instance: required for kind " + kind);
        } else {
            cfg.instance = detail::parse_instance(j.at("instance"), base_dir, errors);
            if (learner && cfg.instance.generator == "pair")
                errors.push_back("instance.generator: pair is only for flip_test, flipprob and product_tv");
            if ((flip || kind == "product_tv") && cfg.instance.fixed && cfg.q_index >= cfg.instance.fixed->Q.size())
                errors.push_back("q_index: outside the model class");
        }
    }
    if (kind == "alg2" && (!cfg.loss.bounded_nonnegative() || cfg.loss.upper_bound() > cfg.params.M))
        errors.push_back("loss: alg2 needs a table loss bounded in [0, M]");
    if ((flip || kind == "lower_bound") && cfg.n < 1 &&
        !(cfg.kind == "sweep" && cfg.sweep && cfg.sweep->param == "n"))
        errors.push_back("n: must be >= 1 for kind " + kind);
    if (flip && cfg.reps < 100) errors.push_back("reps: must be >= 100 for kind " + kind);
    if (kind == "product_tv" && cfg.n_values.empty() && cfg.n < 1) errors.push_back("n_values: required for product_tv");
    if (kind == "lower_bound" && !(cfg.params.eps2 < 0.25)) errors.push_back("params.eps2: must be below 1/4");
    if (cfg.margin_eps && !(*cfg.margin_eps > 0.0 && *cfg.margin_eps < 1.0))
        errors.push_back("margin_eps: must lie in (0,1)");

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_json_file(path), std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> realizable_profile(const json& o, std::size_t size_Q) {
    if (o.contains("invalidity_profile")) return o.at("invalidity_profile").get<std::vector<double>>();
    if (o.contains("profile_cycle")) {
        const auto cyc = o.at("profile_cycle").get<std::vector<double>>();
        if (cyc.empty()) throw InstanceError("profile_cycle must be non-empty");
        std::vector<double> out(size_Q);
        for (std::size_t i = 0; i < size_Q; ++i) out[i] = cyc[i % cyc.size()];
        return out;
    }
    return std::vector<double>(size_Q, 0.0);
}

}  // namespace detail

/// The instance used by replication `rep`.
inline ProblemInstance build_instance(const InstanceSpec& spec, std::uint64_t rep) {
    if (spec.fixed) return *spec.fixed;
    Rng gen(spec.resample_each_rep ? derive_seed(spec.seed, rep) : spec.seed);
    const json& o = spec.options;
    auto opt_size = [&](const char* k) -> std::optional<std::size_t> {
        if (!o.contains(k)) return std::nullopt;
        return o.at(k).get<std::size_t>();
    };
    if (spec.generator == "realizable") {
        RealizableOptions r;
        r.bins = o.value("bins", r.bins);
        r.size_Q = o.value("size_Q", r.size_Q);
        r.max_intervals = o.value("max_intervals", r.max_intervals);
        r.beta_cap = o.value("beta_cap", r.beta_cap);
        r.valid_bins = opt_size("valid_bins");
        r.invalidity_profile = detail::realizable_profile(o, r.size_Q);
        return make_realizable_instance(gen, r);
    }
    if (spec.generator == "mismatched") {
        MismatchedOptions m;
        m.bins = o.value("bins", m.bins);
        m.size_Q = o.value("size_Q", m.size_Q);
        m.gamma_floor = o.value("gamma_floor", m.gamma_floor);
        m.beta_cap = o.value("beta_cap", m.beta_cap);
        m.max_intervals = o.value("max_intervals", m.max_intervals);
        m.valid_bins = opt_size("valid_bins");
        return make_mismatched_instance(gen, m);
    }
    if (spec.generator == "zero_validity") {
        ZeroValidityOptions z;
        z.bins = o.value("bins", z.bins);
        z.valid_bins = o.value("valid_bins", z.valid_bins);
        z.data_bins = o.value("data_bins", z.data_bins);
        z.size_Q = o.value("size_Q", z.size_Q);
        z.max_intervals = o.value("max_intervals", z.max_intervals);
        z.beta_cap = o.value("beta_cap", z.beta_cap);
        return make_zero_validity_instance(gen, z);
    }
    throw InstanceError("unknown generator \"" + spec.generator + "\"");
}

// ---------------------------------------------------------------------------
// Replications
// ---------------------------------------------------------------------------

namespace detail {

struct Axis {
    std::string param;
    double value{std::numeric_limits<double>::quiet_NaN()};
    std::optional<std::uint64_t> index;
};

inline std::uint64_t rep_seed(const ExperimentConfig& cfg, const Axis& axis, std::uint64_t rep) {
    return axis.index ? derive_seed(cfg.base_seed, *axis.index, rep) : derive_seed(cfg.base_seed, rep);
}

inline RunRecord base_record(const ExperimentConfig& cfg, const Axis& axis, std::uint64_t rep, std::uint64_t seed) {
    RunRecord r;
    r.experiment_id = cfg.experiment_id;
    r.rep = rep;
    r.seed = seed;
    r.params = cfg.params;
    r.axis_param = axis.param;
    r.axis_value = axis.value;
    return r;
}

inline double gap(double a, double b) {
    if (a == kInf && b == kInf) return std::numeric_limits<double>::quiet_NaN();
    return a - b;
}

inline void evaluate(RunRecord& r, const ProblemInstance& inst, const PiecewiseDensity& model, const LossSpec& loss) {
    const auto qs = q_star(inst, loss);
    if (!qs) throw InstanceError("instance has no fully-valid model to compare against");
    r.model_loss = expected_loss(inst.P, model, loss);
    r.loss_gap = gap(r.model_loss, expected_loss(inst.P, inst.Q[*qs], loss));
    r.invalidity = invalidity(model, inst.valid_region);
    r.tv_to_P = tv(model, inst.P);
    r.success_loss = r.loss_gap <= r.params.eps1;
    r.success_validity = r.invalidity <= r.params.eps2;
}

inline RunRecord learner_rep(const ExperimentConfig& cfg, const Axis& axis, std::uint64_t rep) {
    const std::uint64_t seed = rep_seed(cfg, axis, rep);
    RunRecord r = base_record(cfg, axis, rep, seed);
    const ProblemInstance inst = build_instance(cfg.instance, rep);
    Rng rng(seed);
    SampleSource source(inst.P);
    ValidityOracle oracle(inst.valid_region);
    const auto& p = cfg.params;

    std::optional<LearnOutcome> out;
    LossSpec eval_loss = LossSpec::log();
    if (cfg.kind == "alg1") {
        out = alg1_finite_log_loss(inst.Q, source, p, rng);
    } else {
        if (!inst.validity_class) throw InstanceError("instance declares no validity class");
        if (cfg.kind == "alg2") {
            eval_loss = cfg.loss;
            out = alg2_valid_restriction(inst.Q, *inst.validity_class, source, oracle, cfg.loss, p, rng);
        } else {
            if (!inst.d_ref) throw InstanceError("alg3 needs an instance with a reference distribution");
            eval_loss = LossSpec::capped_log(p.M);
            out = alg3_valid_restriction_log(inst.Q, *inst.validity_class, *inst.d_ref, inst.c, source, oracle, p,
                                             rng);
        }
    }
    if (out->queries_used != oracle.query_count() || out->samples_used != source.samples_drawn())
        throw std::logic_error("accounting mismatch between learner and oracle");
    r.n_samples = out->samples_used;
    r.n_queries = out->queries_used;
    r.fallback_triggered = out->fallback_triggered;
    r.erm_index = out->erm_choice.index;
    r.erm_tie = out->erm_choice.tie;
    r.erm_all_infinite = out->erm_choice.all_infinite;
    evaluate(r, inst, out->model, eval_loss);
    return r;
}

/// One replication of the flip test: loss_gap is the empirical gap
/// L_S(q) - L_S(P), and success_loss means no flip (gap > 0).
inline RunRecord flip_rep(const ExperimentConfig& cfg, const Axis& axis, std::uint64_t rep) {
    const std::uint64_t seed = rep_seed(cfg, axis, rep);
    RunRecord r = base_record(cfg, axis, rep, seed);
    const ProblemInstance inst = build_instance(cfg.instance, rep);
    const auto& q = inst.Q.at(cfg.q_index);
    Rng rng(seed);
    const auto S = sample(inst.P, rng, cfg.n);
    const double lq = empirical_loss(S, q, cfg.loss);
    const double lp = empirical_loss(S, inst.P, cfg.loss);
    r.n_samples = cfg.n;
    r.model_loss = lq;
    r.loss_gap = gap(lq, lp);
    r.invalidity = invalidity(q, inst.valid_region);
    r.tv_to_P = tv(q, inst.P);
    r.success_loss = lq > lp;
    r.success_validity = r.invalidity <= cfg.params.eps2;
    return r;
}

inline RunSummary summarize(const std::vector<RunRecord>& recs, const std::string& id, const Axis& axis,
                            CiMethod ci) {
    RunSummary s;
    s.experiment_id = id;
    s.axis_param = axis.param;
    s.axis_value = axis.value;
    std::uint64_t lf = 0, vf = 0, f = 0;
    for (const auto& r : recs) {
        if (r.experiment_id != id) continue;
        ++s.reps;
        lf += !r.success_loss;
        vf += !r.success_validity;
        f += !(r.success_loss && r.success_validity);
        s.fallbacks += r.fallback_triggered;
        s.total_queries += r.n_queries;
        s.total_samples += r.n_samples;
    }
    s.loss_failure = binomial_summary(lf, s.reps, ci);
    s.validity_failure = binomial_summary(vf, s.reps, ci);
    s.failure = binomial_summary(f, s.reps, ci);
    return s;
}

}  // namespace detail

struct LowerBoundResult {
    BinomialSummary failure[2];
    std::uint64_t ties[2]{0, 0};
    std::vector<RunRecord> records;  // instance 1 reps, then instance 2 reps

    double worst_frequency() const { return std::max(failure[0].frequency, failure[1].frequency); }
};

/// Proper log-loss ERM over Q = {P, P~} on n samples from each instance's own
/// data distribution; failure means selecting the model that is not the truth.
/// Replication r of instance i draws with derive_seed(derive_seed(seed, r), i).
inline LowerBoundResult lower_bound_experiment(double eps2, std::uint64_t n, std::uint64_t reps, std::uint64_t seed,
                                               CiMethod ci = CiMethod::Normal, const std::string& id = "lower_bound",
                                               LearnParams params = {}) {
    if (n == 0) throw std::invalid_argument("lower_bound_experiment: n must be >= 1");
    if (reps == 0) throw std::invalid_argument("lower_bound_experiment: reps must be >= 1");
    const auto pair = make_lower_bound_instance(eps2);
    params.eps2 = eps2;
    const ProblemInstance* insts[2] = {&pair.first, &pair.second};
    LowerBoundResult out;
    out.records.resize(2 * reps);
    parallel_for(2 * reps, [&](std::size_t k) {
        const std::size_t i = k / reps;
        const std::uint64_t rep = k % reps;
        const auto& inst = *insts[i];
        const std::uint64_t s = derive_seed(seed, rep);
        Rng rng(derive_seed(s, i));
        const auto S = sample(inst.P, rng, n);
        const auto choice = erm(inst.Q, S, LossSpec::log());
        RunRecord r;
        r.experiment_id = id + (i == 0 ? ":instance1" : ":instance2");
        r.rep = rep;
        r.seed = s;
        r.n_samples = n;
        r.params = params;
        r.erm_index = choice.index;
        r.erm_tie = choice.tie;
        r.erm_all_infinite = choice.all_infinite;
        detail::evaluate(r, inst, inst.Q[choice.index], LossSpec::log());
        out.records[k] = std::move(r);
    });
    for (std::size_t i = 0; i < 2; ++i) {
        std::uint64_t wrong = 0;
        for (std::uint64_t rep = 0; rep < reps; ++rep) {
            const auto& r = out.records[i * reps + rep];
            wrong += r.erm_index != insts[i]->q_star_index;
            out.ties[i] += r.erm_tie;
        }
        out.failure[i] = binomial_summary(wrong, reps, ci);
    }
    return out;
}

namespace detail {

inline void apply_axis(ExperimentConfig& cfg, const std::string& param, double v) {
    auto& p = cfg.params;
    if (param == "eps1") p.eps1 = v;
    else if (param == "eps2") p.eps2 = v;
    else if (param == "delta") p.delta = v;
    else if (param == "M") p.M = v;
    else if (param == "gamma") p.gamma = v;
    else if (param == "C1") p.C1 = v;
    else if (param == "C2") p.C2 = v;
    else if (param == "C3") p.C3 = v;
    else if (param == "suboptimal_validity") p.suboptimal_validity = v;
    else if (param == "n" || param == "reps") {
        if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError({"sweep.values: " + param + " needs positive integers"});
        (param == "n" ? cfg.n : cfg.reps) = static_cast<std::uint64_t>(v);
    } else {
        throw ConfigError({"sweep.param: unknown parameter \"" + param + "\""});
    }
    const auto bad = p.violations();
    if (!bad.empty()) throw ConfigError({"sweep value " + format_double(v) + " for " + param + ": " + bad.front()});
}

inline ExperimentResult run_single(const ExperimentConfig& cfg, const Axis& axis) {
    ExperimentResult res;
    if (cfg.kind == "product_tv") {
        const auto inst = build_instance(cfg.instance, 0);
        const auto& q = inst.Q.at(cfg.q_index);
        auto ns = cfg.n_values;
        if (ns.empty()) ns.push_back(cfg.n);
        for (auto n : ns) res.product_tv.push_back(product_tv_report(inst.P, q, n, cfg.margin_eps, cfg.experiment_id));
        return res;
    }
    if (cfg.kind == "lower_bound") {
        const std::uint64_t seed = axis.index ? derive_seed(cfg.base_seed, *axis.index) : cfg.base_seed;
        auto lb = lower_bound_experiment(cfg.params.eps2, cfg.n, cfg.reps, seed, cfg.ci, cfg.experiment_id, cfg.params);
        for (auto& r : lb.records) {
            r.axis_param = axis.param;
            r.axis_value = axis.value;
        }
        res.records = std::move(lb.records);
        for (const char* suffix : {":instance1", ":instance2"})
            res.summaries.push_back(summarize(res.records, cfg.experiment_id + suffix, axis, cfg.ci));
        return res;
    }
    const bool flip = cfg.kind == "flip_test" || cfg.kind == "flipprob";
    res.records.resize(cfg.reps);
    parallel_for(cfg.reps, [&](std::size_t rep) {
        res.records[rep] = flip ? flip_rep(cfg, axis, rep) : learner_rep(cfg, axis, rep);
    });
    res.summaries.push_back(summarize(res.records, cfg.experiment_id, axis, cfg.ci));
    return res;
}

}  // namespace detail

/// One sub-experiment per axis value, records tagged with the value.
inline ExperimentResult sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep || cfg.sweep->values.empty()) throw ConfigError({"sweep: axis with at least one value required"});
    ExperimentResult all;
    for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
        ExperimentConfig sub = cfg;
        sub.kind = cfg.sweep->kind;
        sub.sweep.reset();
        detail::apply_axis(sub, cfg.sweep->param, cfg.sweep->values[i]);
        const detail::Axis axis{cfg.sweep->param, cfg.sweep->values[i], i};
        auto part = detail::run_single(sub, axis);
        all.records.insert(all.records.end(), part.records.begin(), part.records.end());
        all.summaries.insert(all.summaries.end(), part.summaries.begin(), part.summaries.end());
        all.product_tv.insert(all.product_tv.end(), part.product_tv.begin(), part.product_tv.end());
    }
    return all;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind == "sweep") return sweep(cfg);
    return detail::run_single(cfg, detail::Axis{});
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::string run_csv_header() {
    return std::string(kRunSchema) +
           ",experiment_id,rep,seed,n_samples,n_queries,model_loss,loss_gap,invalidity,tv_to_P,fallback_triggered,"
           "success_loss,success_validity,erm_index,erm_tie,erm_all_infinite,eps1,eps2,delta,M,gamma,C1,C2,C3,"
           "axis_param,axis_value\n";
}

inline std::string run_csv_row(const RunRecord& r) {
    std::ostringstream os;
    const auto& p = r.params;
    os << kRunSchema << ',' << r.experiment_id << ',' << r.rep << ',' << r.seed << ',' << r.n_samples << ','
       << r.n_queries << ',' << format_double(r.model_loss) << ',' << format_double(r.loss_gap) << ',' << format_double(r.invalidity) << ','
       << format_double(r.tv_to_P) << ',' << int(r.fallback_triggered) << ',' << int(r.success_loss) << ','
       << int(r.success_validity) << ',' << r.erm_index << ',' << int(r.erm_tie) << ',' << int(r.erm_all_infinite)
       << ',' << format_double(p.eps1) << ',' << format_double(p.eps2) << ',' << format_double(p.delta) << ','
       << format_double(p.M) << ',' << format_double(p.gamma) << ',' << format_double(p.C1) << ','
       << format_double(p.C2) << ',' << format_double(p.C3) << ',' << r.axis_param << ','
       << (std::isnan(r.axis_value) ? std::string() : format_double(r.axis_value)) << '\n';
    return os.str();
}

inline std::string to_csv(const ExperimentResult& res) {
    std::string out;
    if (!res.product_tv.empty()) {
        out = producttv_csv_header();
        for (const auto& r : res.product_tv) out += producttv_csv_row(r);
        return out;
    }
    out = run_csv_header();
    for (const auto& r : res.records) out += run_csv_row(r);
    return out;
}

inline json to_json_value(const BinomialSummary& s) {
    return json{{"events", s.events}, {"trials", s.trials}, {"frequency", s.frequency}, {"ci99", {s.lo, s.hi}}};
}

inline json to_json_value(const RunSummary& s) {
    json j{{"experiment_id", s.experiment_id},
           {"reps", s.reps},
           {"loss_failure", to_json_value(s.loss_failure)},
           {"validity_failure", to_json_value(s.validity_failure)},
           {"failure", to_json_value(s.failure)},
           {"fallbacks", s.fallbacks},
           {"total_queries", s.total_queries},
           {"total_samples", s.total_samples}};
    if (!s.axis_param.empty()) j["axis"] = {{"param", s.axis_param}, {"value", s.axis_value}};
    return j;
}

}  // namespace vcdl
