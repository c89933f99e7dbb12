#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "vcdl/experiments.hpp"

using vcdl::json;

namespace {

json alg1_singleton() {
    return json::parse(R"({
      "kind": "alg1", "experiment_id": "single", "reps": 1, "base_seed": 5,
      "instance": {"generator": "realizable", "seed": 2, "size_Q": 1, "bins": 8},
      "params": {"eps1": 0.2, "eps2": 0.05, "delta": 0.1}
    })");
}

json alg2_config(int reps) {
    json j = json::parse(R"({
      "kind": "alg2", "experiment_id": "a2", "base_seed": 11,
      "instance": {"generator": "mismatched", "seed": 4, "resample_each_rep": true, "bins": 16, "size_Q": 10,
                   "gamma_floor": 0.5},
      "params": {"eps1": 0.2, "eps2": 0.1, "delta": 0.1, "M": 1, "gamma": 0.5},
      "loss": {"kind": "hinge"}
    })");
    j["reps"] = reps;
    return j;
}

json flip_test_config() {
    return json::parse(R"({
      "kind": "flip_test", "experiment_id": "l4", "reps": 400, "base_seed": 7, "n": 20,
      "instance": {"generator": "pair",
                   "P": {"breakpoints": [0, 0.5, 1], "masses": [0.5, 0.5]},
                   "q": {"breakpoints": [0, 0.5, 1], "masses": [0.3, 0.7]}}
    })");
}

std::vector<std::string> problems_of(const json& j) {
    try {
        vcdl::parse_config(j);
    } catch (const vcdl::ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& s) {
    for (const auto& p : v)
        if (p.find(s) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Config, EveryBadFieldIsReported) {
    json j = alg2_config(0);
    j["params"]["eps1"] = 1.5;
    j["params"]["bogus"] = 1;
    j["loss"] = {{"kind", "log"}};
    j["ci"] = "wald";
    const auto p = problems_of(j);
    EXPECT_TRUE(mentions(p, "reps"));
    EXPECT_TRUE(mentions(p, "eps1"));
    EXPECT_TRUE(mentions(p, "params.bogus"));
    EXPECT_TRUE(mentions(p, "loss"));
    EXPECT_TRUE(mentions(p, "ci"));
    EXPECT_GE(p.size(), 5u);
}

TEST(Config, KindSpecificChecks) {
    EXPECT_TRUE(mentions(problems_of(json{{"kind", "nope"}}), "kind"));
    EXPECT_TRUE(mentions(problems_of(json{{"kind", "alg1"}}), "instance"));
    auto l4 = flip_test_config();
    l4["reps"] = 50;
    l4["n"] = 0;
    const auto p = problems_of(l4);
    EXPECT_TRUE(mentions(p, "reps"));
    EXPECT_TRUE(mentions(p, "n:"));
    auto lb = json{{"kind", "lower_bound"}, {"n", 0}, {"reps", 10}, {"params", {{"eps2", 0.1}}}};
    EXPECT_TRUE(mentions(problems_of(lb), "n:"));
    auto sw = alg2_config(2);
    sw["kind"] = "sweep";
    sw["sweep"] = {{"kind", "alg2"}, {"param", "eps2"}, {"values", json::array()}};
    EXPECT_TRUE(mentions(problems_of(sw), "sweep.values"));
    sw["sweep"]["param"] = "colour";
    EXPECT_TRUE(mentions(problems_of(sw), "sweep.param"));
}

TEST(Experiments, SingletonAlg1UsesNoQueries) {
    const auto res = vcdl::run_experiment(vcdl::parse_config(alg1_singleton()));
    ASSERT_EQ(res.records.size(), 1u);
    const auto& r = res.records[0];
    EXPECT_EQ(r.n_queries, 0u);
    EXPECT_EQ(r.erm_index, 0u);
    EXPECT_TRUE(r.success_loss);
    EXPECT_TRUE(r.success_validity);
}

TEST(Experiments, CsvIsReproducibleAcrossThreadCounts) {
    const auto cfg = vcdl::parse_config(alg2_config(6));
    ::setenv("VCDL_THREADS", "1", 1);
    const auto one = vcdl::to_csv(vcdl::run_experiment(cfg));
    const auto again = vcdl::to_csv(vcdl::run_experiment(cfg));
    ::setenv("VCDL_THREADS", "4", 1);
    const auto four = vcdl::to_csv(vcdl::run_experiment(cfg));
    ::unsetenv("VCDL_THREADS");
    EXPECT_EQ(one, again);
    EXPECT_EQ(one, four);
}

TEST(Experiments, Alg2QueryCountAndAccounting) {
    const auto res = vcdl::run_experiment(vcdl::parse_config(alg2_config(5)));
    ASSERT_EQ(res.records.size(), 5u);
    std::uint64_t queries = 0, samples = 0;
    for (const auto& r : res.records) {
        EXPECT_EQ(r.n_queries, 2730u);
        // 1060 loss-estimation draws plus 461 auto-labeled draws
        EXPECT_EQ(r.n_samples, 1060u + 461u);
        queries += r.n_queries;
        samples += r.n_samples;
    }
    ASSERT_EQ(res.summaries.size(), 1u);
    EXPECT_EQ(res.summaries[0].total_queries, queries);
    EXPECT_EQ(res.summaries[0].total_samples, samples);
}

TEST(Experiments, SuccessBitsAreRecomputable) {
    const auto res = vcdl::run_experiment(vcdl::parse_config(alg2_config(8)));
    std::uint64_t fails = 0;
    for (const auto& r : res.records) {
        EXPECT_EQ(r.success_loss, r.loss_gap <= r.params.eps1);
        EXPECT_EQ(r.success_validity, r.invalidity <= r.params.eps2);
        fails += !(r.success_loss && r.success_validity);
    }
    EXPECT_EQ(res.summaries[0].failure.events, fails);
}

TEST(Experiments, Eps2SweepQueriesStrictlyIncrease) {
    auto j = alg2_config(2);
    j["kind"] = "sweep";
    j["sweep"] = {{"kind", "alg2"}, {"param", "eps2"}, {"values", {0.2, 0.1, 0.05}}};
    const auto res = vcdl::run_experiment(vcdl::parse_config(j));
    ASSERT_EQ(res.summaries.size(), 3u);
    EXPECT_LT(res.summaries[0].total_queries, res.summaries[1].total_queries);
    EXPECT_LT(res.summaries[1].total_queries, res.summaries[2].total_queries);
    EXPECT_EQ(res.records.front().axis_param, "eps2");
    EXPECT_EQ(res.records.back().axis_value, 0.05);
}

TEST(Experiments, FlipFrequencyFallsWithN) {
    auto j = flip_test_config();
    j["kind"] = "sweep";
    j["sweep"] = {{"kind", "flip_test"}, {"param", "n"}, {"values", {5, 20, 80}}};
    const auto res = vcdl::run_experiment(vcdl::parse_config(j));
    ASSERT_EQ(res.summaries.size(), 3u);
    for (std::size_t i = 1; i < 3; ++i) {
        const double prev = res.summaries[i - 1].loss_failure.frequency;
        EXPECT_LE(res.summaries[i].loss_failure.frequency, vcdl::binomial_slack_limit(prev, 400));
    }
}

TEST(Experiments, SweepOfZeroNIsRejected) {
    auto j = flip_test_config();
    j["kind"] = "sweep";
    j["sweep"] = {{"kind", "flip_test"}, {"param", "n"}, {"values", {0}}};
    EXPECT_THROW(vcdl::run_experiment(vcdl::parse_config(j)), vcdl::ConfigError);
}

TEST(Experiments, LowerBoundRecordsBothInstances) {
    const auto j = json{{"kind", "lower_bound"}, {"experiment_id", "lb"}, {"n", 2}, {"reps", 200},
                        {"base_seed", 1},        {"params", {{"eps2", 0.1}}}};
    const auto res = vcdl::run_experiment(vcdl::parse_config(j));
    ASSERT_EQ(res.records.size(), 400u);
    ASSERT_EQ(res.summaries.size(), 2u);
    EXPECT_EQ(res.summaries[0].experiment_id, "lb:instance1");
    EXPECT_EQ(res.summaries[1].experiment_id, "lb:instance2");
    // all draws in the shared middle cell tie, and ties go to index 0, so only
    // the second instance fails, with probability 0.75^2
    EXPECT_EQ(res.summaries[0].failure.events, 0u);
    const double f = res.summaries[1].failure.frequency;
    EXPECT_NEAR(f, 0.5625, 4 * std::sqrt(0.5625 * 0.4375 / 200));
}

TEST(Experiments, CsvHeaderAndRowsCarrySchemaToken) {
    const auto csv = vcdl::to_csv(vcdl::run_experiment(vcdl::parse_config(alg1_singleton())));
    std::istringstream in(csv);
    std::string line;
    std::size_t lines = 0, header_cols = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.rfind("vcdl_run_v1,", 0), 0u);
        const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        if (lines == 0) header_cols = cols;
        EXPECT_EQ(cols, header_cols);
        ++lines;
    }
    EXPECT_EQ(lines, 2u);
    EXPECT_EQ(header_cols, 26u);
}

TEST(Experiments, ProductTvConfigUsesItsOwnSchema) {
    const auto j = json::parse(R"({
      "kind": "product_tv", "experiment_id": "pt", "n_values": [1, 2], "margin_eps": 0.5,
      "instance": {"generator": "pair",
                   "P": {"breakpoints": [0, 0.5, 1], "masses": [1, 0]},
                   "q": {"breakpoints": [0, 0.5, 1], "masses": [0.5, 0.5]}}
    })");
    const auto res = vcdl::run_experiment(vcdl::parse_config(j));
    ASSERT_EQ(res.product_tv.size(), 2u);
    EXPECT_DOUBLE_EQ(res.product_tv[1].exact_tv, 0.75);
    EXPECT_EQ(vcdl::to_csv(res).rfind("vcdl_producttv_v1,", 0), 0u);
}
