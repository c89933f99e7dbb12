#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "vcdl/exactcheck.hpp"

using vcdl::PiecewiseDensity;

namespace {

// Independent oracle: sum over multinomial type classes instead of tuples.
double product_tv_by_types(const std::vector<double>& a, const std::vector<double>& b, int n) {
    const std::size_t m = a.size();
    std::vector<int> k(m, 0);
    double total = 0.0;
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i + 1 == m) {
            k[i] = left;
            double coef = std::lgamma(n + 1.0);
            double la = 1.0, lb = 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                coef -= std::lgamma(k[j] + 1.0);
                la *= std::pow(a[j], k[j]);
                lb *= std::pow(b[j], k[j]);
            }
            total += std::exp(coef) * std::abs(la - lb);
            return;
        }
        for (int c = 0; c <= left; ++c) {
            k[i] = c;
            rec(i + 1, left - c);
        }
    };
    rec(0, n);
    return 0.5 * total;
}

PiecewiseDensity random_hist(vcdl::Rng& gen, std::size_t m) {
    std::vector<double> w(m);
    for (auto& x : w) x = vcdl::uniform01(gen) < 0.2 ? 0.0 : vcdl::uniform01(gen);
    w[vcdl::uniform_index(gen, m)] += 0.3;
    return PiecewiseDensity::from_weights(PiecewiseDensity::equal_grid(m), w);
}

}  // namespace

TEST(ProductTv, WorkedExamples) {
    const PiecewiseDensity point({0.0, 0.5, 1.0}, {1.0, 0.0});
    const auto half = PiecewiseDensity::histogram({0.5, 0.5});
    EXPECT_NEAR(vcdl::product_tv_exact(point, half, 2), 0.75, 1e-15);
    EXPECT_NEAR(vcdl::product_tv_exact(point, half, 1), vcdl::tv(point, half), 1e-15);
    EXPECT_DOUBLE_EQ(vcdl::product_tv_exact(half, half, 3), 0.0);
    EXPECT_DOUBLE_EQ(vcdl::product_tv_exact(point, half, 0), 0.0);
}

TEST(ProductTv, ClosedFormBounds) {
    EXPECT_NEAR(vcdl::reis_lower_bound(0.5, 2), 1.0 - std::exp(-0.25), 1e-15);
    EXPECT_NEAR(vcdl::invalid_product_margin(0.5, 2), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_DOUBLE_EQ(vcdl::subadditive_upper(0.4, 3), 1.0);
    EXPECT_DOUBLE_EQ(vcdl::subadditive_upper(0.1, 3), 0.1 * 3);
    EXPECT_THROW(vcdl::invalid_product_margin(1.0, 2), std::invalid_argument);
    EXPECT_THROW(vcdl::reis_lower_bound(1.5, 2), std::invalid_argument);
}

TEST(ProductTv, BudgetRefusalReportsRequiredCount) {
    const auto a = PiecewiseDensity::histogram(std::vector<double>(10, 0.1));
    try {
        vcdl::product_tv_exact(a, a, 8, 1000);
        FAIL() << "expected BudgetExceeded";
    } catch (const vcdl::BudgetExceeded& e) {
        EXPECT_EQ(e.required(), 100000000u);
    }
    EXPECT_NO_THROW(vcdl::product_tv_exact(a, a, 3, 1000));
}

TEST(ProductTv, ReportAndCsvRow) {
    const PiecewiseDensity point({0.0, 0.5, 1.0}, {1.0, 0.0});
    const auto half = PiecewiseDensity::histogram({0.5, 0.5});
    const auto r = vcdl::product_tv_report(point, half, 2, 0.5, "pt");
    EXPECT_TRUE(r.sandwich_holds());
    EXPECT_TRUE(r.margin_holds());
    const auto row = vcdl::producttv_csv_row(r);
    EXPECT_EQ(row.rfind("vcdl_producttv_v1,pt,2,0.75,", 0), 0u);
    EXPECT_EQ(vcdl::producttv_csv_header().rfind("vcdl_producttv_v1,", 0), 0u);
}

TEST(FormatDouble, RoundTripsAndSpecials) {
    for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-300, -7.25, 0.75}) EXPECT_EQ(std::strtod(vcdl::format_double(v).c_str(), nullptr), v);
    EXPECT_EQ(vcdl::format_double(0.75), "0.75");
    EXPECT_EQ(vcdl::format_double(vcdl::kInf), "inf");
    EXPECT_EQ(vcdl::format_double(-vcdl::kInf), "-inf");
    EXPECT_EQ(vcdl::format_double(std::nan("")), "nan");
}

// Property: tuple enumeration agrees with the type-class oracle, sits inside
// the sandwich, and matches Scheffe's identity.
TEST(ProductTvProperty, MatchesTypeClassOracle) {
    vcdl::Rng gen(51);
    for (int t = 0; t < 100; ++t) {
        const std::size_t m = 1 + vcdl::uniform_index(gen, 5);
        const int n = 1 + static_cast<int>(vcdl::uniform_index(gen, 4));
        const auto a = random_hist(gen, m);
        const auto b = random_hist(gen, m);
        const auto sums = vcdl::product_sums(a, b, n);
        EXPECT_NEAR(sums.half_abs_diff, product_tv_by_types(a.masses(), b.masses(), n), 1e-12);
        EXPECT_NEAR(sums.half_abs_diff, 1.0 - sums.min_sum, 1e-12);
        const auto r = vcdl::product_tv_report(a, b, n);
        EXPECT_TRUE(r.sandwich_holds());
    }
}

TEST(FlipProbability, IdenticalModelsAlwaysFlip) {
    const auto P = PiecewiseDensity::histogram({0.2, 0.8});
    const auto e = vcdl::flip_probability(P, P, 5, 200, 1, vcdl::LossSpec::log());
    EXPECT_EQ(e.summary.events, 200u);
}

TEST(FlipProbability, LikelihoodRatioCaseMatchesPowerOfHalf) {
    const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
    const PiecewiseDensity P(grid, {0.5, 0.5, 0.0});
    const PiecewiseDensity q(grid, {0.5, 0.0, 0.5});
    const std::uint64_t reps = 4000;
    const auto e = vcdl::flip_probability(P, q, 3, reps, 77, vcdl::LossSpec::log());
    const double se = std::sqrt(0.125 * 0.875 / reps);
    EXPECT_NEAR(e.summary.frequency, 0.125, 4 * se);
    EXPECT_LE(e.summary.lo, 0.125);
    EXPECT_GE(e.summary.hi, 0.125);
}

TEST(FlipProbability, DeterministicAndValidated) {
    const auto P = PiecewiseDensity::histogram({0.3, 0.7});
    const auto q = PiecewiseDensity::histogram({0.5, 0.5});
    const auto a = vcdl::flip_probability(P, q, 4, 300, 9, vcdl::LossSpec::log());
    const auto b = vcdl::flip_probability(P, q, 4, 300, 9, vcdl::LossSpec::log());
    EXPECT_EQ(a.flips, b.flips);
    EXPECT_THROW(vcdl::flip_probability(P, q, 4, 99, 9, vcdl::LossSpec::log()), std::invalid_argument);
    EXPECT_THROW(vcdl::flip_probability(P, q, 0, 300, 9, vcdl::LossSpec::log()), std::invalid_argument);
}

TEST(BinomialSummary, IntervalsContainFrequency) {
    for (auto method : {vcdl::CiMethod::Normal, vcdl::CiMethod::ClopperPearson}) {
        const auto s = vcdl::binomial_summary(13, 1000, method);
        EXPECT_DOUBLE_EQ(s.frequency, 0.013);
        EXPECT_LT(s.lo, 0.013);
        EXPECT_GT(s.hi, 0.013);
        const auto z = vcdl::binomial_summary(0, 100, method);
        EXPECT_EQ(z.lo, 0.0);
    }
}
