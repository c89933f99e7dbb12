#include <gtest/gtest.h>

#include <cmath>

#include "vcdl/functionals.hpp"
#include "vcdl/loss.hpp"

using vcdl::IntervalUnion;
using vcdl::LossSpec;
using vcdl::PiecewiseDensity;

namespace {

const PiecewiseDensity kQuarter({0.0, 0.5, 1.0}, {0.25, 0.75});
const PiecewiseDensity kHalf({0.0, 0.5, 1.0}, {0.5, 0.5});
const PiecewiseDensity kLeft({0.0, 0.5, 1.0}, {1.0, 0.0});
const PiecewiseDensity kU = PiecewiseDensity::uniform();

PiecewiseDensity random_histogram(vcdl::Rng& gen, std::size_t bins, double zero_prob) {
    std::vector<double> w(bins);
    for (auto& x : w) x = vcdl::uniform01(gen) < zero_prob ? 0.0 : 0.05 + vcdl::uniform01(gen);
    w[vcdl::uniform_index(gen, bins)] += 1.0;
    return PiecewiseDensity::from_weights(PiecewiseDensity::equal_grid(bins), w);
}

IntervalUnion random_region(vcdl::Rng& gen) {
    std::vector<double> e(4);
    for (auto& x : e) x = vcdl::uniform01(gen);
    std::sort(e.begin(), e.end());
    return IntervalUnion{{e[0], e[1]}, {e[2], e[3]}};
}

// numeric integral of f over [0,1) by the midpoint rule
template <class F>
double integrate(F f, int steps = 200000) {
    double s = 0.0;
    for (int i = 0; i < steps; ++i) s += f((i + 0.5) / steps);
    return s / steps;
}

}  // namespace

TEST(LossSpec, Values) {
    EXPECT_DOUBLE_EQ(LossSpec::log()(1.0), 0.0);
    EXPECT_DOUBLE_EQ(LossSpec::log()(2.0), -std::log(2.0));
    EXPECT_EQ(LossSpec::log()(0.0), vcdl::kInf);
    const auto capped = LossSpec::capped_log(4.0);
    EXPECT_DOUBLE_EQ(capped(0.0), 4.0);
    EXPECT_DOUBLE_EQ(capped(1e-9), 4.0);
    EXPECT_DOUBLE_EQ(capped(0.5), std::log(2.0));
    const auto hinge = LossSpec::linear_hinge();
    EXPECT_DOUBLE_EQ(hinge(0.0), 1.0);
    EXPECT_DOUBLE_EQ(hinge(0.25), 0.75);
    EXPECT_DOUBLE_EQ(hinge(3.0), 0.0);
    EXPECT_TRUE(hinge.bounded_nonnegative());
    EXPECT_DOUBLE_EQ(hinge.upper_bound(), 1.0);
    EXPECT_FALSE(LossSpec::log().bounded_nonnegative());
}

TEST(LossSpec, TableValidation) {
    EXPECT_THROW(LossSpec::table({}), std::invalid_argument);
    EXPECT_THROW(LossSpec::table({{0.0, 0.0}, {1.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(LossSpec::table({{0.0, 1.0}, {0.0, 0.5}}), std::invalid_argument);
    EXPECT_THROW(LossSpec::table({{-1.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(LossSpec::capped_log(0.0), std::invalid_argument);
    // knots arrive unsorted
    const auto t = LossSpec::table({{2.0, 0.0}, {0.0, 2.0}});
    EXPECT_DOUBLE_EQ(t(1.0), 1.0);
}

TEST(Functionals, ExpectedLossWorkedExamples) {
    EXPECT_DOUBLE_EQ(vcdl::expected_loss(kU, kU, LossSpec::log()), 0.0);
    EXPECT_NEAR(vcdl::expected_loss(kHalf, kQuarter, LossSpec::log()), 0.14384103622589042, 1e-12);
    EXPECT_EQ(vcdl::expected_loss(kHalf, kLeft, LossSpec::log()), vcdl::kInf);
}

TEST(Functionals, EmpiricalLossWorkedExamples) {
    const double S[] = {0.1, 0.6};
    EXPECT_NEAR(vcdl::empirical_loss(S, kQuarter, LossSpec::log()), 0.14384103622589042, 1e-12);
    EXPECT_DOUBLE_EQ(vcdl::empirical_loss(S, kU, LossSpec::log()), 0.0);
    const double hit[] = {0.7};
    EXPECT_EQ(vcdl::empirical_loss(hit, kLeft, LossSpec::log()), vcdl::kInf);
    EXPECT_THROW(vcdl::empirical_loss(std::span<const double>(), kU, LossSpec::log()), std::invalid_argument);
}

TEST(Functionals, InvalidityWorkedExamples) {
    EXPECT_NEAR(vcdl::invalidity(kU, IntervalUnion{{0.0, 0.9}}), 0.1, 1e-12);
    EXPECT_DOUBLE_EQ(vcdl::invalidity(kQuarter, IntervalUnion::full()), 0.0);
    EXPECT_DOUBLE_EQ(vcdl::invalidity(kQuarter, IntervalUnion::empty_set()), 1.0);
    EXPECT_NEAR(vcdl::validity(kU, IntervalUnion{{0.0, 0.8}}), 0.8, 1e-12);
}

TEST(Functionals, DisagreementWorkedExamples) {
    const IntervalUnion h{{0.0, 0.5}};
    EXPECT_DOUBLE_EQ(vcdl::disagreement_mass(kQuarter, h, h), 0.0);
    EXPECT_NEAR(vcdl::disagreement_mass(kU, h, IntervalUnion{{0.0, 0.6}}), 0.1, 1e-12);
    EXPECT_NEAR(vcdl::disagreement_mass(kQuarter, IntervalUnion::full(), h), 0.75, 1e-12);
}

TEST(Functionals, SupportClippedLossWorkedExamples) {
    EXPECT_DOUBLE_EQ(vcdl::support_clipped_loss(kHalf, kU), 0.0);
    EXPECT_NEAR(vcdl::support_clipped_loss(kU, kLeft), -0.34657359027997264, 1e-12);
    EXPECT_NEAR(vcdl::support_clipped_loss(kQuarter, kQuarter), -0.13081203594113702, 1e-12);
}

// Oracle: the same functionals as numeric integrals of the density.
TEST(FunctionalsProperty, AgreeWithNumericIntegration) {
    vcdl::Rng gen(8);
    for (int t = 0; t < 20; ++t) {
        const auto P = random_histogram(gen, 1 + vcdl::uniform_index(gen, 8), 0.0);
        const auto q = random_histogram(gen, 1 + vcdl::uniform_index(gen, 8), 0.0);
        const auto W = random_region(gen);
        const auto hinge = LossSpec::linear_hinge();
        const double el = integrate([&](double x) { return P.density_at(x) * -std::log(q.density_at(x)); });
        EXPECT_NEAR(vcdl::expected_loss(P, q, LossSpec::log()), el, 1e-3);
        const double eh = integrate([&](double x) { return P.density_at(x) * hinge(q.density_at(x)); });
        EXPECT_NEAR(vcdl::expected_loss(P, q, hinge), eh, 1e-3);
        const double inv = integrate([&](double x) { return W.contains(x) ? 0.0 : q.density_at(x); });
        EXPECT_NEAR(vcdl::invalidity(q, W), inv, 1e-3);
        EXPECT_NEAR(vcdl::invalidity(q, W) + vcdl::validity(q, W), 1.0, 1e-12);
    }
}

TEST(FunctionalsProperty, ExpectedLossMatchesMonteCarlo) {
    vcdl::Rng gen(9);
    const auto P = random_histogram(gen, 5, 0.0);
    const auto q = random_histogram(gen, 7, 0.0);
    const auto S = vcdl::sample(P, gen, 200000);
    EXPECT_NEAR(vcdl::empirical_loss(S, q, LossSpec::log()), vcdl::expected_loss(P, q, LossSpec::log()), 0.02);
}

TEST(FunctionalsProperty, MixtureInvalidityIsLinear) {
    vcdl::Rng gen(10);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_histogram(gen, 1 + vcdl::uniform_index(gen, 8), 0.3);
        const auto b = random_histogram(gen, 1 + vcdl::uniform_index(gen, 8), 0.3);
        const auto W = random_region(gen);
        const double w = vcdl::uniform01(gen);
        EXPECT_NEAR(vcdl::invalidity(vcdl::mix(a, b, w), W),
                    (1 - w) * vcdl::invalidity(a, W) + w * vcdl::invalidity(b, W), 1e-12);
    }
}

TEST(FunctionalsProperty, RestrictionToTrueRegionIsFullyValid) {
    vcdl::Rng gen(12);
    for (int t = 0; t < 300; ++t) {
        const auto q = random_histogram(gen, 1 + vcdl::uniform_index(gen, 10), 0.3);
        const auto W = random_region(gen);
        if (const auto r = vcdl::restrict_to(q, W)) {
            EXPECT_LE(vcdl::invalidity(*r, W), 1e-12);
        }
    }
}

TEST(FunctionalsProperty, LossOnAgreementNeverExceedsTotal) {
    vcdl::Rng gen(13);
    for (int t = 0; t < 300; ++t) {
        const auto q = random_histogram(gen, 1 + vcdl::uniform_index(gen, 10), 0.3);
        const auto W = random_region(gen);
        const auto h = random_region(gen);
        const auto P = vcdl::restrict_to(random_histogram(gen, 6, 0.0), W);
        const auto r = vcdl::restrict_to(q, h);
        if (!P || !r) continue;
        const auto loss = LossSpec::table({{0.0, 2.0}, {0.5 + vcdl::uniform01(gen), 0.0}});
        EXPECT_LE(vcdl::expected_loss_on_agreement(*P, *r, loss, h, W), vcdl::expected_loss(*P, q, loss) + 1e-12);
    }
}

TEST(FunctionalsProperty, InvalidityBoundUnderDisagreementPrecondition) {
    vcdl::Rng gen(14);
    int tested = 0;
    for (int t = 0; t < 2000; ++t) {
        const auto q = random_histogram(gen, 2 + vcdl::uniform_index(gen, 10), 0.2);
        const auto W = random_region(gen);
        const auto h = random_region(gen);
        const double V = vcdl::validity(q, W);
        if (!(V > 0.0)) continue;
        const double V_hat = V * (0.1 + 0.9 * vcdl::uniform01(gen));
        const double eps = 2.0 * vcdl::disagreement_mass(q, h, W) / V_hat;
        if (!(eps < 1.0)) continue;
        const auto r = vcdl::restrict_to(q, h);
        ASSERT_TRUE(r);
        EXPECT_LE(vcdl::invalidity(*r, W), eps + 1e-12);
        ++tested;
    }
    EXPECT_GT(tested, 20);
}
