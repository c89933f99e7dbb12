#include <gtest/gtest.h>

#include "vcdl/instances.hpp"
#include "vcdl/serialization.hpp"

using vcdl::json;
using vcdl::PiecewiseDensity;

TEST(Serialization, DensityRoundTripIsBitExact) {
    vcdl::Rng gen(3);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> w(1 + vcdl::uniform_index(gen, 9));
        for (auto& x : w) x = vcdl::uniform01(gen);
        const auto d = PiecewiseDensity::from_weights(PiecewiseDensity::equal_grid(w.size()), w);
        const auto back = vcdl::density_from_json(json::parse(vcdl::to_json_value(d).dump()));
        EXPECT_EQ(back, d);
    }
}

TEST(Serialization, InstanceRoundTripIsBitExact) {
    vcdl::Rng gen(4);
    const auto inst = vcdl::make_mismatched_instance(gen, vcdl::MismatchedOptions{});
    const auto text = vcdl::to_json_value(inst).dump();
    const auto back = vcdl::instance_from_json(json::parse(text));
    EXPECT_EQ(back.P, inst.P);
    EXPECT_EQ(back.Q, inst.Q);
    EXPECT_EQ(back.valid_region, inst.valid_region);
    ASSERT_TRUE(back.d_ref);
    EXPECT_EQ(*back.d_ref, *inst.d_ref);
    EXPECT_EQ(back.c, inst.c);
    EXPECT_EQ(back.gamma, inst.gamma);
    EXPECT_EQ(back.alpha, inst.alpha);
    EXPECT_EQ(back.beta, inst.beta);
    EXPECT_EQ(back.q_star_index, inst.q_star_index);
    ASSERT_TRUE(back.validity_class);
    EXPECT_EQ(back.validity_class->k, inst.validity_class->k);
    EXPECT_EQ(vcdl::to_json_value(back).dump(), text);
}

TEST(Serialization, LossRoundTrip) {
    for (const auto& l : {vcdl::LossSpec::log(), vcdl::LossSpec::capped_log(4.0), vcdl::LossSpec::linear_hinge(),
                          vcdl::LossSpec::table({{0.0, 3.0}, {0.5, 1.0}, {2.0, 0.0}})}) {
        const auto back = vcdl::loss_from_json(json::parse(vcdl::to_json_value(l).dump()));
        EXPECT_EQ(back.kind(), l.kind());
        EXPECT_EQ(back.knots(), l.knots());
        EXPECT_EQ(back.cap(), l.cap());
    }
}

TEST(Serialization, LabeledPointsRoundTrip) {
    const std::vector<vcdl::LabeledPoint> pts{{0.1, true}, {1.0 / 3.0, false}};
    EXPECT_EQ(vcdl::labeled_points_from_json(json::parse(vcdl::to_json_value(pts).dump())), pts);
}

TEST(Serialization, MalformedInputIsRejected) {
    EXPECT_THROW(vcdl::density_from_json(json::parse(R"({"masses":[1]})")), std::invalid_argument);
    EXPECT_THROW(vcdl::density_from_json(json::parse(R"({"breakpoints":[0,1],"masses":[0.5]})")),
                 std::invalid_argument);
    EXPECT_THROW(vcdl::intervals_from_json(json::parse(R"({"intervals":[[0.1]]})")), std::invalid_argument);
    EXPECT_THROW(vcdl::loss_from_json(json::parse(R"({"kind":"squared"})")), std::invalid_argument);
    EXPECT_THROW(vcdl::loss_from_json(json::parse(R"({"kind":"capped_log"})")), std::invalid_argument);
    EXPECT_THROW(vcdl::read_json_file("/nonexistent/file.json"), std::runtime_error);
}
