#include <gtest/gtest.h>

#include <vector>

#include "dsstile/scale_law.hpp"

using namespace dss;

namespace {

const RecognitionSpec kSwimmerSpec{80.0, 0.48};

} // namespace

TEST(RequiredResolution, PublishedAltitudeTable) {
    // Altitude sweep x FOV, expected minimum long side in px, tolerance +-1.
    struct Row {
        double alt;
        double fov;
        int expected;
    };
    const Row rows[] = {
        {10, 73, 191},  {10, 65, 164},  {10, 50, 120},
        {20, 73, 382},  {20, 65, 328},  {20, 50, 240},
        {30, 73, 573},  {30, 65, 493},  {30, 50, 361},
        {240, 73, 4585}, {240, 65, 3947}, {240, 50, 2889},
        {250, 73, 4776}, {250, 65, 4112}, {250, 50, 3010},
    };
    for (const Row& r : rows) {
        const int got = required_resolution(r.alt, r.fov, kSwimmerSpec);
        EXPECT_NEAR(got, r.expected, 1) << "alt=" << r.alt << " fov=" << r.fov;
    }
}

TEST(RequiredResolution, TrivialUnitCase) {
    // tan(45 deg) = 1, sqrt(1/1) = 1 -> p = 2h.
    EXPECT_EQ(required_resolution(1.0, 90.0, RecognitionSpec{1.0, 1.0}), 2);
}

TEST(RequiredResolution, SixtyMeterMavic) {
    const int p = required_resolution(60.0, 65.0, kSwimmerSpec);
    EXPECT_GE(p, 986);
    EXPECT_LE(p, 987);
}

TEST(RequiredResolution, RejectsBadInputs) {
    EXPECT_THROW(required_resolution(0.0, 65.0, kSwimmerSpec), DomainError);
    EXPECT_THROW(required_resolution(-5.0, 65.0, kSwimmerSpec), DomainError);
    EXPECT_THROW(required_resolution(10.0, 0.0, kSwimmerSpec), DomainError);
    EXPECT_THROW(required_resolution(10.0, 180.0, kSwimmerSpec), DomainError);
    EXPECT_THROW(required_resolution(10.0, 65.0, RecognitionSpec{0.0, 0.48}), DomainError);
    EXPECT_THROW(required_resolution(10.0, 65.0, RecognitionSpec{80.0, -1.0}), DomainError);
    const double nan = std::nan("");
    EXPECT_THROW(required_resolution(nan, 65.0, kSwimmerSpec), DomainError);
}

TEST(RequiredResolution, MonotoneInEachParameter) {
    int prev = 0;
    for (double h = 5.0; h <= 300.0; h += 5.0) {
        const int p = required_resolution(h, 65.0, kSwimmerSpec);
        EXPECT_GT(p, prev) << "altitude sweep not strictly increasing at h=" << h;
        prev = p;
    }
    prev = 0;
    for (double fov = 10.0; fov < 180.0; fov += 10.0) {
        const int p = required_resolution(100.0, fov, kSwimmerSpec);
        EXPECT_GT(p, prev) << "fov sweep not strictly increasing at fov=" << fov;
        prev = p;
    }
    prev = 0;
    for (double rec = 20.0; rec <= 2000.0; rec *= 2.0) {
        const int p = required_resolution(100.0, 65.0, RecognitionSpec{rec, 0.48});
        EXPECT_GT(p, prev) << "rec sweep not strictly increasing at rec=" << rec;
        prev = p;
    }
    int prev_dec = 1 << 30;
    for (double obj = 0.1; obj <= 10.0; obj *= 2.0) {
        const int p = required_resolution(100.0, 65.0, RecognitionSpec{80.0, obj});
        EXPECT_LT(p, prev_dec) << "obj sweep not strictly decreasing at obj=" << obj;
        prev_dec = p;
    }
}

TEST(BinLadder, PublishedSixBinLadder) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    const std::vector<int> expected = {640, 1152, 1664, 2176, 2688, 3200};
    EXPECT_EQ(ladder.bins_px, expected);
    EXPECT_EQ(ladder.step_px(), 512);
}

TEST(BinLadder, SingleBin) {
    EXPECT_EQ(build_ladder(640, 0.8, 1).bins_px, std::vector<int>{640});
}

TEST(BinLadder, HalfStrideLadder) {
    const std::vector<int> expected = {512, 768, 1024};
    EXPECT_EQ(build_ladder(512, 0.5, 3).bins_px, expected);
}

TEST(BinLadder, ConstantStepProperty) {
    for (int n : {320, 512, 640, 1000}) {
        for (double stride : {0.25, 0.5, 0.8, 1.0}) {
            const BinLadder ladder = build_ladder(n, stride, 8);
            const int step = static_cast<int>(std::llround(n * stride));
            for (std::size_t i = 0; i + 1 < ladder.bins_px.size(); ++i) {
                EXPECT_EQ(ladder.bins_px[i + 1] - ladder.bins_px[i], step);
            }
            EXPECT_EQ(ladder.bins_px.front(), n);
        }
    }
}

TEST(BinLadder, RejectsBadParameters) {
    EXPECT_THROW(build_ladder(0, 0.8, 6), DomainError);
    EXPECT_THROW(build_ladder(640, 0.0, 6), DomainError);
    EXPECT_THROW(build_ladder(640, 1.5, 6), DomainError);
    EXPECT_THROW(build_ladder(640, 0.8, 0), DomainError);
}

TEST(SelectBin, PublishedExamples) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    EXPECT_EQ(select_bin(986, ladder, 3840), 1152);
    EXPECT_EQ(select_bin(300, ladder, 512), 512);   // below P1: native kept
    EXPECT_EQ(select_bin(5000, ladder, 5456), 3200); // clamped to top bin
}

TEST(SelectBin, NeverUpscalesAndCoversPHat) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    for (int p = 1; p <= 4000; p += 7) {
        for (int native : {500, 640, 1000, 1152, 3000, 3200, 6000}) {
            const int chosen = select_bin(p, ladder, native);
            EXPECT_LE(chosen, native);
            if (native >= ladder.top_bin() && p <= ladder.top_bin()) {
                EXPECT_GE(chosen, p);
            }
        }
    }
}

TEST(SelectBin, EmptyLadderRejected) {
    BinLadder empty;
    EXPECT_THROW(select_bin(100, empty, 1000), DomainError);
}

TEST(BinForCapture, UnknownAltitudeTakesFallback) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    const ScalingPolicy v2 = make_policy_scaled_v2(ladder);
    CameraModel cam;
    cam.altitude_m = std::nullopt;
    cam.fov_deg = 73.0;
    cam.native_width_px = 5456;
    cam.native_height_px = 3632;
    EXPECT_EQ(bin_for_capture(cam, kSwimmerSpec, v2, ladder), 3200);
}

TEST(BinForCapture, ConservativePolicyKeepsLowBinAt40m) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    const ScalingPolicy v1 = make_policy_scaled_v1(ladder);
    CameraModel cam;
    cam.altitude_m = 40.0;
    cam.fov_deg = 65.0;
    cam.native_width_px = 3840;
    cam.native_height_px = 2160;
    EXPECT_EQ(bin_for_capture(cam, kSwimmerSpec, v1, ladder), 640);
}

TEST(BinForCapture, AggressivePolicyStepsUpAt40m) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    const ScalingPolicy v2 = make_policy_scaled_v2(ladder);
    CameraModel cam;
    cam.altitude_m = 40.0;
    cam.fov_deg = 65.0;
    cam.native_width_px = 3840;
    cam.native_height_px = 2160;
    EXPECT_GE(bin_for_capture(cam, kSwimmerSpec, v2, ladder), 1152);
}

TEST(BinForCapture, NoUpscaleAgainstSmallNatives) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    const ScalingPolicy v2 = make_policy_scaled_v2(ladder);
    CameraModel cam;
    cam.altitude_m = 200.0; // would ask for a high bin
    cam.fov_deg = 65.0;
    cam.native_width_px = 1230;
    cam.native_height_px = 930;
    EXPECT_EQ(bin_for_capture(cam, kSwimmerSpec, v2, ladder), 1230);
}

TEST(BinForCapture, BeyondTableFallsBackToResolutionLaw) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    ScalingPolicy shallow;
    shallow.name = "shallow";
    shallow.breakpoints = {{50.0, 1}};
    shallow.fallback_bin_unknown_altitude = 6;
    CameraModel cam;
    cam.altitude_m = 60.0; // past the table; Eq-law says ~987 -> bin 1152
    cam.fov_deg = 65.0;
    cam.native_width_px = 3840;
    cam.native_height_px = 2160;
    EXPECT_EQ(bin_for_capture(cam, kSwimmerSpec, shallow, ladder), 1152);
}

TEST(BinForCapture, StaticPolicyTilesNative) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    const ScalingPolicy st = make_policy_static();
    CameraModel cam;
    cam.altitude_m = 12.0;
    cam.fov_deg = 65.0;
    cam.native_width_px = 3840;
    cam.native_height_px = 2160;
    EXPECT_EQ(bin_for_capture(cam, kSwimmerSpec, st, ladder), 3840);
}

TEST(ScalingPolicy, ValidationCatchesBadTables) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    ScalingPolicy bad;
    bad.breakpoints = {{50.0, 1}, {40.0, 2}}; // unsorted
    bad.fallback_bin_unknown_altitude = 6;
    EXPECT_THROW(validate(bad, ladder), DomainError);
    ScalingPolicy oob;
    oob.breakpoints = {{50.0, 7}}; // no bin 7 in a 6-bin ladder
    oob.fallback_bin_unknown_altitude = 6;
    EXPECT_THROW(validate(oob, ladder), DomainError);
}

TEST(ScalingPolicy, NamedFactories) {
    const BinLadder ladder = build_ladder(640, 0.8, 6);
    EXPECT_TRUE(make_named_policy("scaledV1", ladder).has_value());
    EXPECT_TRUE(make_named_policy("scaledV2", ladder).has_value());
    EXPECT_TRUE(make_named_policy("baseline640", ladder).has_value());
    EXPECT_TRUE(make_named_policy("static", ladder).has_value());
    EXPECT_FALSE(make_named_policy("nope", ladder).has_value());
}
