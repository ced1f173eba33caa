#include <gtest/gtest.h>

#include <cmath>

#include "pegservo/scene.hpp"

using namespace pegservo;

namespace {

struct CameraGeometry {
    double distance;
    double elevation_deg;
    double roll_deg;
    double residual;  // distance of look_at from the optical axis
};

CameraGeometry measure(const RigidTransform& cam_from_world, const Vec3& look_at, const Vec3& up) {
    const RigidTransform world_from_cam = cam_from_world.inverse();
    const Vec3 c = world_from_cam.translation();
    const Vec3 z = world_from_cam.rotate(Vec3::UnitZ());
    const Vec3 x = world_from_cam.rotate(Vec3::UnitX());
    const Vec3 to = look_at - c;
    const Vec3 x0 = z.cross(up).normalized();
    const Vec3 y0 = z.cross(x0);
    return {to.norm(), rad_to_deg(std::asin(-z.dot(up))), rad_to_deg(std::atan2(x.dot(y0), x.dot(x0))),
            (to - to.dot(z) * z).norm()};
}

}  // namespace

TEST(BuiltinScenarios, ExactlyFourValidScenarios) {
    const auto all = builtin_scenarios();
    ASSERT_EQ(all.size(), 4u);
    const char* names[] = {"metal", "plastic", "wide", "cap"};
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].name, names[i]);
        EXPECT_NO_THROW(all[i].validate());
        EXPECT_DOUBLE_EQ(all[i].uncertainty_radius, 1.5 * all[i].peg_diameter);
        EXPECT_NEAR(all[i].insertion_direction.norm(), 1.0, 1e-12);
    }
}

TEST(BuiltinScenarios, PublishedDimensions) {
    const HoleScenario plastic = find_scenario("plastic");
    EXPECT_DOUBLE_EQ(plastic.hole_diameter, 0.0106);
    EXPECT_DOUBLE_EQ(plastic.peg_diameter, 0.010);
    EXPECT_NEAR(plastic.clearance(), 0.0003, 1e-15);

    const HoleScenario wide = find_scenario("wide");
    EXPECT_NEAR(wide.clearance(), 0.0002, 1e-15);

    const HoleScenario cap = find_scenario("cap");
    EXPECT_DOUBLE_EQ(cap.hole_diameter, 0.0044);
    EXPECT_DOUBLE_EQ(cap.peg_diameter, 0.0039);
    EXPECT_NEAR(cap.clearance(), 0.00025, 1e-15);
    EXPECT_DOUBLE_EQ(cap.insertion_depth, 0.005);
    EXPECT_DOUBLE_EQ(cap.start_height.lo, 0.003);
    EXPECT_DOUBLE_EQ(cap.start_height.hi, 0.005);

    const HoleScenario metal = find_scenario("metal");
    EXPECT_NEAR(metal.clearance(), 11.25e-6, 1e-15);
}

TEST(FindScenario, UnknownNameIsConfigError) { EXPECT_THROW(find_scenario("granite"), ConfigError); }

TEST(FindScenario, CustomScenarioTakesPrecedence) {
    HoleScenario s = make_scenario("plastic", 0.02, 0.019, 0.01, {0.005, 0.015});
    EXPECT_DOUBLE_EQ(find_scenario("plastic", {s}).hole_diameter, 0.02);
}

TEST(HoleScenario, ValidationRejectsBrokenInvariants) {
    HoleScenario s = find_scenario("wide");
    s.peg_diameter = s.hole_diameter;
    EXPECT_THROW(s.validate(), InvalidArgumentError);
    s = find_scenario("wide");
    s.insertion_direction = Vec3(0, 0, -2);
    EXPECT_THROW(s.validate(), InvalidArgumentError);
    s = find_scenario("wide");
    s.uncertainty_radius = s.clearance();
    EXPECT_THROW(s.validate(), InvalidArgumentError);
}

TEST(SampleCameraPose, CollapsedRangesGiveExactDistance) {
    CameraSamplingRanges r{{0.14, 0.14}, {40, 40}, {0, 0}};
    Rng rng(1);
    const Vec3 look_at(0.01, -0.02, 0.0);
    for (int i = 0; i < 100; ++i) {
        const CameraGeometry g = measure(sample_camera_pose(r, look_at, rng), look_at, Vec3::UnitZ());
        EXPECT_NEAR(g.distance, 0.14, 1e-9);
        EXPECT_NEAR(g.elevation_deg, 40.0, 1e-9);
        EXPECT_NEAR(g.roll_deg, 0.0, 1e-9);
    }
}

TEST(SampleCameraPose, DefaultRangesHoldForEveryDraw) {
    CameraSamplingRanges r;
    Rng rng(2);
    const Vec3 look_at = Vec3::Zero();
    for (int i = 0; i < 1000; ++i) {
        const CameraGeometry g = measure(sample_camera_pose(r, look_at, rng), look_at, Vec3::UnitZ());
        EXPECT_LE(g.residual, 1e-12);
        EXPECT_GE(g.distance, 0.12 - 1e-12);
        EXPECT_LE(g.distance, 0.15 + 1e-12);
        EXPECT_GE(g.elevation_deg, 35.0 - 1e-9);
        EXPECT_LE(g.elevation_deg, 45.0 + 1e-9);
        EXPECT_GE(g.roll_deg, -5.0 - 1e-9);
        EXPECT_LE(g.roll_deg, 5.0 + 1e-9);
    }
}

TEST(SampleCameraPose, SameSeedSamePose) {
    Rng a(3);
    Rng b(3);
    const RigidTransform x = sample_camera_pose({}, Vec3::Zero(), a);
    const RigidTransform y = sample_camera_pose({}, Vec3::Zero(), b);
    EXPECT_EQ(x.rotation().coeffs(), y.rotation().coeffs());
    EXPECT_EQ(x.translation(), y.translation());
}

TEST(SamplePegStart, MetalDefaultsRespectBounds) {
    const HoleScenario s = find_scenario("metal");
    const StartSamplingRanges r = default_start_ranges(s);
    EXPECT_NEAR(r.disc_radius, 0.015, 1e-4);
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const RigidTransform p = sample_peg_start(s, r, rng);
        const Vec3 d = p.translation() - s.hole_center();
        const double height = -d.dot(s.insertion_direction);
        EXPECT_LE(reject(d, s.insertion_direction).norm(), 0.015);
        EXPECT_GE(height, 0.005 - 1e-15);
        EXPECT_LE(height, 0.015 + 1e-15);
        EXPECT_LE(rad_to_deg(rotation_angle_between(p.rotation(), s.hole_pose.rotation())), 2.0 + 1e-9);
    }
}

TEST(SamplePegStart, CapHeightInterval) {
    const HoleScenario s = find_scenario("cap");
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const RigidTransform p = sample_peg_start(s, default_start_ranges(s), rng);
        const double height = -(p.translation() - s.hole_center()).dot(s.insertion_direction);
        EXPECT_GE(height, 0.003 - 1e-15);
        EXPECT_LE(height, 0.005 + 1e-15);
    }
}

TEST(SamplePegStart, DegenerateSamplerPutsPegAtHole) {
    const HoleScenario s = find_scenario("plastic");
    Rng rng(6);
    const RigidTransform p = sample_peg_start(s, {0.0, {0.0, 0.0}, 0.0}, rng);
    EXPECT_LE((p.translation() - s.hole_center()).norm(), 1e-15);
    EXPECT_LE(rotation_angle_between(p.rotation(), s.hole_pose.rotation()), 1e-12);
}

TEST(UniformDisc, AreaLawWithinThreeSigma) {
    Rng rng(7);
    const double R = 0.015;
    const int n = 20000;
    const double radii[] = {0.25 * R, 0.5 * R, 0.75 * R, 0.9 * R};
    int inside[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const double r = uniform_disc(rng, R).norm();
        ASSERT_LE(r, R);
        for (int k = 0; k < 4; ++k) {
            inside[k] += r <= radii[k];
        }
    }
    for (int k = 0; k < 4; ++k) {
        const double p = radii[k] * radii[k] / (R * R);
        const double sigma = std::sqrt(p * (1 - p) / n);
        EXPECT_NEAR(static_cast<double>(inside[k]) / n, p, 3 * sigma) << "r/R=" << radii[k] / R;
    }
}
