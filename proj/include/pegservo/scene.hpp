#pragma once

#include <string>
#include <vector>

#include "pegservo/errors.hpp"
#include "pegservo/geometry.hpp"
#include "pegservo/random.hpp"

namespace pegservo {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    bool valid() const { return lo <= hi; }
};

/// A peg/hole pair. The hole frame has its origin at the hole center on the
/// surface and its z-axis pointing out of the surface.
struct HoleScenario {
    std::string name;
    double hole_diameter = 0.0;
    double peg_diameter = 0.0;
    RigidTransform hole_pose;
    Vec3 insertion_direction = -Vec3::UnitZ();
    double uncertainty_radius = 0.0;
    double surface_extent = 0.1;
    /// Depth below the surface that counts as a completed insertion.
    double insertion_depth = 0.010;
    /// Peg start height above the surface.
    Interval start_height{0.005, 0.015};

    double clearance() const { return 0.5 * (hole_diameter - peg_diameter); }
    Vec3 hole_center() const { return hole_pose.translation(); }
    Vec3 surface_normal() const { return hole_pose.rotate(Vec3::UnitZ()); }

    void validate() const {
        if (!(peg_diameter > 0.0) || !(peg_diameter < hole_diameter)) {
            throw InvalidArgumentError("scenario '" + name + "': peg must be narrower than the hole");
        }
        if (std::abs(insertion_direction.norm() - 1.0) > 1e-9) {
            throw InvalidArgumentError("scenario '" + name + "': insertion direction must be unit length");
        }
        if (!(uncertainty_radius > clearance())) {
            throw InvalidArgumentError("scenario '" + name + "': uncertainty radius must exceed the clearance");
        }
        if (!(insertion_depth > 0.0) || !start_height.valid() || start_height.lo < 0.0) {
            throw InvalidArgumentError("scenario '" + name + "': invalid depth or start height");
        }
    }
};

inline HoleScenario make_scenario(std::string name, double hole_diameter, double peg_diameter,
                                  double insertion_depth, Interval start_height) {
    HoleScenario s;
    s.name = std::move(name);
    s.hole_diameter = hole_diameter;
    s.peg_diameter = peg_diameter;
    s.uncertainty_radius = 1.5 * peg_diameter;
    s.insertion_depth = insertion_depth;
    s.start_height = start_height;
    s.validate();
    return s;
}

/// The four reference holes. Metal is an H7/h7 fit on a 10 mm shaft, taken at
/// hole 10.015 mm / peg 9.9925 mm (11.25 um clearance).
inline std::vector<HoleScenario> builtin_scenarios() {
    return {
        make_scenario("metal", 0.010015, 0.0099925, 0.010, {0.005, 0.015}),
        make_scenario("plastic", 0.0106, 0.0100, 0.010, {0.005, 0.015}),
        make_scenario("wide", 0.0104, 0.0100, 0.010, {0.005, 0.015}),
        make_scenario("cap", 0.0044, 0.0039, 0.005, {0.003, 0.005}),
    };
}

inline HoleScenario find_scenario(const std::string& name,
                                  const std::vector<HoleScenario>& extra = {}) {
    for (const auto& s : extra) {
        if (s.name == name) {
            return s;
        }
    }
    for (auto& s : builtin_scenarios()) {
        if (s.name == name) {
            return s;
        }
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

/// Camera placement ranges; angles in degrees.
struct CameraSamplingRanges {
    Interval distance{0.12, 0.15};
    Interval elevation{35.0, 45.0};
    Interval roll{-5.0, 5.0};

    void validate() const {
        if (!distance.valid() || !elevation.valid() || !roll.valid() || !(distance.lo > 0.0)) {
            throw InvalidArgumentError("invalid camera sampling ranges");
        }
    }
};

struct StartSamplingRanges {
    double disc_radius = 0.015;
    Interval height{0.005, 0.015};
    double orientation_error_max_deg = 2.0;

    void validate() const {
        if (disc_radius < 0.0 || !height.valid() || orientation_error_max_deg < 0.0) {
            throw InvalidArgumentError("invalid peg start sampling ranges");
        }
    }
};

/// Start disc with a diameter of three peg diameters, the scenario's height band and 2 degrees of tilt.
inline StartSamplingRanges default_start_ranges(const HoleScenario& scenario) {
    return {1.5 * scenario.peg_diameter, scenario.start_height, 2.0};
}

/// Camera pose (camera-from-world) looking at `look_at` from the given
/// azimuth (radians, around `surface_normal`). Distance, elevation and roll
/// are drawn uniformly from `ranges`.
inline RigidTransform sample_camera_pose_at_azimuth(const CameraSamplingRanges& ranges,
                                                    const Vec3& look_at, double azimuth, Rng& rng,
                                                    const Vec3& surface_normal = Vec3::UnitZ()) {
    ranges.validate();
    const double distance = uniform(rng, ranges.distance.lo, ranges.distance.hi);
    const double elevation = deg_to_rad(uniform(rng, ranges.elevation.lo, ranges.elevation.hi));
    const double roll = deg_to_rad(uniform(rng, ranges.roll.lo, ranges.roll.hi));

    const Vec3 up = surface_normal.normalized();
    const auto [e1, e2] = plane_basis(up);
    const Vec3 horizontal = std::cos(azimuth) * e1 + std::sin(azimuth) * e2;
    const Vec3 center = look_at + distance * (std::cos(elevation) * horizontal + std::sin(elevation) * up);

    const Vec3 z_axis = (look_at - center).normalized();
    const Vec3 x0 = z_axis.cross(up).normalized();
    const Vec3 y0 = z_axis.cross(x0);
    const Vec3 x_axis = std::cos(roll) * x0 + std::sin(roll) * y0;
    const Vec3 y_axis = z_axis.cross(x_axis);

    Eigen::Matrix3d world_from_cam;
    world_from_cam.col(0) = x_axis;
    world_from_cam.col(1) = y_axis;
    world_from_cam.col(2) = z_axis;
    return RigidTransform::from_matrix(world_from_cam, center).inverse();
}

/// Camera pose with a uniform azimuth in [0, 360) degrees.
inline RigidTransform sample_camera_pose(const CameraSamplingRanges& ranges, const Vec3& look_at,
                                         Rng& rng, const Vec3& surface_normal = Vec3::UnitZ()) {
    const double azimuth = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    return sample_camera_pose_at_azimuth(ranges, look_at, azimuth, rng, surface_normal);
}

/// Peg start pose: position uniform over a disc perpendicular to the
/// insertion direction, lifted above the surface by the sampled height; tilt
/// about a uniform axis by an angle uniform in [0, max].
inline RigidTransform sample_peg_start(const HoleScenario& scenario, const StartSamplingRanges& ranges,
                                       Rng& rng) {
    ranges.validate();
    const Vec3& l = scenario.insertion_direction;
    const auto [e1, e2] = plane_basis(l);
    const Eigen::Vector2d offset = uniform_disc(rng, ranges.disc_radius);
    const double height = uniform(rng, ranges.height.lo, ranges.height.hi);
    const Vec3 axis = uniform_unit_vector(rng);
    const double tilt = deg_to_rad(uniform(rng, 0.0, ranges.orientation_error_max_deg));

    const Vec3 position = scenario.hole_center() + offset.x() * e1 + offset.y() * e2 - height * l;
    const Eigen::Quaterniond tilt_q(Eigen::AngleAxisd(tilt, axis));
    return {scenario.hole_pose.rotation() * tilt_q, position};
}

}  // namespace pegservo
