#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pegservo/errors.hpp"
#include "pegservo/geometry.hpp"
#include "pegservo/random.hpp"
#include "pegservo/scene.hpp"

namespace pegservo {

/// Velocity-limited point-to-point motion of the peg robot.
struct MotionModel {
    double max_speed = 0.05;
    double dt = 1.0 / 30.0;

    void validate() const {
        if (!(max_speed > 0.0) || !(dt > 0.0)) {
            throw InvalidArgumentError("motion model needs positive speed and time step");
        }
    }
};

/// Ground truth of one trial plus what the controllers believe about it.
struct WorldState {
    /// Pose of the robot tool center point (TCP); q is its translation.
    RigidTransform true_peg_pose;
    /// TCP-to-peg-tip transform. Unknown to every controller.
    RigidTransform grasp_offset;
    HoleScenario scenario;
    std::vector<CameraModel> true_cameras;
    std::vector<CameraModel> believed_cameras;
    /// Hole center as known from the robot calibration.
    Vec3 believed_hole_position = Vec3::Zero();
    double clock = 0.0;

    Vec3 tcp_position() const { return true_peg_pose.translation(); }
    RigidTransform peg_tip_pose() const { return true_peg_pose * grasp_offset; }
    Vec3 peg_tip_position() const { return peg_tip_pose().translation(); }

    void set_tcp_position(const Vec3& q) { true_peg_pose = {true_peg_pose.rotation(), q}; }

    /// Tilt of the peg relative to the hole frame, radians.
    double orientation_error() const {
        return rotation_angle_between(peg_tip_pose().rotation(), scenario.hole_pose.rotation());
    }
};

/// Outcome of a single alignment-and-insertion trial.
struct TrialResult {
    std::string method;
    bool success = false;
    double elapsed = 0.0;
    double insertion_depth = 0.0;
    std::string outcome_detail;
    std::int64_t attempts = 0;
    double final_planar_error = 0.0;
    /// Time spent aligning before the insertion started (servo methods).
    double alignment_time = 0.0;

    friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// Moves the TCP toward `target` by at most max_speed*dt and advances the clock by dt.
inline void step_toward(WorldState& world, const Vec3& target, const MotionModel& motion) {
    const Vec3 q = world.tcp_position();
    const Vec3 d = target - q;
    const double dist = d.norm();
    const double reach = motion.max_speed * motion.dt;
    world.set_tcp_position(dist <= reach ? target : Vec3(q + d * (reach / dist)));
    world.clock += motion.dt;
}

/// Steps toward `target` until it is reached; returns the number of steps.
inline std::int64_t move_to(WorldState& world, const Vec3& target, const MotionModel& motion) {
    std::int64_t steps = 0;
    while (world.tcp_position() != target) {
        step_toward(world, target, motion);
        ++steps;
    }
    return steps;
}

/// Straight-line move at constant `speed`, clock advanced by the exact travel time.
inline double slide_to(WorldState& world, const Vec3& target, double speed) {
    const double t = (target - world.tcp_position()).norm() / speed;
    world.set_tcp_position(target);
    world.clock += t;
    return t;
}

struct ContactState {
    double height_above_surface = 0.0;
    bool over_hole = false;
    double planar_error = 0.0;
};

inline double planar_error_of(const WorldState& world, const Vec3& tip) {
    return reject(tip - world.scenario.hole_center(), world.scenario.insertion_direction).norm();
}

inline ContactState contact_query(const WorldState& world) {
    const Vec3 tip = world.peg_tip_position();
    const Vec3& l = world.scenario.insertion_direction;
    const double height = (world.scenario.hole_center() - tip).dot(l);
    const double planar = planar_error_of(world, tip);
    return {height, planar <= world.scenario.clearance(), planar};
}

struct InsertionResult {
    double depth_reached = 0.0;
    double elapsed = 0.0;
};

/// Largest peg tilt (degrees) that still inserts when the peg is over the hole.
inline constexpr double kInsertionAngleLimitDeg = 3.0;

/// Descends along the insertion direction. Inserts to `required_depth` when
/// the tip is over the hole and the tilt is within the limit, otherwise stops
/// on the surface.
inline InsertionResult attempt_insertion(WorldState& world, double required_depth, const MotionModel& motion,
                                         double angle_limit_deg = kInsertionAngleLimitDeg) {
    const double start = world.clock;
    const ContactState contact = contact_query(world);
    const Vec3& l = world.scenario.insertion_direction;
    const double height = std::max(0.0, contact.height_above_surface);
    const bool fits = contact.over_hole && world.orientation_error() <= deg_to_rad(angle_limit_deg);
    const double travel = fits ? height + required_depth : height;
    move_to(world, world.tcp_position() + travel * l, motion);
    return {fits ? required_depth : 0.0, world.clock - start};
}

struct PerturbationBounds {
    double max_rot_deg = 0.0;
    double max_trans = 0.0;
};

struct WorldOptions {
    PerturbationBounds calibration{2.0, 0.010};
    PerturbationBounds grasp{1.0, 0.001};
    /// Bound on the error of the believed hole position (robot calibration).
    double hole_position_error = 0.0;
    CameraSamplingRanges camera_ranges;
    int num_cameras = 2;
    /// Azimuth jitter around evenly spread camera placements, degrees.
    double azimuth_jitter_deg = 15.0;
    /// Empty means default_start_ranges(scenario).
    std::optional<StartSamplingRanges> start_ranges;
    CameraIntrinsics intrinsics;
};

inline RigidTransform sample_bounded_transform(const PerturbationBounds& b, Rng& rng) {
    const Vec3 axis = uniform_unit_vector(rng);
    const double angle = deg_to_rad(uniform(rng, 0.0, b.max_rot_deg));
    const Vec3 dir = uniform_unit_vector(rng);
    const double mag = uniform(rng, 0.0, b.max_trans);
    if (angle == 0.0 && mag == 0.0) {
        return RigidTransform::identity();
    }
    return RigidTransform::from_axis_angle(axis, angle, mag * dir);
}

/// Builds the ground truth and the believed state of one trial.
/// Cameras are spread over 180 degrees of azimuth (so their error directions
/// are spread evenly) with a random base azimuth and per-camera jitter.
inline WorldState make_world(const HoleScenario& scenario, std::uint64_t seed, const WorldOptions& options = {}) {
    scenario.validate();
    options.intrinsics.validate();
    if (options.num_cameras < 1) {
        throw InvalidArgumentError("at least one camera is required");
    }
    for (const auto& b : {options.calibration, options.grasp}) {
        if (b.max_rot_deg < 0.0 || b.max_trans < 0.0) {
            throw InvalidArgumentError("perturbation bounds must be non-negative");
        }
    }
    if (options.hole_position_error < 0.0) {
        throw InvalidArgumentError("hole position error bound must be non-negative");
    }

    Rng rng(seed);
    WorldState w;
    w.scenario = scenario;

    const double base = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double spacing = std::numbers::pi / options.num_cameras;
    const double jitter = deg_to_rad(options.azimuth_jitter_deg);
    for (int i = 0; i < options.num_cameras; ++i) {
        const double az = base + i * spacing + uniform(rng, -jitter, jitter);
        const RigidTransform pose = sample_camera_pose_at_azimuth(options.camera_ranges, scenario.hole_center(), az,
                                                                  rng, scenario.surface_normal());
        w.true_cameras.push_back({options.intrinsics, pose});
    }
    for (const auto& cam : w.true_cameras) {
        w.believed_cameras.push_back(
            perturb_extrinsics(cam, options.calibration.max_rot_deg, options.calibration.max_trans, rng));
    }
    w.grasp_offset = sample_bounded_transform(options.grasp, rng);

    const auto [e1, e2] = plane_basis(scenario.insertion_direction);
    const Eigen::Vector2d hole_err = uniform_disc(rng, options.hole_position_error);
    w.believed_hole_position = scenario.hole_center() + hole_err.x() * e1 + hole_err.y() * e2;

    const StartSamplingRanges start = options.start_ranges.value_or(default_start_ranges(scenario));
    // Sample the peg tip start; the TCP sits at tip * inverse(grasp).
    const RigidTransform tip = sample_peg_start(scenario, start, rng);
    w.true_peg_pose = tip * w.grasp_offset.inverse();
    return w;
}

/// Optical-axis depth of the believed hole center in each believed camera.
inline std::vector<double> believed_depths(const WorldState& world) {
    std::vector<double> z;
    for (const auto& cam : world.believed_cameras) {
        z.push_back(cam.depth_of(world.believed_hole_position));
    }
    return z;
}

}  // namespace pegservo
