#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "pegservo/errors.hpp"
#include "pegservo/estimator.hpp"
#include "pegservo/geometry.hpp"
#include "pegservo/world.hpp"

namespace pegservo {

/// Parameters of the visual servo loop.
struct ServoConfig {
    /// Insertion direction; alignment happens in the plane perpendicular to it.
    Vec3 l = -Vec3::UnitZ();
    /// Estimated optical-axis depth of the peg/hole region, one per camera.
    std::vector<double> depths;
    /// Convergence threshold on the filtered error magnitude, meters.
    double phi_t = 0.0005;
    double alpha_tau = 0.9;
    double alpha_gamma = 0.9;
    double alpha_phi = 0.9;
    double loop_dt = 1.0 / 30.0;
    double max_duration = 10.0;
    bool record_trace = true;

    void validate() const {
        if (std::abs(l.norm() - 1.0) > 1e-9) {
            throw InvalidArgumentError("insertion direction must be unit length");
        }
        for (double z : depths) {
            if (!(z > 0.0)) {
                throw InvalidArgumentError("servo depths must be positive");
            }
        }
        if (!(phi_t > 0.0) || !(loop_dt > 0.0) || !(max_duration > 0.0)) {
            throw InvalidArgumentError("servo threshold, cadence and duration must be positive");
        }
        for (double a : {alpha_tau, alpha_gamma, alpha_phi}) {
            if (!(a >= 0.0 && a < 1.0)) {
                throw InvalidArgumentError("filter coefficients must lie in [0, 1)");
            }
        }
    }
};

/// Threshold at 1/20 of the hole diameter, filters at 0.9, 30 Hz.
inline ServoConfig default_servo_config(const HoleScenario& scenario, std::vector<double> depths) {
    ServoConfig c;
    c.l = scenario.insertion_direction;
    c.depths = std::move(depths);
    c.phi_t = scenario.hole_diameter / 20.0;
    return c;
}

/// Filtered controller state.
struct ServoState {
    Vec3 tau = Vec3::Zero();
    std::optional<Vec3> gamma;
    double phi = 0.0;
};

/// tau starts at the current peg-robot position and phi at ten times the threshold.
inline ServoState initial_servo_state(const Vec3& q, const ServoConfig& config) {
    return {q, std::nullopt, 10.0 * config.phi_t};
}

/// One row of the error system: the error along `u` is `b`.
struct ViewConstraint {
    Vec3 u = Vec3::Zero();
    double b = 0.0;
    std::size_t camera_index = 0;
};

/// Constraint from 3-D peg and hole points seen from `camera_center`.
/// u is perpendicular to both the view direction and l, so only the part of
/// the peg-hole displacement visible from this camera enters b.
inline ViewConstraint constraint_from_points(const Vec3& peg, const Vec3& hole, const Vec3& camera_center,
                                             const Vec3& l, std::size_t camera_index = 0) {
    const Vec3 v = 0.5 * (peg + hole) - camera_center;
    const Vec3 cross = v.cross(l);
    const double n = cross.norm();
    if (!(n > 1e-9 * v.norm())) {
        throw DegenerateViewError("camera " + std::to_string(camera_index) +
                                  " looks along the insertion direction");
    }
    const Vec3 u = cross / n;
    return {u, u.dot(hole - peg), camera_index};
}

/// Backprojects both image points at the shared depth `z` through the
/// believed camera and forms the view constraint.
inline ViewConstraint compute_view_constraint(const CameraModel& believed_camera, const EstimatePair& estimates,
                                              double z, const Vec3& l, std::size_t camera_index = 0) {
    if (!estimates.both_detected()) {
        throw InvalidArgumentError("view constraint needs both points detected");
    }
    const Vec3 peg = backproject_at_depth(believed_camera, estimates.peg, z);
    const Vec3 hole = backproject_at_depth(believed_camera, estimates.hole, z);
    return constraint_from_points(peg, hole, believed_camera.position(), l, camera_index);
}

/// Minimum-norm least-squares solution of [u_i^T] e = [b_i]. Singular values
/// below 1e-9 of the largest are treated as zero.
inline Vec3 solve_error(const std::vector<ViewConstraint>& constraints) {
    if (constraints.empty()) {
        throw InvalidArgumentError("solve_error needs at least one constraint");
    }
    const auto m = static_cast<Eigen::Index>(constraints.size());
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a.row(i) = constraints[static_cast<std::size_t>(i)].u.transpose();
        b(i) = constraints[static_cast<std::size_t>(i)].b;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-9);
    return svd.solve(b);
}

/// One filter update; returns the new state and the robot target (= new tau).
inline std::pair<ServoState, Vec3> servo_step(const ServoState& state, const Vec3& e_hat, const Vec3& q,
                                              const ServoConfig& config) {
    ServoState next;
    const Vec3 target = q + e_hat;
    next.tau = config.alpha_tau * state.tau + (1.0 - config.alpha_tau) * target;
    next.gamma = state.gamma ? Vec3(config.alpha_gamma * *state.gamma + (1.0 - config.alpha_gamma) * e_hat) : e_hat;
    next.phi = config.alpha_phi * state.phi + (1.0 - config.alpha_phi) * next.gamma->norm();
    return {next, next.tau};
}

enum class ServoStatus { converged, timed_out, boundary_exceeded };

inline std::string to_string(ServoStatus s) {
    switch (s) {
        case ServoStatus::converged:
            return "converged";
        case ServoStatus::timed_out:
            return "timed_out";
        case ServoStatus::boundary_exceeded:
            return "boundary_exceeded";
    }
    return "unknown";
}

struct TraceSample {
    double time = 0.0;
    Vec3 peg = Vec3::Zero();
    Vec3 error = Vec3::Zero();
};

struct ServoOutcome {
    ServoStatus status = ServoStatus::timed_out;
    double final_planar_error = 0.0;
    double elapsed = 0.0;
    int iterations = 0;
    double final_phi = 0.0;
    std::vector<TraceSample> trace;
};

/// Frames in a row without a single usable constraint before giving up.
inline constexpr int kMaxStarvedFrames = 10;

/// Runs the servo loop on `world` at config.loop_dt until the filtered error
/// magnitude drops to phi_t, max_duration elapses, or the TCP leaves the
/// disc of radius `boundary` around its start.
inline ServoOutcome run_servo(WorldState& world, const std::vector<CameraModel>& believed_cameras,
                              PointEstimator& estimator, const ServoConfig& config, MotionModel motion,
                              double boundary) {
    config.validate();
    if (config.depths.size() != believed_cameras.size() || believed_cameras.size() != world.true_cameras.size()) {
        throw InvalidArgumentError("one depth and one believed camera per world camera required");
    }
    motion.dt = config.loop_dt;
    motion.validate();

    const double t0 = world.clock;
    const Vec3 start = world.tcp_position();
    ServoState state = initial_servo_state(start, config);
    ServoOutcome out;
    int starved = 0;
    std::vector<ViewConstraint> constraints;
    constraints.reserve(believed_cameras.size());

    out.status = ServoStatus::converged;
    while (state.phi > config.phi_t) {
        if (world.clock - t0 >= config.max_duration - 1e-9) {
            out.status = ServoStatus::timed_out;
            break;
        }
        const Vec3 q = world.tcp_position();
        const Vec3 tip = world.peg_tip_position();
        constraints.clear();
        for (std::size_t i = 0; i < believed_cameras.size(); ++i) {
            const EstimatePair est =
                estimator.estimate({tip, world.scenario.hole_center(), world.true_cameras[i], i});
            if (!est.both_detected()) {
                continue;
            }
            try {
                constraints.push_back(compute_view_constraint(believed_cameras[i], est, config.depths[i], config.l, i));
            } catch (const DegenerateViewError&) {
            }
        }

        Vec3 e_hat = Vec3::Zero();
        if (constraints.empty()) {
            if (++starved > kMaxStarvedFrames) {
                throw EstimationStarvedError("no usable camera constraint for " + std::to_string(starved) +
                                             " consecutive frames");
            }
        } else {
            starved = 0;
            e_hat = solve_error(constraints);
            state = servo_step(state, e_hat, q, config).first;
        }
        step_toward(world, state.tau, motion);
        ++out.iterations;
        if (config.record_trace) {
            out.trace.push_back({world.clock - t0, world.tcp_position(), e_hat});
        }
        if (state.phi > config.phi_t && reject(world.tcp_position() - start, config.l).norm() > boundary) {
            out.status = ServoStatus::boundary_exceeded;
            break;
        }
    }
    out.final_phi = state.phi;
    out.elapsed = world.clock - t0;
    out.final_planar_error = planar_error_of(world, world.peg_tip_position());
    return out;
}

}  // namespace pegservo
