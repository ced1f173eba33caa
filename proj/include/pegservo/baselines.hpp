#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "pegservo/geometry.hpp"
#include "pegservo/random.hpp"
#include "pegservo/world.hpp"

namespace pegservo {

struct SpiralParams {
    /// Radial growth per revolution, meters. Empty means 1.5 x clearance.
    std::optional<double> pitch;
    /// Path speed while sliding on the surface, m/s.
    double speed = 0.010;

    double pitch_for(const HoleScenario& s) const { return pitch.value_or(1.5 * s.clearance()); }
};

struct RandomSearchParams {
    double time_limit = 30.0;
    /// Fixed cost of one descend-and-probe, seconds.
    double probe_time = 0.5;
};

/// Arc length of the Archimedean spiral r = a*theta from 0 to theta.
inline double spiral_arc_length(double a, double theta) {
    return 0.5 * a * (theta * std::sqrt(1.0 + theta * theta) + std::asinh(theta));
}

namespace detail {

inline TrialResult finish_with_insertion(WorldState& world, TrialResult r, double t0, const MotionModel& motion) {
    const InsertionResult ins = attempt_insertion(world, world.scenario.insertion_depth, motion);
    r.insertion_depth = ins.depth_reached;
    r.success = ins.depth_reached >= world.scenario.insertion_depth;
    if (!r.success && r.outcome_detail == "inserted") {
        r.outcome_detail = "jammed";
    }
    r.elapsed = world.clock - t0;
    r.final_planar_error = contact_query(world).planar_error;
    return r;
}

/// Lowers the peg along the insertion direction onto the surface at max speed.
inline void descend_to_contact(WorldState& world, const MotionModel& motion) {
    const double h = contact_query(world).height_above_surface;
    if (h > 0.0) {
        slide_to(world, world.tcp_position() + h * world.scenario.insertion_direction, motion.max_speed);
    }
}

}  // namespace detail

/// Samples a point in the disc of `radius` around `center`, moves the peg
/// over it and probes. Returns whether the probe found the hole; the peg is
/// left over the probed point and the clock advanced by travel + probe time.
inline bool random_search_attempt(WorldState& world, const Vec3& center, double radius,
                                  const RandomSearchParams& params, const MotionModel& motion, Rng& rng) {
    const Vec3& l = world.scenario.insertion_direction;
    const auto [e1, e2] = plane_basis(l);
    const Eigen::Vector2d d = uniform_disc(rng, radius);
    const Vec3 q = world.tcp_position();
    // Keep the current height; only the planar position changes.
    const Vec3 target = center + d.x() * e1 + d.y() * e2 + (q - center).dot(l) * l;
    slide_to(world, target, motion.max_speed);
    world.clock += params.probe_time;
    return contact_query(world).over_hole;
}

/// Random search inside the uncertainty disc around the believed hole until
/// a probe finds the hole or the time limit is exceeded.
inline TrialResult random_search(WorldState& world, const RandomSearchParams& params, const MotionModel& motion,
                                 Rng& rng) {
    const double t0 = world.clock;
    TrialResult r{"random", false, 0.0, 0.0, "time_limit", 0, 0.0};
    while (world.clock - t0 < params.time_limit) {
        ++r.attempts;
        if (random_search_attempt(world, world.believed_hole_position, world.scenario.uncertainty_radius, params,
                                  motion, rng)) {
            r.outcome_detail = "inserted";
            return detail::finish_with_insertion(world, r, t0, motion);
        }
    }
    r.elapsed = world.clock - t0;
    r.final_planar_error = contact_query(world).planar_error;
    return r;
}

struct SpiralOutcome {
    bool found = false;
    double path_length = 0.0;
    double final_radius = 0.0;
};

/// Slides the peg outward along r = pitch/(2 pi) * theta around its current
/// planar position until the tip is within the clearance of the hole axis or
/// the peg's success disc (radius = clearance) lies entirely outside the
/// boundary disc, i.e. the spiral radius exceeds `boundary` + clearance. Any
/// hole inside the boundary is then reached whenever pitch <= 2 x clearance.
/// The peg must already touch the surface.
///
/// Entry into the success disc is found by sphere tracing: from a point at
/// distance D from the hole axis the path cannot reach the disc within an arc
/// length of D - clearance.
inline SpiralOutcome spiral_slide(WorldState& world, double pitch, double speed, double boundary) {
    if (!(pitch > 0.0) || !(speed > 0.0)) {
        throw InvalidArgumentError("spiral pitch and speed must be positive");
    }
    const Vec3& l = world.scenario.insertion_direction;
    const auto [e1, e2] = plane_basis(l);
    const double c = world.scenario.clearance();
    const double a = pitch / (2.0 * std::numbers::pi);
    const Vec3 start_tcp = world.tcp_position();
    const Vec3 tip_start = world.peg_tip_position();
    const Vec3 to_hole = reject(world.scenario.hole_center() - tip_start, l);
    const double theta_max = (boundary + c) / a;
    const double min_step = 1e-3 * c;

    auto offset = [&](double theta) {
        return Vec3(a * theta * (std::cos(theta) * e1 + std::sin(theta) * e2));
    };

    double theta = 0.0;
    bool found = false;
    for (;;) {
        const double dist = (offset(theta) - to_hole).norm();
        if (dist <= c) {
            found = true;
            break;
        }
        if (theta >= theta_max) {
            break;
        }
        const double step = std::max(dist - c, min_step);
        // Upper bound on |ds/dtheta| over the next (at most one radian) step.
        const double dtheta = std::min(1.0, step / (a * std::sqrt(1.0 + (theta + 1.0) * (theta + 1.0))));
        theta = std::min(theta + dtheta, theta_max);
    }
    const double length = spiral_arc_length(a, theta);
    world.set_tcp_position(start_tcp + offset(theta));
    world.clock += length / speed;
    return {found, length, a * theta};
}

/// Spiral search: lower onto the surface, spiral out from the start point
/// until the peg drops into the hole or leaves the uncertainty boundary.
inline TrialResult spiral_search(WorldState& world, const SpiralParams& params, const MotionModel& motion,
                                 std::optional<double> boundary = std::nullopt) {
    const double t0 = world.clock;
    detail::descend_to_contact(world, motion);
    const SpiralOutcome s = spiral_slide(world, params.pitch_for(world.scenario), params.speed,
                                         boundary.value_or(world.scenario.uncertainty_radius));
    TrialResult r{"spiral", false, 0.0, 0.0, "boundary_exceeded", 1, 0.0};
    if (s.found) {
        r.outcome_detail = "inserted";
        return detail::finish_with_insertion(world, r, t0, motion);
    }
    r.elapsed = world.clock - t0;
    r.final_planar_error = contact_query(world).planar_error;
    return r;
}

/// Moves straight to the believed hole (trusting calibration and grasp) and inserts.
inline TrialResult optimal_align(WorldState& world, const MotionModel& motion) {
    const double t0 = world.clock;
    const Vec3& l = world.scenario.insertion_direction;
    const Vec3 q = world.tcp_position();
    const Vec3 target = world.believed_hole_position + (q - world.believed_hole_position).dot(l) * l;
    move_to(world, target, motion);
    TrialResult r{"optimal", false, 0.0, 0.0, "inserted", 1, 0.0};
    r = detail::finish_with_insertion(world, r, t0, motion);
    if (!r.success) {
        r.outcome_detail = "missed_hole";
    }
    return r;
}

}  // namespace pegservo
