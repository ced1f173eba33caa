#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "pegservo/errors.hpp"
#include "pegservo/random.hpp"

namespace pegservo {

using Vec3 = Eigen::Vector3d;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Continuous image coordinates in pixels. x grows to the right, y downwards.
struct PixelPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

inline double pixel_distance(const PixelPoint& a, const PixelPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Proper rigid motion x -> R x + t. The rotation is kept as a unit quaternion
/// and renormalized on every construction so composition chains do not drift.
class RigidTransform {
public:
    RigidTransform() = default;

    RigidTransform(const Eigen::Quaterniond& rotation, const Vec3& translation)
        : rotation_(rotation.normalized()), translation_(translation) {}

    static RigidTransform identity() { return {}; }

    static RigidTransform from_translation(const Vec3& t) {
        return {Eigen::Quaterniond::Identity(), t};
    }

    /// Rotation about `axis` (need not be unit) by `angle` radians.
    static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                          const Vec3& t = Vec3::Zero()) {
        return {Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())), t};
    }

    static RigidTransform from_matrix(const Eigen::Matrix3d& r, const Vec3& t) {
        return {Eigen::Quaterniond(r), t};
    }

    const Eigen::Quaterniond& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    Eigen::Matrix3d rotation_matrix() const { return rotation_.toRotationMatrix(); }

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

    RigidTransform inverse() const {
        const Eigen::Quaterniond inv = rotation_.conjugate();
        return {inv, -(inv * translation_)};
    }

    /// (a * b).apply(p) == a.apply(b.apply(p))
    friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
        return {a.rotation_ * b.rotation_, a.rotation_ * b.translation_ + a.translation_};
    }

private:
    Eigen::Quaterniond rotation_ = Eigen::Quaterniond::Identity();
    Vec3 translation_ = Vec3::Zero();
};

/// Angle in radians of the relative rotation between two orientations.
inline double rotation_angle_between(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
    const double d = std::abs(a.normalized().dot(b.normalized()));
    return 2.0 * std::acos(std::min(1.0, d));
}

struct CameraIntrinsics {
    double fx = 615.0;
    double fy = 615.0;
    double cx = 320.0;
    double cy = 240.0;
    int width = 640;
    int height = 480;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) {
            throw InvalidArgumentError("camera focal lengths must be positive");
        }
        if (width <= 0 || height <= 0) {
            throw InvalidArgumentError("camera image size must be positive");
        }
        if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
            throw InvalidArgumentError("principal point must lie inside the image");
        }
    }
};

/// Pinhole camera. `pose` maps world points into the camera frame
/// (camera-from-world); the optical axis is the camera +z axis.
struct CameraModel {
    CameraIntrinsics intrinsics;
    RigidTransform pose;

    /// Camera center in world coordinates.
    Vec3 position() const { return pose.inverse().translation(); }

    /// Unit optical axis in world coordinates.
    Vec3 optical_axis() const { return pose.rotation().conjugate() * Vec3::UnitZ(); }

    /// Depth of a world point measured along the optical axis.
    double depth_of(const Vec3& world_point) const { return pose.apply(world_point).z(); }
};

inline PixelPoint project(const CameraModel& camera, const Vec3& point) {
    const Vec3 pc = camera.pose.apply(point);
    if (!(pc.z() > 0.0)) {
        throw BehindCameraError("point is behind the camera (depth " + std::to_string(pc.z()) + ")");
    }
    const auto& k = camera.intrinsics;
    return {k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy};
}

/// World point at optical-axis depth `z` that projects onto `pixel`.
inline Vec3 backproject_at_depth(const CameraModel& camera, const PixelPoint& pixel, double z) {
    if (!(z > 0.0)) {
        throw InvalidDepthError("backprojection depth must be positive");
    }
    const auto& k = camera.intrinsics;
    const Vec3 pc((pixel.x - k.cx) / k.fx * z, (pixel.y - k.cy) / k.fy * z, z);
    return camera.pose.inverse().apply(pc);
}

/// Returns a copy of `camera` whose world placement is rotated by a random
/// angle in [0, max_rot_deg] about a uniform axis (pivoting at the camera
/// center) and shifted by a uniform-direction offset of norm in [0, max_trans].
inline CameraModel perturb_extrinsics(const CameraModel& camera, double max_rot_deg,
                                      double max_trans, Rng& rng) {
    if (!(max_rot_deg >= 0.0) || !(max_trans >= 0.0)) {
        throw InvalidArgumentError("perturbation bounds must be non-negative");
    }
    const Vec3 axis = uniform_unit_vector(rng);
    const double angle = deg_to_rad(uniform(rng, 0.0, max_rot_deg));
    const Vec3 dir = uniform_unit_vector(rng);
    const double mag = uniform(rng, 0.0, max_trans);
    if (angle == 0.0 && mag == 0.0) {
        return camera;
    }

    const RigidTransform world_from_cam = camera.pose.inverse();
    const Eigen::Quaterniond delta(Eigen::AngleAxisd(angle, axis));
    const RigidTransform perturbed(delta * world_from_cam.rotation(),
                                   world_from_cam.translation() + mag * dir);
    return {camera.intrinsics, perturbed.inverse()};
}

/// Orthonormal pair spanning the plane perpendicular to unit vector `n`.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
    const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = (seed - seed.dot(n) * n).normalized();
    return {e1, n.cross(e1)};
}

/// Component of `v` perpendicular to unit vector `n`.
inline Vec3 reject(const Vec3& v, const Vec3& n) { return v - v.dot(n) * n; }

}  // namespace pegservo
