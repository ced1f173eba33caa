#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pegservo/errors.hpp"
#include "pegservo/geometry.hpp"
#include "pegservo/random.hpp"

namespace pegservo {

/// Closed pixel rectangle [x0, x1] x [y0, y1].
struct PixelRect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    bool contains(const PixelPoint& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    static PixelRect full_image(const CameraIntrinsics& k) {
        return {0.0, 0.0, k.width - 1.0, k.height - 1.0};
    }
};

/// Peg and hole image points from one camera.
struct EstimatePair {
    PixelPoint peg;
    PixelPoint hole;
    bool peg_detected = true;
    bool hole_detected = true;

    bool both_detected() const { return peg_detected && hole_detected; }
};

/// Error model of a point detector: isotropic Gaussian pixel noise, uniform
/// outliers over the region of interest, and outright misses.
struct NoiseModel {
    double gaussian_sigma = 0.0;
    double outlier_prob = 0.0;
    double miss_prob = 0.0;
    /// Region of interest. Empty means the full image of the observing camera.
    std::optional<PixelRect> roi;

    void validate() const {
        if (!(gaussian_sigma >= 0.0)) {
            throw InvalidArgumentError("noise sigma must be non-negative");
        }
        for (double p : {outlier_prob, miss_prob}) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw InvalidArgumentError("noise probabilities must lie in [0, 1]");
            }
        }
    }
};

// Labeled models of detector behavior, not measurements.
inline NoiseModel exact_preset() { return {}; }
inline NoiseModel synth_like_preset() { return {1.5, 0.005, 0.0, std::nullopt}; }
inline NoiseModel metal_on_plastic_preset() { return {3.0, 0.40, 0.0, std::nullopt}; }

inline NoiseModel noise_preset(const std::string& name) {
    if (name == "exact") {
        return exact_preset();
    }
    if (name == "synth") {
        return synth_like_preset();
    }
    if (name == "metal-on-plastic") {
        return metal_on_plastic_preset();
    }
    throw ConfigError("unknown estimator preset '" + name + "'");
}

namespace detail {

inline std::pair<PixelPoint, bool> noisy_point(const PixelPoint& truth, const NoiseModel& noise,
                                               const PixelRect& roi, Rng& rng) {
    if (bernoulli(rng, noise.miss_prob)) {
        return {{}, false};
    }
    if (bernoulli(rng, noise.outlier_prob)) {
        return {{uniform(rng, roi.x0, roi.x1), uniform(rng, roi.y0, roi.y1)}, true};
    }
    PixelPoint p = truth;
    if (noise.gaussian_sigma > 0.0) {
        std::normal_distribution<double> normal(0.0, noise.gaussian_sigma);
        p.x += normal(rng);
        p.y += normal(rng);
    }
    if (!roi.contains(p)) {
        return {{}, false};
    }
    return {p, true};
}

}  // namespace detail

/// Simulated detector: projects the true points through the true camera and
/// corrupts them with `noise`. Points landing outside the ROI count as missed.
inline EstimatePair oracle_estimate(const Vec3& true_peg, const Vec3& true_hole,
                                    const CameraModel& true_camera, const NoiseModel& noise, Rng& rng) {
    noise.validate();
    const PixelPoint peg = project(true_camera, true_peg);
    const PixelPoint hole = project(true_camera, true_hole);
    const PixelRect roi = noise.roi.value_or(PixelRect::full_image(true_camera.intrinsics));
    const auto [peg_est, peg_ok] = detail::noisy_point(peg, noise, roi, rng);
    const auto [hole_est, hole_ok] = detail::noisy_point(hole, noise, roi, rng);
    return {peg_est, hole_est, peg_ok, hole_ok};
}

/// Square region of interest centered on the projection of `center`, with a
/// side of `size_in_diameters` projected hole diameters, clipped to the image.
inline PixelRect hole_roi(const CameraModel& camera, const Vec3& center, double hole_diameter,
                          double size_in_diameters) {
    const PixelPoint c = project(camera, center);
    const double side = size_in_diameters * camera.intrinsics.fx * hole_diameter / camera.depth_of(center);
    const PixelRect full = PixelRect::full_image(camera.intrinsics);
    return {std::max(full.x0, c.x - 0.5 * side), std::max(full.y0, c.y - 0.5 * side),
            std::min(full.x1, c.x + 0.5 * side), std::min(full.y1, c.y + 0.5 * side)};
}

/// Expresses a noise model given in pixels of the ROI crop resized to
/// `resolution` x `resolution` in full-image pixels.
inline NoiseModel roi_noise_model(NoiseModel base, const PixelRect& roi, int resolution) {
    const double side = std::max(roi.x1 - roi.x0, roi.y1 - roi.y0);
    base.gaussian_sigma *= side / resolution;
    base.roi = roi;
    return base;
}

/// What a detector gets to see of the scene for one camera.
struct Observation {
    Vec3 peg;
    Vec3 hole;
    CameraModel camera;
    std::size_t camera_index = 0;
};

/// Stands in for a trained keypoint network.
class PointEstimator {
public:
    virtual ~PointEstimator() = default;
    virtual EstimatePair estimate(const Observation& obs) = 0;
};

/// PointEstimator backed by oracle_estimate with its own generator. Holds
/// either one noise model for every camera or one per camera index.
class OracleEstimator final : public PointEstimator {
public:
    OracleEstimator(NoiseModel noise, std::uint64_t seed) : noise_{std::move(noise)}, rng_(seed) {
        noise_.front().validate();
    }

    OracleEstimator(std::vector<NoiseModel> per_camera, std::uint64_t seed)
        : noise_(std::move(per_camera)), rng_(seed) {
        if (noise_.empty()) {
            throw InvalidArgumentError("estimator needs at least one noise model");
        }
        for (const auto& n : noise_) {
            n.validate();
        }
    }

    EstimatePair estimate(const Observation& obs) override {
        const NoiseModel& n = noise_.size() == 1 ? noise_.front() : noise_.at(obs.camera_index);
        return oracle_estimate(obs.peg, obs.hole, obs.camera, n, rng_);
    }

    const std::vector<NoiseModel>& noise() const { return noise_; }

private:
    std::vector<NoiseModel> noise_;
    Rng rng_;
};

/// Fraction of samples whose peg and hole estimates are both detected and
/// within each threshold of the truth.
inline std::vector<double> accuracy_curve(const std::vector<EstimatePair>& estimates,
                                          const std::vector<EstimatePair>& truths,
                                          const std::vector<double>& thresholds) {
    if (estimates.size() != truths.size()) {
        throw DimensionMismatchError("estimates and truths differ in length");
    }
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw InvalidArgumentError("thresholds must be sorted ascending");
    }
    std::vector<double> worst;
    worst.reserve(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto& e = estimates[i];
        if (!e.both_detected()) {
            worst.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        worst.push_back(std::max(pixel_distance(e.peg, truths[i].peg), pixel_distance(e.hole, truths[i].hole)));
    }
    std::vector<double> rates;
    rates.reserve(thresholds.size());
    for (double t : thresholds) {
        const auto hits = std::count_if(worst.begin(), worst.end(), [t](double d) { return d <= t; });
        rates.push_back(estimates.empty() ? 0.0 : static_cast<double>(hits) / estimates.size());
    }
    return rates;
}

}  // namespace pegservo
