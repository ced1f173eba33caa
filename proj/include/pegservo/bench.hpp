#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pegservo/baselines.hpp"
#include "pegservo/errors.hpp"
#include "pegservo/estimator.hpp"
#include "pegservo/scene.hpp"
#include "pegservo/servo.hpp"
#include "pegservo/stats.hpp"
#include "pegservo/world.hpp"

namespace pegservo {

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> methods{"random", "spiral", "servo", "servo_then_spiral", "optimal"};
    return methods;
}

/// How the simulated detector sees each camera: a square crop around the
/// marked hole, resized to `resolution` pixels. Noise parameters are in
/// pixels of that crop.
struct RoiOptions {
    double size_in_diameters = 6.0;
    int resolution = 224;
};

/// Overrides of the servo defaults; empty fields keep the defaults.
struct ServoOverrides {
    std::optional<double> phi_t;
    double alpha_tau = 0.9;
    double alpha_gamma = 0.9;
    double alpha_phi = 0.9;
    double loop_dt = 1.0 / 30.0;
    double max_duration = 10.0;
    /// Abort radius around the start position, in uncertainty radii.
    double boundary_factor = 2.0;
};

struct BenchConfig {
    std::string scenario = "plastic";
    std::vector<std::string> methods{"servo"};
    int trials = 100;
    std::uint64_t seed = 0;
    std::string estimator_preset = "synth";
    /// Replaces the preset when set.
    std::optional<NoiseModel> noise;
    RoiOptions roi;
    ServoOverrides servo;
    SpiralParams spiral;
    RandomSearchParams random;
    MotionModel motion;
    WorldOptions world;
    std::vector<HoleScenario> custom_scenarios;
    /// 0 means one worker per hardware thread.
    int threads = 0;

    void validate() const {
        if (trials < 1) {
            throw ConfigError("trials must be at least 1");
        }
        if (methods.empty()) {
            throw ConfigError("at least one method is required");
        }
        for (const auto& m : methods) {
            if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end()) {
                throw ConfigError("unknown method '" + m + "'");
            }
        }
        find_scenario(scenario, custom_scenarios);
        if (!noise) {
            noise_preset(estimator_preset);
        }
        motion.validate();
    }

    NoiseModel noise_model() const { return noise.value_or(noise_preset(estimator_preset)); }
};

/// Aggregate of one (scenario, method) cell.
struct MethodReport {
    std::string scenario;
    std::string method;
    int trials = 0;
    int successes = 0;
    double success_rate = 0.0;
    /// Mean over successful trials only; 0 when there are none.
    double mean_success_time = 0.0;
    bool significant = false;
    std::vector<TrialResult> results;

    friend bool operator==(const MethodReport&, const MethodReport&) = default;
};

struct BenchReport {
    std::uint64_t seed = 0;
    std::vector<MethodReport> entries;

    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

/// Per-camera detector built from the ROI around the true hole image position.
inline OracleEstimator make_trial_estimator(const WorldState& world, const NoiseModel& base, const RoiOptions& roi,
                                            std::uint64_t seed) {
    std::vector<NoiseModel> models;
    for (const auto& cam : world.true_cameras) {
        const PixelRect r = hole_roi(cam, world.scenario.hole_center(), world.scenario.hole_diameter,
                                     roi.size_in_diameters);
        models.push_back(roi_noise_model(base, r, roi.resolution));
    }
    return {std::move(models), seed};
}

inline ServoConfig make_servo_config(const WorldState& world, const ServoOverrides& o) {
    ServoConfig c = default_servo_config(world.scenario, believed_depths(world));
    if (o.phi_t) {
        c.phi_t = *o.phi_t;
    }
    c.alpha_tau = o.alpha_tau;
    c.alpha_gamma = o.alpha_gamma;
    c.alpha_phi = o.alpha_phi;
    c.loop_dt = o.loop_dt;
    c.max_duration = o.max_duration;
    c.record_trace = false;
    return c;
}

namespace detail {

inline TrialResult run_servo_trial(WorldState& world, const BenchConfig& config, const std::string& method,
                                   std::uint64_t seed) {
    TrialResult r{method, false, 0.0, 0.0, "", 0, 0.0};
    OracleEstimator estimator = make_trial_estimator(world, config.noise_model(), config.roi, derive_seed(seed, 1));
    const ServoConfig sc = make_servo_config(world, config.servo);
    const double boundary = config.servo.boundary_factor * world.scenario.uncertainty_radius;
    const double t0 = world.clock;
    ServoOutcome out;
    try {
        out = run_servo(world, world.believed_cameras, estimator, sc, config.motion, boundary);
    } catch (const EstimationStarvedError&) {
        r.outcome_detail = "estimation_starved";
        r.elapsed = world.clock - t0;
        r.final_planar_error = contact_query(world).planar_error;
        return r;
    }
    r.attempts = out.iterations;
    r.alignment_time = out.elapsed;
    if (out.status != ServoStatus::converged) {
        r.outcome_detail = to_string(out.status);
        r.elapsed = world.clock - t0;
        r.final_planar_error = out.final_planar_error;
        return r;
    }
    if (method == "servo_then_spiral") {
        TrialResult s = spiral_search(world, config.spiral, config.motion, 2.0 * sc.phi_t);
        s.method = method;
        s.attempts = r.attempts;
        s.alignment_time = r.alignment_time;
        s.outcome_detail = s.success ? "inserted" : "spiral_" + s.outcome_detail;
        s.elapsed = world.clock - t0;
        return s;
    }
    const InsertionResult ins = attempt_insertion(world, world.scenario.insertion_depth, config.motion);
    r.insertion_depth = ins.depth_reached;
    r.success = ins.depth_reached >= world.scenario.insertion_depth;
    r.outcome_detail = r.success ? "inserted" : "missed_hole";
    r.elapsed = world.clock - t0;
    r.final_planar_error = contact_query(world).planar_error;
    return r;
}

}  // namespace detail

/// Runs one seeded trial of `method`. The world depends only on the trial
/// seed, so every method sees identical initial conditions.
inline TrialResult run_trial(const BenchConfig& config, const HoleScenario& scenario, const std::string& method,
                             std::uint64_t index) {
    const std::uint64_t seed = trial_seed(config.seed, index);
    WorldState world = make_world(scenario, seed, config.world);
    if (method == "random") {
        Rng rng(derive_seed(seed, 2));
        return random_search(world, config.random, config.motion, rng);
    }
    if (method == "spiral") {
        return spiral_search(world, config.spiral, config.motion);
    }
    if (method == "optimal") {
        return optimal_align(world, config.motion);
    }
    if (method == "servo" || method == "servo_then_spiral") {
        return detail::run_servo_trial(world, config, method, seed);
    }
    throw ConfigError("unknown method '" + method + "'");
}

inline MethodReport summarize(const std::string& scenario, const std::string& method,
                              std::vector<TrialResult> results) {
    MethodReport m;
    m.scenario = scenario;
    m.method = method;
    m.trials = static_cast<int>(results.size());
    double time_sum = 0.0;
    for (const auto& r : results) {
        if (r.success) {
            ++m.successes;
            time_sum += r.elapsed;
        }
    }
    m.success_rate = static_cast<double>(m.successes) / m.trials;
    m.mean_success_time = m.successes > 0 ? time_sum / m.successes : 0.0;
    m.results = std::move(results);
    return m;
}

/// Recomputes the significance flag of every entry, grouped by scenario.
inline void apply_significance(BenchReport& report) {
    std::vector<std::string> scenarios;
    for (const auto& e : report.entries) {
        if (std::find(scenarios.begin(), scenarios.end(), e.scenario) == scenarios.end()) {
            scenarios.push_back(e.scenario);
        }
    }
    for (const auto& s : scenarios) {
        std::vector<std::size_t> idx;
        std::vector<SuccessCount> counts;
        for (std::size_t i = 0; i < report.entries.size(); ++i) {
            if (report.entries[i].scenario == s) {
                idx.push_back(i);
                counts.push_back({report.entries[i].successes, report.entries[i].trials});
            }
        }
        const std::vector<bool> flags = significance_flags(counts);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            report.entries[idx[j]].significant = flags[j];
        }
    }
}

/// Runs `trials` independent trials per method (trial i seeded with seed ^ i)
/// on a pool of worker threads and aggregates them.
inline BenchReport run_bench(const BenchConfig& config) {
    config.validate();
    const HoleScenario scenario = find_scenario(config.scenario, config.custom_scenarios);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(config.threads > 0 ? config.threads : hw, config.trials);

    BenchReport report;
    report.seed = config.seed;
    for (const auto& method : config.methods) {
        std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
        std::atomic<int> next{0};
        std::mutex error_mutex;
        std::exception_ptr error;
        auto work = [&] {
            for (int i = next++; i < config.trials; i = next++) {
                try {
                    results[static_cast<std::size_t>(i)] =
                        run_trial(config, scenario, method, static_cast<std::uint64_t>(i));
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next = config.trials;
                }
            }
        };
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back(work);
            }
        }
        if (error) {
            std::rethrow_exception(error);
        }
        report.entries.push_back(summarize(scenario.name, method, std::move(results)));
    }
    apply_significance(report);
    return report;
}

}  // namespace pegservo
