#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pegservo/bench.hpp"
#include "pegservo/errors.hpp"
#include "pegservo/report_io.hpp"

namespace pegservo {

// INI-style bench configuration. Sections mirror the library modules:
//
//   [bench]     scenario, methods (comma separated), trials, seed, estimator, threads
//   [scenario]  name, hole_diameter, peg_diameter, uncertainty_radius,
//               insertion_depth, start_height_min, start_height_max
//   [estimator] sigma_px, outlier_prob, miss_prob, roi_diameters, roi_resolution
//   [servo]     phi_t, alpha_tau, alpha_gamma, alpha_phi, loop_dt, max_duration, boundary_factor
//   [spiral]    pitch, speed
//   [random]    time_limit, probe_time
//   [motion]    max_speed, dt
//   [world]     calib_rot_deg, calib_trans, grasp_rot_deg, grasp_trans,
//               hole_position_error, cameras, azimuth_jitter_deg
//
// Lengths are meters, times seconds, angles degrees. Unknown sections or
// keys are errors. A [scenario] section defines an extra hole that [bench]
// may select by name.

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema{
        {"bench", {"scenario", "methods", "trials", "seed", "estimator", "threads"}},
        {"scenario",
         {"name", "hole_diameter", "peg_diameter", "uncertainty_radius", "insertion_depth", "start_height_min",
          "start_height_max"}},
        {"estimator", {"sigma_px", "outlier_prob", "miss_prob", "roi_diameters", "roi_resolution"}},
        {"servo", {"phi_t", "alpha_tau", "alpha_gamma", "alpha_phi", "loop_dt", "max_duration", "boundary_factor"}},
        {"spiral", {"pitch", "speed"}},
        {"random", {"time_limit", "probe_time"}},
        {"motion", {"max_speed", "dt"}},
        {"world",
         {"calib_rot_deg", "calib_trans", "grasp_rot_deg", "grasp_trans", "hole_position_error", "cameras",
          "azimuth_jitter_deg"}},
    };
    return schema;
}

template <typename T>
T get_value(const boost::property_tree::ptree& section, const std::string& name, const std::string& key) {
    try {
        return section.get<T>(key);
    } catch (const boost::property_tree::ptree_error&) {
        throw ConfigError("[" + name + "] " + key + ": invalid value '" + section.get<std::string>(key, "") + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) {
                out.push_back(cur);
            }
            cur.clear();
        } else if (ch != ' ' && ch != '\t') {
            cur += ch;
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

}  // namespace detail

/// Applies an INI document on top of `config`.
inline void apply_config_text(BenchConfig& config, const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    const auto& schema = detail::config_schema();
    for (const auto& [name, section] : tree) {
        const auto it = schema.find(name);
        if (it == schema.end() || section.empty()) {
            throw ConfigError("unknown config section '" + name + "'");
        }
        for (const auto& [key, value] : section) {
            if (!it->second.contains(key)) {
                throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
            }
        }
    }
    using detail::get_value;
    auto opt = [&](const std::string& section, const std::string& key, auto& target) {
        const auto s = tree.get_child_optional(section);
        if (s && s->count(key)) {
            target = get_value<std::decay_t<decltype(target)>>(*s, section, key);
        }
    };

    if (const auto s = tree.get_child_optional("scenario")) {
        HoleScenario sc;
        sc.name = get_value<std::string>(*s, "scenario", "name");
        sc.hole_diameter = get_value<double>(*s, "scenario", "hole_diameter");
        sc.peg_diameter = get_value<double>(*s, "scenario", "peg_diameter");
        sc.uncertainty_radius = 1.5 * sc.peg_diameter;
        opt("scenario", "uncertainty_radius", sc.uncertainty_radius);
        opt("scenario", "insertion_depth", sc.insertion_depth);
        opt("scenario", "start_height_min", sc.start_height.lo);
        opt("scenario", "start_height_max", sc.start_height.hi);
        try {
            sc.validate();
        } catch (const InvalidArgumentError& e) {
            throw ConfigError(e.what());
        }
        config.custom_scenarios.push_back(sc);
        config.scenario = sc.name;
    }

    opt("bench", "scenario", config.scenario);
    if (const auto s = tree.get_child_optional("bench"); s && s->count("methods")) {
        config.methods = detail::split_list(s->get<std::string>("methods"));
    }
    opt("bench", "trials", config.trials);
    opt("bench", "seed", config.seed);
    opt("bench", "estimator", config.estimator_preset);
    opt("bench", "threads", config.threads);

    if (const auto s = tree.get_child_optional("estimator")) {
        NoiseModel n = config.noise_model();
        opt("estimator", "sigma_px", n.gaussian_sigma);
        opt("estimator", "outlier_prob", n.outlier_prob);
        opt("estimator", "miss_prob", n.miss_prob);
        if (s->count("sigma_px") || s->count("outlier_prob") || s->count("miss_prob")) {
            config.noise = n;
        }
        opt("estimator", "roi_diameters", config.roi.size_in_diameters);
        opt("estimator", "roi_resolution", config.roi.resolution);
    }

    if (const auto s = tree.get_child_optional("servo"); s && s->count("phi_t")) {
        config.servo.phi_t = get_value<double>(*s, "servo", "phi_t");
    }
    opt("servo", "alpha_tau", config.servo.alpha_tau);
    opt("servo", "alpha_gamma", config.servo.alpha_gamma);
    opt("servo", "alpha_phi", config.servo.alpha_phi);
    opt("servo", "loop_dt", config.servo.loop_dt);
    opt("servo", "max_duration", config.servo.max_duration);
    opt("servo", "boundary_factor", config.servo.boundary_factor);

    if (const auto s = tree.get_child_optional("spiral"); s && s->count("pitch")) {
        config.spiral.pitch = get_value<double>(*s, "spiral", "pitch");
    }
    opt("spiral", "speed", config.spiral.speed);
    opt("random", "time_limit", config.random.time_limit);
    opt("random", "probe_time", config.random.probe_time);
    opt("motion", "max_speed", config.motion.max_speed);
    opt("motion", "dt", config.motion.dt);

    opt("world", "calib_rot_deg", config.world.calibration.max_rot_deg);
    opt("world", "calib_trans", config.world.calibration.max_trans);
    opt("world", "grasp_rot_deg", config.world.grasp.max_rot_deg);
    opt("world", "grasp_trans", config.world.grasp.max_trans);
    opt("world", "hole_position_error", config.world.hole_position_error);
    opt("world", "cameras", config.world.num_cameras);
    opt("world", "azimuth_jitter_deg", config.world.azimuth_jitter_deg);
}

inline void apply_config_file(BenchConfig& config, const std::string& path) {
    apply_config_text(config, read_text_file(path));
}

}  // namespace pegservo
