#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pegservo/pegservo.hpp"
#include "pegservo/png_io.hpp"

namespace fs = std::filesystem;
using namespace pegservo;

namespace {

struct CommonOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::string> scenario;
    std::vector<std::string> methods;
    std::string config_path;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_method) {
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--trials", o.trials, "Number of trials or samples");
    cmd->add_option("--scenario", o.scenario, "Scenario name (metal, plastic, wide, cap or one from --config)");
    if (with_method) {
        cmd->add_option("--method", o.methods, "Method(s): random, spiral, servo, servo_then_spiral, optimal")
            ->delimiter(',');
    }
    cmd->add_option("--config", o.config_path, "INI configuration file");
    cmd->add_option("--out", o.out, "Output path");
}

BenchConfig build_config(const CommonOptions& o) {
    BenchConfig c;
    if (!o.config_path.empty()) {
        apply_config_file(c, o.config_path);
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.trials) {
        c.trials = *o.trials;
    }
    if (o.scenario) {
        c.scenario = *o.scenario;
    }
    if (!o.methods.empty()) {
        c.methods = o.methods;
    }
    c.validate();
    return c;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

ReportFormat format_from_path(const std::string& path) {
    const std::string ext = fs::path(path).extension().string();
    if (ext == ".csv") {
        return ReportFormat::csv;
    }
    if (ext == ".md") {
        return ReportFormat::markdown;
    }
    return ReportFormat::json;
}

int cmd_bench(const CommonOptions& o) {
    const BenchConfig config = build_config(o);
    const BenchReport report = run_bench(config);
    if (!o.out.empty()) {
        export_report(report, o.out, format_from_path(o.out), utc_timestamp());
    }
    std::cout << report_markdown(report);
    return 0;
}

int cmd_servo_demo(const CommonOptions& o) {
    BenchConfig config = build_config(o);
    const HoleScenario scenario = find_scenario(config.scenario, config.custom_scenarios);
    const std::uint64_t seed = trial_seed(config.seed, 0);
    WorldState world = make_world(scenario, seed, config.world);
    OracleEstimator estimator = make_trial_estimator(world, config.noise_model(), config.roi, derive_seed(seed, 1));
    ServoConfig sc = make_servo_config(world, config.servo);
    sc.record_trace = true;
    const double boundary = config.servo.boundary_factor * scenario.uncertainty_radius;
    const ServoOutcome out = run_servo(world, world.believed_cameras, estimator, sc, config.motion, boundary);

    std::ostringstream csv;
    csv << "time_s,px,py,pz,ex,ey,ez\n";
    for (const auto& s : out.trace) {
        csv << format_double(s.time) << ',' << format_double(s.peg.x()) << ',' << format_double(s.peg.y()) << ','
            << format_double(s.peg.z()) << ',' << format_double(s.error.x()) << ','
            << format_double(s.error.y()) << ',' << format_double(s.error.z()) << '\n';
    }
    write_or_print(o.out, csv.str());
    std::cerr << "status=" << to_string(out.status) << " iterations=" << out.iterations
              << " elapsed_s=" << format_double(out.elapsed)
              << " final_planar_error_m=" << format_double(out.final_planar_error) << '\n';
    return out.status == ServoStatus::converged ? 0 : 3;
}

int cmd_accuracy(const CommonOptions& o, double max_threshold) {
    CommonOptions opts = o;
    if (!opts.trials) {
        opts.trials = 10000;
    }
    const BenchConfig config = build_config(opts);
    const HoleScenario scenario = find_scenario(config.scenario, config.custom_scenarios);
    std::vector<EstimatePair> estimates;
    std::vector<EstimatePair> truths;
    for (int i = 0; i < config.trials; ++i) {
        const std::uint64_t seed = trial_seed(config.seed, static_cast<std::uint64_t>(i));
        const WorldState world = make_world(scenario, seed, config.world);
        OracleEstimator estimator =
            make_trial_estimator(world, config.noise_model(), config.roi, derive_seed(seed, 1));
        const CameraModel& cam = world.true_cameras.front();
        const Vec3 peg = world.peg_tip_position();
        const Vec3 hole = scenario.hole_center();
        // Score in pixels of the ROI crop resized to the network input size.
        const PixelRect roi = *estimator.noise().front().roi;
        const double scale = config.roi.resolution / std::max(roi.x1 - roi.x0, roi.y1 - roi.y0);
        auto to_crop = [&](const PixelPoint& p) { return PixelPoint{(p.x - roi.x0) * scale, (p.y - roi.y0) * scale}; };
        EstimatePair e = estimator.estimate({peg, hole, cam, 0});
        e.peg = to_crop(e.peg);
        e.hole = to_crop(e.hole);
        estimates.push_back(e);
        truths.push_back({to_crop(project(cam, peg)), to_crop(project(cam, hole)), true, true});
    }
    std::vector<double> thresholds;
    for (double t = 0.5; t <= max_threshold + 1e-12; t += 0.5) {
        thresholds.push_back(t);
    }
    const std::vector<double> rates = accuracy_curve(estimates, truths, thresholds);
    std::ostringstream csv;
    csv << "threshold_px,success_rate\n";
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        csv << format_double(thresholds[i]) << ',' << format_double(rates[i]) << '\n';
    }
    write_or_print(o.out, csv.str());
    return 0;
}

struct DatagenOptions {
    std::string input;
    std::string overlays;
    int output_size = 224;
    bool no_crop = false;
};

/// Sidecar for `name.png` is `name.json` holding {"peg": [x, y], "hole": [x, y]}.
std::vector<PixelPoint> read_keypoints(const fs::path& json_path) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(json_path.string()));
    std::vector<PixelPoint> kps;
    for (const char* key : {"peg", "hole"}) {
        const auto& a = j.at(key);
        kps.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    }
    return kps;
}

int cmd_datagen(const CommonOptions& o, const DatagenOptions& d) {
    if (o.out.empty()) {
        throw ConfigError("datagen needs --out <directory>");
    }
    const std::uint64_t seed = o.seed.value_or(0);
    const int per_image = o.trials.value_or(1);
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(d.input)) {
        if (entry.path().extension() == ".png") {
            images.push_back(entry.path());
        }
    }
    std::sort(images.begin(), images.end());
    std::vector<fs::path> overlays;
    if (!d.overlays.empty()) {
        for (const auto& entry : fs::directory_iterator(d.overlays)) {
            if (entry.path().extension() == ".png") {
                overlays.push_back(entry.path());
            }
        }
        std::sort(overlays.begin(), overlays.end());
    }
    fs::create_directories(o.out);
    AugmentParams params;
    params.output_size = d.output_size;
    params.crop_enabled = !d.no_crop;
    Rng rng(seed);
    int written = 0;
    for (const auto& path : images) {
        const Image source = read_png(path.string());
        fs::path sidecar = path;
        sidecar.replace_extension(".json");
        const std::vector<PixelPoint> kps = read_keypoints(sidecar);
        for (int k = 0; k < per_image; ++k) {
            Image img = source;
            if (overlays.size() >= 2) {
                std::uniform_int_distribution<std::size_t> pick(0, overlays.size() - 1);
                const Image over = read_png(overlays[pick(rng)].string());
                const Image alpha = read_png(overlays[pick(rng)].string());
                img = composite_overlay(img, resize_bilinear(over, img.width, img.height),
                                        resize_bilinear(alpha, img.width, img.height));
            }
            const AugmentResult r = augment(img, kps, params, rng);
            const std::string stem = path.stem().string() + "_" + std::to_string(k);
            const fs::path base = fs::path(o.out) / stem;
            write_png(base.string() + ".png", r.image);
            write_png(base.string() + "_peg_heatmap.png", heatmap_to_image(r.heatmaps[0]));
            write_png(base.string() + "_hole_heatmap.png", heatmap_to_image(r.heatmaps[1]));
            const nlohmann::json j{{"peg", {r.keypoints[0].x, r.keypoints[0].y}},
                                   {"hole", {r.keypoints[1].x, r.keypoints[1].y}},
                                   {"sigma_px", params.heatmap.sigma},
                                   {"size", params.output_size}};
            write_text_file(base.string() + ".json", j.dump(2) + "\n");
            ++written;
        }
    }
    std::cerr << "wrote " << written << " samples to " << o.out << '\n';
    return 0;
}

int cmd_report(const std::string& input, const std::string& out) {
    const BenchReport report = import_report(input);
    if (out.empty()) {
        std::cout << report_markdown(report);
        return 0;
    }
    const ReportFormat f = format_from_path(out);
    export_report(report, out, f == ReportFormat::json ? ReportFormat::markdown : f);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Peg-in-hole visual servo simulator and benchmark"};
    app.require_subcommand(1);

    CommonOptions bench_opts;
    auto* bench = app.add_subcommand("bench", "Run a Monte-Carlo benchmark and write a report");
    add_common(bench, bench_opts, true);

    CommonOptions demo_opts;
    auto* demo = app.add_subcommand("servo-demo", "Run one servo trial and write its trace as CSV");
    add_common(demo, demo_opts, false);

    CommonOptions acc_opts;
    double max_threshold = 20.0;
    auto* accuracy = app.add_subcommand("accuracy", "Sample the point estimator and write its accuracy curve (thresholds in ROI-crop pixels)");
    add_common(accuracy, acc_opts, false);
    accuracy->add_option("--max-threshold", max_threshold, "Largest pixel threshold")->check(CLI::PositiveNumber);

    CommonOptions gen_opts;
    DatagenOptions gen;
    auto* datagen = app.add_subcommand("datagen", "Augment labelled PNG images and write heatmap targets");
    add_common(datagen, gen_opts, false);
    datagen->add_option("--input", gen.input, "Directory of PNG images with JSON keypoint sidecars")
        ->required()
        ->check(CLI::ExistingDirectory);
    datagen->add_option("--overlays", gen.overlays, "Directory of natural PNG images for overlay compositing")
        ->check(CLI::ExistingDirectory);
    datagen->add_option("--size", gen.output_size, "Output side length in pixels")->check(CLI::PositiveNumber);
    datagen->add_flag("--no-crop", gen.no_crop, "Disable random cropping");

    std::string report_in;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Render a JSON bench report as CSV or a markdown table");
    report->add_option("input", report_in, "JSON report")->required()->check(CLI::ExistingFile);
    report->add_option("--out", report_out, "Output path (.csv or .md); markdown to stdout when omitted");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) {
            return cmd_bench(bench_opts);
        }
        if (demo->parsed()) {
            return cmd_servo_demo(demo_opts);
        }
        if (accuracy->parsed()) {
            return cmd_accuracy(acc_opts, max_threshold);
        }
        if (datagen->parsed()) {
            return cmd_datagen(gen_opts, gen);
        }
        if (report->parsed()) {
            return cmd_report(report_in, report_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
