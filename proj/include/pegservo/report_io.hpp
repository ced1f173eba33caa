#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pegservo/bench.hpp"
#include "pegservo/errors.hpp"

namespace pegservo {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

inline std::string report_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "scenario,method,trials,successes,success_rate,mean_success_time_s,significant\n";
    for (const auto& e : report.entries) {
        os << e.scenario << ',' << e.method << ',' << e.trials << ',' << e.successes << ','
           << format_double(e.success_rate) << ',' << format_double(e.mean_success_time) << ','
           << (e.significant ? "true" : "false") << '\n';
    }
    return os.str();
}

inline nlohmann::json to_json(const TrialResult& r) {
    return {{"method", r.method},
            {"success", r.success},
            {"elapsed_s", r.elapsed},
            {"insertion_depth_m", r.insertion_depth},
            {"outcome", r.outcome_detail},
            {"attempts", r.attempts},
            {"final_planar_error_m", r.final_planar_error},
            {"alignment_time_s", r.alignment_time}};
}

inline TrialResult trial_from_json(const nlohmann::json& j) {
    TrialResult r;
    r.method = j.at("method").get<std::string>();
    r.success = j.at("success").get<bool>();
    r.elapsed = j.at("elapsed_s").get<double>();
    r.insertion_depth = j.at("insertion_depth_m").get<double>();
    r.outcome_detail = j.at("outcome").get<std::string>();
    r.attempts = j.at("attempts").get<std::int64_t>();
    r.final_planar_error = j.at("final_planar_error_m").get<double>();
    r.alignment_time = j.at("alignment_time_s").get<double>();
    return r;
}

/// The seed-determined part of a report. Wall-clock metadata lives outside it.
inline nlohmann::json deterministic_json(const BenchReport& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json trials = nlohmann::json::array();
        for (const auto& r : e.results) {
            trials.push_back(to_json(r));
        }
        entries.push_back({{"scenario", e.scenario},
                           {"method", e.method},
                           {"trials", e.trials},
                           {"successes", e.successes},
                           {"success_rate", e.success_rate},
                           {"mean_success_time_s", e.mean_success_time},
                           {"significant", e.significant},
                           {"results", std::move(trials)}});
    }
    return {{"seed", report.seed}, {"entries", std::move(entries)}};
}

inline nlohmann::json report_json(const BenchReport& report, const std::string& generated_at = {}) {
    nlohmann::json j{{"deterministic", deterministic_json(report)}};
    if (!generated_at.empty()) {
        j["meta"] = {{"generated_at", generated_at}};
    }
    return j;
}

inline BenchReport report_from_json(const nlohmann::json& j) {
    const nlohmann::json& d = j.contains("deterministic") ? j.at("deterministic") : j;
    BenchReport report;
    report.seed = d.at("seed").get<std::uint64_t>();
    for (const auto& e : d.at("entries")) {
        MethodReport m;
        m.scenario = e.at("scenario").get<std::string>();
        m.method = e.at("method").get<std::string>();
        m.trials = e.at("trials").get<int>();
        m.successes = e.at("successes").get<int>();
        m.success_rate = e.at("success_rate").get<double>();
        m.mean_success_time = e.at("mean_success_time_s").get<double>();
        m.significant = e.at("significant").get<bool>();
        for (const auto& r : e.at("results")) {
            m.results.push_back(trial_from_json(r));
        }
        report.entries.push_back(std::move(m));
    }
    return report;
}

/// Table with one row per scenario and one column per method; cells read
/// "rate% (mean time)", bold when not significantly below the best.
inline std::string report_markdown(const BenchReport& report) {
    std::vector<std::string> scenarios;
    std::vector<std::string> methods;
    for (const auto& e : report.entries) {
        if (std::find(scenarios.begin(), scenarios.end(), e.scenario) == scenarios.end()) {
            scenarios.push_back(e.scenario);
        }
        if (std::find(methods.begin(), methods.end(), e.method) == methods.end()) {
            methods.push_back(e.method);
        }
    }
    std::ostringstream os;
    os << "| scenario |";
    for (const auto& m : methods) {
        os << ' ' << m << " |";
    }
    os << "\n|---|";
    for (std::size_t i = 0; i < methods.size(); ++i) {
        os << "---|";
    }
    os << '\n';
    char buf[64];
    for (const auto& s : scenarios) {
        os << "| " << s << " |";
        for (const auto& m : methods) {
            const auto it = std::find_if(report.entries.begin(), report.entries.end(),
                                         [&](const MethodReport& e) { return e.scenario == s && e.method == m; });
            if (it == report.entries.end()) {
                os << " - |";
                continue;
            }
            std::snprintf(buf, sizeof buf, "%.0f%%", 100.0 * it->success_rate);
            std::string cell = it->significant ? std::string("**") + buf + "**" : std::string(buf);
            if (it->successes > 0) {
                std::snprintf(buf, sizeof buf, " (%.1f s)", it->mean_success_time);
                cell += buf;
            } else {
                cell += " (-)";
            }
            os << ' ' << cell << " |";
        }
        os << '\n';
    }
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

enum class ReportFormat { csv, json, markdown };

inline void export_report(const BenchReport& report, const std::string& path, ReportFormat format,
                          const std::string& generated_at = {}) {
    switch (format) {
        case ReportFormat::csv:
            write_text_file(path, report_csv(report));
            break;
        case ReportFormat::json:
            write_text_file(path, report_json(report, generated_at).dump(2) + "\n");
            break;
        case ReportFormat::markdown:
            write_text_file(path, report_markdown(report));
            break;
    }
}

inline BenchReport import_report(const std::string& path) {
    try {
        return report_from_json(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("'" + path + "': " + e.what());
    }
}

}  // namespace pegservo
