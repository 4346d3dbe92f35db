#pragma once

// Analysis report files and the metrics the evaluate tool derives from them.
// Same `key = value` surface as scene_io.hpp; numeric fields use fixed printf
// formats so identical inputs produce byte-identical reports.

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

#include "tdvv/scene_io.hpp"
#include "tdvv/vec3.hpp"

namespace tdvv {

struct AnalysisReport {
    int version = 1;
    int fs = 0;
    std::size_t frame_len = 0;
    std::size_t hop = 0;
    std::string window = "hann";
    std::size_t frames_total = 0;
    std::size_t frames_used = 0;
    std::optional<Vec3> u0;  // absent when no frame yielded a direction
    std::optional<double> range_m;
    std::optional<Vec3> baseline_u0;
};

inline std::string format_report(const AnalysisReport& r) {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf, "version = %d\n", r.version);
    out += buf;
    std::snprintf(buf, sizeof buf, "fs = %d\n", r.fs);
    out += buf;
    std::snprintf(buf, sizeof buf, "frame_len = %zu\n", r.frame_len);
    out += buf;
    std::snprintf(buf, sizeof buf, "hop = %zu\n", r.hop);
    out += buf;
    std::snprintf(buf, sizeof buf, "window = %s\n", r.window.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "frames_total = %zu\n", r.frames_total);
    out += buf;
    std::snprintf(buf, sizeof buf, "frames_used = %zu\n", r.frames_used);
    out += buf;
    if (r.u0) {
        std::snprintf(buf, sizeof buf, "azimuth_deg = %.6f\n", azimuth_deg(*r.u0));
        out += buf;
        std::snprintf(buf, sizeof buf, "elevation_deg = %.6f\n", elevation_deg(*r.u0));
        out += buf;
        std::snprintf(buf, sizeof buf, "u0 = %.9f %.9f %.9f\n", r.u0->x, r.u0->y, r.u0->z);
        out += buf;
    }
    if (r.range_m) {
        std::snprintf(buf, sizeof buf, "range_m = %.6f\n", *r.range_m);
        out += buf;
    }
    if (r.baseline_u0) {
        std::snprintf(buf, sizeof buf, "baseline_azimuth_deg = %.6f\n",
                      azimuth_deg(*r.baseline_u0));
        out += buf;
        std::snprintf(buf, sizeof buf, "baseline_elevation_deg = %.6f\n",
                      elevation_deg(*r.baseline_u0));
        out += buf;
        std::snprintf(buf, sizeof buf, "baseline_u0 = %.9f %.9f %.9f\n", r.baseline_u0->x,
                      r.baseline_u0->y, r.baseline_u0->z);
        out += buf;
    }
    return out;
}

inline AnalysisReport parse_report(const KvPairs& kv) {
    AnalysisReport r;
    bool have_total = false, have_used = false;
    for (const auto& [key, value] : kv) {
        if (key == "version") r.version = static_cast<int>(detail::parse_double(key, value));
        else if (key == "fs") r.fs = static_cast<int>(detail::parse_double(key, value));
        else if (key == "frame_len")
            r.frame_len = static_cast<std::size_t>(detail::parse_double(key, value));
        else if (key == "hop") r.hop = static_cast<std::size_t>(detail::parse_double(key, value));
        else if (key == "window") r.window = value;
        else if (key == "frames_total") {
            r.frames_total = static_cast<std::size_t>(detail::parse_double(key, value));
            have_total = true;
        } else if (key == "frames_used") {
            r.frames_used = static_cast<std::size_t>(detail::parse_double(key, value));
            have_used = true;
        } else if (key == "u0") r.u0 = detail::parse_vec3(key, value);
        else if (key == "range_m") r.range_m = detail::parse_double(key, value);
        else if (key == "baseline_u0") r.baseline_u0 = detail::parse_vec3(key, value);
        // azimuth_deg / elevation_deg are derived from u0; accept and ignore.
    }
    if (!have_total) throw std::runtime_error("parse error: report is missing field 'frames_total'");
    if (!have_used) throw std::runtime_error("parse error: report is missing field 'frames_used'");
    return r;
}

inline AnalysisReport parse_report_file(const std::string& path) {
    return parse_report(parse_kv_file(path));
}

struct EvalMetrics {
    double angular_error_deg = 0.0;
    std::optional<double> range_error_m;
    std::optional<double> baseline_angular_error_deg;
};

// Angular error is the great-circle angle between estimated and true source
// directions; range error is reported only when both sides carry a distance.
inline EvalMetrics evaluate_report(const AnalysisReport& report, const TruthRecord& truth) {
    if (!report.u0)
        throw std::runtime_error("parse error: report is missing field 'u0'");
    EvalMetrics m;
    m.angular_error_deg = angle_between_deg(*report.u0, truth.u0);
    if (report.range_m && truth.d0) m.range_error_m = std::abs(*report.range_m - *truth.d0);
    if (report.baseline_u0)
        m.baseline_angular_error_deg = angle_between_deg(*report.baseline_u0, truth.u0);
    return m;
}

}  // namespace tdvv
