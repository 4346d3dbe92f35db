#pragma once

// Scene-config and ground-truth files: one line-oriented `key = value` format
// shared by every tool artifact, with # comments and repeatable keys.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdvv/simulator.hpp"
#include "tdvv/vec3.hpp"

namespace tdvv {

using KvPairs = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (detail::trim(value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw std::runtime_error("parse error: field '" + key + "' is not a number: " + value);
}

inline Vec3 parse_vec3(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    Vec3 v;
    if (ss >> v.x >> v.y >> v.z) {
        std::string rest;
        if (!(ss >> rest)) return v;
    }
    throw std::runtime_error("parse error: field '" + key + "' needs three numbers: " + value);
}

}  // namespace detail

// Parse `key = value` lines; '#' starts a comment, blank lines are skipped.
// Order and duplicates are preserved so repeatable keys work.
inline KvPairs parse_kv_text(std::istream& in) {
    KvPairs out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("parse error: line " + std::to_string(lineno) +
                                     " has no '=': " + t);
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("parse error: line " + std::to_string(lineno) +
                                     " has an empty key");
        out.emplace_back(key, value);
    }
    return out;
}

inline KvPairs parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_kv_text(in);
}

// `source_signal = white | impulse_train(N) | ar_speechlike`
inline SignalSpec parse_signal_spec(const std::string& value) {
    SignalSpec spec;
    const auto paren = value.find('(');
    if (paren == std::string::npos) {
        spec.kind = signal_kind_from_string(value);
        return spec;
    }
    if (value.back() != ')')
        throw std::runtime_error("parse error: malformed signal descriptor: " + value);
    spec.kind = signal_kind_from_string(detail::trim(value.substr(0, paren)));
    const std::string arg = detail::trim(value.substr(paren + 1, value.size() - paren - 2));
    if (spec.kind == SignalSpec::Kind::impulse_train) {
        const double p = detail::parse_double("source_signal period", arg);
        if (p < 1.0) throw std::runtime_error("parse error: impulse period must be >= 1");
        spec.period = static_cast<std::size_t>(p);
    } else if (!arg.empty()) {
        throw std::runtime_error("parse error: signal kind takes no argument: " + value);
    }
    return spec;
}

// `reflector = <az_deg> <el_deg> <gain> <delay_s>`
inline Reflector parse_reflector(const std::string& value) {
    std::istringstream ss(value);
    double az, el, gain, delay;
    std::string rest;
    if (!(ss >> az >> el >> gain >> delay) || (ss >> rest))
        throw std::runtime_error("parse error: field 'reflector' needs az el gain delay: " +
                                 value);
    Reflector r;
    r.dir = unit_from_angles_deg(az, el);
    r.gain = gain;
    r.delay_s = delay;
    return r;
}

inline SceneSpec parse_scene(const KvPairs& kv) {
    SceneSpec s;
    for (const auto& [key, value] : kv) {
        if (key == "mic_height") s.mic_height = detail::parse_double(key, value);
        else if (key == "azimuth_deg") s.azimuth_deg = detail::parse_double(key, value);
        else if (key == "elevation_deg") s.elevation_deg = detail::parse_double(key, value);
        else if (key == "distance") s.distance = detail::parse_double(key, value);
        else if (key == "reflection_gain") {
            if (value == "inverse-distance") s.gain_mode = GainMode::inverse_distance;
            else {
                s.gain_mode = GainMode::fixed;
                s.reflection_gain = detail::parse_double(key, value);
            }
        } else if (key == "noise_snr_db") s.noise_snr_db = detail::parse_double(key, value);
        else if (key == "source_signal") s.source_signal = parse_signal_spec(value);
        else if (key == "duration_s") s.duration_s = detail::parse_double(key, value);
        else if (key == "sample_rate")
            s.sample_rate = static_cast<int>(detail::parse_double(key, value));
        else if (key == "seed")
            s.seed = static_cast<std::uint64_t>(detail::parse_double(key, value));
        else if (key == "reflector") s.extra_reflectors.push_back(parse_reflector(value));
        else throw std::runtime_error("parse error: unknown scene field '" + key + "'");
    }
    s.validate();
    return s;
}

inline SceneSpec parse_scene_file(const std::string& path) {
    return parse_scene(parse_kv_file(path));
}

struct TruthRecord {
    Vec3 u0;
    std::optional<double> d0;
    std::optional<double> tau1;
    std::optional<double> g1;
};

inline std::string format_truth(const GroundTruth& t) {
    char buf[512];
    std::string out = "# ground truth v1\n";
    std::snprintf(buf, sizeof buf, "u0 = %.9f %.9f %.9f\n", t.u0.x, t.u0.y, t.u0.z);
    out += buf;
    std::snprintf(buf, sizeof buf, "azimuth_deg = %.6f\n", azimuth_deg(t.u0));
    out += buf;
    std::snprintf(buf, sizeof buf, "elevation_deg = %.6f\n", t.phi0_deg);
    out += buf;
    std::snprintf(buf, sizeof buf, "u1 = %.9f %.9f %.9f\n", t.u1.x, t.u1.y, t.u1.z);
    out += buf;
    std::snprintf(buf, sizeof buf, "d0 = %.6f\n", t.d0);
    out += buf;
    std::snprintf(buf, sizeof buf, "d1 = %.6f\n", t.d1);
    out += buf;
    std::snprintf(buf, sizeof buf, "tau1 = %.9e\n", t.tau1);
    out += buf;
    std::snprintf(buf, sizeof buf, "g1 = %.6f\n", t.g1);
    out += buf;
    std::snprintf(buf, sizeof buf, "phi0_deg = %.6f\n", t.phi0_deg);
    out += buf;
    std::snprintf(buf, sizeof buf, "phi1_deg = %.6f\n", t.phi1_deg);
    out += buf;
    return out;
}

// Lenient on extras so richer truth files stay readable; u0 is the one
// required field.
inline TruthRecord parse_truth(const KvPairs& kv) {
    TruthRecord t;
    bool have_u0 = false;
    for (const auto& [key, value] : kv) {
        if (key == "u0") {
            t.u0 = detail::parse_vec3(key, value);
            have_u0 = true;
        } else if (key == "d0") t.d0 = detail::parse_double(key, value);
        else if (key == "tau1") t.tau1 = detail::parse_double(key, value);
        else if (key == "g1") t.g1 = detail::parse_double(key, value);
    }
    if (!have_u0) throw std::runtime_error("parse error: truth is missing field 'u0'");
    return t;
}

inline TruthRecord parse_truth_file(const std::string& path) {
    return parse_truth(parse_kv_file(path));
}

}  // namespace tdvv
