// Acceptance gate for the whole toolkit. Each criterion prints exactly one
// summary line, with its measured numbers inline, and then asserts. Thresholds
// and the sampled scene population are pinned here on purpose: the numbers
// must not drift silently with refactors.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tdvv/estimator.hpp"
#include "tdvv/fft.hpp"
#include "tdvv/pipeline.hpp"
#include "tdvv/report.hpp"
#include "tdvv/scene_io.hpp"
#include "tdvv/simulator.hpp"
#include "tdvv/wav.hpp"

using namespace tdvv;

namespace {

// One-reflection scene population: heights 0.5-1.5 m, distances 0.5-3 m,
// elevations -20..40 deg, floor gains 0.3-0.7, white source, 2 s at 16 kHz.
// Draws whose image geometry is unusable (source essentially on the floor, or
// a floor delay under 3 samples) are redrawn, matching the population the
// thresholds were measured on.
struct SceneDraw {
    SceneSpec scene;
    GroundTruth truth;
};

std::vector<SceneDraw> draw_scenes(std::size_t count) {
    std::mt19937_64 eng(2024);
    auto uni = [&](double a, double b) {
        return a + (b - a) * std::uniform_real_distribution<>()(eng);
    };
    std::vector<SceneDraw> out;
    while (out.size() < count) {
        SceneSpec s;
        s.mic_height = uni(0.5, 1.5);
        s.distance = uni(0.5, 3.0);
        s.azimuth_deg = uni(-180.0, 180.0);
        s.elevation_deg = uni(-20.0, 40.0);
        s.reflection_gain = uni(0.3, 0.7);
        s.duration_s = 2.0;
        s.seed = 100 + out.size();
        const double z_src = s.mic_height + s.distance * std::sin(deg_to_rad(s.elevation_deg));
        if (z_src < 0.1) continue;
        GroundTruth t = image_source(s);
        if (t.tau1 * 16000.0 < 3.0) continue;
        out.push_back({s, t});
    }
    return out;
}

// The analysis configuration all recording-level criteria run at: 0.16 s Hann
// frames with 96% overlap, a permissive attack gate, and a lag search just
// wide enough for the farthest floor delay the population can produce.
AnalysisConfig frozen_config() {
    AnalysisConfig cfg;
    cfg.stft = StftConfig::from_seconds(16000, 0.16, 0.96, WindowKind::hann);
    cfg.estimator.attack_fraction = 0.01;
    cfg.estimator.lag_search_max = 0.053;
    return cfg;
}

double median(std::vector<double> v) {
    REQUIRE(!v.empty());
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

void report_line(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("[acceptance] criterion %d (%s): %s (%s)\n", criterion, name,
                pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("frequency and lag series forms agree", "[acceptance][c1]") {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr std::size_t T = 80;
    constexpr double fs = 16000.0;
    std::mt19937_64 eng(71);
    std::uniform_real_distribution<double> comp(-1.0, 1.0), gain(0.1, 0.9);
    std::uniform_int_distribution<std::size_t> lag(4, T / 4);

    Fft fft(T);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        Vec3 u0{comp(eng), comp(eng), comp(eng)};
        Vec3 u1{comp(eng), comp(eng), comp(eng)};
        if (u0.norm() < 1e-3 || u1.norm() < 1e-3) {
            --k;
            continue;
        }
        u0 = u0.normalized();
        u1 = u1.normalized();
        const double g1 = gain(eng);
        const std::size_t tau = lag(eng);

        std::vector<double> freqs(Fft::half_bins(T));
        for (std::size_t f = 0; f < freqs.size(); ++f) freqs[f] = static_cast<double>(f) * fs / T;
        const auto fdvv = analytic_fdvv(u0, u1, g1, static_cast<double>(tau) / fs, freqs);

        const auto k_terms = static_cast<std::size_t>(
            std::ceil(std::log(1e-12) / std::log(std::abs(g1))));
        const auto series = analytic_tdvv(u0, u1, g1, tau, T, k_terms);

        std::vector<double> lags(T);
        for (std::size_t row = 0; row < 3; ++row) {
            fft.inverse_real(fdvv[row], lags);
            for (std::size_t j = 0; j < T; ++j)
                worst = std::max(worst, std::abs(lags[j] - series[row][j]));
        }
    }
    const double secs = seconds_since(t0);

    const bool pass = worst < 1e-9 && secs < 1.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "max |dft - series| %.2e, %.2f s", worst, secs);
    report_line(1, "series equivalence", pass, detail);
    CHECK(worst < 1e-9);
    CHECK(secs < 1.0);
}

TEST_CASE("synthetic scenes localize end to end", "[acceptance][c2]") {
    const auto scenes = draw_scenes(20);
    const AnalysisConfig cfg = frozen_config();

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> doa_err, range_err;
    long tau_exact = 0, tau_pool = 0;
    for (const auto& [scene, truth] : scenes) {
        const FoaSignal sig = render_foa(scene, truth);
        const RecordingAnalysis a = analyze_recording(sig, cfg);

        doa_err.push_back(a.estimate.u0 ? angle_between_deg(*a.estimate.u0, truth.u0) : 999.0);
        range_err.push_back(a.estimate.d0 ? std::abs(*a.estimate.d0 - truth.d0) / truth.d0
                                          : 999.0);

        const double tau_samples = truth.tau1 * scene.sample_rate;
        double max_attack = 0.0;
        for (const auto& fr : a.frames) max_attack = std::max(max_attack, fr.attack);
        for (const auto& fr : a.frames) {
            if (fr.valid == FrameValidity::silent) continue;
            if (fr.attack < cfg.estimator.attack_fraction * max_attack) continue;
            ++tau_pool;
            if (std::abs(fr.tau1 * scene.sample_rate - tau_samples) <= 0.5 + 1e-9) ++tau_exact;
        }
    }
    const double secs = seconds_since(t0);

    const double doa_med = median(doa_err);
    const double range_med = median(range_err);
    const double tau_frac = tau_pool ? static_cast<double>(tau_exact) / tau_pool : 0.0;
    const bool pass = doa_med < 2.0 && range_med < 0.10 && tau_frac >= 0.90 && secs < 30.0;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "median doa %.3f deg, median range %.1f%%, tau exact %.1f%%, %.1f s",
                  doa_med, 100.0 * range_med, 100.0 * tau_frac, secs);
    report_line(2, "synthetic localization", pass, detail);
    CHECK(doa_med < 2.0);
    CHECK(range_med < 0.10);
    CHECK(tau_frac >= 0.90);
    CHECK(secs < 30.0);
}

TEST_CASE("strong reverberation biases the intensity baseline more", "[acceptance][c3]") {
    auto scenes = draw_scenes(20);
    AnalysisConfig cfg = frozen_config();
    cfg.with_baseline = true;

    std::vector<double> tdvv_err, base_err;
    for (auto& [scene, truth] : scenes) {
        scene.reflection_gain = 0.7;
        truth = image_source(scene);
        const FoaSignal sig = render_foa(scene, truth);
        const RecordingAnalysis a = analyze_recording(sig, cfg);
        tdvv_err.push_back(a.estimate.u0 ? angle_between_deg(*a.estimate.u0, truth.u0) : 999.0);
        base_err.push_back(a.baseline_u0 ? angle_between_deg(*a.baseline_u0, truth.u0) : 999.0);
    }

    const double tdvv_med = median(tdvv_err);
    const double base_med = median(base_err);
    const bool pass = base_med > tdvv_med;
    char detail[128];
    std::snprintf(detail, sizeof detail, "median doa: proposed %.3f deg, baseline %.3f deg",
                  tdvv_med, base_med);
    report_line(3, "baseline bias ordering", pass, detail);
    CHECK(base_med > tdvv_med);
}

TEST_CASE("reports are invariant to input scaling", "[acceptance][c4]") {
    const auto scenes = draw_scenes(1);
    AnalysisConfig cfg = frozen_config();
    cfg.with_baseline = true;

    const FoaSignal sig = render_foa(scenes[0].scene, scenes[0].truth);
    auto report_text = [&](double scale) {
        FoaSignal scaled = sig;
        for (auto& ch : scaled.channels)
            for (double& x : ch) x *= scale;
        const RecordingAnalysis a = analyze_recording(scaled, cfg);
        AnalysisReport r;
        r.fs = sig.sample_rate;
        r.frame_len = a.stft.frame_len;
        r.hop = a.stft.hop;
        r.window = to_string(a.stft.window);
        r.frames_total = a.estimate.frames_total;
        r.frames_used = a.estimate.frames_used;
        r.u0 = a.estimate.u0;
        r.range_m = a.estimate.d0;
        r.baseline_u0 = a.baseline_u0;
        return format_report(r);
    };

    const std::string unit = report_text(1.0);
    const std::string down = report_text(1e-3);
    const std::string up = report_text(1e3);
    const bool pass = unit == down && unit == up;
    char detail[128];
    std::snprintf(detail, sizeof detail, "scaled by 1e-3 and 1e3: reports %s",
                  pass ? "identical" : "differ");
    report_line(4, "scale invariance", pass, detail);
    CHECK(unit == down);
    CHECK(unit == up);
}

TEST_CASE("range geometry round-trips scene truth", "[acceptance][c5]") {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 eng(515);
    std::uniform_real_distribution<double> uh(0.5, 1.5), ud(0.5, 3.0), uaz(-180.0, 180.0),
        uel(-20.0, 40.0);
    int tested = 0;
    double worst = 0.0;
    while (tested < 1000) {
        SceneSpec s;
        s.mic_height = uh(eng);
        s.distance = ud(eng);
        s.azimuth_deg = uaz(eng);
        s.elevation_deg = uel(eng);
        if (s.mic_height + s.distance * std::sin(deg_to_rad(s.elevation_deg)) <= 0.01) continue;
        const GroundTruth t = image_source(s);
        const RangeResult r = range_from_geometry(t.u0, t.u1, t.tau1);
        if (r.validity != FrameValidity::ok) continue;  // rare near-degenerate draws
        ++tested;
        worst = std::max(worst, std::abs(r.d0 - t.d0) / t.d0);
    }
    const double secs = seconds_since(t0);

    const bool pass = worst < 1e-9 && secs < 1.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "worst relative error %.2e over 1000 scenes, %.2f s",
                  worst, secs);
    report_line(5, "range roundtrip", pass, detail);
    CHECK(worst < 1e-9);
    CHECK(secs < 1.0);
}

TEST_CASE("reflection operator is a norm-preserving involution", "[acceptance][c6]") {
    std::mt19937_64 eng(0xace);
    std::uniform_real_distribution<double> comp(-1.0, 1.0);
    double worst_round = 0.0, worst_norm = 0.0;
    for (int k = 0; k < 100000; ++k) {
        Vec3 u{comp(eng), comp(eng), comp(eng)};
        Vec3 v{comp(eng), comp(eng), comp(eng)};
        if (u.norm() < 1e-3 || v.norm() < 1e-3) {
            --k;
            continue;
        }
        u = u.normalized();
        const Vec3 once = reflection_dir(u, v);
        const Vec3 twice = reflection_dir(once, v);
        worst_round = std::max(worst_round, (twice - u).norm());
        worst_norm = std::max(worst_norm, std::abs(once.norm() - 1.0));
    }

    const bool pass = worst_round < 1e-12 && worst_norm < 1e-12;
    char detail[128];
    std::snprintf(detail, sizeof detail, "worst roundtrip %.2e, worst norm drift %.2e",
                  worst_round, worst_norm);
    report_line(6, "reflection involution", pass, detail);
    CHECK(worst_round < 1e-12);
    CHECK(worst_norm < 1e-12);
}

TEST_CASE("converted LOCATA recordings beat the baseline", "[acceptance][c7]") {
    const char* dir = std::getenv("TDVV_LOCATA_DIR");
    if (dir == nullptr || !std::filesystem::is_directory(dir)) {
        std::printf("[acceptance] criterion 7 (locata recordings): SKIP "
                    "(TDVV_LOCATA_DIR not set; see README for the layout)\n");
        std::fflush(stdout);
        SUCCEED();
        return;
    }

    AnalysisConfig cfg = frozen_config();
    cfg.with_baseline = true;
    int recordings = 0, wins = 0, with_range = 0;
    double range_sum = 0.0;
    for (int i = 1; i <= 3; ++i) {
        const std::string stem = std::string(dir) + "/recording" + std::to_string(i);
        if (!std::filesystem::exists(stem + ".wav")) continue;
        ++recordings;
        const WavData wav = wav_read(stem + ".wav");
        REQUIRE(wav.channels.size() == 4);
        FoaSignal sig;
        sig.sample_rate = wav.sample_rate;
        sig.channels = {wav.channels[0], wav.channels[1], wav.channels[2], wav.channels[3]};
        if (wav.sample_rate != 16000) cfg.stft = StftConfig::from_seconds(wav.sample_rate, 0.16, 0.96);
        const RecordingAnalysis a = analyze_recording(sig, cfg);
        const TruthRecord truth = parse_truth_file(stem + ".truth");

        REQUIRE(a.estimate.u0.has_value());
        REQUIRE(a.baseline_u0.has_value());
        const double err = angle_between_deg(*a.estimate.u0, truth.u0);
        const double base = angle_between_deg(*a.baseline_u0, truth.u0);
        if (err < base) ++wins;
        if (a.estimate.d0 && truth.d0) {
            ++with_range;
            range_sum += std::abs(*a.estimate.d0 - *truth.d0);
        }
    }
    REQUIRE(recordings == 3);
    const double mean_range = with_range ? range_sum / with_range : 999.0;
    const bool pass = wins >= 2 && with_range == 3 && mean_range < 0.5;
    char detail[128];
    std::snprintf(detail, sizeof detail, "beats baseline on %d/3, mean range error %.3f m",
                  wins, mean_range);
    report_line(7, "locata recordings", pass, detail);
    CHECK(wins >= 2);
    CHECK(mean_range < 0.5);
}

TEST_CASE("estimates survive 0 dB sensor noise", "[acceptance][c8]") {
    auto scenes = draw_scenes(20);
    const AnalysisConfig cfg = frozen_config();

    std::vector<double> doa_err;
    int with_direction = 0;
    for (auto& [scene, truth] : scenes) {
        scene.noise_snr_db = 0.0;
        const FoaSignal sig = render_foa(scene, truth);
        const RecordingAnalysis a = analyze_recording(sig, cfg);
        with_direction += a.estimate.u0.has_value();
        doa_err.push_back(a.estimate.u0 ? angle_between_deg(*a.estimate.u0, truth.u0) : 999.0);
    }

    const double doa_med = median(doa_err);
    const bool pass = with_direction == 20 && doa_med < 5.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "direction on %d/20 scenes, median doa %.3f deg",
                  with_direction, doa_med);
    report_line(8, "noise gate sanity", pass, detail);
    CHECK(with_direction == 20);
    CHECK(doa_med < 5.0);
}
