// Command-line front end: analyze recordings, simulate scenes, evaluate
// reports against ground truth. All heavy lifting lives in the headers; this
// file is argument plumbing, file formats, and exit codes.
//
// Exit codes: 0 ok, 2 input format error, 3 no usable frames, 4 config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdvv/pipeline.hpp"
#include "tdvv/report.hpp"
#include "tdvv/scene_io.hpp"
#include "tdvv/simulator.hpp"
#include "tdvv/wav.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputFormat = 2;
constexpr int kExitNoUsableFrames = 3;
constexpr int kExitConfig = 4;

int fail_input(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return kExitInputFormat;
}

int fail_config(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return kExitConfig;
}

struct AnalyzeArgs {
    std::string input;
    double frame_sec = 0.005;
    double overlap = 0.95;
    int fs = 16000;
    bool acn = false;
    bool baseline = false;
    std::string frames_csv;
    std::string tdvv_dump;
};

tdvv::FoaSignal foa_from_wav(const tdvv::WavData& wav, bool acn) {
    tdvv::FoaSignal sig;
    sig.sample_rate = wav.sample_rate;
    if (acn) {
        // ACN first-order ordering is W,Y,Z,X; internal ordering is W,X,Y,Z.
        sig.channels = {wav.channels[0], wav.channels[3], wav.channels[1], wav.channels[2]};
    } else {
        sig.channels = {wav.channels[0], wav.channels[1], wav.channels[2], wav.channels[3]};
    }
    return sig;
}

void write_frames_csv(const std::string& path, const tdvv::RecordingAnalysis& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "frame,validity,attack,u0x,u0y,u0z,u1x,u1y,u1z,tau1_s,d0_m\n";
    char buf[256];
    for (std::size_t m = 0; m < a.frames.size(); ++m) {
        const auto& fr = a.frames[m];
        if (fr.valid == tdvv::FrameValidity::silent) {
            std::snprintf(buf, sizeof buf, "%zu,%s,,,,,,,,,\n", m, to_string(fr.valid));
            out << buf;
            continue;
        }
        std::snprintf(buf, sizeof buf,
                      "%zu,%s,%.9e,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9e,%.6f\n", m,
                      to_string(fr.valid), fr.attack, fr.u0.x, fr.u0.y, fr.u0.z, fr.u1.x,
                      fr.u1.y, fr.u1.z, fr.tau1, fr.d0);
        out << buf;
    }
}

// Per-frame suppressed TDVV before any plane weighting, one row per lag.
void write_tdvv_dump(const std::string& path, const tdvv::FoaSignal& sig,
                     const tdvv::RecordingAnalysis& a, const tdvv::EstimatorConfig& est) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const tdvv::SpectralFrames spectra = stft_analyze(sig, a.stft);
    out << "frame,lag,vx,vy,vz\n";
    char buf[256];
    for (std::size_t m = 0; m < spectra.frame_count; ++m) {
        const tdvv::FdvvFrame fdvv =
            suppress_low_snr(compute_fdvv(spectra, m, est.eps_w), a.snr_db[m]);
        if (fdvv.silent()) continue;
        const tdvv::TdvvFrame tdvv_frame = compute_tdvv(fdvv);
        for (std::size_t j = 0; j < tdvv_frame.lags(); ++j) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.9e,%.9e,%.9e\n", m, j,
                          tdvv_frame.vv[0][j], tdvv_frame.vv[1][j], tdvv_frame.vv[2][j]);
            out << buf;
        }
    }
}

int run_analyze(const AnalyzeArgs& args) {
    if (args.frame_sec <= 0.0) return fail_config("frame-sec must be > 0");
    if (args.overlap < 0.0 || args.overlap >= 1.0) return fail_config("overlap must be in [0,1)");
    if (args.fs <= 0) return fail_config("fs must be > 0");

    tdvv::WavData wav;
    try {
        wav = tdvv::wav_read(args.input);
    } catch (const std::exception& e) {
        return fail_input(e.what());
    }
    if (wav.channels.size() != 4)
        return fail_input("expected 4 channels, got " + std::to_string(wav.channels.size()));
    if (wav.sample_rate != args.fs)
        return fail_input("sample-rate mismatch: file is " + std::to_string(wav.sample_rate) +
                          " Hz, expected " + std::to_string(args.fs) +
                          " Hz (no resampling is performed)");

    tdvv::AnalysisConfig cfg;
    cfg.stft = tdvv::StftConfig::from_seconds(args.fs, args.frame_sec, args.overlap);
    cfg.with_baseline = args.baseline;

    const tdvv::FoaSignal sig = foa_from_wav(wav, args.acn);
    tdvv::RecordingAnalysis analysis;
    try {
        analysis = tdvv::analyze_recording(sig, cfg);
    } catch (const std::invalid_argument& e) {
        // covers signals shorter than one frame and bad derived configs
        return fail_input(e.what());
    }

    tdvv::AnalysisReport report;
    report.fs = args.fs;
    report.frame_len = analysis.stft.frame_len;
    report.hop = analysis.stft.hop;
    report.window = tdvv::to_string(analysis.stft.window);
    report.frames_total = analysis.estimate.frames_total;
    report.frames_used = analysis.estimate.frames_used;
    report.u0 = analysis.estimate.u0;
    report.range_m = analysis.estimate.d0;
    report.baseline_u0 = analysis.baseline_u0;
    std::fputs(tdvv::format_report(report).c_str(), stdout);

    try {
        if (!args.frames_csv.empty()) write_frames_csv(args.frames_csv, analysis);
        if (!args.tdvv_dump.empty()) write_tdvv_dump(args.tdvv_dump, sig, analysis, cfg.estimator);
    } catch (const std::exception& e) {
        return fail_input(e.what());
    }
    return report.u0 ? kExitOk : kExitNoUsableFrames;
}

std::string truth_path_for(const std::string& out_path) {
    const auto slash = out_path.find_last_of('/');
    const auto dot = out_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out_path + ".truth";
    return out_path.substr(0, dot) + ".truth";
}

int run_simulate(const std::string& scene_path, const std::string& out_path,
                 const std::optional<std::uint64_t>& seed) {
    tdvv::SceneSpec scene;
    try {
        scene = tdvv::parse_scene_file(scene_path);
        if (seed) scene.seed = *seed;  // flags override the config file
        scene.validate();
    } catch (const std::exception& e) {
        return fail_config(e.what());
    }

    try {
        const tdvv::GroundTruth truth = tdvv::image_source(scene);
        if (tdvv::reflected_gain_sum(truth) >= 1.0)
            std::fprintf(stderr,
                         "warning: reflected gain sum %.3f >= 1, reflection series will not "
                         "converge\n",
                         tdvv::reflected_gain_sum(truth));

        const tdvv::FoaSignal sig = tdvv::render_foa(scene, truth);
        tdvv::WavData wav;
        wav.sample_rate = sig.sample_rate;
        wav.channels.assign(sig.channels.begin(), sig.channels.end());
        tdvv::wav_write_float32(out_path, wav);

        std::ofstream truth_out(truth_path_for(out_path));
        if (!truth_out) return fail_input("cannot open " + truth_path_for(out_path));
        truth_out << tdvv::format_truth(truth);
    } catch (const std::invalid_argument& e) {
        return fail_config(e.what());
    } catch (const std::exception& e) {
        return fail_input(e.what());
    }
    return kExitOk;
}

int run_evaluate(const std::string& report_path, const std::string& truth_path) {
    try {
        const tdvv::AnalysisReport report = tdvv::parse_report_file(report_path);
        const tdvv::TruthRecord truth = tdvv::parse_truth_file(truth_path);
        const tdvv::EvalMetrics m = tdvv::evaluate_report(report, truth);
        std::printf("angular_error_deg = %.6f\n", m.angular_error_deg);
        if (m.range_error_m) std::printf("range_error_m = %.6f\n", *m.range_error_m);
        if (m.baseline_angular_error_deg)
            std::printf("baseline_angular_error_deg = %.6f\n", *m.baseline_angular_error_deg);
    } catch (const std::exception& e) {
        return fail_input(e.what());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TDVV source localization toolkit"};
    app.require_subcommand(1);

    AnalyzeArgs aa;
    CLI::App* analyze = app.add_subcommand("analyze", "Estimate DoA and range from a 4-channel FOA WAV");
    analyze->add_option("input", aa.input, "4-channel WAV file")->required();
    analyze->add_option("--frame-sec", aa.frame_sec, "analysis frame length in seconds");
    analyze->add_option("--overlap", aa.overlap, "frame overlap fraction in [0,1)");
    analyze->add_option("--fs", aa.fs, "expected sample rate in Hz");
    analyze->add_flag("--acn", aa.acn, "input channel order is ACN (W,Y,Z,X)");
    analyze->add_option("--frames-csv", aa.frames_csv, "write the per-frame table here");
    analyze->add_option("--tdvv-dump", aa.tdvv_dump, "write per-frame TDVV columns here");
    analyze->add_flag("--baseline", aa.baseline, "also report the active-intensity DoA");

    std::string scene_path, sim_out;
    std::optional<std::uint64_t> sim_seed;
    CLI::App* simulate = app.add_subcommand("simulate", "Render a scene to WAV plus ground truth");
    simulate->add_option("scene", scene_path, "scene config file")->required();
    simulate->add_option("-o,--output", sim_out, "output WAV path")->required();
    simulate->add_option("--seed", sim_seed, "override the scene's random seed");

    std::string report_path, truth_path;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Compare a report against ground truth");
    evaluate->add_option("report", report_path, "analysis report file")->required();
    evaluate->add_option("truth", truth_path, "ground-truth file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (analyze->parsed()) return run_analyze(aa);
    if (simulate->parsed()) return run_simulate(scene_path, sim_out, sim_seed);
    return run_evaluate(report_path, truth_path);
}
