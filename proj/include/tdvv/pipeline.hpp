#pragma once

// Whole-recording analysis: STFT, noise tracking, per-frame estimation,
// aggregation, and optionally the active-intensity reference DoA. This is the
// one place the stages are wired together; tools stay thin wrappers.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tdvv/estimator.hpp"
#include "tdvv/foa.hpp"
#include "tdvv/noise.hpp"
#include "tdvv/velocity.hpp"

namespace tdvv {

struct AnalysisConfig {
    StftConfig stft;  // frame_len 0 means "defaults for the input rate"
    EstimatorConfig estimator;
    NoiseConfig noise;
    bool with_baseline = false;
};

struct RecordingAnalysis {
    StftConfig stft;  // resolved values actually used
    std::size_t frame_count = 0;
    std::size_t bin_count = 0;
    std::vector<FrameEstimate> frames;        // one per STFT frame
    std::vector<std::vector<double>> snr_db;  // per frame, per bin
    RecordingEstimate estimate;
    std::optional<Vec3> baseline_u0;  // only when requested and obtainable
};

inline RecordingAnalysis analyze_recording(const FoaSignal& signal, AnalysisConfig cfg = {}) {
    if (cfg.stft.frame_len == 0) cfg.stft = StftConfig::defaults(signal.sample_rate);
    cfg.estimator.validate();
    cfg.noise.validate();

    const SpectralFrames spectra = stft_analyze(signal, cfg.stft);

    RecordingAnalysis out;
    out.stft = cfg.stft;
    out.frame_count = spectra.frame_count;
    out.bin_count = spectra.bin_count;
    out.frames.reserve(spectra.frame_count);
    out.snr_db.reserve(spectra.frame_count);

    NoiseTracker tracker(spectra.bin_count, cfg.noise);
    std::vector<double> w_power(spectra.bin_count);
    for (std::size_t m = 0; m < spectra.frame_count; ++m) {
        const auto w = spectra.channel(m, kW);
        for (std::size_t f = 0; f < spectra.bin_count; ++f) w_power[f] = std::norm(w[f]);
        out.snr_db.push_back(tracker.update_and_snr(w_power));
        out.frames.push_back(estimate_frame(spectra, m, out.snr_db.back(), cfg.estimator));
    }

    out.estimate = aggregate(out.frames, cfg.estimator);

    if (cfg.with_baseline) {
        std::vector<FdvvFrame> fdvv_frames;
        fdvv_frames.reserve(spectra.frame_count);
        for (std::size_t m = 0; m < spectra.frame_count; ++m)
            fdvv_frames.push_back(
                suppress_low_snr(compute_fdvv(spectra, m, cfg.estimator.eps_w), out.snr_db[m]));
        try {
            out.baseline_u0 = baseline_active_doa(fdvv_frames);
        } catch (const std::runtime_error&) {
            // silent recording: no reference direction either
        }
    }
    return out;
}

}  // namespace tdvv
