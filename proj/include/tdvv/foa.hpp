#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdvv/fft.hpp"

namespace tdvv {

/// FOA channel indices, SID ordering with SN3D normalization.
enum FoaChannel : std::size_t { kW = 0, kX = 1, kY = 2, kZ = 3 };

/// Four-channel first-order Ambisonics recording. W is the pressure
/// channel, X/Y/Z the pressure-gradient channels along the axes.
struct FoaSignal {
    int sample_rate = 0;
    std::array<std::vector<double>, 4> channels;

    std::size_t length() const { return channels[0].size(); }

    void validate() const {
        if (sample_rate <= 0) throw std::invalid_argument("foa: sample_rate must be positive");
        const std::size_t n = channels[0].size();
        if (n == 0) throw std::invalid_argument("foa: empty signal");
        for (const auto& ch : channels)
            if (ch.size() != n) throw std::invalid_argument("foa: channel length mismatch");
    }
};

enum class WindowKind { rectangular, hann };

inline const char* to_string(WindowKind w) {
    return w == WindowKind::hann ? "hann" : "rectangular";
}

inline WindowKind window_from_string(const std::string& s) {
    if (s == "hann") return WindowKind::hann;
    if (s == "rectangular") return WindowKind::rectangular;
    throw std::invalid_argument("unknown window: " + s);
}

/// Analysis taper. The Hann taper is sampled at half-sample offsets so every
/// value is strictly positive, keeping all samples of a frame in play.
inline std::vector<double> make_window(WindowKind kind, std::size_t len) {
    std::vector<double> w(len, 1.0);
    if (kind == WindowKind::hann) {
        for (std::size_t t = 0; t < len; ++t) {
            const double phase = 2.0 * kPi * (static_cast<double>(t) + 0.5) / static_cast<double>(len);
            w[t] = 0.5 * (1.0 - std::cos(phase));
        }
    }
    return w;
}

struct StftConfig {
    std::size_t frame_len = 0;
    std::size_t hop = 0;
    WindowKind window = WindowKind::hann;

    /// 0.005 s frames with 95% overlap: 80 samples / hop 4 at 16 kHz.
    static StftConfig defaults(int sample_rate) {
        return from_seconds(sample_rate, 0.005, 0.95);
    }

    static StftConfig from_seconds(int sample_rate, double frame_sec, double overlap,
                                   WindowKind window = WindowKind::hann) {
        StftConfig c;
        c.frame_len = static_cast<std::size_t>(std::lround(frame_sec * sample_rate));
        const auto kept = static_cast<std::size_t>(std::lround(overlap * static_cast<double>(c.frame_len)));
        c.hop = c.frame_len > kept ? c.frame_len - kept : 1;
        c.window = window;
        return c;
    }

    void validate() const {
        if (frame_len == 0) throw std::invalid_argument("stft: frame_len must be positive");
        if (hop == 0 || hop > frame_len)
            throw std::invalid_argument("stft: hop must satisfy 0 < hop <= frame_len");
    }
};

/// One-sided spectra of the four windowed FOA channels, all frames.
/// Frame m covers samples [m*hop, m*hop + frame_len).
struct SpectralFrames {
    int sample_rate = 0;
    std::size_t frame_len = 0;
    std::size_t hop = 0;
    std::size_t frame_count = 0;
    std::size_t bin_count = 0;
    std::vector<std::complex<double>> data;  // frame-major, then channel, then bin

    std::span<const std::complex<double>> channel(std::size_t frame, std::size_t ch) const {
        return {data.data() + (frame * 4 + ch) * bin_count, bin_count};
    }
    std::span<std::complex<double>> channel(std::size_t frame, std::size_t ch) {
        return {data.data() + (frame * 4 + ch) * bin_count, bin_count};
    }

    double bin_freq_hz(std::size_t f) const {
        return static_cast<double>(f) * sample_rate / static_cast<double>(frame_len);
    }
};

/// Window each frame of each channel and transform it. The signal must be at
/// least one frame long; frame_count = floor((len - frame_len)/hop) + 1.
inline SpectralFrames stft_analyze(const FoaSignal& signal, const StftConfig& config) {
    signal.validate();
    config.validate();
    const std::size_t len = signal.length();
    if (len < config.frame_len) throw std::invalid_argument("stft: input too short");

    SpectralFrames out;
    out.sample_rate = signal.sample_rate;
    out.frame_len = config.frame_len;
    out.hop = config.hop;
    out.frame_count = (len - config.frame_len) / config.hop + 1;
    out.bin_count = Fft::half_bins(config.frame_len);
    out.data.resize(out.frame_count * 4 * out.bin_count);

    const std::vector<double> window = make_window(config.window, config.frame_len);
    Fft fft(config.frame_len);
    std::vector<double> frame(config.frame_len);
    for (std::size_t m = 0; m < out.frame_count; ++m) {
        const std::size_t start = m * config.hop;
        for (std::size_t ch = 0; ch < 4; ++ch) {
            const double* src = signal.channels[ch].data() + start;
            for (std::size_t t = 0; t < config.frame_len; ++t) frame[t] = src[t] * window[t];
            fft.forward_real(frame, out.channel(m, ch));
        }
    }
    return out;
}

}  // namespace tdvv
