#pragma once

// Image-source scene generator with exact ground truth, plus closed-form
// FDVV/TDVV oracles for the one-reflection model. The renderer realizes a
// small set of plane-wave paths over a flat reflecting plane at z = 0 with
// the microphone at (0, 0, mic_height).

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdvv/fft.hpp"
#include "tdvv/foa.hpp"
#include "tdvv/vec3.hpp"

namespace tdvv {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

enum class GainMode { fixed, inverse_distance };

struct SignalSpec {
    enum class Kind { white, impulse_train, ar_speechlike };
    Kind kind = Kind::white;
    std::size_t period = 800;  // impulse_train spacing in samples
};

inline SignalSpec::Kind signal_kind_from_string(const std::string& s) {
    if (s == "white") return SignalSpec::Kind::white;
    if (s == "impulse_train") return SignalSpec::Kind::impulse_train;
    if (s == "ar_speechlike") return SignalSpec::Kind::ar_speechlike;
    throw std::invalid_argument("unknown signal descriptor: " + s);
}

inline std::string to_string(SignalSpec::Kind k) {
    switch (k) {
        case SignalSpec::Kind::white: return "white";
        case SignalSpec::Kind::impulse_train: return "impulse_train";
        case SignalSpec::Kind::ar_speechlike: return "ar_speechlike";
    }
    return "?";
}

// Additional reflector beyond the floor path; delay_s is relative to the
// direct-path arrival.
struct Reflector {
    Vec3 dir;
    double gain = 0.0;
    double delay_s = 0.0;
};

struct SceneSpec {
    double mic_height = 1.0;   // m above the reflecting plane
    double azimuth_deg = 0.0;  // source direction seen from the mic
    double elevation_deg = 0.0;
    double distance = 2.0;  // m
    GainMode gain_mode = GainMode::fixed;
    double reflection_gain = 0.5;  // floor path, ignored in inverse_distance mode
    std::vector<Reflector> extra_reflectors;
    std::optional<double> noise_snr_db;  // white sensor noise, level vs the W channel
    SignalSpec source_signal;
    double duration_s = 2.0;
    int sample_rate = 16000;
    std::uint64_t seed = 0;

    void validate() const {
        if (distance <= 0.0) throw std::invalid_argument("scene: distance must be > 0");
        if (mic_height <= 0.0) throw std::invalid_argument("scene: mic_height must be > 0");
        if (sample_rate <= 0) throw std::invalid_argument("scene: sample_rate must be > 0");
        if (duration_s * sample_rate < 1.0)
            throw std::invalid_argument("scene: duration shorter than one sample");
        if (gain_mode == GainMode::fixed && std::abs(reflection_gain) >= 1.0)
            throw std::invalid_argument("scene: |reflection_gain| must be < 1");
        for (const auto& r : extra_reflectors) {
            if (r.delay_s <= 0.0)
                throw std::invalid_argument("scene: reflector delay must be > 0");
            if (std::abs(r.dir.norm() - 1.0) > 1e-6)
                throw std::invalid_argument("scene: reflector direction must be unit length");
        }
    }
};

// One rendered propagation path; delay_s is absolute (from emission).
struct PathInfo {
    Vec3 dir;
    double gain = 0.0;
    double delay_s = 0.0;
};

struct GroundTruth {
    Vec3 u0, u1;
    double d0 = 0.0, d1 = 0.0;
    double tau1 = 0.0;      // s
    double phi0_deg = 0.0;  // elevations of u0 and u1
    double phi1_deg = 0.0;
    double g1 = 0.0;              // effective floor-path gain
    std::vector<PathInfo> paths;  // direct first, then floor, then extras
};

// Sum of reflected-path gain magnitudes; the geometric series behind the
// TDVV expansion only converges cleanly when this stays below 1.
inline double reflected_gain_sum(const GroundTruth& t) {
    double s = 0.0;
    for (std::size_t i = 1; i < t.paths.size(); ++i) s += std::abs(t.paths[i].gain);
    return s;
}

// Mirror the source through z = 0 and derive both path geometries.
inline GroundTruth image_source(const SceneSpec& scene, double c = kSpeedOfSound) {
    scene.validate();
    GroundTruth t;
    t.u0 = unit_from_angles_deg(scene.azimuth_deg, scene.elevation_deg);
    t.d0 = scene.distance;
    const Vec3 src_rel = t.d0 * t.u0;
    const double src_z_room = scene.mic_height + src_rel.z;
    if (src_z_room <= 0.0)
        throw std::invalid_argument("image_source: invalid geometry (source not above the plane)");

    // Image position relative to the mic: same horizontal offset, mirrored height.
    const Vec3 img_rel{src_rel.x, src_rel.y, -src_z_room - scene.mic_height};
    t.d1 = img_rel.norm();
    t.u1 = img_rel / t.d1;
    t.tau1 = (t.d1 - t.d0) / c;
    t.phi0_deg = elevation_deg(t.u0);
    t.phi1_deg = elevation_deg(t.u1);
    t.g1 = scene.gain_mode == GainMode::inverse_distance ? t.d0 / t.d1 : scene.reflection_gain;

    t.paths.push_back({t.u0, 1.0, t.d0 / c});
    t.paths.push_back({t.u1, t.g1, t.d1 / c});
    for (const auto& r : scene.extra_reflectors)
        t.paths.push_back({r.dir.normalized(), r.gain, t.d0 / c + r.delay_s});
    return t;
}

namespace detail {

// Deterministic normal deviates: fixed engine plus explicit Box-Muller, so
// seeded renders are reproducible regardless of the standard library's
// distribution internals.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ull;
        for (int i = 0; i < 8; ++i) next_u64();  // scramble low-entropy seeds
    }

    double uniform01() {  // (0, 1]
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double gauss() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double a = 2.0 * kPi * uniform01();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace detail

inline std::vector<double> generate_signal(const SignalSpec& spec, double duration_s, int fs,
                                           std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    if (n < 1) throw std::invalid_argument("generate_signal: duration shorter than one sample");
    std::vector<double> out(n, 0.0);
    switch (spec.kind) {
        case SignalSpec::Kind::white: {
            detail::GaussianRng rng(seed);
            for (auto& v : out) v = rng.gauss();
            break;
        }
        case SignalSpec::Kind::impulse_train: {
            if (spec.period < 1)
                throw std::invalid_argument("generate_signal: impulse period must be >= 1");
            for (std::size_t t = 0; t < n; t += spec.period) out[t] = 1.0;
            break;
        }
        case SignalSpec::Kind::ar_speechlike: {
            // Order-2 resonator near 300 Hz driven by white noise, then
            // normalized to unit RMS. Crude but enough spectral tilt to
            // exercise the pipeline with a speech-shaped spectrum.
            detail::GaussianRng rng(seed);
            const double r = 0.97;
            const double w0 = 2.0 * kPi * 300.0 / fs;
            const double a1 = 2.0 * r * std::cos(w0);
            const double a2 = -r * r;
            double y1 = 0.0, y2 = 0.0;
            for (auto& v : out) {
                const double y = a1 * y1 + a2 * y2 + rng.gauss();
                v = y;
                y2 = y1;
                y1 = y;
            }
            double power = 0.0;
            for (double v : out) power += v * v;
            const double rms = std::sqrt(power / static_cast<double>(n));
            if (rms > 0.0)
                for (auto& v : out) v /= rms;
            break;
        }
    }
    return out;
}

// Circular fractional delay via a phase ramp on the half spectrum. Exact for
// periodic content; for general signals the shift wraps around the ends,
// which reads as the recording having started mid-stream.
inline std::vector<double> circular_delay(const std::vector<double>& x, double delay_samples) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("circular_delay: empty input");
    Fft fft(n);
    std::vector<std::complex<double>> half(Fft::half_bins(n));
    fft.forward_real(x, half);
    for (std::size_t k = 0; k < half.size(); ++k) {
        const double phase = -2.0 * kPi * static_cast<double>(k) * delay_samples /
                             static_cast<double>(n);
        half[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    std::vector<double> out(n);
    fft.inverse_real(half, out);
    return out;
}

// Sum plane-wave path contributions into a 4-channel FOA buffer:
// W += gain * s(t - delay), (X, Y, Z) += gain * s(t - delay) * dir.
// Delays are circular (see circular_delay); one forward transform plus four
// inverse transforms regardless of path count.
inline FoaSignal encode_paths(const std::vector<double>& src,
                              const std::vector<PathInfo>& paths, int fs) {
    const std::size_t n = src.size();
    if (n == 0) throw std::invalid_argument("encode_paths: empty source");
    if (fs <= 0) throw std::invalid_argument("encode_paths: sample rate must be > 0");
    Fft fft(n);
    const std::size_t half = Fft::half_bins(n);
    std::vector<std::complex<double>> spec(half);
    fft.forward_real(src, spec);

    std::array<std::vector<std::complex<double>>, 4> acc;
    for (auto& a : acc) a.assign(half, {0.0, 0.0});
    for (const auto& p : paths) {
        if (p.gain == 0.0) continue;
        const double delay_samples = p.delay_s * fs;
        for (std::size_t k = 0; k < half; ++k) {
            const double phase = -2.0 * kPi * static_cast<double>(k) * delay_samples /
                                 static_cast<double>(n);
            const std::complex<double> term =
                spec[k] * std::complex<double>(std::cos(phase), std::sin(phase)) * p.gain;
            acc[kW][k] += term;
            acc[kX][k] += term * p.dir.x;
            acc[kY][k] += term * p.dir.y;
            acc[kZ][k] += term * p.dir.z;
        }
    }

    FoaSignal out;
    out.sample_rate = fs;
    for (std::size_t ch = 0; ch < 4; ++ch) {
        out.channels[ch].resize(n);
        fft.inverse_real(acc[ch], out.channels[ch]);
    }
    return out;
}

// Render the full scene: source signal through every path, plus optional
// per-channel white sensor noise scaled against the W channel's RMS.
inline FoaSignal render_foa(const SceneSpec& scene, const GroundTruth& truth) {
    scene.validate();
    const auto src =
        generate_signal(scene.source_signal, scene.duration_s, scene.sample_rate, scene.seed);
    FoaSignal out = encode_paths(src, truth.paths, scene.sample_rate);

    if (scene.noise_snr_db) {
        double w_power = 0.0;
        for (double v : out.channels[kW]) w_power += v * v;
        const double w_rms = std::sqrt(w_power / static_cast<double>(out.length()));
        const double sigma = w_rms * std::pow(10.0, -*scene.noise_snr_db / 20.0);
        detail::GaussianRng rng(scene.seed ^ 0x51ed270b5ee2c2aaull);
        for (auto& ch : out.channels)
            for (auto& v : ch) v += sigma * rng.gauss();
    }
    return out;
}

// Closed-form FDVV of the one-reflection model on the given bin frequencies:
// V(f) = (u0 + g1 e^{-j 2 pi f tau1} u1) / (1 + g1 e^{-j 2 pi f tau1}).
inline std::array<std::vector<std::complex<double>>, 3> analytic_fdvv(
    const Vec3& u0, const Vec3& u1, double g1, double tau1_s,
    const std::vector<double>& freqs_hz) {
    if (std::abs(g1) >= 1.0) throw std::invalid_argument("analytic_fdvv: |g1| must be < 1");
    std::array<std::vector<std::complex<double>>, 3> v;
    for (auto& row : v) row.resize(freqs_hz.size());
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        const double phase = -2.0 * kPi * freqs_hz[i] * tau1_s;
        const std::complex<double> z =
            g1 * std::complex<double>(std::cos(phase), std::sin(phase));
        const std::complex<double> denom = 1.0 + z;
        v[0][i] = (u0.x + z * u1.x) / denom;
        v[1][i] = (u0.y + z * u1.y) / denom;
        v[2][i] = (u0.z + z * u1.z) / denom;
    }
    return v;
}

// General superposition form over arbitrary paths (delays may be absolute;
// a delay common to all paths cancels in the ratio). The caller is
// responsible for gain choices that keep the denominator away from zero.
inline std::array<std::vector<std::complex<double>>, 3> analytic_fdvv_paths(
    const std::vector<PathInfo>& paths, const std::vector<double>& freqs_hz) {
    std::array<std::vector<std::complex<double>>, 3> v;
    for (auto& row : v) row.resize(freqs_hz.size());
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        std::complex<double> num_x, num_y, num_z, denom;
        for (const auto& p : paths) {
            const double phase = -2.0 * kPi * freqs_hz[i] * p.delay_s;
            const std::complex<double> a =
                p.gain * std::complex<double>(std::cos(phase), std::sin(phase));
            num_x += a * p.dir.x;
            num_y += a * p.dir.y;
            num_z += a * p.dir.z;
            denom += a;
        }
        v[0][i] = num_x / denom;
        v[1][i] = num_y / denom;
        v[2][i] = num_z / denom;
    }
    return v;
}

// Truncated delta-train expansion of the one-reflection TDVV on a circular
// lag grid of T samples: column 0 starts at u0, and term k of the series
// adds (-g1)^k (u0 - u1) at lag (k * tau1) mod T.
inline std::array<std::vector<double>, 3> analytic_tdvv(const Vec3& u0, const Vec3& u1,
                                                        double g1, std::size_t tau1_samples,
                                                        std::size_t T, std::size_t k_terms) {
    if (std::abs(g1) >= 1.0) throw std::invalid_argument("analytic_tdvv: |g1| must be < 1");
    if (tau1_samples < 1) throw std::invalid_argument("analytic_tdvv: tau1 must be >= 1 sample");
    if (T < 1) throw std::invalid_argument("analytic_tdvv: T must be >= 1");
    std::array<std::vector<double>, 3> v;
    for (auto& row : v) row.assign(T, 0.0);
    v[0][0] = u0.x;
    v[1][0] = u0.y;
    v[2][0] = u0.z;
    const Vec3 diff = u0 - u1;
    double coef = 1.0;
    for (std::size_t k = 1; k <= k_terms; ++k) {
        coef *= -g1;
        const std::size_t idx = (k * tau1_samples) % T;
        v[0][idx] += coef * diff.x;
        v[1][idx] += coef * diff.y;
        v[2][idx] += coef * diff.z;
    }
    return v;
}

}  // namespace tdvv
