#pragma once

// Per-frame source estimation from TDVV lag structure: DoA from the lag-0
// column, reflection delay from the dominant later column, reflection
// direction by mirroring, range from the elevation geometry. Frames are then
// gated by attack score and reduced to one per-recording estimate. The
// broadband active-intensity baseline lives here too.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdvv/foa.hpp"
#include "tdvv/vec3.hpp"
#include "tdvv/velocity.hpp"

namespace tdvv {

struct EstimatorConfig {
    double c = 343.0;              // m/s
    double range_min = 0.2;        // m
    double range_max = 5.0;        // m
    double attack_fraction = 0.9;  // keep frames with attack >= fraction * max
    std::size_t max_weight_iters = 5;
    double doa_converge_deg = 1.0;
    double lag_search_max = 0.5;  // search lags in [1, lag_search_max * T)
    double attack_eps = 1e-9;
    double eps_w = 1e-6;    // relative pressure floor for the FDVV ratio
    double eps_im = 1e-12;  // active-bin guard in the plane weighting

    void validate() const {
        if (c <= 0.0) throw std::invalid_argument("estimator: c must be > 0");
        if (!(range_min > 0.0 && range_min < range_max))
            throw std::invalid_argument("estimator: need 0 < range_min < range_max");
        if (!(attack_fraction > 0.0 && attack_fraction <= 1.0))
            throw std::invalid_argument("estimator: attack_fraction must be in (0,1]");
        if (!(lag_search_max > 0.0 && lag_search_max <= 1.0))
            throw std::invalid_argument("estimator: lag_search_max must be in (0,1]");
        if (attack_eps <= 0.0) throw std::invalid_argument("estimator: attack_eps must be > 0");
    }
};

enum class FrameValidity { ok, silent, range_out_of_bounds, degenerate_geometry, low_attack };

inline const char* to_string(FrameValidity v) {
    switch (v) {
        case FrameValidity::ok: return "ok";
        case FrameValidity::silent: return "silent";
        case FrameValidity::range_out_of_bounds: return "range_out_of_bounds";
        case FrameValidity::degenerate_geometry: return "degenerate_geometry";
        case FrameValidity::low_attack: return "low_attack";
    }
    return "?";
}

struct FrameEstimate {
    Vec3 u0{};
    Vec3 u1{};
    double tau1 = 0.0;   // s
    double d0 = 0.0;     // m
    double attack = 0.0;
    FrameValidity valid = FrameValidity::silent;
};

struct RecordingEstimate {
    std::optional<Vec3> u0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    std::optional<double> d0;
    std::size_t frames_used = 0;
    std::size_t frames_total = 0;
};

inline Vec3 doa_from_tdvv(const TdvvFrame& tdvv) {
    const Vec3 c0 = tdvv.col(0);
    const double n = c0.norm();
    if (n == 0.0) throw std::runtime_error("doa_from_tdvv: silent frame");
    return c0 / n;
}

// Dominant later lag: argmax of column norms over j in [1, lag_search_max*T),
// ties resolved toward the smaller lag. The upper half of the circular lag
// axis only mirrors the lower half, so it is excluded by default.
inline std::pair<double, std::size_t> tau_from_tdvv(const TdvvFrame& tdvv,
                                                    const EstimatorConfig& cfg = {}) {
    const std::size_t T = tdvv.lags();
    if (T < 3) throw std::invalid_argument("tau_from_tdvv: frame too short");
    const auto j_end = static_cast<std::size_t>(
        std::floor(cfg.lag_search_max * static_cast<double>(T)));
    double best = 0.0;
    std::size_t j_max = 0;
    for (std::size_t j = 1; j < j_end; ++j) {
        const double n = tdvv.col_norm(j);
        if (n > best) {
            best = n;
            j_max = j;
        }
    }
    if (j_max == 0) throw std::runtime_error("tau_from_tdvv: no reflection detected");
    return {static_cast<double>(j_max) / tdvv.sample_rate, j_max};
}

// Mirror u0 across the plane orthogonal to v: u1 = u0 - 2 (u0 . v) v / |v|^2.
// A Householder reflection, so norms are preserved and applying it twice
// returns the input.
inline Vec3 reflection_dir(const Vec3& u0, const Vec3& v_col) {
    const double n2 = v_col.norm2();
    if (n2 == 0.0) throw std::runtime_error("reflection_dir: degenerate reflection column");
    return u0 - (2.0 * u0.dot(v_col) / n2) * v_col;
}

struct RangeResult {
    double d0 = 0.0;
    FrameValidity validity = FrameValidity::ok;
};

// d0 = tau1 c / (cos(phi0)/cos(phi1) - 1) with phi = elevation from the
// xy-plane. Near-equal elevations or an upward-pointing mirror direction
// make the formula unstable and are flagged instead of returned.
inline RangeResult range_from_geometry(const Vec3& u0, const Vec3& u1, double tau1,
                                       const EstimatorConfig& cfg = {}) {
    const double cos0 = std::sqrt(u0.x * u0.x + u0.y * u0.y) / u0.norm();
    const double cos1 = std::sqrt(u1.x * u1.x + u1.y * u1.y) / u1.norm();
    if (cos1 < 1e-12) return {0.0, FrameValidity::degenerate_geometry};
    const double denom = cos0 / cos1 - 1.0;
    if (std::abs(denom) < 1e-6) return {0.0, FrameValidity::degenerate_geometry};
    const double d0 = tau1 * cfg.c / denom;
    if (d0 < 0.0) return {d0, FrameValidity::degenerate_geometry};
    if (d0 < cfg.range_min || d0 > cfg.range_max)
        return {d0, FrameValidity::range_out_of_bounds};
    return {d0, FrameValidity::ok};
}

// Attack presence of frame m: q-weighted relative growth of spectral
// magnitude from frame m-1 to m+1, summed over bins and all four channels,
// clamped at zero. Boundary frames score 0 by convention.
inline double attack_score(const SpectralFrames& spectra, std::size_t m,
                           const std::vector<double>& q, double eps = 1e-9) {
    if (q.size() != spectra.bin_count)
        throw std::invalid_argument("attack_score: weight length does not match bin count");
    if (m >= spectra.frame_count)
        throw std::out_of_range("attack_score: frame index out of range");
    if (m == 0 || m + 1 >= spectra.frame_count) return 0.0;

    double total = 0.0;
    for (std::size_t ch = 0; ch < 4; ++ch) {
        const auto prev = spectra.channel(m - 1, ch);
        const auto next = spectra.channel(m + 1, ch);
        for (std::size_t f = 0; f < spectra.bin_count; ++f) {
            const double a = std::abs(next[f]);
            const double b = std::abs(prev[f]);
            total += q[f] * (a - b) / (std::max(a, b) + eps);
        }
    }
    return std::max(0.0, total);
}

// Full per-frame chain. Never throws on degenerate content; failures land in
// the validity code so one bad frame cannot abort a recording.
inline FrameEstimate estimate_frame(const SpectralFrames& spectra, std::size_t m,
                                    const std::vector<double>& snr_db,
                                    const EstimatorConfig& cfg = {}) {
    cfg.validate();
    FrameEstimate est;

    FdvvFrame fdvv = compute_fdvv(spectra, m, cfg.eps_w);
    if (fdvv.silent()) {
        est.valid = FrameValidity::silent;
        return est;
    }
    fdvv = suppress_low_snr(fdvv, snr_db);

    TdvvFrame tdvv = compute_tdvv(fdvv);
    Vec3 c0 = tdvv.col(0);
    if (c0.norm() == 0.0) {  // suppression removed every contribution
        est.valid = FrameValidity::silent;
        return est;
    }
    Vec3 u0 = c0 / c0.norm();

    // Iterative vertical-plane weighting; each pass multiplies the current
    // weights, and the loop stops once the DoA stops moving.
    for (std::size_t it = 0; it < cfg.max_weight_iters; ++it) {
        if (std::sqrt(u0.x * u0.x + u0.y * u0.y) < 1e-9) break;  // plane undefined
        apply_weights(fdvv, plane_weights(fdvv, u0, cfg.eps_im));
        tdvv = compute_tdvv(fdvv);
        c0 = tdvv.col(0);
        if (c0.norm() == 0.0) break;
        const Vec3 u0_next = c0 / c0.norm();
        const double moved = angle_between_deg(u0, u0_next);
        u0 = u0_next;
        if (moved < cfg.doa_converge_deg) break;
    }

    est.u0 = u0;
    est.attack = attack_score(spectra, m, fdvv.weights, cfg.attack_eps);

    std::size_t j_max = 0;
    try {
        const auto [tau, j] = tau_from_tdvv(tdvv, cfg);
        est.tau1 = tau;
        j_max = j;
    } catch (const std::runtime_error&) {
        est.valid = FrameValidity::degenerate_geometry;  // nothing past lag 0
        return est;
    }

    const Vec3 v_col = tdvv.col(j_max);
    if (v_col.norm() == 0.0) {
        est.valid = FrameValidity::degenerate_geometry;
        return est;
    }
    est.u1 = reflection_dir(u0, v_col);

    const auto range = range_from_geometry(est.u0, est.u1, est.tau1, cfg);
    est.d0 = range.d0;
    est.valid = range.validity;
    return est;
}

namespace detail {

inline double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (n % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

inline std::optional<Vec3> median_direction(const std::vector<Vec3>& dirs) {
    std::vector<double> xs, ys, zs;
    xs.reserve(dirs.size());
    ys.reserve(dirs.size());
    zs.reserve(dirs.size());
    for (const auto& d : dirs) {
        xs.push_back(d.x);
        ys.push_back(d.y);
        zs.push_back(d.z);
    }
    const Vec3 m{median_inplace(xs), median_inplace(ys), median_inplace(zs)};
    const double n = m.norm();
    if (n < 1e-12) return std::nullopt;
    return m / n;
}

}  // namespace detail

// Reduce per-frame estimates to one recording-level answer. Frames that are
// ok but fall under the attack threshold are re-marked low_attack in place,
// so callers see the final per-frame disposition. When no frame survives
// with a usable range, the direction is still aggregated from the
// attack-passing frames and the range reported absent.
inline RecordingEstimate aggregate(std::vector<FrameEstimate>& frames,
                                   const EstimatorConfig& cfg = {}) {
    if (frames.empty()) throw std::invalid_argument("aggregate: empty recording");
    cfg.validate();

    double max_attack = 0.0;
    for (const auto& fr : frames) max_attack = std::max(max_attack, fr.attack);
    const double threshold = cfg.attack_fraction * max_attack;

    for (auto& fr : frames)
        if (fr.valid == FrameValidity::ok && fr.attack < threshold)
            fr.valid = FrameValidity::low_attack;

    RecordingEstimate out;
    out.frames_total = frames.size();

    std::vector<Vec3> dirs;
    std::vector<double> ranges;
    for (const auto& fr : frames) {
        if (fr.valid != FrameValidity::ok) continue;
        dirs.push_back(fr.u0);
        ranges.push_back(fr.d0);
    }

    if (!dirs.empty()) {
        out.u0 = detail::median_direction(dirs);
        out.d0 = detail::median_inplace(ranges);
        out.frames_used = dirs.size();
    } else {
        // direction-only fallback: degenerate or out-of-range frames that
        // still carried the attack
        for (const auto& fr : frames) {
            if (fr.attack < threshold) continue;
            if (fr.valid != FrameValidity::range_out_of_bounds &&
                fr.valid != FrameValidity::degenerate_geometry)
                continue;
            dirs.push_back(fr.u0);
        }
        if (!dirs.empty()) {
            out.u0 = detail::median_direction(dirs);
            out.frames_used = out.u0 ? dirs.size() : 0;
        }
    }

    if (out.u0) {
        out.azimuth_deg = azimuth_deg(*out.u0);
        out.elevation_deg = elevation_deg(*out.u0);
    } else {
        out.frames_used = 0;
        out.d0.reset();
    }
    return out;
}

// Broadband active-intensity DoA: per frame the mean real FDVV over valid
// bins, per recording the componentwise median over frames, renormalized.
inline Vec3 baseline_active_doa(const std::vector<FdvvFrame>& fdvv_frames) {
    std::vector<Vec3> means;
    for (const auto& f : fdvv_frames) {
        Vec3 sum{};
        std::size_t n = 0;
        for (std::size_t k = 0; k < f.bin_count(); ++k) {
            if (!f.valid_mask[k]) continue;
            sum += f.real_col(k);
            ++n;
        }
        if (n == 0) continue;
        means.push_back(sum / static_cast<double>(n));
    }
    if (means.empty()) throw std::runtime_error("baseline_active_doa: silent recording");
    const auto dir = detail::median_direction(means);
    if (!dir) throw std::runtime_error("baseline_active_doa: silent recording");
    return *dir;
}

}  // namespace tdvv
