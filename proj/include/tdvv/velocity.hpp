#pragma once

// Velocity-vector transforms: per-frame FDVV from FOA spectra, band
// suppression and plane weighting, and the inverse transform to the TDVV
// lag domain.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tdvv/fft.hpp"
#include "tdvv/foa.hpp"
#include "tdvv/vec3.hpp"

namespace tdvv {

// One frame of frequency-domain velocity vectors. Rows are the x, y, z
// components over bins; weights and valid_mask are per bin. Masked bins are
// zeroed and carry weight 0 so downstream code has one uniform mechanism.
struct FdvvFrame {
    std::array<std::vector<std::complex<double>>, 3> vv;
    std::vector<double> weights;
    std::vector<bool> valid_mask;
    int sample_rate = 0;
    std::size_t frame_len = 0;

    std::size_t bin_count() const { return weights.size(); }

    bool silent() const {
        for (bool v : valid_mask)
            if (v) return false;
        return true;
    }

    Vec3 real_col(std::size_t f) const {
        return {vv[0][f].real(), vv[1][f].real(), vv[2][f].real()};
    }
    Vec3 imag_col(std::size_t f) const {
        return {vv[0][f].imag(), vv[1][f].imag(), vv[2][f].imag()};
    }
};

// One frame of time-domain velocity vectors over circular lags 0 .. T-1.
struct TdvvFrame {
    std::array<std::vector<double>, 3> vv;
    int sample_rate = 0;

    std::size_t lags() const { return vv[0].size(); }
    Vec3 col(std::size_t j) const { return {vv[0][j], vv[1][j], vv[2][j]}; }
    double col_norm(std::size_t j) const { return col(j).norm(); }
};

// Per-bin channel ratio [X; Y; Z] / W. Bins whose |W| falls at or below
// eps_w times the frame's peak |W| are zeroed and masked out rather than
// regularized, which keeps the surviving ratios unbiased. A frame with no
// surviving bin comes back fully masked (silence); callers check silent().
inline FdvvFrame compute_fdvv(const SpectralFrames& spectra, std::size_t frame_index,
                              double eps_w = 1e-6) {
    if (frame_index >= spectra.frame_count)
        throw std::out_of_range("compute_fdvv: frame index out of range");
    if (eps_w < 0.0) throw std::invalid_argument("compute_fdvv: eps_w must be >= 0");

    const std::size_t bins = spectra.bin_count;
    FdvvFrame out;
    out.sample_rate = spectra.sample_rate;
    out.frame_len = spectra.frame_len;
    for (auto& row : out.vv) row.assign(bins, {0.0, 0.0});
    out.weights.assign(bins, 0.0);
    out.valid_mask.assign(bins, false);

    const auto w = spectra.channel(frame_index, kW);
    const auto x = spectra.channel(frame_index, kX);
    const auto y = spectra.channel(frame_index, kY);
    const auto z = spectra.channel(frame_index, kZ);

    double w_peak = 0.0;
    for (std::size_t f = 0; f < bins; ++f) w_peak = std::max(w_peak, std::abs(w[f]));
    const double floor = eps_w * w_peak;

    for (std::size_t f = 0; f < bins; ++f) {
        if (std::abs(w[f]) <= floor) continue;
        out.vv[0][f] = x[f] / w[f];
        out.vv[1][f] = y[f] / w[f];
        out.vv[2][f] = z[f] / w[f];
        out.weights[f] = 1.0;
        out.valid_mask[f] = true;
    }
    return out;
}

// Zero the weight of every bin whose estimated SNR is negative.
inline FdvvFrame suppress_low_snr(FdvvFrame fdvv, const std::vector<double>& snr_db) {
    if (snr_db.size() != fdvv.bin_count())
        throw std::invalid_argument("suppress_low_snr: snr length does not match bin count");
    for (std::size_t f = 0; f < snr_db.size(); ++f)
        if (snr_db[f] < 0.0) fdvv.weights[f] = 0.0;
    return fdvv;
}

// Down-weight bins whose reactive intensity points out of the vertical
// plane through u0_est: q = exp(-|imag(V) . n| / ||imag(V)||) with n the
// unit normal of that plane. Purely-active bins (tiny imaginary part) carry
// no plane information and are kept at q = 1, as are masked bins so the
// result composes multiplicatively with existing weights.
inline std::vector<double> plane_weights(const FdvvFrame& fdvv, const Vec3& u0_est,
                                         double eps_im = 1e-12) {
    if (std::abs(u0_est.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("plane_weights: direction must be unit length");
    const Vec3 cross = u0_est.cross({0.0, 0.0, 1.0});
    const double cn = cross.norm();
    if (cn < 1e-9)
        throw std::runtime_error("plane_weights: degenerate vertical-plane normal");
    const Vec3 n = cross / cn;

    std::vector<double> q(fdvv.bin_count(), 1.0);
    for (std::size_t f = 0; f < fdvv.bin_count(); ++f) {
        if (!fdvv.valid_mask[f]) continue;
        const Vec3 im = fdvv.imag_col(f);
        const double mag = im.norm();
        if (mag < eps_im) continue;
        q[f] = std::exp(-std::abs(im.dot(n)) / mag);
    }
    return q;
}

inline void apply_weights(FdvvFrame& fdvv, const std::vector<double>& q) {
    if (q.size() != fdvv.bin_count())
        throw std::invalid_argument("apply_weights: weight length does not match bin count");
    for (std::size_t f = 0; f < q.size(); ++f) fdvv.weights[f] *= q[f];
}

// Inverse transform of the weighted FDVV rows. The half spectrum is
// extended by conjugate symmetry and the result scaled so that lag 0 is the
// mean of the full symmetric spectrum.
inline TdvvFrame compute_tdvv(const FdvvFrame& fdvv) {
    if (fdvv.silent()) throw std::runtime_error("compute_tdvv: empty spectrum");
    const std::size_t T = fdvv.frame_len;
    if (Fft::half_bins(T) != fdvv.bin_count())
        throw std::invalid_argument("compute_tdvv: bin count does not match frame length");

    Fft fft(T);
    std::vector<std::complex<double>> weighted(fdvv.bin_count());
    TdvvFrame out;
    out.sample_rate = fdvv.sample_rate;
    for (std::size_t row = 0; row < 3; ++row) {
        for (std::size_t f = 0; f < fdvv.bin_count(); ++f)
            weighted[f] = fdvv.vv[row][f] * fdvv.weights[f];
        out.vv[row].resize(T);
        fft.inverse_real(weighted, out.vv[row]);
    }
    return out;
}

}  // namespace tdvv
