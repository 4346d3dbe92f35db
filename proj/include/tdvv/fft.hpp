#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "tdvv/vec3.hpp"

namespace tdvv {

/// Mixed-radix Cooley-Tukey FFT plan for a fixed size n.
///
/// Handles any n: composite sizes decompose by their smallest prime factor,
/// prime sizes fall back to the direct O(p^2) kernel at that level. Twiddles
/// are tabulated once per plan, so a plan should be reused across frames.
/// Instances carry scratch buffers and are not safe for concurrent use.
class Fft {
public:
    using cplx = std::complex<double>;

    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("fft: size must be positive");
        twiddle_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
            twiddle_[j] = {std::cos(ang), std::sin(ang)};
        }
        std::size_t m = n;
        while (m > 1) {
            std::size_t p = 2;
            while (p * p <= m && m % p != 0) ++p;
            if (p * p > m) p = m;  // m is prime
            factors_.push_back(p);
            m /= p;
        }
        work_.resize(n);
        full_.resize(n);
        tmp_.resize(n);
    }

    std::size_t size() const { return n_; }

    /// Number of one-sided bins for a real transform of length n.
    static std::size_t half_bins(std::size_t n) { return n / 2 + 1; }

    /// X[k] = sum_t x[t] e^{-2 pi i t k / n}. `in` and `out` may alias.
    void forward(std::span<const cplx> in, std::span<cplx> out) {
        check_span(in.size(), out.size());
        const cplx* src = in.data();
        if (src == out.data()) {
            std::copy(in.begin(), in.end(), work_.begin());
            src = work_.data();
        }
        transform(src, out.data());
    }

    /// x[t] = (1/n) sum_k X[k] e^{+2 pi i t k / n}.
    void inverse(std::span<const cplx> in, std::span<cplx> out) {
        check_span(in.size(), out.size());
        for (std::size_t i = 0; i < n_; ++i) work_[i] = std::conj(in[i]);
        transform(work_.data(), out.data());
        const double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = std::conj(out[i]) * inv;
    }

    /// Forward transform of a real signal; writes bins 0..n/2.
    void forward_real(std::span<const double> in, std::span<cplx> half_out) {
        if (in.size() != n_ || half_out.size() != half_bins(n_))
            throw std::invalid_argument("fft: real span size mismatch");
        for (std::size_t i = 0; i < n_; ++i) work_[i] = cplx(in[i], 0.0);
        transform(work_.data(), full_.data());
        std::copy(full_.begin(), full_.begin() + static_cast<std::ptrdiff_t>(half_bins(n_)),
                  half_out.begin());
    }

    /// Inverse of a one-sided spectrum, extended by conjugate symmetry.
    /// Bin 0 (and the Nyquist bin for even n) is treated as purely real.
    /// Output includes the 1/n normalization, so a constant spectrum of
    /// value c produces an impulse of height c at lag 0.
    void inverse_real(std::span<const cplx> half_in, std::span<double> out) {
        if (half_in.size() != half_bins(n_) || out.size() != n_)
            throw std::invalid_argument("fft: real span size mismatch");
        full_[0] = cplx(half_in[0].real(), 0.0);
        for (std::size_t f = 1; f < (n_ + 1) / 2; ++f) {
            full_[f] = half_in[f];
            full_[n_ - f] = std::conj(half_in[f]);
        }
        if (n_ % 2 == 0 && n_ > 1) full_[n_ / 2] = cplx(half_in[n_ / 2].real(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) work_[i] = std::conj(full_[i]);
        transform(work_.data(), full_.data());
        const double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t t = 0; t < n_; ++t) out[t] = full_[t].real() * inv;
    }

private:
    void check_span(std::size_t in_size, std::size_t out_size) const {
        if (in_size != n_ || out_size != n_)
            throw std::invalid_argument("fft: span size mismatch");
    }

    void transform(const cplx* in, cplx* out) { recurse(in, 1, out, n_, 0); }

    // Decimation in time: split the length-`len` sequence into `p` interleaved
    // subsequences, transform each, and combine with twiddles taken from the
    // length-n_ master table (exponent scaled by n_/len).
    void recurse(const cplx* x, std::size_t stride, cplx* out, std::size_t len,
                 std::size_t depth) {
        if (len == 1) {
            out[0] = x[0];
            return;
        }
        const std::size_t p = factors_[depth];
        const std::size_t m = len / p;
        for (std::size_t r = 0; r < p; ++r)
            recurse(x + r * stride, stride * p, out + r * m, m, depth + 1);
        const std::size_t scale = n_ / len;
        for (std::size_t k = 0; k < len; ++k) {
            const std::size_t km = k % m;
            cplx acc{0.0, 0.0};
            for (std::size_t r = 0; r < p; ++r)
                acc += twiddle_[((k * r) % len) * scale] * out[r * m + km];
            tmp_[k] = acc;
        }
        std::copy(tmp_.begin(), tmp_.begin() + static_cast<std::ptrdiff_t>(len), out);
    }

    std::size_t n_;
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> factors_;
    std::vector<cplx> work_, full_, tmp_;
};

/// Smallest size >= n whose prime factors are all in {2, 3, 5}.
inline std::size_t next_fast_size(std::size_t n) {
    if (n == 0) return 1;
    for (;; ++n) {
        std::size_t m = n;
        for (std::size_t p : {2u, 3u, 5u})
            while (m % p == 0) m /= p;
        if (m == 1) return n;
    }
}

}  // namespace tdvv
