#pragma once

// Online per-band noise-power tracking: recursive smoothing followed by a
// sliding-window running minimum with fixed bias compensation. Deliberately
// simple and causal; it only has to feed the negative-SNR suppression gate
// and is meant to be swappable for a fancier estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tdvv {

struct NoiseConfig {
    double alpha = 0.9;                 // recursive smoothing factor
    std::size_t min_track_window = 50;  // frames covered by the running minimum
    double bias = 1.5;                  // compensation for the minimum's low bias
    double eps_p = 1e-12;               // absolute power floor, avoids log(0)

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("noise: alpha must be in (0,1)");
        if (min_track_window < 1)
            throw std::invalid_argument("noise: min_track_window must be >= 1");
        if (bias <= 0.0) throw std::invalid_argument("noise: bias must be > 0");
        if (eps_p <= 0.0) throw std::invalid_argument("noise: eps_p must be > 0");
    }
};

class NoiseTracker {
  public:
    explicit NoiseTracker(std::size_t bins, NoiseConfig cfg = {})
        : cfg_(cfg),
          bins_(bins),
          smoothed_(bins, 0.0),
          noise_(bins, 0.0),
          window_min_(bins, 0.0),
          ring_(bins * cfg.min_track_window, 0.0) {
        cfg_.validate();
        if (bins_ < 1) throw std::invalid_argument("noise: bin count must be >= 1");
    }

    std::size_t bins() const { return bins_; }
    const std::vector<double>& noise_psd() const { return noise_; }

    // Consume one frame of W-channel band powers and return that frame's
    // per-bin SNR estimate in dB. Only past and current frames influence the
    // result.
    std::vector<double> update_and_snr(std::span<const double> w_power) {
        if (w_power.size() != bins_)
            throw std::invalid_argument("noise: power length does not match bin count");
        for (double p : w_power)
            if (p < 0.0) throw std::invalid_argument("noise: power must be >= 0");

        std::vector<double> snr_db(bins_);
        const std::size_t w = cfg_.min_track_window;
        for (std::size_t f = 0; f < bins_; ++f) {
            smoothed_[f] = frames_seen_ == 0
                               ? w_power[f]
                               : cfg_.alpha * smoothed_[f] + (1.0 - cfg_.alpha) * w_power[f];

            // sliding minimum over the ring; rescan only when the evicted
            // sample was the reigning minimum
            double* ring = ring_.data() + f * w;
            const std::size_t slot = frames_seen_ % w;
            const double evicted = ring[slot];
            ring[slot] = smoothed_[f];
            const std::size_t filled = std::min(frames_seen_ + 1, w);
            if (frames_seen_ < w) {
                window_min_[f] = frames_seen_ == 0 ? smoothed_[f]
                                                   : std::min(window_min_[f], smoothed_[f]);
            } else if (evicted <= window_min_[f]) {
                window_min_[f] = *std::min_element(ring, ring + filled);
            } else {
                window_min_[f] = std::min(window_min_[f], smoothed_[f]);
            }

            noise_[f] = cfg_.bias * window_min_[f];
            const double num = std::max(w_power[f] - noise_[f], cfg_.eps_p);
            const double den = std::max(noise_[f], cfg_.eps_p);
            snr_db[f] = 10.0 * std::log10(num / den);
        }
        ++frames_seen_;
        return snr_db;
    }

  private:
    NoiseConfig cfg_;
    std::size_t bins_;
    std::size_t frames_seen_ = 0;
    std::vector<double> smoothed_;
    std::vector<double> noise_;
    std::vector<double> window_min_;
    std::vector<double> ring_;  // bins x window, row-major per bin
};

}  // namespace tdvv
