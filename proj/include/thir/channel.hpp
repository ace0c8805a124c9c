// channel.hpp - received-vector synthesis for flat and frequency-selective
// channels, plus the matched (despread) statistic.
//
// Each symbol is synthesized independently: a guard of L chips at the end of
// the symbol absorbs the channel tail, so there is no inter-symbol state and
// selective frames are emitted with length N + L.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "thir/config.hpp"
#include "thir/rng.hpp"
#include "thir/spreading.hpp"

namespace thir {

// Chip-spaced impulse response h_0..h_L; h_0 is the main path.
struct ChannelImpulseResponse {
    std::vector<double> taps;

    int delay_spread() const { return static_cast<int>(taps.size()) - 1; }  // L

    void validate() const {
        if (taps.empty() || taps[0] == 0.0)
            throw std::invalid_argument("channel: leading tap h0 must be nonzero");
        for (double t : taps)
            if (!std::isfinite(t)) throw std::invalid_argument("channel: taps must be finite");
    }

    // Sum of squared taps including h0 (the quantity written ||h|| in the
    // interference analysis).
    double energy() const {
        double e = 0.0;
        for (double t : taps) e += t * t;
        return e;
    }

    static ChannelImpulseResponse flat() { return {{1.0}}; }

    // Two paths: unit main tap plus h_l at delay l.
    static ChannelImpulseResponse two_path(double h_l, int l) {
        ChannelImpulseResponse h;
        h.taps.assign(static_cast<std::size_t>(l) + 1, 0.0);
        h.taps[0] = 1.0;
        h.taps[static_cast<std::size_t>(l)] = h_l;
        return h;
    }
};

struct ReceivedFrame {
    std::vector<double> samples;
};

struct MatchedStatistic {
    std::vector<double> y;
};

// SNR here is Eb/N0 with sigma^2 = N0/2, so E = 2 sigma^2 10^(snr/10) and a
// single matched-filter user sees BER Q(sqrt(2 snr)).
inline double snr_to_energy(double snr_db, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("snr_to_energy: sigma must be positive");
    return 2.0 * sigma * sigma * std::pow(10.0, snr_db / 10.0);
}

namespace detail {

inline void check_model_dims(const SpreadingMatrix& s, const AmplitudeMatrix& a,
                             const SymbolVector& b) {
    if (static_cast<int>(a.diag.size()) != s.users() ||
        static_cast<int>(b.size()) != s.users())
        throw std::invalid_argument("synthesis: S, A, b dimensions disagree");
}

inline void fill_noise(std::vector<double>& r, double sigma, CounterRng& rng) {
    if (sigma == 0.0) {
        std::fill(r.begin(), r.end(), 0.0);
    } else {
        for (double& v : r) v = sigma * rng.next_gaussian();
    }
}

}  // namespace detail

// r = S A b + n with white Gaussian noise of per-sample variance sigma^2.
inline ReceivedFrame synth_received_flat(const SpreadingMatrix& s, const AmplitudeMatrix& a,
                                         const SymbolVector& b, double sigma,
                                         CounterRng& rng) {
    detail::check_model_dims(s, a, b);
    ReceivedFrame r;
    r.samples.resize(static_cast<std::size_t>(s.length));
    detail::fill_noise(r.samples, sigma, rng);
    for (int k = 0; k < s.users(); ++k) {
        const double g = a.diag[k] * b[k];
        const auto& chips = s.columns[k].chips;
        for (int j = 0; j < s.length; ++j)
            if (chips[j] != 0) r.samples[j] += g * chips[j];
    }
    return r;
}

// r = H0 S A b + n; the convolution tail (L extra samples) is kept, matching
// the per-symbol guard interval.
inline ReceivedFrame synth_received_selective(const SpreadingMatrix& s,
                                              const AmplitudeMatrix& a,
                                              const SymbolVector& b,
                                              const ChannelImpulseResponse& h, double sigma,
                                              CounterRng& rng) {
    detail::check_model_dims(s, a, b);
    h.validate();
    const int spread = h.delay_spread();
    ReceivedFrame r;
    r.samples.resize(static_cast<std::size_t>(s.length) + spread);
    detail::fill_noise(r.samples, sigma, rng);
    for (int k = 0; k < s.users(); ++k) {
        const double g = a.diag[k] * b[k];
        const auto& chips = s.columns[k].chips;
        for (int j = 0; j < s.length; ++j) {
            if (chips[j] == 0) continue;
            const double pulse = g * chips[j];
            for (int t = 0; t <= spread; ++t)
                r.samples[std::size_t(j) + t] += pulse * h.taps[t];
        }
    }
    return r;
}

// y = S^T r with the raw (unfiltered) spreading sequences: despreading at
// first-path timing.  r may carry a guard tail; chips beyond N never overlap
// it, so only the first N samples are read.
inline MatchedStatistic matched_statistics(const ReceivedFrame& r, const SpreadingMatrix& s) {
    if (static_cast<int>(r.samples.size()) < s.length)
        throw std::invalid_argument("matched_statistics: received vector too short");
    MatchedStatistic m;
    m.y.resize(static_cast<std::size_t>(s.users()));
    for (int k = 0; k < s.users(); ++k) {
        const auto& chips = s.columns[k].chips;
        double acc = 0.0;
        for (int j = 0; j < s.length; ++j)
            if (chips[j] != 0) acc += chips[j] * r.samples[j];
        m.y[k] = acc;
    }
    return m;
}

// Channel-filtered spreading columns g_k = h * s_k, length N + L.  Correlating
// against these gives the full-channel-knowledge statistic used by the linear
// and joint detectors on selective channels.
inline std::vector<std::vector<double>> filtered_spreading(const SpreadingMatrix& s,
                                                           const ChannelImpulseResponse& h) {
    h.validate();
    const int spread = h.delay_spread();
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(s.users()));
    for (int k = 0; k < s.users(); ++k) {
        auto& g = cols[k];
        g.assign(static_cast<std::size_t>(s.length) + spread, 0.0);
        const auto& chips = s.columns[k].chips;
        for (int j = 0; j < s.length; ++j) {
            if (chips[j] == 0) continue;
            for (int t = 0; t <= spread; ++t)
                g[std::size_t(j) + t] += chips[j] * h.taps[t];
        }
    }
    return cols;
}

inline MatchedStatistic matched_statistics(const ReceivedFrame& r,
                                           const std::vector<std::vector<double>>& columns) {
    MatchedStatistic m;
    m.y.resize(columns.size());
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k].size() != r.samples.size())
            throw std::invalid_argument("matched_statistics: column length mismatch");
        double acc = 0.0;
        for (std::size_t j = 0; j < columns[k].size(); ++j)
            acc += columns[k][j] * r.samples[j];
        m.y[k] = acc;
    }
    return m;
}

}  // namespace thir
