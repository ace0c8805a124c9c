// spreading.hpp - time-hopping sequences and chip-rate spreading algebra.
//
// A user's symbol occupies Nf frames of Nc chips each; exactly one chip per
// frame carries a pulse whose sign is the frame polarity.  Chip values stay
// integer until channel synthesis so correlations are exact.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "thir/config.hpp"
#include "thir/rng.hpp"

namespace thir {

// Per-frame hop slots c_f in [0, Nc) and pulse polarities d_f in {+1,-1}.
struct HoppingSequence {
    std::vector<std::int32_t> slots;
    std::vector<std::int8_t> polarities;

    int frames() const { return static_cast<int>(slots.size()); }
};

// Chip-rate ternary sequence; chip j is d_f on the hopped slot of its frame
// and 0 elsewhere, so the squared norm is always Nf.
struct SpreadingVector {
    std::vector<std::int8_t> chips;

    int length() const { return static_cast<int>(chips.size()); }
};

struct SpreadingMatrix {
    int length = 0;  // N, rows
    std::vector<SpreadingVector> columns;

    int users() const { return static_cast<int>(columns.size()); }
};

// Diagonal user amplitudes a_k = sqrt(E_k / Nf).
struct AmplitudeMatrix {
    std::vector<double> diag;

    static AmplitudeMatrix from_config(const SystemConfig& config) {
        AmplitudeMatrix a;
        a.diag.reserve(config.energies.size());
        for (double e : config.energies)
            a.diag.push_back(std::sqrt(e / config.pulses_per_symbol));
        return a;
    }
};

// Transmitted symbols b_k in {+1,-1}.
using SymbolVector = std::vector<std::int8_t>;

// K x K integer correlation matrix R = S^T S.
struct CorrelationMatrix {
    int users = 0;
    std::vector<std::int32_t> entries;  // row-major

    std::int32_t at(int i, int j) const { return entries[std::size_t(i) * users + j]; }
    std::int32_t& at(int i, int j) { return entries[std::size_t(i) * users + j]; }
};

// Draws slots i.i.d. uniform on [0, Nc) and polarities i.i.d. +-1 (all +1 when
// uncoded).  The stream is derived from (rng, user), so a fixed root stream
// addresses every user's sequence reproducibly.
inline void gen_hopping_into(const SystemConfig& config, int user, const CounterRng& rng,
                             HoppingSequence& out) {
    if (user < 0 || user >= config.num_users)
        throw std::invalid_argument("gen_hopping: user index out of range");
    CounterRng stream = rng.derive(static_cast<std::uint64_t>(user));
    const int nf = config.pulses_per_symbol;
    const auto nc = static_cast<std::uint32_t>(config.chips_per_frame);
    out.slots.resize(nf);
    out.polarities.resize(nf);
    for (int f = 0; f < nf; ++f)
        out.slots[f] = static_cast<std::int32_t>(stream.next_below(nc));
    if (config.coding == Coding::Coded) {
        for (int f = 0; f < nf; ++f)
            out.polarities[f] = static_cast<std::int8_t>(stream.next_sign());
    } else {
        for (int f = 0; f < nf; ++f) out.polarities[f] = 1;
    }
}

inline HoppingSequence gen_hopping(const SystemConfig& config, int user,
                                   const CounterRng& rng) {
    HoppingSequence seq;
    gen_hopping_into(config, user, rng, seq);
    return seq;
}

inline SpreadingVector build_spreading_vector(const HoppingSequence& seq,
                                              const SystemConfig& config) {
    if (seq.frames() != config.pulses_per_symbol)
        throw std::invalid_argument("build_spreading_vector: frame count mismatch");
    SpreadingVector s;
    s.chips.assign(static_cast<std::size_t>(config.total_gain), 0);
    const int nc = config.chips_per_frame;
    for (int f = 0; f < seq.frames(); ++f)
        s.chips[std::size_t(f) * nc + seq.slots[f]] = seq.polarities[f];
    return s;
}

inline SpreadingMatrix build_spreading_matrix(const SystemConfig& config,
                                              const CounterRng& rng) {
    SpreadingMatrix m;
    m.length = config.total_gain;
    m.columns.reserve(config.num_users);
    for (int k = 0; k < config.num_users; ++k)
        m.columns.push_back(build_spreading_vector(gen_hopping(config, k, rng), config));
    return m;
}

// Un-normalized cross-correlation rho = <a, b>; integer in [-Nf, Nf].
inline int cross_correlation(const SpreadingVector& a, const SpreadingVector& b) {
    if (a.length() != b.length())
        throw std::invalid_argument("cross_correlation: length mismatch");
    int acc = 0;
    for (int j = 0; j < a.length(); ++j)
        acc += int(a.chips[j]) * int(b.chips[j]);
    return acc;
}

// Same value computed in the hop domain: only equal slots in the same frame
// can overlap.  O(Nf) instead of O(N).
inline int hop_cross_correlation(const HoppingSequence& a, const HoppingSequence& b) {
    if (a.frames() != b.frames())
        throw std::invalid_argument("hop_cross_correlation: frame count mismatch");
    int acc = 0;
    for (int f = 0; f < a.frames(); ++f)
        if (a.slots[f] == b.slots[f])
            acc += int(a.polarities[f]) * int(b.polarities[f]);
    return acc;
}

inline CorrelationMatrix correlation_matrix(const SpreadingMatrix& s) {
    CorrelationMatrix r;
    r.users = s.users();
    r.entries.assign(std::size_t(r.users) * r.users, 0);
    for (int i = 0; i < r.users; ++i) {
        for (int j = i; j < r.users; ++j) {
            int v = cross_correlation(s.columns[i], s.columns[j]);
            r.at(i, j) = v;
            r.at(j, i) = v;
        }
    }
    return r;
}

}  // namespace thir
