// montecarlo.hpp - seeded BER estimation over (config, channel, detector).
//
// Fresh hopping sequences and symbols are drawn for every trial (the random
// long-code assumption), addressed by (seed, trial index), so estimates are
// bitwise reproducible for any worker-thread count.  Trials are processed in
// fixed 4096-trial blocks reduced in block order; early stopping cuts at the
// first block where the error budget is reached.

#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "thir/channel.hpp"
#include "thir/config.hpp"
#include "thir/detectors.hpp"
#include "thir/rng.hpp"
#include "thir/spreading.hpp"

namespace thir {

struct TrialPlan {
    SystemConfig config;
    std::optional<ChannelImpulseResponse> channel;  // empty = frequency flat
    DetectorKind detector = DetectorKind::MF;
    int target_user = 0;
    std::uint64_t num_trials = 0;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> max_errors;  // early stop budget; empty = run all

    void validate() const {
        config.validate();
        if (channel) channel->validate();
        if (num_trials < 1) throw std::invalid_argument("plan: num_trials >= 1 required");
        if (target_user < 0 || target_user >= config.num_users)
            throw std::invalid_argument("plan: target user out of range");
        if (detector == DetectorKind::ML && config.num_users > kMaxMlUsers)
            throw std::invalid_argument("plan: exhaustive ML infeasible for K > 20");
        if (max_errors && *max_errors < 1)
            throw std::invalid_argument("plan: max_errors must be positive when set");
    }
};

// Error count with a 95% Wilson score interval.
struct BerEstimate {
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t zf_pinv_trials = 0;  // trials where ZF/MMSE fell back to a pseudo-inverse
};

inline BerEstimate wilson_estimate(std::uint64_t errors, std::uint64_t trials) {
    BerEstimate e;
    e.errors = errors;
    e.trials = trials;
    if (trials == 0) return e;
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double rad = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    e.ber = p;
    e.ci_low = std::max(0.0, center - rad);
    e.ci_high = std::min(1.0, center + rad);
    return e;
}

inline int default_thread_count() {
    if (const char* env = std::getenv("THIR_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

namespace detail {

inline constexpr std::uint64_t kTrialBlock = 4096;

struct BlockResult {
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
    std::uint64_t pinv = 0;
};

// Scratch buffers reused across the trials of one worker.
struct TrialWorkspace {
    std::vector<HoppingSequence> hops;
    SymbolVector symbols;
    std::vector<double> received;
    Eigen::VectorXd y;
    Eigen::MatrixXd r;
    Eigen::VectorXd amplitudes;
};

struct TrialOutcome {
    bool error = false;
    bool pinv = false;
};

inline TrialOutcome run_single_trial(const TrialPlan& plan, std::uint64_t trial,
                                     TrialWorkspace& ws) {
    const SystemConfig& cfg = plan.config;
    const int k = cfg.num_users;
    const int nf = cfg.pulses_per_symbol;
    const int nc = cfg.chips_per_frame;
    const int spread = plan.channel ? plan.channel->delay_spread() : 0;

    CounterRng trial_rng = CounterRng(plan.seed).derive(trial);
    CounterRng hop_root = trial_rng.derive(stream::kHopping);
    CounterRng sym_rng = trial_rng.derive(stream::kSymbols);
    CounterRng noise_rng = trial_rng.derive(stream::kNoise);

    ws.hops.resize(static_cast<std::size_t>(k));
    for (int u = 0; u < k; ++u) gen_hopping_into(cfg, u, hop_root, ws.hops[u]);
    ws.symbols.resize(static_cast<std::size_t>(k));
    for (int u = 0; u < k; ++u)
        ws.symbols[u] = static_cast<std::int8_t>(sym_rng.next_sign());

    // Received vector: white noise first, then one pulse per (user, frame).
    ws.received.resize(static_cast<std::size_t>(cfg.total_gain + spread));
    if (cfg.noise_sigma == 0.0) {
        std::fill(ws.received.begin(), ws.received.end(), 0.0);
    } else {
        for (double& v : ws.received) v = cfg.noise_sigma * noise_rng.next_gaussian();
    }
    for (int u = 0; u < k; ++u) {
        const double g =
            std::sqrt(cfg.energies[u] / nf) * static_cast<double>(ws.symbols[u]);
        const auto& h = ws.hops[u];
        if (!plan.channel) {
            for (int f = 0; f < nf; ++f)
                ws.received[std::size_t(f) * nc + h.slots[f]] += g * h.polarities[f];
        } else {
            const auto& taps = plan.channel->taps;
            for (int f = 0; f < nf; ++f) {
                const double pulse = g * h.polarities[f];
                const std::size_t base = std::size_t(f) * nc + h.slots[f];
                for (int t = 0; t <= spread; ++t)
                    ws.received[base + t] += pulse * taps[t];
            }
        }
    }

    TrialOutcome out;
    const std::int8_t truth = ws.symbols[plan.target_user];

    if (plan.detector == DetectorKind::MF) {
        // First-path despreading of the target user only; decisions of other
        // users never feed back under MF.
        const auto& h = ws.hops[plan.target_user];
        double acc = 0.0;
        for (int f = 0; f < nf; ++f)
            acc += h.polarities[f] * ws.received[std::size_t(f) * nc + h.slots[f]];
        out.error = sign_decision(acc) != truth;
        return out;
    }

    // Joint detectors consume the same first-path despread statistic the MF
    // sees (the receiver samples at pulse timing), with the raw correlation
    // matrix; multipath echoes beyond the first path stay as interference.
    ws.y.resize(k);
    ws.r.resize(k, k);
    ws.amplitudes.resize(k);
    for (int u = 0; u < k; ++u) ws.amplitudes[u] = std::sqrt(cfg.energies[u] / nf);
    for (int u = 0; u < k; ++u) {
        const auto& h = ws.hops[u];
        double acc = 0.0;
        for (int f = 0; f < nf; ++f)
            acc += h.polarities[f] * ws.received[std::size_t(f) * nc + h.slots[f]];
        ws.y[u] = acc;
    }
    for (int i = 0; i < k; ++i) {
        ws.r(i, i) = nf;
        for (int j = i + 1; j < k; ++j) {
            double rho = hop_cross_correlation(ws.hops[i], ws.hops[j]);
            ws.r(i, j) = rho;
            ws.r(j, i) = rho;
        }
    }

    Decision dec;
    switch (plan.detector) {
        case DetectorKind::ZF:
            dec = detect_zf(ws.y, ws.r, ws.amplitudes, &out.pinv);
            break;
        case DetectorKind::MMSE:
            dec = detect_mmse(ws.y, ws.r, ws.amplitudes, cfg.noise_sigma, &out.pinv);
            break;
        case DetectorKind::ML:
            dec = detect_ml(ws.y, ws.r, ws.amplitudes);
            break;
        case DetectorKind::MF:
            break;  // handled above
    }
    out.error = dec.symbols[plan.target_user] != truth;
    return out;
}

inline BlockResult run_block(const TrialPlan& plan, std::uint64_t first,
                             std::uint64_t last, TrialWorkspace& ws) {
    BlockResult res;
    for (std::uint64_t t = first; t < last; ++t) {
        TrialOutcome o = run_single_trial(plan, t, ws);
        res.errors += o.error ? 1 : 0;
        res.pinv += o.pinv ? 1 : 0;
        ++res.trials;
    }
    return res;
}

}  // namespace detail

inline BerEstimate run_ber(const TrialPlan& plan, int threads = default_thread_count()) {
    plan.validate();
    using detail::kTrialBlock;
    const std::uint64_t n_blocks = (plan.num_trials + kTrialBlock - 1) / kTrialBlock;
    if (threads < 1) threads = 1;

    std::vector<detail::BlockResult> results(n_blocks);
    std::uint64_t accum_errors = 0, accum_trials = 0, accum_pinv = 0;
    bool stopped = false;

    std::uint64_t wave_begin = 0;
    const std::uint64_t wave_len = static_cast<std::uint64_t>(threads) * 4;
    while (wave_begin < n_blocks && !stopped) {
        const std::uint64_t wave_end = std::min(n_blocks, wave_begin + wave_len);
        auto block_bounds = [&](std::uint64_t b) {
            std::uint64_t first = b * kTrialBlock;
            std::uint64_t last = std::min(plan.num_trials, first + kTrialBlock);
            return std::pair<std::uint64_t, std::uint64_t>(first, last);
        };
        if (threads == 1 || wave_end - wave_begin == 1) {
            detail::TrialWorkspace ws;
            for (std::uint64_t b = wave_begin; b < wave_end; ++b) {
                auto [first, last] = block_bounds(b);
                results[b] = detail::run_block(plan, first, last, ws);
            }
        } else {
            std::atomic<std::uint64_t> next{wave_begin};
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
            for (int w = 0; w < threads; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        detail::TrialWorkspace ws;
                        for (std::uint64_t b = next.fetch_add(1); b < wave_end;
                             b = next.fetch_add(1)) {
                            auto [first, last] = block_bounds(b);
                            results[b] = detail::run_block(plan, first, last, ws);
                        }
                    } catch (...) {
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        // Reduce in block-index order; the early-stop cut depends only on
        // block results, never on scheduling.
        for (std::uint64_t b = wave_begin; b < wave_end; ++b) {
            accum_errors += results[b].errors;
            accum_trials += results[b].trials;
            accum_pinv += results[b].pinv;
            if (plan.max_errors && accum_errors >= *plan.max_errors) {
                stopped = true;
                break;
            }
        }
        wave_begin = wave_end;
    }

    BerEstimate est = wilson_estimate(accum_errors, accum_trials);
    est.zf_pinv_trials = accum_pinv;
    return est;
}

enum class SweepAxis { PulseRate, SnrDb, NumUsers };

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::PulseRate: return "pulse_rate";
        case SweepAxis::SnrDb: return "snr_db";
        case SweepAxis::NumUsers: return "num_users";
    }
    return "?";
}

// The concrete plan a sweep runs at one axis value.  The point seed is
// derived from (base seed, axis, value) so points are independent and any
// point can be reproduced in isolation.
inline TrialPlan plan_for_axis_value(const TrialPlan& base, SweepAxis axis, double value) {
    TrialPlan p = base;
    switch (axis) {
        case SweepAxis::PulseRate: {
            int nf = static_cast<int>(value);
            if (static_cast<double>(nf) != value)
                throw std::invalid_argument("sweep: pulse rate values must be integers");
            p.config = base.config.with_pulse_rate(nf);
            break;
        }
        case SweepAxis::SnrDb: {
            if (!(base.config.noise_sigma > 0.0))
                throw std::invalid_argument("sweep: SNR axis requires positive noise sigma");
            const double target_energy = snr_to_energy(value, base.config.noise_sigma);
            const double factor =
                target_energy / base.config.energies[static_cast<std::size_t>(base.target_user)];
            for (double& e : p.config.energies) e *= factor;
            break;
        }
        case SweepAxis::NumUsers: {
            int k = static_cast<int>(value);
            if (static_cast<double>(k) != value || k < 1)
                throw std::invalid_argument("sweep: user counts must be positive integers");
            p.config.num_users = k;
            std::size_t old = p.config.energies.size();
            p.config.energies.resize(static_cast<std::size_t>(k),
                                     old ? p.config.energies.back() : 1.0);
            break;
        }
    }
    p.seed = CounterRng(base.seed)
                 .derive(0x5eedull + static_cast<std::uint64_t>(axis))
                 .derive(std::bit_cast<std::uint64_t>(value))
                 .key();
    p.validate();
    return p;
}

struct SweepPoint {
    double value = 0.0;
    BerEstimate estimate;
};

inline std::vector<SweepPoint> run_sweep(const TrialPlan& base, SweepAxis axis,
                                         const std::vector<double>& values,
                                         int threads = default_thread_count()) {
    std::vector<SweepPoint> out;
    out.reserve(values.size());
    for (double v : values)
        out.push_back({v, run_ber(plan_for_axis_value(base, axis, v), threads)});
    return out;
}

}  // namespace thir
