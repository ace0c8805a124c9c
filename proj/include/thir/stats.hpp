// stats.hpp - empirical checks of the asymptotic claims: cross-correlation
// normality and moments, first-stochastic-dominance ordering, and the
// distribution of the despread interference on a two-path channel.
//
// Every check is a pure function of (parameters, rng stream) and reports a
// single statistic against a single threshold; multi-part checks carry their
// parts as component reports.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "thir/analysis.hpp"
#include "thir/channel.hpp"
#include "thir/config.hpp"
#include "thir/rng.hpp"
#include "thir/spreading.hpp"

namespace thir {

struct SampleSummary {
    std::uint64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

inline SampleSummary summarize(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("summarize: need at least 2 samples");
    SampleSummary s;
    s.count = xs.size();
    double m = 0.0;
    for (double x : xs) m += x;
    m /= double(xs.size());
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double n = double(xs.size());
    s.mean = m;
    s.variance = m2 / (n - 1.0);
    const double pop_var = m2 / n;
    if (pop_var > 0.0) {
        s.skewness = (m3 / n) / std::pow(pop_var, 1.5);
        s.excess_kurtosis = (m4 / n) / (pop_var * pop_var) - 3.0;
    }
    return s;
}

// Cross-correlations of freshly drawn independent user pairs under the
// config's coding mode; sample i is addressed by rng.derive(i).
inline std::vector<double> sample_rho(const SystemConfig& config, std::uint64_t num_pairs,
                                      const CounterRng& rng) {
    config.validate();
    if (config.num_users < 2)
        throw std::invalid_argument("sample_rho: config must describe at least two users");
    if (num_pairs < 1) throw std::invalid_argument("sample_rho: need at least one pair");
    std::vector<double> out(num_pairs);
    HoppingSequence a, b;
    for (std::uint64_t i = 0; i < num_pairs; ++i) {
        CounterRng pair_rng = rng.derive(i);
        gen_hopping_into(config, 0, pair_rng, a);
        gen_hopping_into(config, 1, pair_rng, b);
        out[i] = hop_cross_correlation(a, b);
    }
    return out;
}

// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of the
// samples and a reference CDF, evaluated at the sample points.
template <typename Cdf>
double ks_distance(std::span<const double> samples, Cdf&& reference) {
    if (samples.size() < 2) throw std::invalid_argument("ks_distance: need >= 2 samples");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = reference(xs[i]);
        d = std::max(d, std::abs(double(i + 1) / n - f));
        d = std::max(d, std::abs(double(i) / n - f));
    }
    return d;
}

// KS distance for lattice-valued samples with midpoint continuity correction:
// the empirical P(X <= v) is compared against the reference CDF at v + step/2,
// which removes the systematic half-atom inflation a continuous reference
// would otherwise suffer at every lattice jump.
template <typename Cdf>
double lattice_ks_distance(std::span<const double> samples, double step, Cdf&& reference) {
    if (samples.size() < 2)
        throw std::invalid_argument("lattice_ks_distance: need >= 2 samples");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        d = std::max(d, std::abs(double(j) / n - reference(xs[i] + 0.5 * step)));
        i = j;
    }
    return d;
}

inline double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

struct VerificationReport {
    std::string check_name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;  // statistic <= threshold
    std::uint64_t sample_size = 0;
    std::uint64_t seed = 0;
    bool retried = false;
    std::vector<VerificationReport> components;
};

inline VerificationReport make_report(std::string name, double statistic, double threshold,
                                      std::uint64_t sample_size, std::uint64_t seed) {
    VerificationReport r;
    r.check_name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    r.pass = statistic <= threshold;
    r.sample_size = sample_size;
    r.seed = seed;
    return r;
}

namespace detail {
inline SystemConfig rho_config(int n, int nf, Coding coding) {
    return SystemConfig::equal_power(n, nf, 2, 1.0, 0.0, coding);
}
}  // namespace detail

// Coded cross-correlation, standardized by sqrt(Nc/Nf), against N(0, 1).
// Thresholds: KS 0.01, |mean| 0.02, |variance - 1| 0.05 (at 1e5 samples).
inline VerificationReport check_lemma1_normality(int n, int nf, std::uint64_t sample_size,
                                                 const CounterRng& rng,
                                                 double threshold_scale = 1.0) {
    if (nf < 1 || n % nf != 0)
        throw std::invalid_argument("check_lemma1_normality: Nf must divide N");
    const int nc = n / nf;
    if (nf < 8 || nc < 8)
        throw std::invalid_argument(
            "check_lemma1_normality: asymptotic regime requires Nf >= 8 and Nc >= 8");
    const double scale = std::sqrt(double(nc) / nf);
    std::vector<double> xs =
        sample_rho(detail::rho_config(n, nf, Coding::Coded), sample_size, rng);
    for (double& x : xs) x *= scale;
    const double ks = lattice_ks_distance(xs, scale, standard_normal_cdf);
    VerificationReport rep = make_report("lemma1_normality", ks, 0.01 * threshold_scale,
                                         sample_size, rng.key());
    SampleSummary s = summarize(xs);
    rep.components.push_back(make_report("lemma1_normality.mean", std::abs(s.mean),
                                         0.02 * threshold_scale, sample_size, rng.key()));
    rep.components.push_back(make_report("lemma1_normality.variance",
                                         std::abs(s.variance - 1.0),
                                         0.05 * threshold_scale, sample_size, rng.key()));
    return rep;
}

// Uncoded cross-correlation moments: mean Nf/Nc (within 3 standard errors)
// and variance (Nf/Nc)(1 - 1/Nc) (within 5%).
inline VerificationReport check_uncoded_moments(int n, int nc, std::uint64_t sample_size,
                                                const CounterRng& rng,
                                                double threshold_scale = 1.0) {
    if (nc < 2 || n % nc != 0)
        throw std::invalid_argument("check_uncoded_moments: need Nc >= 2 dividing N");
    const int nf = n / nc;
    std::vector<double> xs =
        sample_rho(detail::rho_config(n, nf, Coding::Uncoded), sample_size, rng);
    SampleSummary s = summarize(xs);
    const double pred_mean = double(nf) / nc;
    const double pred_var = (double(nf) / nc) * (1.0 - 1.0 / nc);
    const double mean_se = std::sqrt(pred_var / double(sample_size));
    const double mean_stat = std::abs(s.mean - pred_mean) / (3.0 * mean_se);
    const double var_stat = std::abs(s.variance - pred_var) / (0.05 * pred_var);
    VerificationReport rep =
        make_report("uncoded_moments", std::max(mean_stat, var_stat),
                    1.0 * threshold_scale, sample_size, rng.key());
    rep.components.push_back(make_report("uncoded_moments.mean", mean_stat,
                                         threshold_scale, sample_size, rng.key()));
    rep.components.push_back(make_report("uncoded_moments.variance", var_stat,
                                         threshold_scale, sample_size, rng.key()));
    return rep;
}

// Empirical first-stochastic-dominance ordering of uncoded rho between two
// pulse rates: the low-Nf CDF must dominate the high-Nf CDF at every grid
// point up to DKW slack.
inline VerificationReport check_fsd_dominance(int n, int nf_low, int nf_high,
                                              std::uint64_t sample_size,
                                              const CounterRng& rng,
                                              double threshold_scale = 1.0) {
    if (nf_low > nf_high)
        throw std::invalid_argument("check_fsd_dominance: Nf_low <= Nf_high required");
    std::vector<double> low = sample_rho(detail::rho_config(n, nf_low, Coding::Uncoded),
                                         sample_size, rng.derive(1));
    std::vector<double> high = sample_rho(detail::rho_config(n, nf_high, Coding::Uncoded),
                                          sample_size, rng.derive(2));
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());
    std::vector<double> pooled;
    pooled.reserve(low.size() + high.size());
    pooled.insert(pooled.end(), low.begin(), low.end());
    pooled.insert(pooled.end(), high.begin(), high.end());
    std::sort(pooled.begin(), pooled.end());
    auto ecdf = [](const std::vector<double>& xs, double v) {
        return double(std::upper_bound(xs.begin(), xs.end(), v) - xs.begin()) /
               double(xs.size());
    };
    // Grid on the pooled 5th..95th percentiles; dominance must hold everywhere
    // so any grid is valid, this one concentrates where the mass is.
    double worst = -1.0;
    for (int q = 5; q <= 95; q += 5) {
        const double x =
            pooled[std::size_t(double(q) / 100.0 * double(pooled.size() - 1))];
        worst = std::max(worst, ecdf(high, x) - ecdf(low, x));
    }
    const double eps =
        2.0 * std::sqrt(std::log(2.0 / 0.01) / (2.0 * double(sample_size)));
    return make_report("fsd_dominance", worst, eps * threshold_scale, sample_size,
                       rng.key());
}

// Total despread interference on a two-path channel with two coded users,
// measured through the full synthesis path (noise off, signal term removed).
// Parts: mean within 3 SE of zero, variance within 5% of the prediction, KS
// against the fitted normal below 0.02.
inline VerificationReport check_interference_distribution(
    double e1, double e2, double h_l, int l, int n, int nc, std::uint64_t num_symbols,
    const CounterRng& rng, double threshold_scale = 1.0) {
    if (nc < 1 || n % nc != 0)
        throw std::invalid_argument("check_interference_distribution: Nc must divide N");
    if (l < 1 || l > nc)
        throw std::invalid_argument("check_interference_distribution: requires 1 <= l <= Nc");
    const int nf = n / nc;
    SystemConfig cfg;
    cfg.total_gain = n;
    cfg.pulses_per_symbol = nf;
    cfg.chips_per_frame = nc;
    cfg.num_users = 2;
    cfg.energies = {e1, e2};
    cfg.noise_sigma = 0.0;
    cfg.coding = Coding::Coded;
    cfg.validate();
    const ChannelImpulseResponse channel = ChannelImpulseResponse::two_path(h_l, l);
    const AmplitudeMatrix amp = AmplitudeMatrix::from_config(cfg);
    const double signal_gain = std::sqrt(double(nf) * e1);

    std::vector<double> xs(num_symbols);
    CounterRng dummy_noise(0);
    for (std::uint64_t s = 0; s < num_symbols; ++s) {
        CounterRng sym_rng = rng.derive(s);
        SpreadingMatrix sm = build_spreading_matrix(cfg, sym_rng.derive(stream::kHopping));
        CounterRng bs = sym_rng.derive(stream::kSymbols);
        SymbolVector b = {static_cast<std::int8_t>(bs.next_sign()),
                          static_cast<std::int8_t>(bs.next_sign())};
        ReceivedFrame r = synth_received_selective(sm, amp, b, channel, 0.0, dummy_noise);
        MatchedStatistic y = matched_statistics(r, sm);
        xs[s] = y.y[0] - signal_gain * b[0];
    }

    SampleSummary s = summarize(xs);
    const double pred = interference_variance_prediction(e1, e2, h_l, l, nc).total();
    const double mean_se = std::sqrt(pred / double(num_symbols));
    const double mean_stat = std::abs(s.mean) / (3.0 * mean_se);
    const double var_stat = std::abs(s.variance - pred) / (0.05 * pred);
    const double mu = s.mean;
    const double sd = std::sqrt(s.variance);
    const double ks = ks_distance(
        xs, [mu, sd](double x) { return standard_normal_cdf((x - mu) / sd); });
    const double ks_stat = ks / 0.02;
    VerificationReport rep =
        make_report("interference_distribution", std::max({mean_stat, var_stat, ks_stat}),
                    1.0 * threshold_scale, num_symbols, rng.key());
    rep.components.push_back(make_report("interference_distribution.mean", mean_stat,
                                         threshold_scale, num_symbols, rng.key()));
    rep.components.push_back(make_report("interference_distribution.variance", var_stat,
                                         threshold_scale, num_symbols, rng.key()));
    rep.components.push_back(make_report("interference_distribution.ks", ks_stat,
                                         threshold_scale, num_symbols, rng.key()));
    return rep;
}

// Frequency of the self-collision event (pulse j-1 arriving on the second
// path exactly where pulse j is sampled) against its probability l/Nc^2.
inline VerificationReport check_collision_event_probability(int nf, int nc, int l,
                                                            std::uint64_t num_frames,
                                                            const CounterRng& rng,
                                                            double threshold_scale = 1.0) {
    if (l < 1 || l > nc)
        throw std::invalid_argument("check_collision_event_probability: 1 <= l <= Nc");
    SystemConfig cfg = detail::rho_config(nf * nc, nf, Coding::Coded);
    std::uint64_t events = 0, pairs = 0;
    HoppingSequence h;
    const std::uint64_t symbols = (num_frames + nf - 1) / static_cast<std::uint64_t>(nf);
    for (std::uint64_t s = 0; s < symbols; ++s) {
        gen_hopping_into(cfg, 0, rng.derive(s), h);
        for (int f = 1; f < nf; ++f) {
            ++pairs;
            if (h.slots[f - 1] + l - nc == h.slots[f]) ++events;
        }
    }
    const double p = double(l) / (double(nc) * nc);
    const double se = std::sqrt(p * (1.0 - p) / double(pairs));
    const double stat = std::abs(double(events) / double(pairs) - p) / (3.0 * se);
    return make_report("interference_event_probability", stat, 1.0 * threshold_scale,
                       pairs, rng.key());
}

}  // namespace thir
