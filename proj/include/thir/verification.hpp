// verification.hpp - the batch verification suite behind `verify`: every
// statistical check from the stats module plus the analytic structural
// checks, with a retry-once-on-fresh-seed policy for checks that can fail by
// chance.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thir/analysis.hpp"
#include "thir/stats.hpp"

namespace thir {

enum class VerifyScale { Quick, Full };

struct VerifySuiteResult {
    std::vector<VerificationReport> reports;
    bool all_pass = false;
};

namespace detail {

inline bool report_tree_passes(const VerificationReport& r) {
    if (!r.pass) return false;
    for (const auto& c : r.components)
        if (!report_tree_passes(c)) return false;
    return true;
}

// Statistical checks get one reseeded retry; deterministic checks never
// need one because they cannot fail by chance.
inline VerificationReport with_retry(
    const CounterRng& rng, const std::function<VerificationReport(const CounterRng&)>& fn) {
    VerificationReport first = fn(rng);
    if (report_tree_passes(first)) return first;
    VerificationReport second = fn(rng.derive(stream::kRetry));
    second.retried = true;
    return second;
}

// Q-argument of the general ISI formula must be non-decreasing in Nc over
// every integer factorization; statistic is the worst observed decrease.
inline VerificationReport check_isi_argument_monotone() {
    const ChannelImpulseResponse h{{1.0, 0.9, 0.8}};
    double worst = 0.0;
    for (int n : {64, 128, 256}) {
        const double e = snr_to_energy(6.0, 1.0);
        const std::vector<double> energies = {e, e};
        double prev = -1.0;
        for (int nc : divisors_of(n)) {
            double arg = isi_mf_q_argument(energies, h, 1.0, n, nc);
            if (prev >= 0.0) worst = std::max(worst, prev - arg);
            prev = arg;
        }
    }
    return make_report("isi_argument_monotone", worst, 1e-12, 0, 0);
}

// Closed-form counterpart of the FSD check: the uncoded correlation CDF is
// non-decreasing in Nc (for Nc >= 2) at every probe point.
inline VerificationReport check_fsd_analytic_grid() {
    double worst = -1.0;
    const int n = 256;
    const std::vector<int> divs = divisors_of(n);
    for (double x : {0.5, 1.0, 2.0, 3.0, 4.0, 8.0, 16.0}) {
        double prev = -1.0;
        for (int nc : divs) {
            if (nc < 2) continue;
            double c = uncoded_rho_cdf(x, n, nc);
            if (prev >= 0.0) worst = std::max(worst, prev - c);
            prev = c;
        }
    }
    return make_report("fsd_analytic_grid", worst, 1e-12, 0, 0);
}

// Draws parameter sets satisfying the sufficient conditions and requires the
// exhaustive Eq-grid evaluation to agree (monotone) on each; statistic is the
// number of disagreements.
inline VerificationReport check_monotonicity_conditions_vs_grid(const CounterRng& rng,
                                                                int num_draws) {
    CounterRng r = rng;
    int failures = 0;
    int accepted = 0;
    const int ns[] = {64, 128, 256, 512};
    while (accepted < num_draws) {
        const int n = ns[r.next_below(4)];
        const double sigma = std::pow(10.0, -1.0 + 2.0 * r.next_double());
        const double e1 = std::pow(10.0, -2.0 + 4.0 * r.next_double());
        const double e2 = std::pow(10.0, -2.0 + 4.0 * r.next_double());
        MonotonicityReport rep = mf_monotonicity_conditions(e1, e2, sigma, n);
        if (!rep.conditions_met) continue;
        ++accepted;
        if (!rep.grid_check) ++failures;
    }
    return make_report("monotonicity_conditions_vs_grid", failures, 0.0,
                       static_cast<std::uint64_t>(num_draws), rng.key());
}

}  // namespace detail

// Runs every check.  Full scale uses the stats-module default sample sizes;
// quick scale drops them to 1e4 (1e5 frames for event counting) and relaxes
// thresholds by x2.
inline VerifySuiteResult run_verification_suite(VerifyScale scale, std::uint64_t seed) {
    const bool quick = scale == VerifyScale::Quick;
    const std::uint64_t n = quick ? 10000 : 100000;
    const std::uint64_t frames = quick ? 100000 : 1000000;
    const double ts = quick ? 2.0 : 1.0;
    CounterRng root(seed);

    VerifySuiteResult out;
    int idx = 0;
    auto add = [&](const std::function<VerificationReport(const CounterRng&)>& fn) {
        out.reports.push_back(detail::with_retry(root.derive(idx++), fn));
    };

    // Coded correlations are asymptotically normal only when Nf/Nc is large;
    // Nf/Nc = 16 is comfortably inside that regime at N = 4096.
    add([&](const CounterRng& r) { return check_lemma1_normality(4096, 256, n, r, ts); });
    add([&](const CounterRng& r) { return check_uncoded_moments(1024, 16, n, r, ts); });
    add([&](const CounterRng& r) { return check_fsd_dominance(256, 4, 64, n, r, ts); });
    add([&](const CounterRng& r) {
        return check_interference_distribution(1.0, 1.0, 0.5, 4, 4096, 8, n, r, ts);
    });
    add([&](const CounterRng& r) {
        return check_collision_event_probability(512, 8, 4, frames, r, ts);
    });
    add([&](const CounterRng& r) {
        return detail::check_monotonicity_conditions_vs_grid(r, quick ? 20 : 50);
    });
    out.reports.push_back(detail::check_isi_argument_monotone());
    out.reports.push_back(detail::check_fsd_analytic_grid());

    out.all_pass = true;
    for (const auto& r : out.reports)
        out.all_pass = out.all_pass && detail::report_tree_passes(r);
    return out;
}

namespace detail {

inline void render_report_line(const VerificationReport& r, std::string& out) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%s,%llu,%llu,%s\n",
                  r.check_name.c_str(), r.statistic, r.threshold,
                  r.pass ? "pass" : "FAIL",
                  static_cast<unsigned long long>(r.sample_size),
                  static_cast<unsigned long long>(r.seed), r.retried ? "retried" : "-");
    out += buf;
    for (const auto& c : r.components) render_report_line(c, out);
}

}  // namespace detail

inline std::string render_verification_report(const VerifySuiteResult& result) {
    std::string out = "check,statistic,threshold,result,sample_size,seed,retry\n";
    for (const auto& r : result.reports) detail::render_report_line(r, out);
    out += result.all_pass ? "summary,,,all-pass,,,-\n" : "summary,,,FAIL,,,-\n";
    return out;
}

}  // namespace thir
