// Tests for the seeded Monte Carlo engine.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "thir/montecarlo.hpp"

using namespace thir;

namespace {
TrialPlan basic_plan(int n, int nf, int k, double e, double sigma, Coding cod,
                     DetectorKind det, std::uint64_t trials, std::uint64_t seed) {
    TrialPlan p;
    p.config = SystemConfig::equal_power(n, nf, k, e, sigma, cod);
    p.detector = det;
    p.num_trials = trials;
    p.seed = seed;
    return p;
}
}  // namespace

TEST_CASE("plan validation", "[montecarlo]") {
    TrialPlan p = basic_plan(64, 8, 2, 1.0, 1.0, Coding::Coded, DetectorKind::MF, 0, 1);
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);  // zero trials
    p.num_trials = 10;
    p.target_user = 2;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);  // target out of range
    p.target_user = 0;
    p.validate();

    TrialPlan ml = basic_plan(64, 8, 21, 1.0, 1.0, Coding::Coded, DetectorKind::ML, 10, 1);
    REQUIRE_THROWS_AS(ml.validate(), std::invalid_argument);  // 2^21 hypotheses
}

TEST_CASE("noiseless single user never errs", "[montecarlo]") {
    TrialPlan p = basic_plan(64, 8, 1, 2.0, 0.0, Coding::Coded, DetectorKind::MF, 5000, 3);
    BerEstimate e = run_ber(p);
    REQUIRE(e.errors == 0);
    REQUIRE(e.ber == 0.0);
    REQUIRE(e.ci_low == 0.0);
}

TEST_CASE("noise-dominated limit sits at one half", "[montecarlo]") {
    TrialPlan p = basic_plan(16, 4, 1, 1.0, 1e6, Coding::Coded, DetectorKind::MF, 100000, 4);
    BerEstimate e = run_ber(p);
    REQUIRE(e.ci_low <= 0.5);
    REQUIRE(e.ci_high >= 0.5);
}

TEST_CASE("estimates are reproducible and thread-count independent", "[montecarlo]") {
    TrialPlan p = basic_plan(64, 8, 3, 3.0, 1.0, Coding::Coded, DetectorKind::MMSE, 30000, 9);
    BerEstimate a = run_ber(p, 1);
    BerEstimate b = run_ber(p, 1);
    BerEstimate c = run_ber(p, 4);
    REQUIRE(a.errors == b.errors);
    REQUIRE(a.ber == b.ber);
    REQUIRE(a.errors == c.errors);
    REQUIRE(a.trials == c.trials);
    REQUIRE(a.zf_pinv_trials == c.zf_pinv_trials);

    p.max_errors = 120;  // early stop must also be scheduling-independent
    BerEstimate s1 = run_ber(p, 1);
    BerEstimate s4 = run_ber(p, 4);
    REQUIRE(s1.errors == s4.errors);
    REQUIRE(s1.trials == s4.trials);
}

TEST_CASE("monte carlo agrees with the exact two-user law", "[montecarlo]") {
    const double e6 = snr_to_energy(6.0, 1.0);
    for (int nf : {8, 32}) {
        TrialPlan p = basic_plan(128, nf, 2, e6, 1.0, Coding::Uncoded, DetectorKind::MF,
                                 300000, 100 + nf);
        BerEstimate est = run_ber(p);
        const double exact = oracle::exact_two_user_mf_ber(e6, e6, 1.0, 128, nf, false);
        const double se = std::sqrt(exact * (1 - exact) / double(est.trials));
        REQUIRE(std::abs(est.ber - exact) < 4.0 * se);
    }
}

TEST_CASE("coded pulse-rate invariance example at 1e6 trials", "[montecarlo][slow]") {
    // two coded users, both at 6 dB, N = 128: the Nf = 8 and Nf = 128
    // estimates' 95% intervals overlap
    const double e6 = snr_to_energy(6.0, 1.0);
    TrialPlan p8 = basic_plan(128, 8, 2, e6, 1.0, Coding::Coded, DetectorKind::MF,
                              1000000, 2100);
    TrialPlan p128 = basic_plan(128, 128, 2, e6, 1.0, Coding::Coded, DetectorKind::MF,
                                1000000, 2101);
    BerEstimate a = run_ber(p8);
    BerEstimate b = run_ber(p128);
    REQUIRE(a.ci_low <= b.ci_high);
    REQUIRE(b.ci_low <= a.ci_high);
}

TEST_CASE("wilson interval coverage on a synthetic bernoulli stream", "[montecarlo]") {
    CounterRng rng(77);
    int covered = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::uint64_t errors = 0;
        const int n = 500;
        for (int i = 0; i < n; ++i) errors += rng.next_double() < 0.1;
        BerEstimate e = wilson_estimate(errors, n);
        covered += (e.ci_low <= 0.1 && 0.1 <= e.ci_high);
    }
    REQUIRE(covered >= 930);
}

TEST_CASE("early stopping does not bias the estimate", "[montecarlo]") {
    // high-BER scenario: uncoded full-spreading with an equal-power interferer
    const double e6 = snr_to_energy(6.0, 1.0);
    TrialPlan p = basic_plan(128, 128, 2, e6, 1.0, Coding::Uncoded, DetectorKind::MF,
                             60000, 31);
    BerEstimate full = run_ber(p);
    p.max_errors = 800;
    BerEstimate stopped = run_ber(p);
    REQUIRE(stopped.trials < full.trials);
    REQUIRE(stopped.errors >= 800);
    REQUIRE(stopped.ci_low <= full.ci_high);
    REQUIRE(full.ci_low <= stopped.ci_high);
}

TEST_CASE("zf pseudo-inverse fallbacks are counted", "[montecarlo]") {
    // uncoded Nc = 1: all spreading vectors identical, R is singular always
    TrialPlan p = basic_plan(16, 16, 2, 1.0, 1.0, Coding::Uncoded, DetectorKind::ZF,
                             100, 5);
    BerEstimate e = run_ber(p);
    REQUIRE(e.zf_pinv_trials == 100);
}

TEST_CASE("sweep plans derive configs and seeds per point", "[montecarlo]") {
    TrialPlan base = basic_plan(128, 8, 2, snr_to_energy(5.0, 1.0), 1.0, Coding::Coded,
                                DetectorKind::MF, 1000, 42);
    base.config.energies[1] = snr_to_energy(8.0, 1.0);  // +3 dB interferer

    // pulse-rate axis replaces the factorization
    TrialPlan pr = plan_for_axis_value(base, SweepAxis::PulseRate, 32);
    REQUIRE(pr.config.pulses_per_symbol == 32);
    REQUIRE(pr.config.chips_per_frame == 4);
    REQUIRE(pr.seed != base.seed);
    REQUIRE_THROWS_WITH(plan_for_axis_value(base, SweepAxis::PulseRate, 7),
                        Catch::Matchers::ContainsSubstring("valid values"));

    // snr axis rescales every user, preserving dB offsets
    TrialPlan snr = plan_for_axis_value(base, SweepAxis::SnrDb, 7.0);
    REQUIRE(snr.config.energies[0] == Catch::Approx(snr_to_energy(7.0, 1.0)));
    REQUIRE(snr.config.energies[1] == Catch::Approx(snr_to_energy(10.0, 1.0)));

    // user axis pads with the last interferer energy
    TrialPlan more = plan_for_axis_value(base, SweepAxis::NumUsers, 5);
    REQUIRE(more.config.num_users == 5);
    REQUIRE(more.config.energies.size() == 5);
    REQUIRE(more.config.energies[4] == base.config.energies[1]);

    // a singleton sweep equals run_ber of the derived point plan
    std::vector<SweepPoint> pts = run_sweep(base, SweepAxis::PulseRate, {16});
    BerEstimate direct = run_ber(plan_for_axis_value(base, SweepAxis::PulseRate, 16));
    REQUIRE(pts.size() == 1);
    REQUIRE(pts[0].estimate.errors == direct.errors);
    REQUIRE(pts[0].estimate.ber == direct.ber);
}

TEST_CASE("snr sweep produces monotone BER", "[montecarlo]") {
    TrialPlan base = basic_plan(64, 8, 1, snr_to_energy(4.0, 1.0), 1.0, Coding::Coded,
                                DetectorKind::MF, 100000, 51);
    auto pts = run_sweep(base, SweepAxis::SnrDb, {2.0, 4.0, 6.0, 8.0});
    for (std::size_t i = 1; i < pts.size(); ++i)
        REQUIRE(pts[i].estimate.ber < pts[i - 1].estimate.ber);
}
