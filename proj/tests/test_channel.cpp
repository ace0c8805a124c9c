// Tests for received-vector synthesis and the matched statistic.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "thir/channel.hpp"
#include "thir/spreading.hpp"

using namespace thir;

namespace {
SpreadingMatrix fixed_matrix(const SystemConfig& c, std::uint64_t seed) {
    return build_spreading_matrix(c, CounterRng(seed));
}
}  // namespace

TEST_CASE("noiseless flat synthesis is the weighted spreading sum", "[channel]") {
    // E1 = Nf so a1 = 1: r must equal the spreading vector exactly.
    SystemConfig c = SystemConfig::equal_power(32, 8, 1, 8.0, 0.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 12);
    AmplitudeMatrix a = AmplitudeMatrix::from_config(c);
    CounterRng rng(1);
    ReceivedFrame r = synth_received_flat(s, a, {1}, 0.0, rng);
    REQUIRE(r.samples.size() == 32);
    for (int j = 0; j < 32; ++j)
        REQUIRE(r.samples[j] == Catch::Approx(double(s.columns[0].chips[j])).margin(0));

    ReceivedFrame neg = synth_received_flat(s, a, {-1}, 0.0, rng);
    for (int j = 0; j < 32; ++j) REQUIRE(neg.samples[j] == -r.samples[j]);
}

TEST_CASE("flat synthesis noise variance", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(1000, 10, 1, 4.0, 1.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 3);
    AmplitudeMatrix a = AmplitudeMatrix::from_config(c);
    CounterRng rng(77);
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (int frame = 0; frame < 1000; ++frame) {  // 1e6 chips total
        ReceivedFrame r = synth_received_flat(s, a, {1}, 1.0, rng);
        for (int j = 0; j < 1000; ++j) {
            const double noise = r.samples[j] - double(s.columns[0].chips[j]) * a.diag[0];
            sum += noise;
            sum2 += noise * noise;
            ++count;
        }
    }
    const double mean = sum / double(count);
    const double var = sum2 / double(count) - mean * mean;
    REQUIRE(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("energy conservation without noise", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(48, 12, 1, 5.75, 0.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 9);
    AmplitudeMatrix a = AmplitudeMatrix::from_config(c);
    CounterRng rng(1);
    ReceivedFrame r = synth_received_flat(s, a, {1}, 0.0, rng);
    double e = 0.0;
    for (double v : r.samples) e += v * v;
    REQUIRE(e == Catch::Approx(5.75).epsilon(1e-13));
}

TEST_CASE("matched statistic", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(32, 8, 2, 8.0, 0.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 21);
    // r = own spreading vector with unit amplitude -> y_1 = Nf
    ReceivedFrame r;
    r.samples.assign(32, 0.0);
    for (int j = 0; j < 32; ++j) r.samples[j] = s.columns[0].chips[j];
    MatchedStatistic y = matched_statistics(r, s);
    REQUIRE(y.y[0] == Catch::Approx(8.0));

    ReceivedFrame zero;
    zero.samples.assign(32, 0.0);
    MatchedStatistic y0 = matched_statistics(zero, s);
    REQUIRE(y0.y[0] == 0.0);
    REQUIRE(y0.y[1] == 0.0);

    // random instance equals the naive loop oracle
    CounterRng rng(4);
    for (int j = 0; j < 32; ++j) zero.samples[j] = rng.next_gaussian();
    MatchedStatistic yr = matched_statistics(zero, s);
    for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (int j = 0; j < 32; ++j) acc += double(s.columns[k].chips[j]) * zero.samples[j];
        REQUIRE(yr.y[k] == Catch::Approx(acc).margin(1e-12));
    }
}

TEST_CASE("identity channel reproduces flat synthesis bit for bit", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(64, 8, 3, 2.0, 1.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 5);
    AmplitudeMatrix a = AmplitudeMatrix::from_config(c);
    SymbolVector b = {1, -1, 1};
    CounterRng r1(123), r2(123);
    ReceivedFrame flat = synth_received_flat(s, a, b, 1.0, r1);
    ReceivedFrame sel = synth_received_selective(s, a, b, ChannelImpulseResponse::flat(),
                                                 1.0, r2);
    REQUIRE(sel.samples.size() == flat.samples.size());
    for (std::size_t j = 0; j < flat.samples.size(); ++j)
        REQUIRE(sel.samples[j] == flat.samples[j]);
}

TEST_CASE("selective synthesis spreads single pulse over the taps", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(8, 1, 1, 1.0, 0.0, Coding::Coded);
    HoppingSequence h;
    h.slots = {5};
    h.polarities = {1};
    SpreadingMatrix s;
    s.length = 8;
    s.columns = {build_spreading_vector(h, c)};
    AmplitudeMatrix a = AmplitudeMatrix::from_config(c);
    ChannelImpulseResponse ch{{1.0, 0.9, 0.8}};
    CounterRng rng(1);
    ReceivedFrame r = synth_received_selective(s, a, {1}, ch, 0.0, rng);
    REQUIRE(r.samples.size() == 10);
    for (int j = 0; j < 10; ++j) {
        if (j == 5) REQUIRE(r.samples[j] == Catch::Approx(a.diag[0]));
        else if (j == 6) REQUIRE(r.samples[j] == Catch::Approx(0.9 * a.diag[0]));
        else if (j == 7) REQUIRE(r.samples[j] == Catch::Approx(0.8 * a.diag[0]));
        else REQUIRE(r.samples[j] == 0.0);
    }
}

TEST_CASE("selective synthesis matches an explicit Toeplitz multiply", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(48, 8, 3, 3.0, 0.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 31);
    AmplitudeMatrix a = AmplitudeMatrix::from_config(c);
    SymbolVector b = {1, -1, -1};
    ChannelImpulseResponse ch{{1.0, -0.4, 0.25, 0.1}};
    CounterRng rng(1);
    ReceivedFrame r = synth_received_selective(s, a, b, ch, 0.0, rng);

    // oracle: x = S A b in the chip domain, then H0 x with H0 the full
    // (N+L) x N convolution Toeplitz matrix
    const int n = 48, spread = 3;
    std::vector<double> x(n, 0.0);
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < n; ++j)
            x[j] += double(s.columns[k].chips[j]) * a.diag[k] * b[k];
    std::vector<double> expect(n + spread, 0.0);
    for (int row = 0; row < n + spread; ++row)
        for (int col = 0; col < n; ++col) {
            const int tap = row - col;
            if (tap >= 0 && tap <= spread) expect[row] += ch.taps[tap] * x[col];
        }
    REQUIRE(r.samples.size() == expect.size());
    for (std::size_t j = 0; j < expect.size(); ++j)
        REQUIRE(r.samples[j] == Catch::Approx(expect[j]).margin(1e-12));
}

TEST_CASE("filtered spreading columns feed the matched statistic", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(32, 8, 2, 2.0, 0.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 44);
    ChannelImpulseResponse ch{{1.0, 0.9, 0.8}};
    auto cols = filtered_spreading(s, ch);
    REQUIRE(cols.size() == 2);
    REQUIRE(cols[0].size() == 34);
    ReceivedFrame r;
    r.samples.assign(34, 0.0);
    CounterRng rng(8);
    for (double& v : r.samples) v = rng.next_gaussian();
    MatchedStatistic y = matched_statistics(r, cols);
    for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (int j = 0; j < 34; ++j) acc += cols[k][j] * r.samples[j];
        REQUIRE(y.y[k] == Catch::Approx(acc).margin(1e-12));
    }
}

TEST_CASE("matched statistic noise covariance approaches sigma^2 R", "[channel]") {
    SystemConfig c = SystemConfig::equal_power(64, 8, 4, 1.0, 1.0, Coding::Coded);
    SpreadingMatrix s = fixed_matrix(c, 55);
    CorrelationMatrix rint = correlation_matrix(s);
    const double sigma = 0.7;
    const int frames = 100000;
    CounterRng rng(606);
    std::vector<double> cov(16, 0.0);
    ReceivedFrame r;
    r.samples.assign(64, 0.0);
    for (int t = 0; t < frames; ++t) {
        for (double& v : r.samples) v = sigma * rng.next_gaussian();
        MatchedStatistic y = matched_statistics(r, s);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) cov[std::size_t(i) * 4 + j] += y.y[i] * y.y[j];
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double expect = sigma * sigma * rint.at(i, j);
            const double got = cov[std::size_t(i) * 4 + j] / frames;
            num += (got - expect) * (got - expect);
            den += expect * expect;
        }
    REQUIRE(std::sqrt(num / den) < 0.05);  // relative Frobenius error
}

TEST_CASE("snr to energy mapping", "[channel]") {
    REQUIRE(snr_to_energy(0.0, 1.0) == Catch::Approx(2.0).epsilon(1e-14));
    REQUIRE(snr_to_energy(10.0 * std::log10(4.0), 1.0) == Catch::Approx(8.0).epsilon(1e-13));
    // high-precision exponential oracle
    const long double expect = 2.0L * std::pow(10.0L, 0.6L);
    REQUIRE(snr_to_energy(6.0, 1.0) ==
            Catch::Approx(static_cast<double>(expect)).epsilon(1e-14));
    REQUIRE(snr_to_energy(6.0, 1.0) == Catch::Approx(7.962143411).epsilon(1e-9));
    REQUIRE_THROWS_AS(snr_to_energy(6.0, 0.0), std::invalid_argument);
}

TEST_CASE("channel validation", "[channel]") {
    ChannelImpulseResponse bad{{0.0, 1.0}};
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    REQUIRE(ChannelImpulseResponse::two_path(0.9, 3).taps ==
            std::vector<double>{1.0, 0.0, 0.0, 0.9});
    REQUIRE(ChannelImpulseResponse::two_path(0.9, 3).delay_spread() == 3);
}
