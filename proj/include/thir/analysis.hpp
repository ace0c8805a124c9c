// analysis.hpp - closed-form BER approximations for the matched filter and
// the analytic side of the asymptotic claims: the two-user and K-user flat
// uncoded formulas, the two-path and general-channel ISI formulas, the
// monotonicity conditions and the uncoded correlation CDF.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "thir/channel.hpp"
#include "thir/config.hpp"

namespace thir {

// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_function(double x) { return 0.5 * std::erfc(x / 1.4142135623730951); }

// E_X[Q(mu + lambda X)] = Q(mu / sqrt(1 + lambda^2)) for X ~ N(0,1).
inline double gaussian_q_average(double mu, double lambda) {
    return q_function(mu / std::sqrt(1.0 + lambda * lambda));
}

enum class BerFormula {
    SingleUserAwgn,
    TwoUserUncodedFlat,
    MultiUserUncodedFlat,
    IsiTwoPath,
    IsiGeneral,
};

struct BerPrediction {
    double probability = 0.0;
    BerFormula formula = BerFormula::SingleUserAwgn;
};

inline BerPrediction ber_single_user_awgn(double e1, double sigma) {
    return {q_function(std::sqrt(e1) / sigma), BerFormula::SingleUserAwgn};
}

// Two uncoded users, flat channel:
//   1/2 Q(f1) + 1/2 Q(f2),  f{1,2} = (sqrt(E1) +- sqrt(E2)/Nc) / D,
//   D = sqrt(sigma^2 + (E2/N)(1 - 1/Nc)).
inline BerPrediction ber_two_user_uncoded_mf(double e1, double e2, double sigma, int n,
                                             int nc) {
    if (nc < 1 || n % nc != 0)
        throw std::invalid_argument("ber_two_user_uncoded_mf: Nc must divide N");
    if (e2 == 0.0) return {ber_single_user_awgn(e1, sigma).probability,
                           BerFormula::TwoUserUncodedFlat};
    const double d = std::sqrt(sigma * sigma + (e2 / n) * (1.0 - 1.0 / nc));
    const double f1 = (std::sqrt(e1) + std::sqrt(e2) / nc) / d;
    const double f2 = (std::sqrt(e1) - std::sqrt(e2) / nc) / d;
    return {0.5 * q_function(f1) + 0.5 * q_function(f2), BerFormula::TwoUserUncodedFlat};
}

// K equal-power uncoded interferers, flat channel.  The Gaussian interference
// variance uses K-1 interferers (the derivation's sum over users 2..K).
inline BerPrediction ber_multiuser_uncoded_mf(double e1, double e_interferer, int k,
                                              double sigma, int n, int nc) {
    if (k < 1) throw std::invalid_argument("ber_multiuser_uncoded_mf: K >= 1 required");
    if (nc < 1 || n % nc != 0)
        throw std::invalid_argument("ber_multiuser_uncoded_mf: Nc must divide N");
    const double var =
        sigma * sigma +
        (k - 1) * e_interferer * (1.0 / n + 1.0 / (double(nc) * nc) - 1.0 / (double(n) * nc));
    return {q_function(std::sqrt(e1) / std::sqrt(var)), BerFormula::MultiUserUncodedFlat};
}

// Two coded users over a two-path channel h = [1, 0...0, h_l], valid for
// l <= Nc:  Q( sqrt(E1) / sqrt(sigma^2 + E1 h_l^2 l/(N Nc) + E2 (1+h_l^2)/N) ).
inline BerPrediction ber_isi_mf_two_path(double e1, double e2, double h_l, int l,
                                         double sigma, int n, int nc) {
    if (l > nc)
        throw std::invalid_argument(
            "ber_isi_mf_two_path: requires l <= Nc; use ber_isi_mf_general");
    if (l < 0) throw std::invalid_argument("ber_isi_mf_two_path: l must be nonnegative");
    const double var = sigma * sigma + e1 * h_l * h_l * l / (double(n) * nc) +
                       e2 * (1.0 + h_l * h_l) / n;
    return {q_function(std::sqrt(e1) / std::sqrt(var)), BerFormula::IsiTwoPath};
}

namespace detail {

// Self-interference weight of the general ISI formula:
//   sum_{i=1}^{min(L,Nc)} (i/Nc) h_i^2  +  sum_{i=Nc+1}^{L} h_i^2.
inline double isi_self_weight(const ChannelImpulseResponse& h, int nc) {
    const int spread = h.delay_spread();
    double w = 0.0;
    for (int i = 1; i <= spread; ++i) {
        const double hi2 = h.taps[i] * h.taps[i];
        w += i <= nc ? (double(i) / nc) * hi2 : hi2;
    }
    return w;
}

}  // namespace detail

// General-channel matched filter BER for coded users.  Interference sums run
// over users 2..K; ||h|| denotes sum of squared taps including h0.  A non-unit
// leading tap only rescales the despread signal, hence the h0 factor in the
// numerator.
inline BerPrediction ber_isi_mf_general(std::span<const double> energies,
                                        const ChannelImpulseResponse& h, double sigma, int n,
                                        int nc) {
    h.validate();
    if (energies.empty())
        throw std::invalid_argument("ber_isi_mf_general: need at least one user energy");
    if (nc < 1 || n % nc != 0)
        throw std::invalid_argument("ber_isi_mf_general: Nc must divide N");
    const double e1 = energies[0];
    double mai_energy = 0.0;
    for (std::size_t i = 1; i < energies.size(); ++i) mai_energy += energies[i];
    const double var = sigma * sigma + (e1 / n) * detail::isi_self_weight(h, nc) +
                       (h.energy() / n) * mai_energy;
    return {q_function(h.taps[0] * std::sqrt(e1) / std::sqrt(var)), BerFormula::IsiGeneral};
}

// Argument of the Q function in the general ISI formula; exposed because its
// monotonicity in Nc is one of the structural claims under test.
inline double isi_mf_q_argument(std::span<const double> energies,
                                const ChannelImpulseResponse& h, double sigma, int n,
                                int nc) {
    const double e1 = energies[0];
    double mai_energy = 0.0;
    for (std::size_t i = 1; i < energies.size(); ++i) mai_energy += energies[i];
    const double var = sigma * sigma + (e1 / n) * detail::isi_self_weight(h, nc) +
                       (h.energy() / n) * mai_energy;
    return h.taps[0] * std::sqrt(e1) / std::sqrt(var);
}

struct MonotonicityReport {
    bool energy_per_chip_ok = false;  // E1/N < sigma^2 and E2/N < sigma^2
    bool energy_ratio_ok = false;     // sqrt(E2)/N < sqrt(E1) < N sqrt(E2)
    bool conditions_met = false;
    bool grid_check = false;  // two-user BER non-increasing over divisor grid of Nc
};

// Sufficient conditions for the two-user uncoded MF BER to decrease in Nc,
// plus a direct numeric check over every integer factorization of N.
inline MonotonicityReport mf_monotonicity_conditions(double e1, double e2, double sigma,
                                                     int n) {
    if (!(e1 > 0.0) || !(e2 > 0.0) || !(sigma > 0.0) || n < 1)
        throw std::invalid_argument("mf_monotonicity_conditions: positive inputs required");
    MonotonicityReport rep;
    const double s2 = sigma * sigma;
    rep.energy_per_chip_ok = (e1 / n < s2) && (e2 / n < s2);
    rep.energy_ratio_ok =
        (std::sqrt(e2) / n < std::sqrt(e1)) && (std::sqrt(e1) < n * std::sqrt(e2));
    rep.conditions_met = rep.energy_per_chip_ok && rep.energy_ratio_ok;
    rep.grid_check = true;
    double prev = 2.0;
    for (int nc : divisors_of(n)) {
        double p = ber_two_user_uncoded_mf(e1, e2, sigma, n, nc).probability;
        if (p > prev + 1e-14) rep.grid_check = false;
        prev = p;
    }
    return rep;
}

// Asymptotic CDF of the uncoded cross-correlation at a given factorization:
//   P(rho|Nc < x) = 1 - Q((x Nc^2 - N) / sqrt(N Nc (Nc - 1))),  Nc > 1.
// At Nc = 1 every pulse collides and rho is a point mass at Nf = N.
inline double uncoded_rho_cdf(double x, int n, int nc) {
    if (nc < 1 || n % nc != 0)
        throw std::invalid_argument("uncoded_rho_cdf: Nc must divide N");
    if (nc == 1) return x <= double(n) ? 0.0 : 1.0;
    const double arg =
        (x * nc * nc - n) / std::sqrt(double(n) * nc * (nc - 1.0));
    return 1.0 - q_function(arg);
}

// Predicted interference variances of the despread statistic, two-path
// channel.  The self term saturates at E1 h_l^2 / Nc once l exceeds Nc.
struct InterferenceVariance {
    double self_var = 0.0;
    double mai_var = 0.0;

    double total() const { return self_var + mai_var; }
};

inline InterferenceVariance interference_variance_prediction(double e1, double e2,
                                                             double h_l, int l, int nc) {
    if (l < 0 || nc < 1)
        throw std::invalid_argument("interference_variance_prediction: l >= 0, Nc >= 1");
    InterferenceVariance v;
    v.self_var = e1 * h_l * h_l * double(std::min(l, nc)) / (double(nc) * nc);
    v.mai_var = e2 * (1.0 + h_l * h_l) / nc;
    return v;
}

}  // namespace thir
