// config.hpp - system parameters shared by every layer of the simulator.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace thir {

// Per-pulse polarities: random +-1 (coded) or all +1 (uncoded).
enum class Coding { Coded, Uncoded };

inline const char* to_string(Coding c) {
    return c == Coding::Coded ? "coded" : "uncoded";
}

inline std::vector<int> divisors_of(int n) {
    std::vector<int> d;
    for (int i = 1; i <= n; ++i)
        if (n % i == 0) d.push_back(i);
    return d;
}

// Ground truth of one experiment: total processing gain N split as N = Nf*Nc,
// user count, per-user bit energies and the per-chip noise level.
struct SystemConfig {
    int total_gain = 0;         // N
    int pulses_per_symbol = 0;  // Nf, pulses per information symbol
    int chips_per_frame = 0;    // Nc, candidate slots per frame
    int num_users = 0;          // K
    std::vector<double> energies;  // E_k > 0, energy per bit
    double noise_sigma = 0.0;      // per-chip noise standard deviation
    Coding coding = Coding::Coded;

    void validate() const {
        if (pulses_per_symbol < 1 || chips_per_frame < 1)
            throw std::invalid_argument("config: Nf and Nc must be positive");
        if (total_gain != pulses_per_symbol * chips_per_frame)
            throw std::invalid_argument(
                "config: total gain " + std::to_string(total_gain) + " != " +
                std::to_string(pulses_per_symbol) + " * " + std::to_string(chips_per_frame));
        if (num_users < 1)
            throw std::invalid_argument("config: need at least one user");
        if (static_cast<int>(energies.size()) != num_users)
            throw std::invalid_argument("config: one energy per user required");
        for (double e : energies)
            if (!(e > 0.0) || !std::isfinite(e))
                throw std::invalid_argument("config: energies must be positive finite");
        if (noise_sigma < 0.0 || !std::isfinite(noise_sigma))
            throw std::invalid_argument("config: noise sigma must be nonnegative finite");
    }

    static SystemConfig equal_power(int n, int nf, int k, double energy, double sigma,
                                    Coding coding) {
        SystemConfig c;
        c.total_gain = n;
        c.pulses_per_symbol = nf;
        c.chips_per_frame = (nf > 0 && n % nf == 0) ? n / nf : 0;
        c.num_users = k;
        c.energies.assign(static_cast<std::size_t>(k), energy);
        c.noise_sigma = sigma;
        c.coding = coding;
        c.validate();
        return c;
    }

    // Same system refactored to a different pulse rate.  Nf must divide N.
    SystemConfig with_pulse_rate(int nf) const {
        if (nf < 1 || total_gain % nf != 0) {
            std::string msg = "pulse rate " + std::to_string(nf) + " does not divide N=" +
                              std::to_string(total_gain) + "; valid values:";
            for (int d : divisors_of(total_gain)) msg += " " + std::to_string(d);
            throw std::invalid_argument(msg);
        }
        SystemConfig c = *this;
        c.pulses_per_symbol = nf;
        c.chips_per_frame = total_gain / nf;
        c.validate();
        return c;
    }
};

}  // namespace thir
