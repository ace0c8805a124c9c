// quickstart - estimate matched-filter and joint-ML BER for one operating
// point and compare against the closed-form prediction.

#include <cstdio>

#include "thir/thir.hpp"

int main() {
    using namespace thir;

    // Two equal-power coded users at 6 dB, N = 128 split as 16 x 8.
    const double energy = snr_to_energy(6.0, 1.0);
    TrialPlan plan;
    plan.config = SystemConfig::equal_power(128, 16, 2, energy, 1.0, Coding::Coded);
    plan.detector = DetectorKind::MF;
    plan.num_trials = 200000;
    plan.seed = 7;

    BerEstimate mf = run_ber(plan);
    plan.detector = DetectorKind::ML;
    plan.num_trials = 50000;
    BerEstimate ml = run_ber(plan);

    std::vector<double> energies = {energy, energy};
    BerPrediction pred =
        ber_isi_mf_general(energies, ChannelImpulseResponse::flat(), 1.0, 128, 8);

    std::printf("MF  BER %.5f  [%.5f, %.5f]  (%llu errors / %llu trials)\n", mf.ber,
                mf.ci_low, mf.ci_high, (unsigned long long)mf.errors,
                (unsigned long long)mf.trials);
    std::printf("ML  BER %.5f  [%.5f, %.5f]\n", ml.ber, ml.ci_low, ml.ci_high);
    std::printf("MF prediction %.5f\n", pred.probability);
    return 0;
}
