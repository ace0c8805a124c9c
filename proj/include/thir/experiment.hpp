// experiment.hpp - executes a scenario (detectors x pulse rates x axis values)
// and renders the results as CSV and a dependency-free SVG plot.
//
// The CSV schema is the stable contract:
//   axis,detector,pulse_rate,ber,ci_low,ci_high,analytic
// and output is byte-identical for identical (spec, seed).

#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "thir/analysis.hpp"
#include "thir/montecarlo.hpp"
#include "thir/scenario.hpp"

namespace thir {

struct SweepRow {
    double axis_value = 0.0;
    DetectorKind detector = DetectorKind::MF;
    int pulse_rate = 0;
    BerEstimate estimate;
    std::optional<double> analytic;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<SweepRow> rows;
};

// Matched-filter prediction applicable to this operating point, if any.
inline std::optional<double> analytic_mf_ber(const SystemConfig& cfg,
                                             const std::optional<ChannelImpulseResponse>& ch,
                                             int target_user) {
    const double e1 = cfg.energies[static_cast<std::size_t>(target_user)];
    if (cfg.coding == Coding::Coded) {
        // The general formula covers the flat case through h = [1].
        std::vector<double> energies;
        energies.push_back(e1);
        for (int k = 0; k < cfg.num_users; ++k)
            if (k != target_user) energies.push_back(cfg.energies[static_cast<std::size_t>(k)]);
        ChannelImpulseResponse h = ch ? *ch : ChannelImpulseResponse::flat();
        return ber_isi_mf_general(energies, h, cfg.noise_sigma, cfg.total_gain,
                                  cfg.chips_per_frame)
            .probability;
    }
    if (ch) return std::nullopt;  // no uncoded prediction on selective channels
    if (cfg.num_users == 1)
        return ber_single_user_awgn(e1, cfg.noise_sigma).probability;
    if (cfg.num_users == 2) {
        const double e2 = cfg.energies[target_user == 0 ? 1 : 0];
        return ber_two_user_uncoded_mf(e1, e2, cfg.noise_sigma, cfg.total_gain,
                                       cfg.chips_per_frame)
            .probability;
    }
    // K-user formula assumes one common interferer power.
    double e2 = 0.0;
    bool first = true, equal = true;
    for (int k = 0; k < cfg.num_users; ++k) {
        if (k == target_user) continue;
        if (first) {
            e2 = cfg.energies[static_cast<std::size_t>(k)];
            first = false;
        } else if (cfg.energies[static_cast<std::size_t>(k)] != e2) {
            equal = false;
        }
    }
    if (!equal) return std::nullopt;
    return ber_multiuser_uncoded_mf(e1, e2, cfg.num_users, cfg.noise_sigma, cfg.total_gain,
                                    cfg.chips_per_frame)
        .probability;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       int threads = default_thread_count()) {
    spec.validate();
    ExperimentResult result;
    result.spec = spec;

    const std::vector<int> pulse_loop =
        spec.axis == SweepAxis::PulseRate ? std::vector<int>{spec.base_pulse_rate}
                                          : spec.pulse_rates;
    for (int pr : pulse_loop) {
        for (DetectorKind det : spec.detectors) {
            TrialPlan base;
            base.config = spec.base_config().with_pulse_rate(pr);
            base.channel = spec.channel;
            base.detector = det;
            base.target_user = spec.target_user;
            base.num_trials = det == DetectorKind::ML ? spec.ml_trials : spec.trials;
            if (spec.max_errors > 0) base.max_errors = spec.max_errors;
            base.seed = CounterRng(spec.seed)
                            .derive(static_cast<std::uint64_t>(det))
                            .derive(static_cast<std::uint64_t>(pr))
                            .key();
            for (double value : spec.values) {
                TrialPlan point = plan_for_axis_value(base, spec.axis, value);
                SweepRow row;
                row.axis_value = value;
                row.detector = det;
                row.pulse_rate = point.config.pulses_per_symbol;
                row.estimate = run_ber(point, threads);
                if (spec.analytic && det == DetectorKind::MF)
                    row.analytic =
                        analytic_mf_ber(point.config, point.channel, point.target_user);
                result.rows.push_back(row);
            }
        }
    }
    return result;
}

namespace detail {

inline std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline std::string render_csv(const ExperimentResult& result) {
    std::string out = "axis,detector,pulse_rate,ber,ci_low,ci_high,analytic\n";
    for (const SweepRow& row : result.rows) {
        out += detail::format_g(row.axis_value);
        out += ',';
        out += to_string(row.detector);
        out += ',';
        out += std::to_string(row.pulse_rate);
        out += ',';
        out += detail::format_g(row.estimate.ber);
        out += ',';
        out += detail::format_g(row.estimate.ci_low);
        out += ',';
        out += detail::format_g(row.estimate.ci_high);
        out += ',';
        if (row.analytic) out += detail::format_g(*row.analytic);
        out += '\n';
    }
    return out;
}

// Minimal hand-rolled SVG: log-scaled BER axis, one polyline per
// (detector, pulse rate) series, dashed analytic overlays, CI whiskers.
inline std::string render_svg(const ExperimentResult& result) {
    const double width = 760, height = 520;
    const double x0 = 80, x1 = 710, y0 = 40, y1 = 460;
    const bool log_x = result.spec.axis == SweepAxis::PulseRate;

    double xmin = 1e300, xmax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const SweepRow& r : result.rows) {
        double xv = log_x ? std::log2(r.axis_value) : r.axis_value;
        xmin = std::min(xmin, xv);
        xmax = std::max(xmax, xv);
        for (double b : {r.estimate.ber, r.estimate.ci_low, r.estimate.ci_high,
                         r.analytic.value_or(0.0)})
            if (b > 0.0) {
                bmin = std::min(bmin, b);
                bmax = std::max(bmax, b);
            }
    }
    if (bmin > bmax) {  // nothing positive to plot
        bmin = 1e-6;
        bmax = 1.0;
    }
    double lmin = std::floor(std::log10(bmin));
    double lmax = std::ceil(std::log10(bmax));
    if (lmax <= lmin) lmax = lmin + 1.0;
    if (xmax <= xmin) xmax = xmin + 1.0;

    auto sx = [&](double v) {
        double xv = log_x ? std::log2(v) : v;
        return x0 + (xv - xmin) / (xmax - xmin) * (x1 - x0);
    };
    auto sy = [&](double b) {
        return y1 - (std::log10(b) - lmin) / (lmax - lmin) * (y1 - y0);
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " +
         fmt(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(x1 - x0) +
         "\" height=\"" + fmt(y1 - y0) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double e = lmin; e <= lmax + 1e-9; e += 1.0) {
        double y = sy(std::pow(10.0, e));
        s += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(x1) +
             "\" y2=\"" + fmt(y) + "\" stroke=\"#dddddd\"/>\n";
        char lab[32];
        std::snprintf(lab, sizeof lab, "1e%d", static_cast<int>(e));
        s += "<text x=\"" + fmt(x0 - 8) + "\" y=\"" + fmt(y + 4) +
             "\" font-size=\"12\" text-anchor=\"end\">" + lab + "</text>\n";
    }
    std::vector<double> xticks;
    for (const SweepRow& r : result.rows)
        if (std::find(xticks.begin(), xticks.end(), r.axis_value) == xticks.end())
            xticks.push_back(r.axis_value);
    std::sort(xticks.begin(), xticks.end());
    for (double v : xticks) {
        double x = sx(v);
        s += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x) +
             "\" y2=\"" + fmt(y1 + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y1 + 20) +
             "\" font-size=\"12\" text-anchor=\"middle\">" + detail::format_g(v) +
             "</text>\n";
    }
    s += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(height - 8) +
         "\" font-size=\"13\" text-anchor=\"middle\">" +
         std::string(to_string(result.spec.axis)) + "</text>\n";
    s += "<text x=\"16\" y=\"" + fmt((y0 + y1) / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt((y0 + y1) / 2) + ")\">BER</text>\n";

    // Series grouped by (detector, pulse rate); analytic dashed in the same
    // color.  Zero-BER points cannot be drawn on a log axis and are skipped.
    struct Key {
        DetectorKind det;
        int pr;
    };
    std::vector<Key> keys;
    for (const SweepRow& r : result.rows) {
        bool seen = false;
        for (const Key& k : keys) seen = seen || (k.det == r.detector && k.pr == r.pulse_rate);
        if (!seen && result.spec.axis != SweepAxis::PulseRate)
            keys.push_back({r.detector, r.pulse_rate});
    }
    if (result.spec.axis == SweepAxis::PulseRate)
        for (DetectorKind det : result.spec.detectors) keys.push_back({det, -1});

    int color_idx = 0;
    double legend_y = y0 + 14;
    for (const Key& key : keys) {
        const char* color = palette[color_idx % 6];
        ++color_idx;
        std::string pts, apts;
        for (const SweepRow& r : result.rows) {
            if (r.detector != key.det || (key.pr >= 0 && r.pulse_rate != key.pr)) continue;
            if (r.estimate.ber > 0.0)
                pts += fmt(sx(r.axis_value)) + "," + fmt(sy(r.estimate.ber)) + " ";
            if (r.analytic && *r.analytic > 0.0)
                apts += fmt(sx(r.axis_value)) + "," + fmt(sy(*r.analytic)) + " ";
            if (r.estimate.ci_low > 0.0 && r.estimate.ci_high > 0.0)
                s += "<line x1=\"" + fmt(sx(r.axis_value)) + "\" y1=\"" +
                     fmt(sy(r.estimate.ci_low)) + "\" x2=\"" + fmt(sx(r.axis_value)) +
                     "\" y2=\"" + fmt(sy(r.estimate.ci_high)) + "\" stroke=\"" + color +
                     "\" stroke-width=\"1\"/>\n";
            if (r.estimate.ber > 0.0)
                s += "<circle cx=\"" + fmt(sx(r.axis_value)) + "\" cy=\"" +
                     fmt(sy(r.estimate.ber)) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        }
        if (!pts.empty())
            s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
                 "\" stroke-width=\"1.5\"/>\n";
        if (!apts.empty())
            s += "<polyline points=\"" + apts + "\" fill=\"none\" stroke=\"" + color +
                 "\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>\n";
        std::string label = to_string(key.det);
        if (key.pr >= 0) label += " Nf=" + std::to_string(key.pr);
        s += "<text x=\"" + fmt(x1 - 150) + "\" y=\"" + fmt(legend_y) +
             "\" font-size=\"12\" fill=\"" + color + "\">" + label +
             (!apts.empty() ? " (dashed: analytic)" : "") + "</text>\n";
        legend_y += 16;
    }
    s += "<text x=\"" + fmt(x0) + "\" y=\"" + fmt(y0 - 12) + "\" font-size=\"14\">" +
         result.spec.name + "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace thir
