// scenario.hpp - plain-text experiment descriptions and the built-in set.
//
// A scenario file is `key = value` lines with '#' comments.  The same keys are
// accepted as command-line overrides, which win over the file.  Parse errors
// carry line and column.

#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "thir/channel.hpp"
#include "thir/config.hpp"
#include "thir/detectors.hpp"
#include "thir/montecarlo.hpp"

namespace thir {

struct ParseError : std::runtime_error {
    int line = 0;
    int col = 0;

    ParseError(const std::string& what, int line_, int col_)
        : std::runtime_error(what), line(line_), col(col_) {}
};

// A validated sweep request: base system, detectors, one swept axis, optional
// outer pulse-rate loop, trial counts, seed and output paths.
struct ExperimentSpec {
    std::string name;
    Coding coding = Coding::Coded;
    int total_gain = 0;
    int base_pulse_rate = 0;
    int num_users = 0;
    double noise_sigma = 1.0;
    double snr_db = 6.0;
    std::vector<double> snr_offsets_db;  // per user, resized with trailing zeros
    std::optional<ChannelImpulseResponse> channel;
    std::vector<DetectorKind> detectors;
    SweepAxis axis = SweepAxis::PulseRate;
    std::vector<double> values;
    std::vector<int> pulse_rates;  // outer loop when axis != pulse_rate
    std::uint64_t trials = 1000000;
    std::uint64_t ml_trials = 100000;
    std::uint64_t max_errors = 2000;  // 0 disables early stopping
    std::uint64_t seed = 1;
    bool analytic = true;
    int target_user = 0;
    std::string csv_path;
    std::string svg_path;

    // Energy of user k at the spec's base SNR.
    double energy_of(int user) const {
        double off = user < static_cast<int>(snr_offsets_db.size())
                         ? snr_offsets_db[static_cast<std::size_t>(user)]
                         : 0.0;
        return snr_to_energy(snr_db + off, noise_sigma);
    }

    SystemConfig base_config() const {
        SystemConfig c;
        c.total_gain = total_gain;
        c.pulses_per_symbol = base_pulse_rate;
        c.chips_per_frame = base_pulse_rate ? total_gain / base_pulse_rate : 0;
        c.num_users = num_users;
        for (int k = 0; k < num_users; ++k) c.energies.push_back(energy_of(k));
        c.noise_sigma = noise_sigma;
        c.coding = coding;
        return c;
    }

    void validate() const {
        SystemConfig c = base_config();
        c.validate();
        if (total_gain % base_pulse_rate != 0)
            throw std::invalid_argument("scenario: pulse_rate must divide total_gain");
        if (channel) channel->validate();
        if (detectors.empty()) throw std::invalid_argument("scenario: no detectors listed");
        if (values.empty()) throw std::invalid_argument("scenario: no sweep values listed");
        if (target_user < 0 || target_user >= num_users)
            throw std::invalid_argument("scenario: target_user out of range");
        for (int pr : pulse_rates)
            (void)c.with_pulse_rate(pr);  // throws with the divisor list
        if (axis == SweepAxis::PulseRate)
            for (double v : values) (void)c.with_pulse_rate(static_cast<int>(v));
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct KeyValue {
    std::string value;
    int line = 0;
    int col = 0;
};

inline double parse_number(const std::string& v, const KeyValue& kv, const char* key) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return d;
    } catch (const std::exception&) {
        throw ParseError(std::string("invalid number for '") + key + "': " + v, kv.line,
                         kv.col);
    }
}

inline std::uint64_t parse_count(const std::string& v, const KeyValue& kv, const char* key) {
    double d = parse_number(v, kv, key);
    if (d < 0 || d != std::floor(d))
        throw ParseError(std::string("'") + key + "' must be a nonnegative integer", kv.line,
                         kv.col);
    return static_cast<std::uint64_t>(d);
}

inline bool parse_flag(const std::string& v, const KeyValue& kv, const char* key) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ParseError(std::string("'") + key + "' expects on/off", kv.line, kv.col);
}

inline DetectorKind parse_detector(const std::string& v, const KeyValue& kv) {
    if (v == "mf") return DetectorKind::MF;
    if (v == "zf") return DetectorKind::ZF;
    if (v == "mmse") return DetectorKind::MMSE;
    if (v == "ml") return DetectorKind::ML;
    throw ParseError("unknown detector '" + v + "' (mf, zf, mmse, ml)", kv.line, kv.col);
}

}  // namespace detail

// Builds a spec from an ordered key/value map; shared by file parsing and
// command-line overrides so the override grammar is exactly the file grammar.
inline ExperimentSpec build_experiment_spec(
    const std::map<std::string, detail::KeyValue>& kvs) {
    using detail::KeyValue;
    ExperimentSpec spec;
    auto get = [&](const char* key) -> const KeyValue* {
        auto it = kvs.find(key);
        return it == kvs.end() ? nullptr : &it->second;
    };
    auto require = [&](const char* key) -> const KeyValue& {
        const KeyValue* kv = get(key);
        if (!kv) throw ParseError(std::string("missing required key '") + key + "'", 0, 0);
        return *kv;
    };

    static const char* known[] = {"name",       "coding",     "total_gain",
                                  "pulse_rate", "num_users",  "noise_sigma",
                                  "snr_db",     "snr_offsets_db", "channel",
                                  "detectors",  "axis",       "values",
                                  "pulse_rates", "trials",    "ml_trials",
                                  "max_errors", "seed",       "analytic",
                                  "target_user", "csv",       "svg"};
    for (const auto& [key, kv] : kvs) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParseError("unknown key '" + key + "'", kv.line, kv.col);
    }

    spec.name = require("name").value;
    {
        const KeyValue& kv = require("coding");
        if (kv.value == "coded") spec.coding = Coding::Coded;
        else if (kv.value == "uncoded") spec.coding = Coding::Uncoded;
        else throw ParseError("coding must be 'coded' or 'uncoded'", kv.line, kv.col);
    }
    spec.total_gain =
        static_cast<int>(detail::parse_count(require("total_gain").value,
                                             require("total_gain"), "total_gain"));
    spec.base_pulse_rate =
        static_cast<int>(detail::parse_count(require("pulse_rate").value,
                                             require("pulse_rate"), "pulse_rate"));
    spec.num_users = static_cast<int>(
        detail::parse_count(require("num_users").value, require("num_users"), "num_users"));
    if (const auto* kv = get("noise_sigma"))
        spec.noise_sigma = detail::parse_number(kv->value, *kv, "noise_sigma");
    if (const auto* kv = get("snr_db"))
        spec.snr_db = detail::parse_number(kv->value, *kv, "snr_db");
    if (const auto* kv = get("snr_offsets_db")) {
        for (const std::string& tok : detail::split_list(kv->value))
            spec.snr_offsets_db.push_back(detail::parse_number(tok, *kv, "snr_offsets_db"));
    }
    if (const auto* kv = get("channel")) {
        if (kv->value != "flat") {
            ChannelImpulseResponse h;
            for (const std::string& tok : detail::split_list(kv->value))
                h.taps.push_back(detail::parse_number(tok, *kv, "channel"));
            if (h.taps.empty() || h.taps[0] == 0.0)
                throw ParseError("channel taps need a nonzero leading tap", kv->line,
                                 kv->col);
            spec.channel = h;
        }
    }
    {
        const KeyValue& kv = require("detectors");
        for (const std::string& tok : detail::split_list(kv.value))
            spec.detectors.push_back(detail::parse_detector(tok, kv));
    }
    {
        const KeyValue& kv = require("axis");
        if (kv.value == "pulse_rate") spec.axis = SweepAxis::PulseRate;
        else if (kv.value == "snr_db") spec.axis = SweepAxis::SnrDb;
        else if (kv.value == "num_users") spec.axis = SweepAxis::NumUsers;
        else throw ParseError("axis must be pulse_rate, snr_db or num_users", kv.line,
                              kv.col);
    }
    {
        const KeyValue& kv = require("values");
        for (const std::string& tok : detail::split_list(kv.value))
            spec.values.push_back(detail::parse_number(tok, kv, "values"));
        if (spec.values.empty()) throw ParseError("empty values list", kv.line, kv.col);
    }
    if (const auto* kv = get("pulse_rates")) {
        for (const std::string& tok : detail::split_list(kv->value))
            spec.pulse_rates.push_back(
                static_cast<int>(detail::parse_count(tok, *kv, "pulse_rates")));
    }
    if (spec.pulse_rates.empty()) spec.pulse_rates = {spec.base_pulse_rate};
    if (const auto* kv = get("trials"))
        spec.trials = detail::parse_count(kv->value, *kv, "trials");
    spec.ml_trials = spec.trials;
    if (const auto* kv = get("ml_trials"))
        spec.ml_trials = detail::parse_count(kv->value, *kv, "ml_trials");
    if (const auto* kv = get("max_errors"))
        spec.max_errors = detail::parse_count(kv->value, *kv, "max_errors");
    if (const auto* kv = get("seed")) spec.seed = detail::parse_count(kv->value, *kv, "seed");
    if (const auto* kv = get("analytic"))
        spec.analytic = detail::parse_flag(kv->value, *kv, "analytic");
    if (const auto* kv = get("target_user"))
        spec.target_user =
            static_cast<int>(detail::parse_count(kv->value, *kv, "target_user"));
    if (const auto* kv = get("csv")) spec.csv_path = kv->value;
    if (const auto* kv = get("svg")) spec.svg_path = kv->value;
    return spec;
}

inline std::map<std::string, detail::KeyValue> parse_key_values(std::string_view text) {
    std::map<std::string, detail::KeyValue> kvs;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view raw = text.substr(pos, eol - pos);
        ++line_no;
        std::string line(raw);
        if (std::size_t hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        std::string stripped = detail::trim(line);
        if (!stripped.empty()) {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected 'key = value'", line_no, 1);
            std::string key = detail::trim(line.substr(0, eq));
            std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw ParseError("empty key", line_no, 1);
            if (value.empty())
                throw ParseError("empty value for '" + key + "'", line_no,
                                 static_cast<int>(eq) + 2);
            if (kvs.count(key))
                throw ParseError("duplicate key '" + key + "'", line_no, 1);
            kvs[key] = {value, line_no, static_cast<int>(eq) + 2};
        }
        if (eol == text.size()) break;
        pos = eol + 1;
    }
    return kvs;
}

// Parses scenario text, then applies "key=value" overrides (override wins).
inline ExperimentSpec parse_experiment_spec(std::string_view text,
                                            const std::vector<std::string>& overrides = {}) {
    auto kvs = parse_key_values(text);
    for (const std::string& ov : overrides) {
        std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParseError("override must be key=value: '" + ov + "'", 0, 0);
        std::string key = detail::trim(ov.substr(0, eq));
        std::string value = detail::trim(ov.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("override must be key=value: '" + ov + "'", 0, 0);
        kvs[key] = {value, 0, 0};
    }
    return build_experiment_spec(kvs);
}

// Built-in scenarios.  Parameters stated by the source material are pinned;
// trial counts, seeds and sweep grids are artifact choices documented here.
inline const std::vector<std::pair<std::string, std::string>>& builtin_scenarios() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"fig1a", R"(# Two equal-power coded users, flat channel, BER vs pulse rate.
name = fig1a
coding = coded
total_gain = 128
pulse_rate = 8
num_users = 2
noise_sigma = 1.0
snr_db = 6
detectors = mf ml
axis = pulse_rate
values = 1 2 4 8 16 32 64 128
trials = 1000000
ml_trials = 100000
seed = 1001
analytic = on
max_errors = 2000
)"},
        {"fig1b", R"(# Two unequal coded users (5 dB and 8 dB), flat channel, BER vs pulse rate.
name = fig1b
coding = coded
total_gain = 128
pulse_rate = 8
num_users = 2
noise_sigma = 1.0
snr_db = 5
snr_offsets_db = 0 3
detectors = mf ml
axis = pulse_rate
values = 1 2 4 8 16 32 64 128
trials = 1000000
ml_trials = 100000
seed = 1001
analytic = on
max_errors = 2000
)"},
        {"fig2", R"(# Three coded users (one 3 dB hotter) on h = [1 0.9 0.8]; MF BER vs SNR
# for a low pulse rate system (Nf = 32) and the full-spreading system (Nf = 128).
name = fig2
coding = coded
total_gain = 128
pulse_rate = 32
num_users = 3
noise_sigma = 1.0
snr_db = 6
snr_offsets_db = 0 3 0
channel = 1 0.9 0.8
detectors = mf
axis = snr_db
values = 0 1 2 3 4 5 6 7 8 9 10
pulse_rates = 32 128
trials = 1000000
seed = 1002
analytic = on
max_errors = 2000
)"},
        {"fig3", R"(# Joint ML detection on h = [1 0.9 0.8], equal-power users at 6 dB;
# BER vs number of users for Nf = 16 and Nf = 128.
name = fig3
coding = coded
total_gain = 128
pulse_rate = 16
num_users = 2
noise_sigma = 1.0
snr_db = 6
channel = 1 0.9 0.8
detectors = ml
axis = num_users
values = 2 3 4 5 6 7 8 9 10
pulse_rates = 16 128
trials = 100000
seed = 1003
analytic = off
max_errors = 2000
)"},
        {"fig3_4db", R"(# fig3 at 4 dB.
name = fig3_4db
coding = coded
total_gain = 128
pulse_rate = 16
num_users = 2
noise_sigma = 1.0
snr_db = 4
channel = 1 0.9 0.8
detectors = ml
axis = num_users
values = 2 3 4 5 6 7 8 9 10
pulse_rates = 16 128
trials = 100000
seed = 1003
analytic = off
max_errors = 2000
)"},
        {"fig4", R"(# Joint ML detection, six equal-power coded users on h = [1 0.9 0.8];
# BER vs SNR for Nf in {8, 32, 128}.
name = fig4
coding = coded
total_gain = 128
pulse_rate = 8
num_users = 6
noise_sigma = 1.0
snr_db = 6
channel = 1 0.9 0.8
detectors = ml
axis = snr_db
values = 0 2 4 6 8
pulse_rates = 8 32 128
trials = 100000
seed = 1004
analytic = off
max_errors = 2000
)"},
    };
    return table;
}

inline const std::string* find_builtin_scenario(const std::string& name) {
    for (const auto& [n, text] : builtin_scenarios())
        if (n == name) return &text;
    return nullptr;
}

}  // namespace thir
