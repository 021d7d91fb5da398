#include "edgenilm/signalgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "edgenilm/error.hpp"

namespace edgenilm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Independent noise stream per schedule entry; entry 0 shares the caller's
// seed so a one-entry scenario reproduces synth_appliance.
std::uint64_t entry_seed(std::uint64_t seed, std::size_t entry) {
    return seed + 0x9E3779B97F4A7C15ULL * entry;
}

std::uint64_t sensor_seed(std::uint64_t seed) { return seed ^ 0xD1B54A32D192ED03ULL; }

double inrush_envelope(const ApplianceModel& m, double since_on) {
    if (m.inrush_ratio <= 1.0 || m.inrush_decay <= 0.0 || since_on >= m.inrush_decay) return 1.0;
    const double tail = std::exp(-5.0);
    const double shape = (std::exp(-5.0 * since_on / m.inrush_decay) - tail) / (1.0 - tail);
    return 1.0 + (m.inrush_ratio - 1.0) * shape;
}

void check_sampling(double fs, double highest_frequency) {
    if (!(fs > 0.0)) throw ConfigError("sampling rate must be positive");
    if (!(fs > 2.0 * highest_frequency)) {
        throw ConfigError("sampling rate " + std::to_string(fs) +
                          " Hz violates Nyquist for a " + std::to_string(highest_frequency) +
                          " Hz component");
    }
}

std::size_t sample_count(double duration, double fs) {
    return static_cast<std::size_t>(std::llround(duration * fs));
}

// First sample index at or after time t.
std::size_t first_sample_at(double t, double fs) {
    return static_cast<std::size_t>(std::max(0.0, std::ceil(t * fs - 1e-9)));
}

void fill_voltage(std::vector<double>& v, double fs, const Mains& mains) {
    const double peak = std::numbers::sqrt2 * mains.rms_voltage;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double t = static_cast<double>(k) / fs;
        v[k] = peak * std::sin(kTwoPi * mains.frequency * t);
    }
}

// Adds the model's current over samples [begin, end). Noise is drawn for
// every sample of the record so stream positions line up with sample index.
void add_appliance_current(std::vector<double>& current, const ApplianceModel& m, double fs,
                           const Mains& mains, std::size_t begin, std::size_t end,
                           bool with_inrush, std::uint64_t seed) {
    const double i1_peak =
        std::numbers::sqrt2 * m.rated_power / (mains.rms_voltage * m.power_factor);
    const double phi = std::acos(std::clamp(m.power_factor, 0.0, 1.0));
    const double w = kTwoPi * mains.frequency;
    const double t_on = static_cast<double>(begin) / fs;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool noisy = m.current_noise_sigma > 0.0;

    for (std::size_t k = 0; k < current.size(); ++k) {
        const double noise = noisy ? m.current_noise_sigma * gauss(rng) : 0.0;
        if (k < begin || k >= end) continue;
        const double t = static_cast<double>(k) / fs;
        const double theta = w * t - phi;
        double shape = std::sin(theta);
        for (const auto& h : m.harmonics) {
            shape += h.rel_amplitude * std::sin(h.order * theta + h.phase);
        }
        const double env = with_inrush ? inrush_envelope(m, t - t_on) : 1.0;
        current[k] += env * i1_peak * shape + noise;
    }
}

}  // namespace

const char* to_string(LoadKind kind) {
    switch (kind) {
        case LoadKind::resistive: return "resistive";
        case LoadKind::smps: return "smps";
        case LoadKind::motor: return "motor";
    }
    return "resistive";
}

LoadKind load_kind_from_string(const std::string& name) {
    if (name == "resistive") return LoadKind::resistive;
    if (name == "smps") return LoadKind::smps;
    if (name == "motor") return LoadKind::motor;
    throw ConfigError("unknown load kind '" + name + "'");
}

void ApplianceModel::validate() const {
    if (id.empty()) throw ConfigError("appliance id must not be empty");
    if (!(rated_power > 0.0)) throw ConfigError(id + ": rated_power must be > 0");
    if (!(power_factor > 0.0 && power_factor <= 1.0)) {
        throw ConfigError(id + ": power_factor must lie in (0, 1]");
    }
    if (!(inrush_ratio >= 1.0)) throw ConfigError(id + ": inrush_ratio must be >= 1");
    if (inrush_decay < 0.0) throw ConfigError(id + ": inrush_decay must be >= 0");
    if (current_noise_sigma < 0.0) throw ConfigError(id + ": noise sigma must be >= 0");
    for (const auto& h : harmonics) {
        if (h.order < 3 || h.order > 15 || h.order % 2 == 0) {
            throw ConfigError(id + ": harmonic orders must be odd and in [3, 15]");
        }
        if (h.rel_amplitude < 0.0 || h.rel_amplitude > 1.0) {
            throw ConfigError(id + ": harmonic amplitudes must lie in [0, 1]");
        }
    }
}

int ApplianceModel::highest_order() const {
    int order = 1;
    for (const auto& h : harmonics) order = std::max(order, h.order);
    return order;
}

void Schedule::validate() const {
    if (!(duration > 0.0)) throw ConfigError("schedule duration must be positive");
    if (!(mains.frequency > 0.0)) throw ConfigError("mains frequency must be positive");
    if (!(mains.rms_voltage > 0.0)) throw ConfigError("mains voltage must be positive");
    if (sensor_noise_sigma < 0.0) throw ConfigError("sensor noise sigma must be >= 0");
    for (const auto& e : entries) {
        if (!(e.t_on >= 0.0 && e.t_on < e.t_off && e.t_off <= duration)) {
            throw ConfigError("schedule entry '" + e.id + "' needs 0 <= t_on < t_off <= duration");
        }
    }
}

std::vector<std::string> WaveformPair::active_ids(std::size_t k) const {
    std::vector<std::string> ids;
    for (std::size_t b = 0; b < label_names.size(); ++b) {
        if (labels[k] & (1u << b)) ids.push_back(label_names[b]);
    }
    return ids;
}

double snap_to_zero_crossing(double t, double mains_frequency) {
    return std::round(t * mains_frequency) / mains_frequency;
}

WaveformPair synth_appliance(const ApplianceModel& model, double duration, double fs,
                             std::uint64_t seed, const Mains& mains) {
    model.validate();
    if (!(duration > 0.0)) throw ConfigError("duration must be positive");
    check_sampling(fs, model.highest_order() * mains.frequency);

    const std::size_t n = sample_count(duration, fs);
    WaveformPair w;
    w.fs = fs;
    w.v.assign(n, 0.0);
    w.i.assign(n, 0.0);
    w.labels.assign(n, 1u);
    w.label_names = {model.id};
    fill_voltage(w.v, fs, mains);
    add_appliance_current(w.i, model, fs, mains, 0, n, true, seed);
    return w;
}

WaveformPair synth_scenario(const std::vector<ApplianceModel>& models, const Schedule& schedule,
                            double fs, std::uint64_t seed) {
    schedule.validate();
    if (models.size() > 32) throw ConfigError("at most 32 appliance models per scenario");
    for (const auto& m : models) m.validate();

    double highest = schedule.mains.frequency;
    std::vector<std::size_t> model_of_entry;
    for (const auto& e : schedule.entries) {
        auto it = std::find_if(models.begin(), models.end(),
                               [&](const ApplianceModel& m) { return m.id == e.id; });
        if (it == models.end()) throw ConfigError("unknown appliance id '" + e.id + "'");
        model_of_entry.push_back(static_cast<std::size_t>(it - models.begin()));
        highest = std::max(highest, it->highest_order() * schedule.mains.frequency);
    }
    check_sampling(fs, highest);

    const std::size_t n = sample_count(schedule.duration, fs);
    WaveformPair w;
    w.fs = fs;
    w.v.assign(n, 0.0);
    w.i.assign(n, 0.0);
    w.labels.assign(n, 0u);
    for (const auto& m : models) w.label_names.push_back(m.id);
    fill_voltage(w.v, fs, schedule.mains);

    for (std::size_t e = 0; e < schedule.entries.size(); ++e) {
        const auto& entry = schedule.entries[e];
        const auto& model = models[model_of_entry[e]];
        const double f0 = schedule.mains.frequency;
        const std::size_t begin =
            std::min(n, first_sample_at(snap_to_zero_crossing(entry.t_on, f0), fs));
        const std::size_t end =
            entry.t_off >= schedule.duration
                ? n
                : std::min(n, first_sample_at(snap_to_zero_crossing(entry.t_off, f0), fs));
        add_appliance_current(w.i, model, fs, schedule.mains, begin, end, !entry.steady,
                              entry_seed(seed, e));
        const std::uint32_t bit = 1u << model_of_entry[e];
        for (std::size_t k = begin; k < end; ++k) w.labels[k] |= bit;
    }

    if (schedule.sensor_noise_sigma > 0.0) {
        std::mt19937_64 rng(sensor_seed(seed));
        std::normal_distribution<double> gauss(0.0, schedule.sensor_noise_sigma);
        for (auto& x : w.i) x += gauss(rng);
    }
    return w;
}

const std::vector<ApplianceModel>& default_presets() {
    static const std::vector<ApplianceModel> presets = [] {
        const double pi = std::numbers::pi;
        std::vector<ApplianceModel> p;
        // Rectifier front end: in-phase-at-peak odd harmonics give a peaky current.
        p.push_back({"laptop", LoadKind::smps, 90.0, 0.95,
                     {{3, 0.60, pi}, {5, 0.35, 0.0}, {7, 0.20, pi}, {9, 0.10, 0.0}, {11, 0.05, pi}},
                     2.0, 0.05, 0.005});
        p.push_back({"refrigerator", LoadKind::motor, 150.0, 0.65,
                     {{3, 0.06, 0.3}, {5, 0.02, 0.0}}, 5.0, 0.30, 0.01});
        p.push_back({"washing_machine", LoadKind::motor, 500.0, 0.72,
                     {{3, 0.08, 0.5}, {5, 0.03, 0.2}}, 3.5, 0.25, 0.02});
        p.push_back({"hairdryer", LoadKind::resistive, 1200.0, 1.0, {}, 1.0, 0.0, 0.02});
        p.push_back({"lamp", LoadKind::resistive, 60.0, 1.0, {}, 1.0, 0.0, 0.005});
        return p;
    }();
    return presets;
}

const ApplianceModel& find_model(const std::vector<ApplianceModel>& models, const std::string& id) {
    for (const auto& m : models) {
        if (m.id == id) return m;
    }
    throw ConfigError("unknown appliance id '" + id + "'");
}

}  // namespace edgenilm
